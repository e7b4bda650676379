//! The situation tree: named situations related by ownership, subtype,
//! subsituation, and subchunk links, each carrying its own infons,
//! constraints, and equality classes.

use std::collections::HashMap;

use crate::expr::Expr;
use crate::terms::EqualityStore;

/// Index into the store's situation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SituationId(pub usize);

/// Which way a conditional constraint fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
    Both,
}

/// A conditional constraint attached to a situation.
///
/// `trigger` is the head infon; `body` the conjunction of conditions.
/// Forward constraints fire when an infon matching the trigger is asserted;
/// backward constraints answer queries matching the trigger.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub direction: Direction,
    pub trigger: Expr,
    pub body: Vec<Expr>,
    /// The situation the constraint was installed in.
    pub home: SituationId,
    /// The original written form, for retraction and listing.
    pub source: Expr,
}

#[derive(Debug, Clone)]
pub struct SituationRecord {
    pub name: String,
    pub owner: Option<SituationId>,
    /// Explicit infons, in assertion order.
    pub infons: Vec<Expr>,
    pub constraints: Vec<Constraint>,
    /// Situations this one inherits infons and constraints from (`@<`).
    pub subtype_sources: Vec<SituationId>,
    /// Situations this one inherits infons only from (`<--`).
    pub subsit_sources: Vec<SituationId>,
    /// Situations that totally describe this one (`[_ this other`): every
    /// infon here is reflected as `(!= this infon)` in each of them.
    pub superchunks: Vec<SituationId>,
    pub equalities: EqualityStore,
}

/// All situations, rooted at `top`.
#[derive(Debug)]
pub struct Store {
    sits: Vec<SituationRecord>,
    by_name: HashMap<(SituationId, String), SituationId>,
    version: u64,
    merged_eq_cache: HashMap<SituationId, (u64, EqualityStore)>,
}

impl Default for Store {
    fn default() -> Self {
        Self::new()
    }
}

impl Store {
    pub fn new() -> Self {
        let mut store = Store {
            sits: Vec::new(),
            by_name: HashMap::new(),
            version: 0,
            merged_eq_cache: HashMap::new(),
        };
        store.sits.push(SituationRecord {
            name: "top".to_string(),
            owner: None,
            infons: Vec::new(),
            constraints: Vec::new(),
            subtype_sources: Vec::new(),
            subsit_sources: Vec::new(),
            superchunks: Vec::new(),
            equalities: EqualityStore::new(),
        });
        store
    }

    pub fn root(&self) -> SituationId {
        SituationId(0)
    }

    pub fn get(&self, id: SituationId) -> &SituationRecord {
        &self.sits[id.0]
    }

    pub fn get_mut(&mut self, id: SituationId) -> &mut SituationRecord {
        self.version += 1;
        &mut self.sits[id.0]
    }

    pub fn len(&self) -> usize {
        self.sits.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn name(&self, id: SituationId) -> &str {
        &self.sits[id.0].name
    }

    /// Child by name under `owner`, creating it if absent.
    pub fn child(&mut self, owner: SituationId, name: &str) -> SituationId {
        let key = (owner, name.to_string());
        if let Some(&id) = self.by_name.get(&key) {
            return id;
        }
        let id = SituationId(self.sits.len());
        self.sits.push(SituationRecord {
            name: name.to_string(),
            owner: Some(owner),
            infons: Vec::new(),
            constraints: Vec::new(),
            subtype_sources: Vec::new(),
            subsit_sources: Vec::new(),
            superchunks: Vec::new(),
            equalities: EqualityStore::new(),
        });
        self.by_name.insert(key, id);
        self.version += 1;
        id
    }

    /// Existing child by name, if any.
    pub fn lookup_child(&self, owner: SituationId, name: &str) -> Option<SituationId> {
        self.by_name.get(&(owner, name.to_string())).copied()
    }

    /// Resolve a situation name as seen from `from`.
    ///
    /// `top` always names the root. Otherwise the name is looked up among
    /// the children of `from`, then of each of its owners in turn; if no
    /// situation of that name is visible, a fresh child of `from` is made.
    /// A situation's own name refers to itself at each step, so `(in a)`
    /// followed by talk about `a` stays put.
    pub fn resolve_from(&mut self, from: SituationId, name: &str) -> SituationId {
        if name == "top" {
            return self.root();
        }
        let mut cur = Some(from);
        while let Some(id) = cur {
            if self.sits[id.0].name == name {
                return id;
            }
            if let Some(found) = self.lookup_child(id, name) {
                return found;
            }
            cur = self.sits[id.0].owner;
        }
        self.child(from, name)
    }

    /// Like `resolve_from`, but never creates: queries must not grow the
    /// tree as a side effect.
    pub fn lookup_from(&self, from: SituationId, name: &str) -> Option<SituationId> {
        if name == "top" {
            return Some(self.root());
        }
        let mut cur = Some(from);
        while let Some(id) = cur {
            if self.sits[id.0].name == name {
                return Some(id);
            }
            if let Some(found) = self.lookup_child(id, name) {
                return Some(found);
            }
            cur = self.sits[id.0].owner;
        }
        None
    }

    /// Full `/`-separated path of a situation from the root.
    pub fn path(&self, id: SituationId) -> String {
        let mut parts = Vec::new();
        let mut cur = Some(id);
        while let Some(i) = cur {
            parts.push(self.sits[i.0].name.clone());
            cur = self.sits[i.0].owner;
        }
        parts.reverse();
        parts.join("/")
    }

    /// Is `ancestor` on the owner chain of `id` (or equal to it)?
    pub fn is_ancestor(&self, ancestor: SituationId, id: SituationId) -> bool {
        let mut cur = Some(id);
        while let Some(i) = cur {
            if i == ancestor {
                return true;
            }
            cur = self.sits[i.0].owner;
        }
        false
    }

    /// Record an explicit infon, skipping structural duplicates.
    pub fn add_infon(&mut self, id: SituationId, infon: Expr) -> bool {
        if self.sits[id.0].infons.contains(&infon) {
            return false;
        }
        self.version += 1;
        self.sits[id.0].infons.push(infon);
        true
    }

    pub fn remove_infon(&mut self, id: SituationId, infon: &Expr) -> bool {
        let rec = &mut self.sits[id.0];
        if let Some(pos) = rec.infons.iter().position(|i| i == infon) {
            rec.infons.remove(pos);
            self.version += 1;
            true
        } else {
            false
        }
    }

    pub fn clear_infons(&mut self, id: SituationId) {
        self.version += 1;
        let rec = &mut self.sits[id.0];
        rec.infons.clear();
        rec.equalities = EqualityStore::new();
    }

    pub fn add_subtype(&mut self, sub: SituationId, sup: SituationId) {
        if sub != sup && !self.sits[sub.0].subtype_sources.contains(&sup) {
            self.version += 1;
            self.sits[sub.0].subtype_sources.push(sup);
        }
    }

    pub fn add_subsit(&mut self, sub: SituationId, sup: SituationId) {
        if sub != sup && !self.sits[sub.0].subsit_sources.contains(&sup) {
            self.version += 1;
            self.sits[sub.0].subsit_sources.push(sup);
        }
    }

    /// `[_ described describer`: `describer` totally describes `described`.
    /// Self-subchunks are allowed; they give a situation a complete view of
    /// itself (the tower of `(!= s ...)` reflections).
    pub fn add_subchunk(&mut self, described: SituationId, describer: SituationId) {
        if !self.sits[described.0].superchunks.contains(&describer) {
            self.version += 1;
            self.sits[described.0].superchunks.push(describer);
        }
    }

    /// All situations whose infons are visible from `s`: itself first, then
    /// subsituation and subtype sources in link order, transitively.
    pub fn visible_sources(&self, s: SituationId) -> Vec<SituationId> {
        let mut out = Vec::new();
        let mut stack = vec![s];
        while let Some(id) = stack.pop() {
            if out.contains(&id) {
                continue;
            }
            out.push(id);
            let rec = &self.sits[id.0];
            // Push in reverse so link order is preserved by the stack.
            for &src in rec
                .subsit_sources
                .iter()
                .chain(rec.subtype_sources.iter())
                .rev()
            {
                if !out.contains(&src) {
                    stack.push(src);
                }
            }
        }
        out
    }

    /// Constraints respected by `s`: its own plus those of subtype sources,
    /// transitively. Subsituations contribute infons only.
    pub fn respected_constraints(&self, s: SituationId) -> Vec<Constraint> {
        let mut seen = Vec::new();
        let mut out = Vec::new();
        let mut stack = vec![s];
        while let Some(id) = stack.pop() {
            if seen.contains(&id) {
                continue;
            }
            seen.push(id);
            out.extend(self.sits[id.0].constraints.iter().cloned());
            for &src in self.sits[id.0].subtype_sources.iter().rev() {
                if !seen.contains(&src) {
                    stack.push(src);
                }
            }
        }
        out
    }

    /// Merged equality classes visible from `s`, cached per store version.
    pub fn merged_eq(&mut self, s: SituationId) -> EqualityStore {
        if let Some((ver, eq)) = self.merged_eq_cache.get(&s) {
            if *ver == self.version {
                return eq.clone();
            }
        }
        let sources = self.visible_sources(s);
        let mut merged = EqualityStore::new();
        for src in sources {
            merged.absorb(&self.sits[src.0].equalities);
        }
        let version = self.version;
        self.merged_eq_cache.insert(s, (version, merged.clone()));
        merged
    }

    /// A content digest of the whole tree, for purity checks in tests.
    pub fn fingerprint(&self) -> u64 {
        use std::collections::hash_map::DefaultHasher;
        use std::hash::{Hash, Hasher};
        let mut h = DefaultHasher::new();
        for (i, rec) in self.sits.iter().enumerate() {
            i.hash(&mut h);
            rec.name.hash(&mut h);
            rec.owner.map(|o| o.0).hash(&mut h);
            for inf in &rec.infons {
                inf.to_string().hash(&mut h);
            }
            for c in &rec.constraints {
                c.source.to_string().hash(&mut h);
            }
            for link in rec
                .subtype_sources
                .iter()
                .chain(&rec.subsit_sources)
                .chain(&rec.superchunks)
            {
                link.0.hash(&mut h);
            }
            for (a, b) in rec.equalities.ops() {
                a.to_string().hash(&mut h);
                b.to_string().hash(&mut h);
            }
        }
        h.finish()
    }
}
