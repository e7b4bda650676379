//! Bindings, unification, and situated equality classes.
//!
//! Two different identifications of terms live here:
//!
//! * V-unification: query-time matching of variables against terms, with a
//!   trail so the solver can rewind on backtracking. Distinct parameters
//!   never V-unify on their own.
//! * P-unification: assertional identification of parameters (`(= cicero
//!   tully)`), kept per situation as union-find equality classes. Equality
//!   classes feed back into V-unification: two parameters match when the
//!   active class store says they are equal.

use std::collections::HashMap;

use crate::expr::Expr;

/// Maximum nesting depth tolerated while substituting, as a cycle guard.
const SUBST_DEPTH_LIMIT: usize = 4096;

/// Variable bindings with an undo trail.
#[derive(Debug, Default)]
pub struct BindingEnv {
    map: HashMap<String, Expr>,
    trail: Vec<String>,
}

/// A position in the trail; rewinding to it undoes later bindings.
pub type Checkpoint = usize;

impl BindingEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn checkpoint(&self) -> Checkpoint {
        self.trail.len()
    }

    pub fn undo_to(&mut self, cp: Checkpoint) {
        while self.trail.len() > cp {
            let name = self.trail.pop().unwrap();
            self.map.remove(&name);
        }
    }

    pub fn lookup(&self, name: &str) -> Option<&Expr> {
        self.map.get(name)
    }

    pub fn bind(&mut self, name: &str, value: Expr) {
        debug_assert!(!self.map.contains_key(name));
        self.map.insert(name.to_string(), value);
        self.trail.push(name.to_string());
    }

    /// Follow variable links until hitting a non-variable or an unbound one.
    pub fn walk<'a>(&'a self, term: &'a Expr) -> &'a Expr {
        let mut cur = term;
        let mut steps = 0;
        while let Expr::Var(name) = cur {
            match self.map.get(name) {
                Some(next) => {
                    cur = next;
                    steps += 1;
                    if steps > SUBST_DEPTH_LIMIT {
                        return cur;
                    }
                }
                None => return cur,
            }
        }
        cur
    }

    /// Fully apply the current bindings to a term. Unbound variables stay.
    pub fn substitute(&self, term: &Expr) -> Expr {
        self.subst_depth(term, 0)
    }

    fn subst_depth(&self, term: &Expr, depth: usize) -> Expr {
        if depth > SUBST_DEPTH_LIMIT {
            return term.clone();
        }
        match self.walk(term) {
            Expr::List(items) => Expr::List(
                items
                    .iter()
                    .map(|t| self.subst_depth(t, depth + 1))
                    .collect(),
            ),
            other => other.clone(),
        }
    }
}

/// Union-find over ground terms, recording assertional identifications.
///
/// Merges are logged so that stores from several situations can be replayed
/// into one view in a deterministic order. Identifying two distinct
/// non-parameter constants poisons the store: the equalities are then
/// unsatisfiable and the owning situation counts as incoherent.
#[derive(Debug, Clone, Default)]
pub struct EqualityStore {
    parent: HashMap<Expr, Expr>,
    ops: Vec<(Expr, Expr)>,
    poisoned: Option<(Expr, Expr)>,
}

impl EqualityStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// The pair of conflicting constants, if any identification collapsed
    /// two distinct constants into one class.
    pub fn poison(&self) -> Option<&(Expr, Expr)> {
        self.poisoned.as_ref()
    }

    pub fn ops(&self) -> &[(Expr, Expr)] {
        &self.ops
    }

    fn find(&self, term: &Expr) -> Expr {
        let mut cur = term.clone();
        while let Some(next) = self.parent.get(&cur) {
            cur = next.clone();
        }
        cur
    }

    /// Class representative. Parameters defer to constants so that asking
    /// "what is this parameter equal to" surfaces the concrete value.
    pub fn representative(&self, term: &Expr) -> Expr {
        self.find(term)
    }

    pub fn same_class(&self, a: &Expr, b: &Expr) -> bool {
        self.find(a) == self.find(b)
    }

    /// Identify two ground terms. Records the merge for replay.
    pub fn merge(&mut self, a: &Expr, b: &Expr) {
        self.ops.push((a.clone(), b.clone()));
        self.apply_merge(a, b);
    }

    fn apply_merge(&mut self, a: &Expr, b: &Expr) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        // Prefer a constant representative; with two constants, keep the
        // smaller one and mark the store inconsistent.
        let (child, root) = match (ra.is_const(), rb.is_const()) {
            (true, true) => {
                if self.poisoned.is_none() {
                    self.poisoned = Some((ra.clone(), rb.clone()));
                }
                if ra <= rb {
                    (rb, ra)
                } else {
                    (ra, rb)
                }
            }
            (true, false) => (rb, ra),
            (false, true) => (ra, rb),
            (false, false) => {
                if ra <= rb {
                    (rb, ra)
                } else {
                    (ra, rb)
                }
            }
        };
        self.parent.insert(child, root);
    }

    /// Replay another store's identifications into this one.
    pub fn absorb(&mut self, other: &EqualityStore) {
        for (a, b) in other.ops.clone() {
            self.merge(&a, &b);
        }
    }
}

trait ConstLike {
    fn is_const(&self) -> bool;
}

impl ConstLike for Expr {
    fn is_const(&self) -> bool {
        matches!(self, Expr::Num(_) | Expr::Text(_))
    }
}

/// V-unify two terms under `env`, consulting `eq` for parameter identity.
///
/// On failure the environment is rewound to its state at entry, so callers
/// may use the boolean result directly without their own checkpointing.
pub fn v_unify(env: &mut BindingEnv, eq: &EqualityStore, a: &Expr, b: &Expr) -> bool {
    let cp = env.checkpoint();
    if unify_inner(env, eq, a, b) {
        true
    } else {
        env.undo_to(cp);
        false
    }
}

/// Dereference through variable bindings, cloning only when the walk
/// actually moved (cloning at every level makes deep unification quadratic).
fn deref_term<'t>(env: &BindingEnv, t: &'t Expr, slot: &'t mut Option<Expr>) -> &'t Expr {
    let walked = env.walk(t);
    if std::ptr::eq(walked, t) {
        t
    } else {
        *slot = Some(walked.clone());
        slot.as_ref().unwrap()
    }
}

fn unify_inner(env: &mut BindingEnv, eq: &EqualityStore, a: &Expr, b: &Expr) -> bool {
    let mut slot_a = None;
    let mut slot_b = None;
    let wa = deref_term(env, a, &mut slot_a);
    let wb = deref_term(env, b, &mut slot_b);
    match (wa, wb) {
        (Expr::Var(x), Expr::Var(y)) => {
            if x != y {
                let (name, val) = (x.clone(), wb.clone());
                env.bind(&name, val);
            }
            true
        }
        (Expr::Var(x), _) => {
            let (name, val) = (x.clone(), wb.clone());
            env.bind(&name, val);
            true
        }
        (_, Expr::Var(y)) => {
            let (name, val) = (y.clone(), wa.clone());
            env.bind(&name, val);
            true
        }
        (Expr::List(xs), Expr::List(ys)) => {
            if xs.len() != ys.len() {
                return false;
            }
            for i in 0..xs.len() {
                if !unify_inner(env, eq, &xs[i], &ys[i]) {
                    return false;
                }
            }
            true
        }
        (Expr::List(_), _) | (_, Expr::List(_)) => false,
        _ => wa == wb || eq.same_class(wa, wb),
    }
}

/// P-unify: the assertional counterpart. Ground atoms are identified in the
/// equality store; terms with structure are identified pointwise. Returns
/// false when the shapes cannot be reconciled.
pub fn p_unify(eq: &mut EqualityStore, a: &Expr, b: &Expr) -> bool {
    match (a, b) {
        (Expr::List(xs), Expr::List(ys)) => {
            if xs.len() != ys.len() {
                return false;
            }
            xs.iter().zip(ys).all(|(x, y)| p_unify(eq, x, y))
        }
        (Expr::List(_), _) | (_, Expr::List(_)) => false,
        (Expr::Var(_), _) | (_, Expr::Var(_)) => false,
        _ => {
            if a != b {
                eq.merge(a, b);
            }
            true
        }
    }
}
