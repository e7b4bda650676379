//! Query evaluation and assertion.
//!
//! The solver is written in continuation-passing style: each solution is
//! delivered to a callback, which answers whether to keep searching. This
//! keeps evaluation lazy, which matters because goal bodies may have side
//! effects (`!` asserts while proving) that must not run for solutions the
//! caller never asked for.

use std::fmt;

use crate::expr::Expr;
use crate::reader::{read_forms, Form, Mode};
use crate::store::{Constraint, Direction, SituationId, Store};
use crate::terms::{v_unify, BindingEnv};

/// What the solution consumer wants next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    More,
    Stop,
}

/// How a search for solutions ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solved {
    /// All alternatives tried.
    Exhausted,
    /// The consumer said stop.
    Stopped,
    /// A cut fired; pending alternatives up to the clause boundary are
    /// abandoned.
    Cut,
}

/// Solution consumer: called once per solution with the bindings live.
pub type Cont<'a> = &'a mut dyn FnMut(&mut Interp, &mut BindingEnv) -> Result<Flow, EngineError>;

/// Four-valued query answer: the goal and its dual are probed separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    YesAndNo,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::YesAndNo => "yes-and-no",
            Verdict::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("proof depth limit of {0} exceeded")]
    DepthLimit(usize),
    #[error("assertion budget exhausted (runaway forward chaining?)")]
    BudgetExhausted,
    #[error("`{0}` is only meaningful when asserting")]
    AssertOnly(String),
    #[error("`{0}` is only meaningful as a query")]
    QueryOnly(String),
    #[error("malformed form: {0}")]
    Invalid(String),
    #[error("arithmetic error: {0}")]
    Arith(String),
    #[error("cannot load {path}: {err}")]
    Load { path: String, err: String },
    #[error(transparent)]
    Read(#[from] crate::reader::ReadError),
    #[error("exit requested")]
    Exit,
}

const DEEP_STACK_THREAD: &str = "prosit-deep-stack";

/// Run `f` on a thread with a generous stack, or inline when the current
/// thread already is one.  Wrapping a batch of queries in a single call
/// avoids spawning a thread per query.
pub fn on_deep_stack<R, F>(f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    if std::thread::current().name() == Some(DEEP_STACK_THREAD) {
        return f();
    }
    std::thread::scope(|scope| {
        std::thread::Builder::new()
            .name(DEEP_STACK_THREAD.into())
            .stack_size(256 << 20)
            .spawn_scoped(scope, f)
            .expect("spawn solver thread")
            .join()
            .expect("solver thread panicked")
    })
}

/// Default bound on proof depth; exceeding it is an error, not a failure.
pub const DEFAULT_DEPTH_LIMIT: usize = 512;
/// Default bound on assertions per top-level operation.
pub const DEFAULT_ASSERT_BUDGET: usize = 10_000;

/// The interpreter: a situation store plus evaluation state.
pub struct Interp {
    pub store: Store,
    /// Focus stack manipulated by `in`/`out`; never empty.
    focus: Vec<SituationId>,
    pub mode: Mode,
    pub trace: bool,
    pub duals: bool,
    pub depth_limit: usize,
    assert_budget: usize,
    budget_left: usize,
    var_counter: u64,
    /// Buffered trace lines, drained by the front end.
    pub trace_buf: Vec<String>,
    /// Buffered printable output (e.g. from `printsit`).
    pub out_buf: Vec<String>,
}

impl Default for Interp {
    fn default() -> Self {
        Self::new()
    }
}

impl Interp {
    pub fn new() -> Self {
        let store = Store::new();
        let root = store.root();
        Interp {
            store,
            focus: vec![root],
            mode: Mode::Assert,
            trace: false,
            duals: false,
            depth_limit: DEFAULT_DEPTH_LIMIT,
            assert_budget: DEFAULT_ASSERT_BUDGET,
            budget_left: DEFAULT_ASSERT_BUDGET,
            var_counter: 0,
            trace_buf: Vec::new(),
            out_buf: Vec::new(),
        }
    }

    /// Situation currently in focus.
    pub fn current(&self) -> SituationId {
        *self.focus.last().unwrap()
    }

    pub fn focus_path(&self) -> String {
        self.store.path(self.current())
    }

    /// Enter a situation by name, resolved from the current focus.
    pub fn enter(&mut self, name: &str) -> SituationId {
        let id = self.store.resolve_from(self.current(), name);
        self.focus.push(id);
        id
    }

    /// Leave the current situation. The root stays in focus forever.
    pub fn leave(&mut self) {
        if self.focus.len() > 1 {
            self.focus.pop();
        }
    }

    pub fn reset_focus(&mut self) {
        let root = self.store.root();
        self.focus = vec![root];
    }

    pub(crate) fn focus_vec(&self) -> Vec<SituationId> {
        self.focus.clone()
    }

    pub(crate) fn set_focus_vec(&mut self, focus: Vec<SituationId>) {
        if !focus.is_empty() {
            self.focus = focus;
        }
    }

    fn fresh_suffix(&mut self) -> u64 {
        self.var_counter += 1;
        self.var_counter
    }

    fn reset_budget(&mut self) {
        self.budget_left = self.assert_budget;
    }

    /// Cap the number of assertions a single top-level operation may make.
    pub fn set_assert_budget(&mut self, n: usize) {
        self.assert_budget = n;
    }

    fn spend(&mut self) -> Result<(), EngineError> {
        if self.budget_left == 0 {
            return Err(EngineError::BudgetExhausted);
        }
        self.budget_left -= 1;
        Ok(())
    }

    pub(crate) fn trace_event(&mut self, verb: &str, depth: usize, sit: SituationId, goal: &Expr) {
        if self.trace {
            let line = format!("{verb} {depth} {} {goal}", self.store.name(sit));
            self.trace_buf.push(line);
        }
    }

    // ------------------------------------------------------------------
    // Query evaluation
    // ------------------------------------------------------------------

    /// Solve `goal` in situation `sit`, delivering each solution to `k`.
    pub fn solve(
        &mut self,
        sit: SituationId,
        goal: &Expr,
        env: &mut BindingEnv,
        depth: usize,
        k: Cont,
    ) -> Result<Solved, EngineError> {
        if depth > self.depth_limit {
            return Err(EngineError::DepthLimit(self.depth_limit));
        }
        let goal = match env.substitute(goal) {
            // Bare parameters act as zero-argument goals.
            Expr::Param(p) => Expr::List(vec![Expr::Param(p)]),
            g => g,
        };
        let items = match &goal {
            Expr::List(items) if !items.is_empty() => items,
            Expr::Var(v) => return Err(EngineError::Invalid(format!("unbound goal {v}"))),
            other => return Err(EngineError::Invalid(format!("cannot query {other}"))),
        };

        if self.trace {
            self.trace_event("CALL", depth, sit, &goal);
        }
        let mut succeeded = false;
        let result = {
            let k = &mut |interp: &mut Interp, env: &mut BindingEnv| -> Result<Flow, EngineError> {
                succeeded = true;
                if interp.trace {
                    let shown = env.substitute(&goal);
                    interp.trace_event("EXIT", depth, sit, &shown);
                }
                let flow = k(interp, env)?;
                if flow == Flow::More && interp.trace {
                    interp.trace_event("REDO", depth, sit, &goal);
                }
                Ok(flow)
            };
            self.dispatch(sit, &goal, items, env, depth, k)
        };
        if self.trace && !succeeded && matches!(result, Ok(Solved::Exhausted)) {
            self.trace_event("FAIL", depth, sit, &goal);
        }
        result
    }

    fn dispatch(
        &mut self,
        sit: SituationId,
        goal: &Expr,
        items: &[Expr],
        env: &mut BindingEnv,
        depth: usize,
        k: Cont,
    ) -> Result<Solved, EngineError> {
        let head = match &items[0] {
            Expr::Param(name) => name.to_ascii_lowercase(),
            // Variable or list heads fall straight to fact matching.
            _ => return self.solve_user(sit, goal, env, depth, k),
        };
        let args = &items[1..];
        match head.as_str() {
            "and" => self.solve_seq(sit, args, env, depth + 1, k),
            "or" => {
                for alt in args {
                    let cp = env.checkpoint();
                    let solved = self.solve(sit, alt, env, depth + 1, k)?;
                    env.undo_to(cp);
                    if solved != Solved::Exhausted {
                        return Ok(solved);
                    }
                }
                Ok(Solved::Exhausted)
            }
            "not" => {
                if args.len() != 1 {
                    return Err(EngineError::Invalid(format!("{goal}")));
                }
                let cp = env.checkpoint();
                let mut found = false;
                self.solve(sit, &args[0], env, depth + 1, &mut |_, _| {
                    found = true;
                    Ok(Flow::Stop)
                })?;
                env.undo_to(cp);
                if found {
                    Ok(Solved::Exhausted)
                } else {
                    match k(self, env)? {
                        Flow::More => Ok(Solved::Exhausted),
                        Flow::Stop => Ok(Solved::Stopped),
                    }
                }
            }
            "true" => match k(self, env)? {
                Flow::More => Ok(Solved::Exhausted),
                Flow::Stop => Ok(Solved::Stopped),
            },
            "fail" => Ok(Solved::Exhausted),
            "cut" => match k(self, env)? {
                Flow::More => Ok(Solved::Cut),
                Flow::Stop => Ok(Solved::Stopped),
            },
            "no" => {
                // Double negation unwraps; otherwise negative infons are
                // matched like any other fact.
                if let [Expr::List(inner)] = args {
                    if inner.first() == Some(&Expr::param("no")) && inner.len() == 2 {
                        let unwrapped = inner[1].clone();
                        return self.solve(sit, &unwrapped, env, depth + 1, k);
                    }
                }
                self.solve_user(sit, goal, env, depth, k)
            }
            _ => match self.builtin_query(sit, &head, args, goal, env, depth, k)? {
                Some(solved) => Ok(solved),
                None => self.solve_user(sit, goal, env, depth, k),
            },
        }
    }

    /// Solve a conjunction left to right.
    pub fn solve_seq(
        &mut self,
        sit: SituationId,
        goals: &[Expr],
        env: &mut BindingEnv,
        depth: usize,
        k: Cont,
    ) -> Result<Solved, EngineError> {
        match goals.split_first() {
            None => match k(self, env)? {
                Flow::More => Ok(Solved::Exhausted),
                Flow::Stop => Ok(Solved::Stopped),
            },
            Some((first, rest)) => {
                let mut cut = false;
                let solved = self.solve(sit, first, env, depth, &mut |interp, env| {
                    match interp.solve_seq(sit, rest, env, depth, k)? {
                        Solved::Exhausted => Ok(Flow::More),
                        Solved::Stopped => Ok(Flow::Stop),
                        Solved::Cut => {
                            cut = true;
                            Ok(Flow::Stop)
                        }
                    }
                })?;
                match solved {
                    Solved::Stopped if cut => Ok(Solved::Cut),
                    other => Ok(other),
                }
            }
        }
    }

    /// Resolve a goal against visible facts, then backward constraints.
    fn solve_user(
        &mut self,
        sit: SituationId,
        goal: &Expr,
        env: &mut BindingEnv,
        depth: usize,
        k: Cont,
    ) -> Result<Solved, EngineError> {
        let sources = self.store.visible_sources(sit);
        let eq = self.store.merged_eq(sit);
        for src in sources {
            // Index-based walk over a length snapshot: the consumer may
            // assert while we iterate, and later additions are not offered.
            let count = self.store.get(src).infons.len();
            for idx in 0..count {
                let cp = env.checkpoint();
                let matched = match self.store.get(src).infons.get(idx) {
                    Some(fact) => v_unify(env, &eq, goal, fact),
                    None => break,
                };
                if matched {
                    let flow = k(self, env)?;
                    env.undo_to(cp);
                    if flow == Flow::Stop {
                        return Ok(Solved::Stopped);
                    }
                }
            }
        }
        let constraints = self.store.respected_constraints(sit);
        for c in &constraints {
            if !matches!(c.direction, Direction::Backward | Direction::Both) {
                continue;
            }
            let (trigger, body) = self.rename_constraint(c);
            let cp = env.checkpoint();
            if v_unify(env, &eq, goal, &trigger) {
                let solved = self.solve_seq(sit, &body, env, depth + 1, k)?;
                env.undo_to(cp);
                match solved {
                    Solved::Stopped => return Ok(Solved::Stopped),
                    // A cut in a body commits to this clause: remaining
                    // alternatives are dropped, and the signal is absorbed.
                    Solved::Cut => return Ok(Solved::Exhausted),
                    Solved::Exhausted => {}
                }
            }
        }
        Ok(Solved::Exhausted)
    }

    fn rename_constraint(&mut self, c: &Constraint) -> (Expr, Vec<Expr>) {
        let n = self.fresh_suffix();
        let trigger = rename_vars(&c.trigger, n);
        let body = c.body.iter().map(|b| rename_vars(b, n)).collect();
        (trigger, body)
    }

    /// Prove `goal` once in a fresh environment.
    pub(crate) fn prove_once(
        &mut self,
        sit: SituationId,
        goal: &Expr,
        depth: usize,
    ) -> Result<bool, EngineError> {
        let mut env = BindingEnv::new();
        let mut found = false;
        self.solve(sit, goal, &mut env, depth, &mut |_, _| {
            found = true;
            Ok(Flow::Stop)
        })?;
        Ok(found)
    }

    // ------------------------------------------------------------------
    // Public query entry points
    // ------------------------------------------------------------------

    /// Deep proofs recurse heavily through the continuation chain, so
    /// top-level operations run on a thread with a generous stack.
    fn spacious<R, F>(&mut self, f: F) -> R
    where
        R: Send,
        F: FnOnce(&mut Self) -> R + Send,
    {
        on_deep_stack(|| f(self))
    }

    pub fn query_holds(&mut self, sit: SituationId, goal: &Expr) -> Result<bool, EngineError> {
        self.spacious(|i| {
            i.reset_budget();
            i.prove_once(sit, goal, 0)
        })
    }

    /// All solutions, as fully substituted instances of the goal.
    pub fn query_all(&mut self, sit: SituationId, goal: &Expr) -> Result<Vec<Expr>, EngineError> {
        self.spacious(|i| {
            i.reset_budget();
            let mut env = BindingEnv::new();
            let mut out = Vec::new();
            i.solve(sit, goal, &mut env, 0, &mut |_, env| {
                out.push(env.substitute(goal));
                Ok(Flow::More)
            })?;
            Ok(out)
        })
    }

    /// All solutions, as per-variable binding lists (for interactive use).
    pub fn query_bindings(
        &mut self,
        sit: SituationId,
        goal: &Expr,
    ) -> Result<Vec<Vec<(String, Expr)>>, EngineError> {
        self.spacious(|i| {
            i.reset_budget();
            let mut vars = Vec::new();
            goal.collect_vars(&mut vars);
            let mut env = BindingEnv::new();
            let mut out = Vec::new();
            i.solve(sit, goal, &mut env, 0, &mut |_, env| {
                let row = vars
                    .iter()
                    .map(|v| (v.clone(), env.substitute(&Expr::Var(v.clone()))))
                    .collect();
                out.push(row);
                Ok(Flow::More)
            })?;
            Ok(out)
        })
    }

    /// The dual of a claim: `(no F)` for `F`, and `F` for `(no F)`.
    pub fn dual(goal: &Expr) -> Expr {
        if let Expr::List(items) = goal {
            if items.len() == 2 && items[0] == Expr::param("no") {
                return items[1].clone();
            }
        }
        Expr::List(vec![Expr::param("no"), goal.clone()])
    }

    /// Probe the goal and its dual for a four-valued answer.
    pub fn query_verdict(&mut self, sit: SituationId, goal: &Expr) -> Result<Verdict, EngineError> {
        let pos = self.query_holds(sit, goal)?;
        let neg = self.query_holds(sit, &Self::dual(goal))?;
        Ok(match (pos, neg) {
            (true, true) => Verdict::YesAndNo,
            (true, false) => Verdict::Yes,
            (false, true) => Verdict::No,
            (false, false) => Verdict::Unknown,
        })
    }

    /// Find an infon supported together with its dual, if any.
    ///
    /// A situation is incoherent when it supports both some `F` and
    /// `(no F)`, or when its equality classes collapse two distinct
    /// constants. Returns a witness infon.
    pub fn check_incoherent(&mut self, sit: SituationId) -> Result<Option<Expr>, EngineError> {
        let eq = self.store.merged_eq(sit);
        if let Some((a, b)) = eq.poison() {
            return Ok(Some(Expr::List(vec![
                Expr::param("="),
                a.clone(),
                b.clone(),
            ])));
        }
        let sources = self.store.visible_sources(sit);
        let mut candidates = Vec::new();
        for src in sources {
            for infon in &self.store.get(src).infons {
                if let Some(h) = infon.head_name() {
                    if matches!(h, "<=" | "=>" | "<=>" | "@<" | "<--" | "[_" | "=") {
                        continue;
                    }
                }
                if !candidates.contains(infon) {
                    candidates.push(infon.clone());
                }
            }
        }
        self.spacious(move |i| {
            for infon in candidates {
                let dual = Self::dual(&infon);
                i.reset_budget();
                if i.prove_once(sit, &dual, 0)? {
                    return Ok(Some(infon));
                }
            }
            Ok(None)
        })
    }

    // ------------------------------------------------------------------
    // Assertion
    // ------------------------------------------------------------------

    /// Assert a form at top level (resets the work budget).
    pub fn assert_top(&mut self, sit: SituationId, form: &Expr) -> Result<(), EngineError> {
        self.spacious(|i| {
            i.reset_budget();
            i.assert_form(sit, form)
        })
    }

    /// Assert one form in `sit`, dispatching on its head.
    pub(crate) fn assert_form(&mut self, sit: SituationId, form: &Expr) -> Result<(), EngineError> {
        self.spend()?;
        let items = match form {
            Expr::List(items) if !items.is_empty() => items.clone(),
            other => {
                return Err(EngineError::Invalid(format!("cannot assert {other}")));
            }
        };
        let head = match &items[0] {
            Expr::Param(name) => name.to_ascii_lowercase(),
            _ => String::new(),
        };
        let args = &items[1..];
        match head.as_str() {
            // A conjunction is asserted conjunct by conjunct.
            "and" => {
                for arg in args {
                    self.assert_form(sit, arg)?;
                }
                Ok(())
            }
            "no" => {
                // (no (no F)) collapses to F; other negatives are plain infons.
                if let [Expr::List(inner)] = args {
                    if inner.first() == Some(&Expr::param("no")) && inner.len() == 2 {
                        let unwrapped = inner[1].clone();
                        return self.assert_form(sit, &unwrapped);
                    }
                }
                self.assert_plain(sit, form)
            }
            "!=" => {
                if args.len() != 2 {
                    return Err(EngineError::Invalid(format!("{form}")));
                }
                let target = self.expect_situation(sit, &args[0])?;
                self.store.add_infon(sit, form.clone());
                self.assert_form(target, &args[1])
            }
            "=" => {
                if args.len() != 2 {
                    return Err(EngineError::Invalid(format!("{form}")));
                }
                let (a, b) = (args[0].clone(), args[1].clone());
                let ok = {
                    let rec = self.store.get_mut(sit);
                    crate::terms::p_unify(&mut rec.equalities, &a, &b)
                };
                if !ok {
                    return Err(EngineError::Invalid(format!(
                        "cannot identify {a} with {b}"
                    )));
                }
                self.store.add_infon(sit, form.clone());
                Ok(())
            }
            "@<" => {
                let (sub, sup) = self.two_situations(sit, args, form)?;
                self.store.add_subtype(sub, sup);
                self.store.add_infon(sit, form.clone());
                Ok(())
            }
            "<--" => {
                let (sub, sup) = self.two_situations(sit, args, form)?;
                self.store.add_subsit(sub, sup);
                self.store.add_infon(sit, form.clone());
                Ok(())
            }
            "[_" => {
                let (described, describer) = self.two_situations(sit, args, form)?;
                self.store.add_subchunk(described, describer);
                self.store.add_infon(sit, form.clone());
                Ok(())
            }
            "<=" | "=>" | "<=>" => {
                self.install_constraint(sit, form)?;
                self.store.add_infon(sit, form.clone());
                Ok(())
            }
            // Register a constraint without recording it as an infon.
            "resp" | "rule" => {
                let [c] = args else {
                    return Err(EngineError::Invalid(format!("{form}")));
                };
                self.install_constraint(sit, c)
            }
            // Query-before-assert also works at assert level.
            "!" => {
                let [f] = args else {
                    return Err(EngineError::Invalid(format!("{form}")));
                };
                self.assert_form(sit, f)
            }
            "-!" => {
                let [f] = args else {
                    return Err(EngineError::Invalid(format!("{form}")));
                };
                self.retract(sit, f)
            }
            // Side-effecting operations behave the same in either mode.
            "in" | "out" | "printsit" | "trace" | "duals" | "clear" | "load" | "demo" | "run"
            | "exit" | "bind-eval" | "bind-lisp" | "lisp" => {
                let found = self.prove_once(sit, form, 0)?;
                if !found {
                    return Err(EngineError::Invalid(format!("{form} failed")));
                }
                Ok(())
            }
            // A disjunction cannot be decomposed, so it is recorded
            // structurally and only the incoherency check can refute it.
            "or" => self.assert_plain(sit, form),
            "not" | "cut" | "fail" => Err(EngineError::QueryOnly(head)),
            "true" => Ok(()),
            _ => self.assert_plain(sit, form),
        }
    }

    /// Assert an ordinary infon: skip it when already provable, otherwise
    /// record it and let forward constraints react.
    fn assert_plain(&mut self, sit: SituationId, infon: &Expr) -> Result<(), EngineError> {
        let mut vars = Vec::new();
        infon.collect_vars(&mut vars);
        if !vars.is_empty() {
            return Err(EngineError::Invalid(format!(
                "cannot assert open term {infon}"
            )));
        }
        if self.prove_once(sit, infon, 0)? {
            return Ok(());
        }
        if self.store.add_infon(sit, infon.clone()) {
            self.fire_forward(sit, infon)?;
        }
        Ok(())
    }

    /// Run forward constraints that match a newly recorded infon.
    fn fire_forward(&mut self, sit: SituationId, infon: &Expr) -> Result<(), EngineError> {
        let constraints = self.store.respected_constraints(sit);
        let eq = self.store.merged_eq(sit);
        for c in &constraints {
            if !matches!(c.direction, Direction::Forward | Direction::Both) {
                continue;
            }
            let (trigger, body) = self.rename_constraint(c);
            let mut env = BindingEnv::new();
            if v_unify(&mut env, &eq, infon, &trigger) {
                for item in &body {
                    let concl = env.substitute(item);
                    self.assert_form(sit, &concl)?;
                }
            }
        }
        Ok(())
    }

    fn install_constraint(&mut self, sit: SituationId, form: &Expr) -> Result<(), EngineError> {
        let Expr::List(items) = form else {
            return Err(EngineError::Invalid(format!("{form}")));
        };
        if items.len() < 2 {
            return Err(EngineError::Invalid(format!("{form}")));
        }
        let direction = match items[0].head_name().or(match &items[0] {
            Expr::Param(p) => Some(p.as_str()),
            _ => None,
        }) {
            Some("<=") => Direction::Backward,
            Some("=>") => Direction::Forward,
            Some("<=>") => Direction::Both,
            _ => return Err(EngineError::Invalid(format!("{form}"))),
        };
        let constraint = Constraint {
            direction,
            trigger: items[1].clone(),
            body: items[2..].to_vec(),
            home: sit,
            source: form.clone(),
        };
        self.store.get_mut(sit).constraints.push(constraint);
        Ok(())
    }

    /// Retract infons matching a pattern from `sit` itself. A `(!= T i)`
    /// pattern also retracts `i` from the target situation.
    pub(crate) fn retract(&mut self, sit: SituationId, pattern: &Expr) -> Result<(), EngineError> {
        if let Some("!=") = pattern.head_name() {
            let args = pattern.args();
            if args.len() == 2 {
                if let Ok(target) = self.expect_situation(sit, &args[0]) {
                    self.retract(target, &args[1])?;
                }
            }
        }
        let eq = self.store.merged_eq(sit);
        let facts = self.store.get(sit).infons.clone();
        for fact in facts {
            let mut env = BindingEnv::new();
            if v_unify(&mut env, &eq, pattern, &fact) {
                self.store.remove_infon(sit, &fact);
            }
        }
        // Also drop constraints written in exactly this form.
        let before = self.store.get(sit).constraints.len();
        let kept: Vec<Constraint> = self
            .store
            .get(sit)
            .constraints
            .iter()
            .filter(|c| &c.source != pattern)
            .cloned()
            .collect();
        if kept.len() != before {
            self.store.get_mut(sit).constraints = kept;
        }
        Ok(())
    }

    // ------------------------------------------------------------------
    // Helpers
    // ------------------------------------------------------------------

    pub(crate) fn expect_situation(
        &mut self,
        from: SituationId,
        e: &Expr,
    ) -> Result<SituationId, EngineError> {
        match e {
            Expr::Param(name) => Ok(self.store.resolve_from(from, name)),
            other => Err(EngineError::Invalid(format!(
                "{other} does not name a situation"
            ))),
        }
    }

    fn two_situations(
        &mut self,
        sit: SituationId,
        args: &[Expr],
        form: &Expr,
    ) -> Result<(SituationId, SituationId), EngineError> {
        if args.len() != 2 {
            return Err(EngineError::Invalid(format!("{form}")));
        }
        let a = self.expect_situation(sit, &args[0])?;
        let b = self.expect_situation(sit, &args[1])?;
        Ok((a, b))
    }

    // ------------------------------------------------------------------
    // Program text
    // ------------------------------------------------------------------

    /// Process a program: assertions and queries against the focus stack.
    /// Queries are evaluated for their side effects; answers are not kept.
    pub fn run_source(&mut self, src: &str) -> Result<(), EngineError> {
        let forms = read_forms(src)?;
        self.spacious(move |i| {
            for form in forms {
                match form {
                    Form::Switch(mode) => i.mode = mode,
                    Form::Expr(e) => {
                        let sit = i.current();
                        i.reset_budget();
                        match i.mode {
                            Mode::Assert => i.assert_form(sit, &e)?,
                            Mode::Query => {
                                i.prove_once(sit, &e, 0)?;
                            }
                        }
                    }
                }
            }
            Ok(())
        })
    }

    pub fn load_path(&mut self, path: &str) -> Result<(), EngineError> {
        let text = std::fs::read_to_string(path).map_err(|e| EngineError::Load {
            path: path.to_string(),
            err: e.to_string(),
        })?;
        self.run_source(&text)
    }
}

fn rename_vars(e: &Expr, n: u64) -> Expr {
    match e {
        Expr::Var(v) => Expr::Var(format!("{v}#{n}")),
        Expr::List(items) => Expr::List(items.iter().map(|i| rename_vars(i, n)).collect()),
        other => other.clone(),
    }
}
