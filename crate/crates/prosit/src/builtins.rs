//! The built-in operation catalog, as seen from query evaluation.
//!
//! Control forms (`and`, `or`, `not`, `cut`, `fail`, `true`, `no`) are
//! handled directly by the solver; everything else lands here. Assertion
//! effects for the relational forms live in the engine's assert dispatch.

use crate::engine::{Cont, EngineError, Flow, Interp, Solved};
use crate::expr::{Expr, Num};
use crate::store::SituationId;
use crate::terms::v_unify;

impl Interp {
    /// Try `head` as a built-in query operation. Returns `None` when the
    /// head is not a built-in, so ordinary goal resolution takes over.
    pub(crate) fn builtin_query(
        &mut self,
        sit: SituationId,
        head: &str,
        args: &[Expr],
        goal: &Expr,
        env: &mut crate::terms::BindingEnv,
        depth: usize,
        k: Cont,
    ) -> Result<Option<Solved>, EngineError> {
        match head {
            "!=" => self.query_supports(sit, args, goal, env, depth, k).map(Some),
            "=" => {
                let [a, b] = args else {
                    return Err(EngineError::Invalid(format!("{goal}")));
                };
                let eq = self.store.merged_eq(sit);
                let cp = env.checkpoint();
                let mut out = Solved::Exhausted;
                if v_unify(env, &eq, a, b) {
                    if k(self, env)? == Flow::Stop {
                        out = Solved::Stopped;
                    }
                }
                env.undo_to(cp);
                Ok(Some(out))
            }
            "me" => {
                let [x] = args else {
                    return Err(EngineError::Invalid(format!("{goal}")));
                };
                let name = Expr::param(self.store.name(sit));
                let eq = self.store.merged_eq(sit);
                let cp = env.checkpoint();
                let mut out = Solved::Exhausted;
                if v_unify(env, &eq, x, &name) {
                    if k(self, env)? == Flow::Stop {
                        out = Solved::Stopped;
                    }
                }
                env.undo_to(cp);
                Ok(Some(out))
            }
            "bind-eval" | "bind-lisp" => {
                let [target, expr] = args else {
                    return Err(EngineError::Invalid(format!("{goal}")));
                };
                let value = eval_closed(expr)?;
                let eq = self.store.merged_eq(sit);
                let cp = env.checkpoint();
                let mut out = Solved::Exhausted;
                if v_unify(env, &eq, target, &value) {
                    if k(self, env)? == Flow::Stop {
                        out = Solved::Stopped;
                    }
                }
                env.undo_to(cp);
                Ok(Some(out))
            }
            "lisp" => Err(EngineError::Invalid(
                "the host-language escape is not supported; use bind-eval".to_string(),
            )),
            "!" => {
                let [f] = args else {
                    return Err(EngineError::Invalid(format!("{goal}")));
                };
                if !self.prove_once(sit, f, depth + 1)? {
                    self.assert_form(sit, f)?;
                }
                self.once(env, k)
            }
            "-!" => Err(EngineError::AssertOnly("-!".to_string())),
            "in" => {
                let [Expr::Param(name)] = args else {
                    return Err(EngineError::Invalid(format!("{goal}")));
                };
                self.enter(name);
                self.once(env, k)
            }
            "out" => {
                self.leave();
                self.once(env, k)
            }
            "@<" | "<--" | "[_" => {
                let [Expr::Param(a), Expr::Param(b)] = args else {
                    return Ok(Some(Solved::Exhausted));
                };
                let (Some(ia), Some(ib)) = (
                    self.store.lookup_from(sit, a),
                    self.store.lookup_from(sit, b),
                ) else {
                    return Ok(Some(Solved::Exhausted));
                };
                let linked = match head {
                    "@<" => self.store.get(ia).subtype_sources.contains(&ib),
                    "<--" => self.store.get(ia).subsit_sources.contains(&ib),
                    _ => self.store.get(ia).superchunks.contains(&ib),
                };
                if linked {
                    self.once(env, k)
                } else {
                    Ok(Some(Solved::Exhausted))
                }
            }
            // A constraint queried by shape: does some respected constraint
            // read exactly like this?
            "rule" | "resp" => {
                let [pattern] = args else {
                    return Err(EngineError::Invalid(format!("{goal}")));
                };
                let eq = self.store.merged_eq(sit);
                let sources: Vec<Expr> = self
                    .store
                    .respected_constraints(sit)
                    .iter()
                    .map(|c| c.source.clone())
                    .collect();
                for source in sources {
                    let cp = env.checkpoint();
                    if v_unify(env, &eq, pattern, &source) {
                        let flow = k(self, env)?;
                        env.undo_to(cp);
                        if flow == Flow::Stop {
                            return Ok(Some(Solved::Stopped));
                        }
                    }
                }
                Ok(Some(Solved::Exhausted))
            }
            "clear" => {
                let target = match args {
                    [] => Some(sit),
                    [Expr::Param(name)] => self.store.lookup_from(sit, name),
                    _ => return Err(EngineError::Invalid(format!("{goal}"))),
                };
                if let Some(id) = target {
                    self.store.clear_infons(id);
                }
                self.once(env, k)
            }
            "printsit" => {
                let target = match args {
                    [] => Some(sit),
                    [Expr::Param(name)] => self.store.lookup_from(sit, name),
                    _ => return Err(EngineError::Invalid(format!("{goal}"))),
                };
                if let Some(id) = target {
                    self.render_situation(id);
                }
                self.once(env, k)
            }
            "trace" => {
                self.trace = flag_value(args, self.trace)?;
                self.once(env, k)
            }
            "duals" => {
                self.duals = flag_value(args, self.duals)?;
                self.once(env, k)
            }
            "load" | "demo" => {
                let path = path_arg(args, goal)?;
                let saved_focus_mode = (self.focus_snapshot(), self.mode);
                let result = self.load_path(&path);
                self.restore_focus(saved_focus_mode.0);
                self.mode = saved_focus_mode.1;
                result?;
                self.once(env, k)
            }
            "run" => {
                let path = path_arg(args, goal)?;
                self.reset_focus();
                self.mode = crate::reader::Mode::Assert;
                self.load_path(&path)?;
                self.once(env, k)
            }
            "exit" => Err(EngineError::Exit),
            _ => Ok(None),
        }
    }

    /// Succeed exactly once with the current bindings.
    fn once(
        &mut self,
        env: &mut crate::terms::BindingEnv,
        k: Cont,
    ) -> Result<Option<Solved>, EngineError> {
        Ok(Some(match k(self, env)? {
            Flow::More => Solved::Exhausted,
            Flow::Stop => Solved::Stopped,
        }))
    }

    /// `(!= T i)`: does situation `T` support `i`, as seen from here?
    ///
    /// Matches recorded `(!= T i)` infons first. Then, when the querying
    /// situation owns `T` or totally describes it (`[_ T here`), the claim
    /// reduces to proving `i` inside `T`. Without such a link the claim is
    /// simply unsupported — situations have no default insight into others.
    fn query_supports(
        &mut self,
        sit: SituationId,
        args: &[Expr],
        goal: &Expr,
        env: &mut crate::terms::BindingEnv,
        depth: usize,
        k: Cont,
    ) -> Result<Solved, EngineError> {
        if args.len() != 2 {
            return Err(EngineError::Invalid(format!("{goal}")));
        }
        let eq = self.store.merged_eq(sit);
        let sources = self.store.visible_sources(sit);
        for src in sources {
            let count = self.store.get(src).infons.len();
            for idx in 0..count {
                let cp = env.checkpoint();
                let matched = match self.store.get(src).infons.get(idx) {
                    Some(fact) if fact.head_name() == Some("!=") => {
                        v_unify(env, &eq, goal, fact)
                    }
                    Some(_) => continue,
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
        if let Expr::Param(name) = &args[0] {
            if let Some(target) = self.store.lookup_from(sit, name) {
                let rec = self.store.get(target);
                let privileged =
                    rec.owner == Some(sit) || rec.superchunks.contains(&sit);
                if privileged {
                    let inner = args[1].clone();
                    match self.solve(target, &inner, env, depth + 1, k)? {
                        Solved::Stopped => return Ok(Solved::Stopped),
                        // Cut scope ends at the situation boundary.
                        _ => return Ok(Solved::Exhausted),
                    }
                }
            }
        }
        Ok(Solved::Exhausted)
    }

    fn render_situation(&mut self, id: SituationId) {
        let path = self.store.path(id);
        self.out_buf.push(format!("situation {path}"));
        let lines: Vec<String> = self
            .store
            .get(id)
            .infons
            .iter()
            .filter(|i| !matches!(i.head_name(), Some("!=") | Some("<--")))
            .map(|i| format!("  {i}"))
            .collect();
        self.out_buf.extend(lines);
    }

    fn focus_snapshot(&self) -> Vec<SituationId> {
        self.focus_vec()
    }

    fn restore_focus(&mut self, focus: Vec<SituationId>) {
        self.set_focus_vec(focus);
    }
}

fn flag_value(args: &[Expr], current: bool) -> Result<bool, EngineError> {
    match args {
        [] => Ok(!current),
        [Expr::Param(p)] if p == "on" => Ok(true),
        [Expr::Param(p)] if p == "off" => Ok(false),
        _ => Err(EngineError::Invalid("expected on or off".to_string())),
    }
}

fn path_arg(args: &[Expr], goal: &Expr) -> Result<String, EngineError> {
    match args {
        [Expr::Text(s)] => Ok(s.clone()),
        [Expr::Param(p)] => Ok(p.clone()),
        _ => Err(EngineError::Invalid(format!("{goal}"))),
    }
}

/// Evaluate a closed arithmetic expression.
///
/// Numbers evaluate to themselves; comparisons yield the parameters `true`
/// or `false`. Anything open or non-numeric is an error.
pub fn eval_closed(expr: &Expr) -> Result<Expr, EngineError> {
    match expr {
        Expr::Num(n) => Ok(Expr::Num(*n)),
        Expr::Param(p) if p == "true" || p == "false" => Ok(expr.clone()),
        Expr::Var(v) => Err(EngineError::Arith(format!("unbound {v}"))),
        Expr::List(items) if !items.is_empty() => {
            let op = match &items[0] {
                Expr::Param(p) => p.as_str(),
                other => return Err(EngineError::Arith(format!("bad operator {other}"))),
            };
            let args: Vec<Num> = items[1..]
                .iter()
                .map(|a| match eval_closed(a)? {
                    Expr::Num(n) => Ok(n),
                    other => Err(EngineError::Arith(format!("{other} is not a number"))),
                })
                .collect::<Result<_, _>>()?;
            match op {
                "+" | "*" => {
                    let unit = if op == "+" { 0i64 } else { 1i64 };
                    let mut acc = Num::Int(unit);
                    for a in args {
                        acc = combine(op, acc, a)?;
                    }
                    Ok(Expr::Num(acc))
                }
                "-" | "/" | "mod" => match args.as_slice() {
                    [only] if op == "-" => Ok(Expr::Num(combine("-", Num::Int(0), *only)?)),
                    [a, b] => Ok(Expr::Num(combine(op, *a, *b)?)),
                    _ => Err(EngineError::Arith(format!("{op} wants two arguments"))),
                },
                ">" | "<" | ">=" | "<=" | "=" | "/=" => match args.as_slice() {
                    [a, b] => {
                        let (x, y) = (as_f64(*a), as_f64(*b));
                        let truth = match op {
                            ">" => x > y,
                            "<" => x < y,
                            ">=" => x >= y,
                            "<=" => x <= y,
                            "=" => x == y,
                            _ => x != y,
                        };
                        Ok(Expr::param(if truth { "true" } else { "false" }))
                    }
                    _ => Err(EngineError::Arith(format!("{op} wants two arguments"))),
                },
                other => Err(EngineError::Arith(format!("unknown operator {other}"))),
            }
        }
        other => Err(EngineError::Arith(format!("cannot evaluate {other}"))),
    }
}

fn as_f64(n: Num) -> f64 {
    match n {
        Num::Int(i) => i as f64,
        Num::Float(f) => f,
    }
}

fn combine(op: &str, a: Num, b: Num) -> Result<Num, EngineError> {
    if let (Num::Int(x), Num::Int(y)) = (a, b) {
        let r = match op {
            "+" => x.checked_add(y),
            "-" => x.checked_sub(y),
            "*" => x.checked_mul(y),
            "/" => {
                if y == 0 {
                    return Err(EngineError::Arith("division by zero".to_string()));
                }
                x.checked_div(y)
            }
            "mod" => {
                if y == 0 {
                    return Err(EngineError::Arith("division by zero".to_string()));
                }
                x.checked_rem(y)
            }
            _ => None,
        };
        return r
            .map(Num::Int)
            .ok_or_else(|| EngineError::Arith("integer overflow".to_string()));
    }
    let (x, y) = (as_f64(a), as_f64(b));
    let r = match op {
        "+" => x + y,
        "-" => x - y,
        "*" => x * y,
        "/" => {
            if y == 0.0 {
                return Err(EngineError::Arith("division by zero".to_string()));
            }
            x / y
        }
        "mod" => x % y,
        _ => return Err(EngineError::Arith(format!("unknown operator {op}"))),
    };
    Ok(Num::Float(r))
}
