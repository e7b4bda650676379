//! Independent oracles and randomised case generators shared by the
//! integration suites.  Everything here deliberately avoids the interpreter's
//! own machinery so that agreement between the two is meaningful.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use prosit::corpus::{solve_island, Hat, IslandPuzzle};
use prosit::{read_one, Expr, Interp, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn parse(src: &str) -> Expr {
    read_one(src).expect("test expression parses")
}

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Substitution-based unification oracle

fn resolve(e: &Expr, s: &HashMap<String, Expr>) -> Expr {
    if let Expr::Var(v) = e {
        if let Some(t) = s.get(v) {
            return resolve(t, s);
        }
    }
    e.clone()
}

fn occurs(v: &str, e: &Expr, s: &HashMap<String, Expr>) -> bool {
    match &resolve(e, s) {
        Expr::Var(u) => u == v,
        Expr::List(items) => items.iter().any(|i| occurs(v, i, s)),
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MguOutcome {
    Unified,
    Clash,
    /// The occurs check fired.  The interpreter, like most logic-programming
    /// systems, skips that check, so these cases are not comparable.
    Cycle,
}

/// Textbook most-general-unifier over the same term language, with an
/// explicit substitution map instead of a trail.
pub fn mgu(a: &Expr, b: &Expr, s: &mut HashMap<String, Expr>) -> MguOutcome {
    use MguOutcome::*;
    let a = resolve(a, s);
    let b = resolve(b, s);
    match (&a, &b) {
        (Expr::Var(x), Expr::Var(y)) if x == y => Unified,
        (Expr::Var(x), t) | (t, Expr::Var(x)) => {
            if occurs(x, t, s) {
                Cycle
            } else {
                s.insert(x.clone(), t.clone());
                Unified
            }
        }
        (Expr::List(xs), Expr::List(ys)) => {
            if xs.len() != ys.len() {
                return Clash;
            }
            for (x, y) in xs.iter().zip(ys) {
                match mgu(x, y, s) {
                    Unified => {}
                    other => return other,
                }
            }
            Unified
        }
        _ => {
            if a == b {
                Unified
            } else {
                Clash
            }
        }
    }
}

pub fn apply(e: &Expr, s: &HashMap<String, Expr>) -> Expr {
    match e {
        Expr::Var(v) => match s.get(v) {
            Some(t) => apply(t, s),
            None => e.clone(),
        },
        Expr::List(items) => Expr::List(items.iter().map(|i| apply(i, s)).collect()),
        _ => e.clone(),
    }
}

/// Structural equality up to a consistent renaming of variables.
pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    fn go(
        a: &Expr,
        b: &Expr,
        fwd: &mut HashMap<String, String>,
        rev: &mut HashMap<String, String>,
    ) -> bool {
        match (a, b) {
            (Expr::Var(x), Expr::Var(y)) => {
                let f = fwd.entry(x.clone()).or_insert_with(|| y.clone());
                let r = rev.entry(y.clone()).or_insert_with(|| x.clone());
                f == y && r == x
            }
            (Expr::List(xs), Expr::List(ys)) => {
                xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, fwd, rev))
            }
            _ => a == b,
        }
    }
    go(a, b, &mut HashMap::new(), &mut HashMap::new())
}

/// Random term over a small pool of atoms, up to the given depth.
pub fn gen_term(rng: &mut TestRng, depth: usize) -> Expr {
    let choice = if depth == 0 {
        rng.gen_range(0..3)
    } else {
        rng.gen_range(0..4)
    };
    match choice {
        0 => Expr::var(["*x", "*y", "*z", "*w"][rng.gen_range(0..4)]),
        1 => Expr::param(["p", "q", "r", "f", "g"][rng.gen_range(0..5)]),
        2 => Expr::int(rng.gen_range(0..3)),
        _ => {
            let len = rng.gen_range(1..=3);
            Expr::List((0..len).map(|_| gen_term(rng, depth - 1)).collect())
        }
    }
}

// ---------------------------------------------------------------------------
// Forward/backward chaining vs. a fixpoint closure

/// One random propositional rule set over six atoms, rules pointing only from
/// lower to higher indices (so backward chaining terminates), plus seed
/// facts.  Returns an error message on the first disagreement with the
/// closure computed by plain fixpoint iteration.
pub fn fwd_bwd_case(rng: &mut TestRng) -> Result<(), String> {
    const ATOMS: usize = 6;
    let mut rules = Vec::new();
    for i in 0..ATOMS {
        for j in (i + 1)..ATOMS {
            if rng.gen_bool(0.3) {
                rules.push((i, j));
            }
        }
    }
    let seeds: Vec<usize> = (0..ATOMS).filter(|_| rng.gen_bool(0.3)).collect();

    // oracle: iterate to fixpoint
    let mut closure: HashSet<usize> = seeds.iter().copied().collect();
    loop {
        let before = closure.len();
        for &(i, j) in &rules {
            if closure.contains(&i) {
                closure.insert(j);
            }
        }
        if closure.len() == before {
            break;
        }
    }

    for forward in [true, false] {
        let mut interp = Interp::new();
        let root = interp.store.root();
        let sit = interp.store.child(root, "s");
        for &(i, j) in &rules {
            let rule = if forward {
                format!("(=> (p{i}) (p{j}))")
            } else {
                format!("(<= (p{j}) (p{i}))")
            };
            interp.assert_top(sit, &parse(&rule)).map_err(|e| e.to_string())?;
        }
        for &i in &seeds {
            interp
                .assert_top(sit, &parse(&format!("(p{i})")))
                .map_err(|e| e.to_string())?;
        }
        for i in 0..ATOMS {
            let holds = interp
                .query_holds(sit, &parse(&format!("(p{i})")))
                .map_err(|e| e.to_string())?;
            if holds != closure.contains(&i) {
                return Err(format!(
                    "{} chaining disagrees with closure on p{i} (rules {rules:?}, seeds {seeds:?})",
                    if forward { "forward" } else { "backward" }
                ));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Backtracking vs. direct boolean evaluation

pub fn gen_goal(rng: &mut TestRng, depth: usize) -> Expr {
    let choice = if depth == 0 { 0 } else { rng.gen_range(0..4) };
    match choice {
        1 => Expr::list(vec![
            Expr::param("and"),
            gen_goal(rng, depth - 1),
            gen_goal(rng, depth - 1),
        ]),
        2 => Expr::list(vec![
            Expr::param("or"),
            gen_goal(rng, depth - 1),
            gen_goal(rng, depth - 1),
        ]),
        3 => Expr::list(vec![Expr::param("not"), gen_goal(rng, depth - 1)]),
        _ => parse(&format!("(f{})", rng.gen_range(0..5))),
    }
}

fn eval_goal(goal: &Expr, facts: &HashSet<Expr>) -> bool {
    match goal.head_name() {
        Some("and") => goal.args().iter().all(|g| eval_goal(g, facts)),
        Some("or") => goal.args().iter().any(|g| eval_goal(g, facts)),
        Some("not") => !eval_goal(&goal.args()[0], facts),
        _ => facts.contains(goal),
    }
}

/// A ground and/or/not goal tree over a random fact base must agree with a
/// direct boolean evaluation, and solving it must leave the store untouched.
pub fn backtrack_case(rng: &mut TestRng) -> Result<(), String> {
    let mut interp = Interp::new();
    let root = interp.store.root();
    let sit = interp.store.child(root, "s");
    let mut facts = HashSet::new();
    for i in 0..5 {
        if rng.gen_bool(0.5) {
            let f = parse(&format!("(f{i})"));
            interp.assert_top(sit, &f).map_err(|e| e.to_string())?;
            facts.insert(f);
        }
    }
    let goal = gen_goal(rng, 3);
    let before = interp.store.fingerprint();
    let got = interp.query_holds(sit, &goal).map_err(|e| e.to_string())?;
    let want = eval_goal(&goal, &facts);
    if got != want {
        return Err(format!("goal {goal} over {facts:?}: engine {got}, oracle {want}"));
    }
    if interp.store.fingerprint() != before {
        return Err(format!("query {goal} mutated the store"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Owner reflection

/// Random ownership trees: `(!= c i)` asked at a situation must hold exactly
/// when that situation directly owns `c` and `c` supports `i`.
pub fn owner_reflection_case(rng: &mut TestRng) -> Result<(), String> {
    let mut interp = Interp::new();
    let root = interp.store.root();
    let count = rng.gen_range(3..=8);
    let mut sits = vec![root];
    let mut parent_of = vec![usize::MAX];
    for i in 1..count {
        let parent = rng.gen_range(0..i);
        let id = interp.store.child(sits[parent], &format!("n{i}"));
        sits.push(id);
        parent_of.push(parent);
    }
    let mut holds: Vec<HashSet<usize>> = vec![HashSet::new(); count];
    for (i, infons) in holds.iter_mut().enumerate().skip(1) {
        for k in 0..4 {
            if rng.gen_bool(0.4) {
                interp
                    .assert_top(sits[i], &parse(&format!("(p{k})")))
                    .map_err(|e| e.to_string())?;
                infons.insert(k);
            }
        }
    }
    for c in 1..count {
        for k in 0..4 {
            // the direct owner, plus one other situation as a control
            let outsider = loop {
                let i = rng.gen_range(0..count);
                if i != c && i != parent_of[c] {
                    break i;
                }
            };
            for asker in [parent_of[c], outsider] {
                let goal = parse(&format!("(!= n{c} (p{k}))"));
                let got = interp
                    .query_holds(sits[asker], &goal)
                    .map_err(|e| e.to_string())?;
                let want = parent_of[c] == asker && holds[c].contains(&k);
                if got != want {
                    return Err(format!(
                        "asker n{asker} about n{c} p{k}: engine {got}, oracle {want}"
                    ));
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Knight/knave truth tables

#[derive(Debug, Clone, Copy)]
pub enum KkAtom {
    Knight(usize),
    Knave(usize),
}

fn kk_literal(atom: KkAtom, people: &[&str]) -> Expr {
    match atom {
        KkAtom::Knight(i) => parse(&format!("(knight {})", people[i])),
        KkAtom::Knave(i) => parse(&format!("(knave {})", people[i])),
    }
}

fn kk_eval(atom: KkAtom, knights: &[bool]) -> bool {
    match atom {
        KkAtom::Knight(i) => knights[i],
        KkAtom::Knave(i) => !knights[i],
    }
}

/// Compare the situated treatment of one- and two-speaker knight/knave
/// puzzles against plain truth tables, over every binary and/or statement
/// built from knight/knave literals about two people.
pub fn island_truth_table_case(
    claims: &[(usize, &str, KkAtom, KkAtom)],
) -> Result<(), String> {
    let people = ["p", "q"];
    let puzzle = IslandPuzzle {
        people: people.iter().map(|s| s.to_string()).collect(),
        props: vec![],
        claims: claims
            .iter()
            .map(|&(speaker, conn, l1, l2)| {
                (
                    people[speaker].to_string(),
                    Expr::list(vec![
                        Expr::param(conn),
                        kk_literal(l1, &people),
                        kk_literal(l2, &people),
                    ]),
                )
            })
            .collect(),
    };
    let worlds = solve_island(&puzzle).map_err(|e| e.to_string())?;
    for (mask, world) in worlds.iter().enumerate() {
        // bit layout matches solve_island: first person is the high bit,
        // a zero bit means knight
        let knights = [mask >> 1 & 1 == 0, mask & 1 == 0];
        let consistent = claims.iter().all(|&(speaker, conn, l1, l2)| {
            let stmt = match conn {
                "and" => kk_eval(l1, &knights) && kk_eval(l2, &knights),
                _ => kk_eval(l1, &knights) || kk_eval(l2, &knights),
            };
            knights[speaker] == stmt
        });
        if world.coherent != consistent {
            return Err(format!(
                "claims {claims:?}, world {mask}: engine coherent={}, truth table {}",
                world.coherent, consistent
            ));
        }
    }
    Ok(())
}

pub fn kk_atoms() -> [KkAtom; 4] {
    [
        KkAtom::Knight(0),
        KkAtom::Knight(1),
        KkAtom::Knave(0),
        KkAtom::Knave(1),
    ]
}

// ---------------------------------------------------------------------------
// Wisemen possible-worlds oracle

/// Every hat assignment drawable from three white and two red hats.
pub fn wisemen_worlds() -> Vec<[Hat; 3]> {
    let mut worlds = Vec::new();
    for mask in 0..8u32 {
        let hats = [
            if mask & 4 != 0 { Hat::Red } else { Hat::White },
            if mask & 2 != 0 { Hat::Red } else { Hat::White },
            if mask & 1 != 0 { Hat::Red } else { Hat::White },
        ];
        if hats.iter().filter(|h| **h == Hat::Red).count() <= 2 {
            worlds.push(hats);
        }
    }
    worlds
}

/// Ignorance-announcement protocol over the possible worlds: each wiseman in
/// turn knows his colour when all live worlds matching his view agree, and a
/// "don't know" eliminates every world in which he would have known.
pub fn wisemen_oracle(actual: [Hat; 3], order: [usize; 3]) -> Vec<bool> {
    let worlds = wisemen_worlds();
    let mut alive: Vec<bool> = vec![true; worlds.len()];
    let knows = |x: usize, w: &[Hat; 3], alive: &[bool]| {
        let mut own = HashSet::new();
        for (v, live) in worlds.iter().zip(alive) {
            if *live && (0..3).all(|y| y == x || v[y] == w[y]) {
                own.insert(v[x]);
            }
        }
        own.len() == 1
    };
    let mut answers = Vec::new();
    for &x in &order {
        let ans = knows(x, &actual, &alive);
        answers.push(ans);
        if !ans {
            let doomed: Vec<bool> = worlds.iter().map(|w| knows(x, w, &alive)).collect();
            for (live, kill) in alive.iter_mut().zip(doomed) {
                if kill {
                    *live = false;
                }
            }
        }
    }
    answers
}

// ---------------------------------------------------------------------------
// Cheating-husbands possible-worlds oracle

/// Worlds are the nonempty subsets of unfaithful husbands (the announcement
/// rules out the empty one).  Each silent night removes the worlds in which
/// some wife would already have known.  Returns whether `wife` knows her own
/// husband's standing on `night`, with the first `n` husbands unfaithful.
pub fn husbands_oracle(n: usize, wife: usize, night: usize) -> bool {
    let actual: u8 = (1 << n) - 1;
    let mut alive: Vec<u8> = (1u8..8).collect();
    let knows = |w: u8, i: usize, alive: &[u8]| {
        let others = w & !(1 << i);
        let mut own = HashSet::new();
        for v in alive {
            if v & !(1 << i) == others {
                own.insert(v >> i & 1);
            }
        }
        own.len() == 1
    };
    for t in 1..=night {
        if t == night {
            return knows(actual, wife, &alive);
        }
        let survivors: Vec<u8> = alive
            .iter()
            .copied()
            .filter(|&w| !(0..3).any(|i| knows(w, i, &alive)))
            .collect();
        alive = survivors;
    }
    unreachable!("night is at least 1");
}

// ---------------------------------------------------------------------------
// Facing-logicians dialogue oracle

/// Possible-worlds run of the consecutive-numbers dialogue: worlds are
/// ordered pairs of consecutive positive integers, b speaks first, and an
/// ignorance announcement eliminates every world in which the speaker would
/// have known.  Returns (speaker, number) per turn, number present only on
/// the final, knowing turn.
pub fn logicians_oracle(a: i64, b: i64) -> Vec<(&'static str, Option<i64>)> {
    let cap = a.max(b) + 10;
    let mut worlds: Vec<(i64, i64)> = Vec::new();
    for k in 1..=cap {
        worlds.push((k, k + 1));
        worlds.push((k + 1, k));
    }
    let mut alive: Vec<bool> = vec![true; worlds.len()];
    // speaker 0 is b (observes the first coordinate, owns the second)
    let knows = |speaker: usize, w: (i64, i64), alive: &[bool]| {
        let (obs, _) = observe(speaker, w);
        let mut own = HashSet::new();
        for (v, live) in worlds.iter().zip(alive) {
            if *live && observe(speaker, *v).0 == obs {
                own.insert(observe(speaker, *v).1);
            }
        }
        (own.len() == 1).then(|| own.into_iter().next().unwrap())
    };
    fn observe(speaker: usize, w: (i64, i64)) -> (i64, i64) {
        if speaker == 0 {
            (w.0, w.1)
        } else {
            (w.1, w.0)
        }
    }
    let mut turns = Vec::new();
    for half in 0..12 {
        let speaker = half % 2;
        let name = if speaker == 0 { "b" } else { "a" };
        if let Some(num) = knows(speaker, (a, b), &alive) {
            turns.push((name, Some(num)));
            break;
        }
        let doomed: Vec<bool> = worlds
            .iter()
            .map(|w| knows(speaker, *w, &alive).is_some())
            .collect();
        for (live, kill) in alive.iter_mut().zip(doomed) {
            if kill {
                *live = false;
            }
        }
        turns.push((name, None));
    }
    turns
}

// ---------------------------------------------------------------------------

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Yes => "yes",
        Verdict::No => "no",
        Verdict::YesAndNo => "yes-and-no",
        Verdict::Unknown => "unknown",
    }
}
