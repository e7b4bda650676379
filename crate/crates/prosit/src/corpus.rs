//! Bundled puzzle programs and the harnesses that drive them.
//!
//! Each puzzle builds a fresh interpreter, loads one of the `programs/`
//! sources, constructs the model situations the story needs, and reports a
//! list of checks (expected verdict vs. computed verdict) that callers can
//! print or assert on.

use crate::engine::{EngineError, Interp, Verdict};
use crate::expr::Expr;
use crate::reader::read_one;
use crate::store::SituationId;

pub const ISLAND_RULES: &str = include_str!("programs/island.psit");
pub const CICERO_PROGRAM: &str = include_str!("programs/cicero.psit");
pub const WIVES_PROGRAM: &str = include_str!("programs/wives.psit");
pub const LOGICIANS_PROGRAM: &str = include_str!("programs/logicians.psit");
pub const WISEMEN_PROGRAM: &str = include_str!("programs/wisemen.psit");

/// One expected-vs-actual comparison produced by a puzzle run.
#[derive(Debug, Clone)]
pub struct Check {
    pub situation: String,
    pub query: String,
    pub expected: Verdict,
    pub got: Verdict,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.expected == self.got
    }
}

#[derive(Debug, Clone)]
pub struct PuzzleReport {
    pub name: String,
    pub checks: Vec<Check>,
}

impl PuzzleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

pub fn puzzle_names() -> &'static [&'static str] {
    &[
        "cicero",
        "census-taker",
        "oona",
        "three-wisemen",
        "cheating-husbands:1",
        "cheating-husbands:2",
        "cheating-husbands:3",
        "facing-logicians:4,3",
    ]
}

/// Run a puzzle by name. Parameterised puzzles take arguments after a colon:
/// `cheating-husbands:2`, `facing-logicians:4,3`.
pub fn run_puzzle(spec: &str) -> Result<PuzzleReport, EngineError> {
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let bad = |msg: &str| EngineError::Invalid(format!("puzzle {spec}: {msg}"));
    match name {
        "cicero" => run_cicero(),
        "census-taker" => run_census_taker(),
        "oona" => run_oona(),
        "three-wisemen" => run_three_wisemen(),
        "cheating-husbands" => {
            let n: usize = arg
                .and_then(|a| a.parse().ok())
                .filter(|n| (1..=3).contains(n))
                .ok_or_else(|| bad("expected a count of unfaithful husbands from 1 to 3"))?;
            run_cheating_husbands(n)
        }
        "facing-logicians" => {
            let nums: Option<(i64, i64)> = arg.and_then(|a| {
                let (x, y) = a.split_once(',')?;
                Some((x.trim().parse().ok()?, y.trim().parse().ok()?))
            });
            let (a, b) =
                nums.ok_or_else(|| bad("expected two comma-separated numbers, e.g. 4,3"))?;
            if a < 1 || b < 1 || (a - b).abs() != 1 {
                return Err(bad("numbers must be consecutive positive integers"));
            }
            run_facing_logicians(a, b)
        }
        _ => Err(bad("unknown puzzle")),
    }
}

fn parse(src: &str) -> Expr {
    read_one(src).expect("corpus expression parses")
}

// ---------------------------------------------------------------------------
// Cicero

fn run_cicero() -> Result<PuzzleReport, EngineError> {
    let mut interp = Interp::new();
    interp.run_source(CICERO_PROGRAM)?;
    let root = interp.store.root();
    let rome = interp.store.lookup_from(root, "rome").unwrap();
    let capri = interp.store.lookup_from(root, "capri").unwrap();
    let goal = parse("(orator tully)");
    let mut checks = Vec::new();
    for (sit, expected) in [(rome, Verdict::Yes), (capri, Verdict::Unknown)] {
        let got = interp.query_verdict(sit, &goal)?;
        checks.push(Check {
            situation: interp.store.path(sit),
            query: goal.to_string(),
            expected,
            got,
        });
    }
    Ok(PuzzleReport {
        name: "cicero".into(),
        checks,
    })
}

// ---------------------------------------------------------------------------
// Knight/knave islands

/// A knight/knave puzzle: everyone is a knight (truth-teller) or a knave
/// (liar), `props` are extra facts that may or may not hold, and each claim
/// is an utterance by one inhabitant.
#[derive(Debug, Clone)]
pub struct IslandPuzzle {
    pub people: Vec<String>,
    pub props: Vec<Expr>,
    pub claims: Vec<(String, Expr)>,
}

#[derive(Debug, Clone)]
pub struct IslandWorld {
    pub situation: String,
    /// The facts laid down on this world's axis, in order: one
    /// `(knight p)`/`(knave p)` per person, then each prop or its negation.
    pub facts: Vec<Expr>,
    pub coherent: bool,
}

/// Enumerate every candidate world of an island puzzle as its own situation,
/// translate each utterance there, and keep the worlds that stay coherent.
pub fn solve_island(puzzle: &IslandPuzzle) -> Result<Vec<IslandWorld>, EngineError> {
    crate::engine::on_deep_stack(|| solve_island_inner(puzzle))
}

fn solve_island_inner(puzzle: &IslandPuzzle) -> Result<Vec<IslandWorld>, EngineError> {
    let mut interp = Interp::new();
    interp.run_source(ISLAND_RULES)?;
    let root = interp.store.root();
    let island = interp.store.lookup_from(root, "island").unwrap();
    let axes = puzzle.people.len() + puzzle.props.len();
    let mut worlds = Vec::new();
    for mask in 0..(1usize << axes) {
        let name = format!("sit{}", mask + 1);
        let w = interp.store.child(root, &name);
        interp.store.add_subtype(w, island);
        // Axis bit 0 means "knight" / "prop holds"; the first person is the
        // most significant bit so sit1 is the all-knights world.
        let mut facts = Vec::new();
        for (i, person) in puzzle.people.iter().enumerate() {
            let knight = mask >> (axes - 1 - i) & 1 == 0;
            let kind = if knight { "knight" } else { "knave" };
            facts.push(parse(&format!("({kind} {person})")));
        }
        for (j, prop) in puzzle.props.iter().enumerate() {
            let holds = mask >> (axes - 1 - puzzle.people.len() - j) & 1 == 0;
            if holds {
                facts.push(prop.clone());
            } else {
                facts.push(Expr::list(vec![Expr::param("no"), prop.clone()]));
            }
        }
        for f in &facts {
            interp.assert_top(w, f)?;
        }
        for (speaker, statement) in &puzzle.claims {
            let goal = Expr::list(vec![
                Expr::param("means"),
                Expr::param(speaker),
                statement.clone(),
                Expr::var("*t"),
            ]);
            let translations: Vec<Expr> = interp
                .query_bindings(w, &goal)?
                .into_iter()
                .flatten()
                .filter_map(|(name, value)| (name == "*t").then_some(value))
                .collect();
            for t in translations {
                interp.assert_top(w, &t)?;
            }
        }
        let coherent = interp.check_incoherent(w)?.is_none();
        worlds.push(IslandWorld {
            situation: interp.store.path(w),
            facts,
            coherent,
        });
    }
    Ok(worlds)
}

fn coherence_checks(name: &str, worlds: &[IslandWorld], expect_coherent: usize) -> PuzzleReport {
    let checks = worlds
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let expected = if i == expect_coherent {
                Verdict::Yes
            } else {
                Verdict::No
            };
            let got = if w.coherent { Verdict::Yes } else { Verdict::No };
            let facts: Vec<String> = w.facts.iter().map(|f| f.to_string()).collect();
            Check {
                situation: w.situation.clone(),
                query: format!("(coherent {})", facts.join(" ")),
                expected,
                got,
            }
        })
        .collect();
    PuzzleReport {
        name: name.into(),
        checks,
    }
}

/// A census taker knocks; the husband answers "we are both knaves".
/// Only the world with a knave husband and a knight wife survives.
fn run_census_taker() -> Result<PuzzleReport, EngineError> {
    let puzzle = IslandPuzzle {
        people: vec!["husband".into(), "wife".into()],
        props: vec![],
        claims: vec![(
            "husband".into(),
            parse("(and (knave husband) (knave wife))"),
        )],
    };
    let worlds = solve_island(&puzzle)?;
    // worlds: 1 knight/knight, 2 knight/knave, 3 knave/knight, 4 knave/knave
    Ok(coherence_checks("census-taker", &worlds, 2))
}

/// Abe claims "Ben is a knave and Oona is on the island"; Ben claims "Abe is
/// a knight and Oona is on the island".  The only consistent reading: both
/// are knaves and Oona is not on the island.
fn run_oona() -> Result<PuzzleReport, EngineError> {
    let puzzle = IslandPuzzle {
        people: vec!["abe".into(), "ben".into()],
        props: vec![parse("(on_island oona)")],
        claims: vec![
            ("abe".into(), parse("(and (knave ben) (on_island oona))")),
            ("ben".into(), parse("(and (knight abe) (on_island oona))")),
        ],
    };
    let worlds = solve_island(&puzzle)?;
    // world 8: knave abe, knave ben, (no (on_island oona))
    Ok(coherence_checks("oona", &worlds, 7))
}

// ---------------------------------------------------------------------------
// Three wisemen

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hat {
    White,
    Red,
}

impl Hat {
    fn name(self) -> &'static str {
        match self {
            Hat::White => "white",
            Hat::Red => "red",
        }
    }
}

/// Three wisemen with hats drawn from three white and two red, each seeing
/// only the others, asked in `order` whether they know their own colour.
/// Returns one answer per question, in order.
pub fn solve_wisemen(hats: [Hat; 3], order: [usize; 3]) -> Result<Vec<bool>, EngineError> {
    crate::engine::on_deep_stack(move || solve_wisemen_inner(hats, order))
}

fn solve_wisemen_inner(hats: [Hat; 3], order: [usize; 3]) -> Result<Vec<bool>, EngineError> {
    const NAMES: [&str; 3] = ["a", "b", "c"];
    let mut interp = Interp::new();
    interp.run_source(WISEMEN_PROGRAM)?;
    let root = interp.store.root();
    let w = interp.store.lookup_from(root, "w").unwrap();

    // One nested model situation per reasoning step: `parent/x` is how the
    // owner of `parent` imagines wiseman x's view.
    fn would_know(
        interp: &mut Interp,
        w: SituationId,
        parent: SituationId,
        x: usize,
        hats: [Hat; 3],
        history: &[usize],
    ) -> Result<bool, EngineError> {
        let node = interp.store.child(parent, NAMES[x]);
        interp.store.add_subtype(node, w);
        for y in 0..3 {
            if y != x {
                let fact = parse(&format!("(hat {} {})", NAMES[y], hats[y].name()));
                interp.assert_top(node, &fact)?;
            }
        }
        let goal = parse(&format!("(knows_own_white {})", NAMES[x]));
        if interp.query_holds(node, &goal)? {
            return Ok(true);
        }
        // Suppose my own hat is red; someone who answered earlier would then
        // have known, contradicting their answer, unless the supposition is
        // wrong.
        let mut hyp = hats;
        hyp[x] = Hat::Red;
        for (i, &y) in history.iter().enumerate() {
            if would_know(interp, w, node, y, hyp, &history[..i])? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    let mut answers = Vec::new();
    let mut history: Vec<usize> = Vec::new();
    for &x in &order {
        let knows = would_know(&mut interp, w, root, x, hats, &history)?;
        answers.push(knows);
        if !knows {
            history.push(x);
        }
    }
    Ok(answers)
}

fn run_three_wisemen() -> Result<PuzzleReport, EngineError> {
    let hats = [Hat::White, Hat::White, Hat::White];
    let answers = solve_wisemen(hats, [0, 1, 2])?;
    let expected = [false, false, true];
    let checks = ["a", "b", "c"]
        .iter()
        .zip(answers.iter().zip(expected))
        .map(|(name, (&got, exp))| Check {
            situation: (*name).into(),
            query: format!("(knows_own_white {name})"),
            expected: if exp { Verdict::Yes } else { Verdict::Unknown },
            got: if got { Verdict::Yes } else { Verdict::Unknown },
        })
        .collect();
    Ok(PuzzleReport {
        name: "three-wisemen".into(),
        checks,
    })
}

// ---------------------------------------------------------------------------
// Cheating husbands

/// The first `n` of wives a, b, c have unfaithful husbands.  Every wife sees
/// the others' husbands but not her own; nights pass silently until the
/// wronged wives all act on night `n`.  Returns a report checking that each
/// wronged wife first proves her own case exactly on night `n`.
pub fn run_cheating_husbands(n: usize) -> Result<PuzzleReport, EngineError> {
    crate::engine::on_deep_stack(move || run_cheating_husbands_inner(n))
}

fn run_cheating_husbands_inner(n: usize) -> Result<PuzzleReport, EngineError> {
    const WIVES: [&str; 3] = ["a", "b", "c"];
    let mut interp = Interp::new();
    interp.run_source(WIVES_PROGRAM)?;
    let root = interp.store.root();
    let wives_sit = interp.store.lookup_from(root, "wives").unwrap();

    // Model situations have to exist up front; otherwise a nested reference
    // like "c seen from inside a/b" would resolve to an outer situation.
    let mut model = std::collections::HashMap::new();
    for wife in WIVES {
        let m1 = interp.store.child(wives_sit, wife);
        interp.store.add_subtype(m1, wives_sit);
        model.insert(wife, m1);
        for x in WIVES.iter().filter(|x| **x != wife) {
            let m2 = interp.store.child(m1, x);
            for y in WIVES.iter().filter(|y| *y != x) {
                interp.store.child(m2, y);
            }
        }
    }

    let status = |wife: &str| {
        if WIVES.iter().position(|w| *w == wife).unwrap() < n {
            "unfaithful"
        } else {
            "faithful"
        }
    };

    // Each wife knows the other husbands' standing on every night.
    for wife in WIVES {
        for other in WIVES.iter().filter(|o| **o != wife) {
            for t in 1..=3 {
                let fact = parse(&format!("({} {} {})", status(other), other, t));
                interp.assert_top(model[&wife], &fact)?;
            }
        }
    }
    // Nights 1..n-1 pass silently: it becomes common knowledge that no wife
    // had settled her own husband's standing on those nights.
    for t in 1..n {
        for wife in WIVES {
            for ch in ["unfaithful", "faithful"] {
                let fact = parse(&format!("(no (!= {wife} ({ch} {wife} {t})))"));
                interp.assert_top(wives_sit, &fact)?;
            }
        }
    }

    let mut checks = Vec::new();
    for t in 1..=n {
        for wife in WIVES {
            let is_unfaithful = status(wife) == "unfaithful";
            // A faithful wife never proves her own case; a wronged wife does
            // exactly on night n.
            if !is_unfaithful && t < n {
                continue;
            }
            let expected = if is_unfaithful && t == n {
                Verdict::Yes
            } else {
                Verdict::Unknown
            };
            let goal = parse(&format!("(unfaithful {wife} {t})"));
            let got = interp.query_verdict(model[&wife], &goal)?;
            checks.push(Check {
                situation: interp.store.path(model[&wife]),
                query: goal.to_string(),
                expected,
                got,
            });
        }
    }
    Ok(PuzzleReport {
        name: format!("cheating-husbands:{n}"),
        checks,
    })
}

// ---------------------------------------------------------------------------
// Facing logicians

/// One exchange in the logicians' dialogue: who spoke, and the number they
/// announced if they knew it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicianTurn {
    pub speaker: String,
    pub announced: Option<i64>,
}

#[derive(Debug, Clone)]
pub struct LogicianDialogue {
    pub turns: Vec<LogicianTurn>,
    /// Facts published into the common situation by ignorance announcements,
    /// in order, beyond the initial setup.
    pub published: Vec<Expr>,
}

/// Logicians a and b hold consecutive positive numbers and each sees only
/// the other's.  They are asked in alternation (b first) whether they know
/// their own number until one of them does.
pub fn solve_facing_logicians(a: i64, b: i64) -> Result<LogicianDialogue, EngineError> {
    crate::engine::on_deep_stack(move || solve_facing_logicians_inner(a, b))
}

fn solve_facing_logicians_inner(a: i64, b: i64) -> Result<LogicianDialogue, EngineError> {
    let mut interp = Interp::new();
    interp.run_source(LOGICIANS_PROGRAM)?;
    let root = interp.store.root();
    let common = interp.store.lookup_from(root, "common").unwrap();

    let mut model = std::collections::HashMap::new();
    for (name, seen_name, seen_num) in [("a", "b", b), ("b", "a", a)] {
        let m = interp.store.child(common, name);
        interp.store.add_subtype(m, common);
        interp.store.add_subchunk(common, m);
        interp.store.child(m, seen_name);
        interp.assert_top(m, &parse(&format!("(num {seen_name} {seen_num})")))?;
        interp.assert_top(m, &parse(&format!("(actual {name})")))?;
        model.insert(name, m);
    }
    let setup_len = interp.store.get(common).infons.len();

    let mut turns = Vec::new();
    for half in 0..12 {
        let name = if half % 2 == 0 { "b" } else { "a" };
        let m = model[name];
        let know = parse(&format!("(know {name})"));
        if interp.query_holds(m, &know)? {
            let own = Expr::list(vec![
                Expr::param("num"),
                Expr::param(name),
                Expr::var("*n"),
            ]);
            let announced = interp
                .query_bindings(m, &own)?
                .into_iter()
                .flatten()
                .find_map(|(var, value)| match (var.as_str(), value) {
                    ("*n", Expr::Num(crate::expr::Num::Int(i))) => Some(i),
                    _ => None,
                });
            turns.push(LogicianTurn {
                speaker: name.into(),
                announced,
            });
            break;
        }
        // Announcing ignorance publishes eliminations as a side effect of
        // enumerating the rule's solutions.
        let ignorance = parse(&format!("(no (know {name}))"));
        let _ = interp.query_bindings(m, &ignorance)?;
        turns.push(LogicianTurn {
            speaker: name.into(),
            announced: None,
        });
    }
    let published = interp.store.get(common).infons[setup_len..].to_vec();
    Ok(LogicianDialogue { turns, published })
}

fn run_facing_logicians(a: i64, b: i64) -> Result<PuzzleReport, EngineError> {
    let dialogue = solve_facing_logicians(a, b)?;
    let mut checks = Vec::new();
    if (a, b) == (4, 3) {
        let expected_published = [
            "(no (num a 1))",
            "(no (num b 1))",
            "(no (num b 2))",
            "(no (num a 2))",
            "(no (num a 3))",
        ];
        for (i, exp) in expected_published.iter().enumerate() {
            let got = dialogue
                .published
                .get(i)
                .map(|e| e.to_string())
                .unwrap_or_else(|| "(nothing)".into());
            checks.push(Check {
                situation: "common".into(),
                query: (*exp).into(),
                expected: Verdict::Yes,
                got: if got == *exp { Verdict::Yes } else { Verdict::No },
            });
        }
        checks.push(Check {
            situation: "common".into(),
            query: "(published-count 5)".into(),
            expected: Verdict::Yes,
            got: if dialogue.published.len() == 5 {
                Verdict::Yes
            } else {
                Verdict::No
            },
        });
    }
    // The dialogue must end with the higher-numbered logician announcing
    // their own number.
    let (knower, number) = if a > b { ("a", a) } else { ("b", b) };
    let last = dialogue.turns.last();
    let ok = last
        .map(|t| t.speaker == knower && t.announced == Some(number))
        .unwrap_or(false);
    checks.push(Check {
        situation: knower.into(),
        query: format!("(num {knower} {number})"),
        expected: Verdict::Yes,
        got: if ok { Verdict::Yes } else { Verdict::No },
    });
    Ok(PuzzleReport {
        name: format!("facing-logicians:{a},{b}"),
        checks,
    })
}
