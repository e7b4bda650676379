//! Command-line front end: an interactive read-eval loop plus one-shot
//! modes for loading files, evaluating a query, and running bundled puzzles.

use std::io::{self, BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use prosit::corpus::run_puzzle;
use prosit::{read_forms, EngineError, Expr, Form, Interp, Mode, Verdict};

#[derive(Parser)]
#[command(name = "prosit", version, about = "An interpreter for the prosit language")]
struct Args {
    /// Load these program files before anything else
    #[arg(long, value_name = "FILE")]
    load: Vec<PathBuf>,

    /// Evaluate one query against the loaded programs and exit
    #[arg(long, value_name = "EXPR")]
    eval: Option<String>,

    /// Process a file of forms as if typed at the prompt, then exit
    #[arg(long, value_name = "FILE")]
    batch: Option<PathBuf>,

    /// Run a bundled puzzle and report its checks (see --puzzle list)
    #[arg(long, value_name = "NAME")]
    puzzle: Option<String>,

    /// Emit CALL/EXIT/REDO/FAIL lines on stderr
    #[arg(long)]
    trace: bool,

    /// Answer queries with four-valued verdicts
    #[arg(long)]
    duals: bool,

    /// Maximum proof depth
    #[arg(long, value_name = "N")]
    depth: Option<usize>,
}

struct Session {
    interp: Interp,
    /// Remaining rendered solutions of the last open query, stepped by `;`.
    pending: Vec<String>,
}

impl Session {
    fn new(args: &Args) -> Self {
        let mut interp = Interp::new();
        interp.trace = args.trace;
        interp.duals = args.duals;
        if let Some(depth) = args.depth {
            interp.depth_limit = depth;
        }
        Session {
            interp,
            pending: Vec::new(),
        }
    }

    fn drain_buffers(&mut self) {
        for line in self.interp.out_buf.drain(..) {
            println!("{line}");
        }
        for line in self.interp.trace_buf.drain(..) {
            eprintln!("{line}");
        }
    }

    /// Handle one parsed form. Returns false when the session should end.
    fn handle(&mut self, form: &Form) -> Result<bool, EngineError> {
        match form {
            Form::Switch(mode) => {
                self.interp.mode = *mode;
                Ok(true)
            }
            Form::Expr(e) => {
                let result = match self.interp.mode {
                    Mode::Assert => self.assert(e),
                    Mode::Query => self.query(e),
                };
                self.drain_buffers();
                match result {
                    Err(EngineError::Exit) => Ok(false),
                    Err(other) => Err(other),
                    Ok(()) => Ok(true),
                }
            }
        }
    }

    fn assert(&mut self, e: &Expr) -> Result<(), EngineError> {
        let here = self.interp.current();
        self.interp.assert_top(here, e)
    }

    fn query(&mut self, e: &Expr) -> Result<(), EngineError> {
        self.pending.clear();
        let here = self.interp.current();
        let mut vars = Vec::new();
        e.collect_vars(&mut vars);
        if vars.is_empty() {
            if self.interp.duals {
                let verdict = self.interp.query_verdict(here, e)?;
                println!("{verdict}");
            } else if self.interp.query_holds(here, e)? {
                println!("yes");
            } else {
                println!("no");
            }
            return Ok(());
        }
        let rows = self.interp.query_bindings(here, e)?;
        if rows.is_empty() {
            println!("no");
            return Ok(());
        }
        let mut rendered: Vec<String> = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(var, value)| format!("{var} = {value}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            })
            .collect();
        rendered.reverse();
        let first = rendered.pop().unwrap();
        println!("{first}");
        self.pending = rendered;
        Ok(())
    }

    fn next_solution(&mut self) {
        match self.pending.pop() {
            Some(solution) => println!("{solution}"),
            None => println!("no more solutions"),
        }
    }

    /// Feed a chunk of source through the session, form by form.  A bare
    /// `;` asks for the next solution of the last query (elsewhere `;`
    /// starts a comment).
    fn feed(&mut self, src: &str) -> Result<bool, EngineError> {
        if src.trim() == ";" {
            self.next_solution();
            return Ok(true);
        }
        let forms =
            read_forms(src).map_err(|e| EngineError::Invalid(format!("read error: {e}")))?;
        for form in &forms {
            if !self.handle(form)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn repl(session: &mut Session) -> ExitCode {
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let mut lines = stdin.lock().lines();
    loop {
        if interactive {
            let marker = match session.interp.mode {
                Mode::Assert => "!",
                Mode::Query => "?",
            };
            print!("{}{marker} ", session.interp.focus_path());
            let _ = io::stdout().flush();
        }
        let Some(line) = lines.next() else {
            return ExitCode::SUCCESS;
        };
        let line = match line {
            Ok(l) => l,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        };
        match session.feed(&line) {
            Ok(true) => {}
            Ok(false) => return ExitCode::SUCCESS,
            Err(e) => {
                session.drain_buffers();
                eprintln!("error: {e}");
            }
        }
    }
}

fn run_puzzle_mode(name: &str) -> ExitCode {
    if name == "list" {
        for n in prosit::corpus::puzzle_names() {
            println!("{n}");
        }
        return ExitCode::SUCCESS;
    }
    let report = match run_puzzle(name) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let mut passed = 0;
    for check in &report.checks {
        let tag = if check.passed() { "PASS" } else { "FAIL" };
        passed += check.passed() as usize;
        println!(
            "{tag} {} {} expected={} got={}",
            check.situation, check.query, check.expected, check.got
        );
    }
    println!("{}: {passed}/{} checks passed", report.name, report.checks.len());
    if passed == report.checks.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let args = Args::parse();

    if let Some(name) = &args.puzzle {
        return run_puzzle_mode(name);
    }

    let mut session = Session::new(&args);
    for path in &args.load {
        if let Err(e) = session.interp.load_path(&path.display().to_string()) {
            session.drain_buffers();
            eprintln!("error loading {}: {e}", path.display());
            return ExitCode::from(2);
        }
        session.drain_buffers();
    }

    if let Some(expr) = &args.eval {
        session.interp.mode = Mode::Query;
        let goal = match prosit::read_one(expr) {
            Ok(g) => g,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        };
        let here = session.interp.current();
        let verdict = match session.interp.query_verdict(here, &goal) {
            Ok(v) => v,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        };
        session.drain_buffers();
        println!("{verdict}");
        return match verdict {
            Verdict::Yes | Verdict::YesAndNo => ExitCode::SUCCESS,
            _ => ExitCode::from(1),
        };
    }

    if let Some(path) = &args.batch {
        let src = match std::fs::read_to_string(path) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error reading {}: {e}", path.display());
                return ExitCode::from(2);
            }
        };
        return match session.feed(&src) {
            Ok(_) => ExitCode::SUCCESS,
            Err(e) => {
                session.drain_buffers();
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }

    repl(&mut session)
}
