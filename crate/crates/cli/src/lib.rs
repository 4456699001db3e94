//! Command-line front end: s-expression surface syntax, a freshening
//! lowering pass, and the check/eval/prove driver.

pub mod driver;
pub mod lower;
pub mod sexpr;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use driver::{render_parse_error, Driver, Options};
use lower::{lower_program, SourceProgram};

#[derive(Parser)]
#[command(name = "rtr", about = "Type check, evaluate, and prove facts about .rtr programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Source file (.rtr)
    file: PathBuf,
    /// Emit machine-readable diagnostics, one JSON object per line
    #[arg(long)]
    json: bool,
    /// Evaluation step budget
    #[arg(long, default_value_t = rtr_core::eval::DEFAULT_FUEL)]
    fuel: u64,
    /// Bound on prover disjunction case-splits (overrides RTR_SPLIT_DEPTH)
    #[arg(long = "split-depth")]
    split_depth: Option<usize>,
    /// Print typing-rule applications and entailment queries
    #[arg(long)]
    trace: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Type check every form in the file
    Check(CommonArgs),
    /// Type check, then evaluate bare expressions and print their values
    Eval(CommonArgs),
    /// Run the file's prove queries and print per-query verdicts
    Prove(CommonArgs),
}

impl CommonArgs {
    fn options(&self) -> Options {
        let split_depth = self
            .split_depth
            .or_else(|| {
                std::env::var("RTR_SPLIT_DEPTH")
                    .ok()
                    .and_then(|v| v.parse().ok())
            })
            .unwrap_or(8);
        Options {
            json: self.json,
            fuel: self.fuel,
            split_depth,
            trace: self.trace,
        }
    }
}

/// Entry point used by the binary and by tests. Exit codes: 0 all checks
/// pass, 1 type or prove failure, 2 parse error (or CLI misuse), 3
/// internal invariant violation.
pub fn run(argv: Vec<String>) -> i32 {
    run_guarded(move || run_inner(argv))
}

/// Map panics in the wrapped computation to exit code 3.
pub fn run_guarded(f: impl FnOnce() -> i32 + std::panic::UnwindSafe) -> i32 {
    match std::panic::catch_unwind(f) {
        Ok(code) => code,
        Err(_) => {
            eprintln!("internal invariant violation");
            3
        }
    }
}

fn run_inner(argv: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return 2;
        }
    };
    let (args, mode) = match &cli.command {
        Command::Check(a) => (a, Mode::Check),
        Command::Eval(a) => (a, Mode::Eval),
        Command::Prove(a) => (a, Mode::Prove),
    };
    let path = args.file.display().to_string();
    let source = match std::fs::read_to_string(&args.file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: cannot read {path}: {e}");
            return 2;
        }
    };
    let options = args.options();
    let program = match parse_source(&path, &source) {
        Ok(p) => p,
        Err(e) => {
            println!("{}", render_parse_error(&path, &source, &e, options.json));
            return 2;
        }
    };
    let mut driver = Driver::new(&program, options);
    match mode {
        Mode::Check => {
            driver.check_forms();
            print!("{}", driver.output);
            exit_code(driver.failures)
        }
        Mode::Eval => {
            let forms = driver.check_forms();
            if driver.failures > 0 {
                print!("{}", driver.output);
                return 1;
            }
            driver.output.clear();
            match driver.eval_forms(&forms) {
                Ok(()) => {
                    print!("{}", driver.output);
                    0
                }
                Err(message) => {
                    print!("{}", driver.output);
                    if message.starts_with("stuck") {
                        eprintln!("internal error: {message}");
                        3
                    } else {
                        eprintln!("error: {message}");
                        1
                    }
                }
            }
        }
        Mode::Prove => {
            driver.prove_forms();
            print!("{}", driver.output);
            exit_code(driver.failures)
        }
    }
}

enum Mode {
    Check,
    Eval,
    Prove,
}

fn exit_code(failures: usize) -> i32 {
    if failures == 0 {
        0
    } else {
        1
    }
}

/// Parse and lower a source file.
pub fn parse_source(path: &str, source: &str) -> Result<SourceProgram, sexpr::ParseError> {
    let forms = sexpr::parse_all(source)?;
    lower_program(path, source, forms)
}
