//! Command-line front end for the vector-automaton toolkit.
//!
//! Exit codes are part of the interface and stable; scripts may rely on
//! them:
//!
//! * `0` — success (accept, ok, document emitted)
//! * `1` — negative result (reject, invalid code vector, mismatches found)
//! * `2` — inconclusive (expansion budget exhausted)
//! * `3` — usage, file, parse, or precondition errors

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hva_core::constructions::{self, CounterMachine, Dfa};
use hva_core::freegroup::{self, EfaMachine, GroupTag};
use hva_core::zoo::{self, CheckOptions, ZooMachine};
use hva_core::{engine, sternbrocot, HvaMachine, Outcome, QVector, Rational, RunOptions};

/// Prints one line to stdout. A closed pipe (`hva zoo list | head`) is a
/// quiet success, as for any well-behaved filter; other write failures are
/// reported on stderr with the usage-error exit code.
fn out_line(args: std::fmt::Arguments<'_>) {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_fmt(args).and_then(|()| stdout.write_all(b"\n")) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: cannot write to stdout: {e}");
        std::process::exit(3);
    }
}

macro_rules! out {
    () => { out_line(format_args!("")) };
    ($($arg:tt)*) => { out_line(format_args!($($arg)*)) };
}

#[derive(Parser)]
#[command(
    name = "hva",
    version,
    about = "Run, inspect, and combine exact-arithmetic vector automata",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a machine file on an input string.
    Run {
        /// Machine file (JSON, as produced by `zoo export` or `compose`).
        machine: PathBuf,
        /// Input string; pass "" for the empty word.
        input: String,
        /// Expansion budget for machines with epsilon moves.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// On accept, also print the accepting trace as JSON.
        #[arg(long)]
        trace: bool,
    },
    /// Encode a word over a k-letter alphabet as an integer vector.
    Encode {
        /// Alphabet size (2 uses symbols 1 and 0; 3..=9 use digits 1..=k).
        #[arg(short, long)]
        k: usize,
        /// Word to encode; pass "" for the empty word.
        word: String,
    },
    /// Decode a vector like "[2,3]" back to the unique word encoding it.
    Decode {
        /// Vector text: comma-separated entries in square brackets.
        vector: String,
    },
    /// Built-in machine catalog.
    Zoo {
        #[command(subcommand)]
        action: ZooCommand,
    },
    /// Combine machine files with a language operation; prints the result.
    Compose {
        /// The operation to apply.
        #[arg(long, value_enum)]
        op: ComposeOp,
        /// Operand files: two for binary operations, one for star.
        files: Vec<PathBuf>,
    },
    /// Compare a machine file against a named oracle on all short inputs.
    Check {
        /// Machine file (vector, group-register, or counter format).
        machine: PathBuf,
        /// Oracle name from the catalog (see `zoo list`).
        #[arg(long)]
        oracle: String,
        /// Check every input of length up to this bound.
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        /// Expansion budget per run for machines with epsilon moves.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Group-register machines: run them or compile them to vector form.
    Efa {
        #[command(subcommand)]
        action: EfaCommand,
    },
}

#[derive(Subcommand)]
enum ZooCommand {
    /// List catalog machines and oracle-only languages.
    List,
    /// Print a catalog machine as JSON.
    Export {
        /// Machine name, e.g. "thm51" or "mpal_3".
        name: String,
        /// Alphabet size for the marked-palindrome family (2..=9).
        #[arg(long)]
        l: Option<usize>,
    },
}

#[derive(Subcommand)]
enum EfaCommand {
    /// Run a group-register machine file on an input string.
    Run {
        machine: PathBuf,
        /// Input string; pass "" for the empty word.
        input: String,
        /// Expansion budget for machines with epsilon moves.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Compile a group-register machine to an equivalent blind vector
    /// automaton; prints the machine as JSON.
    Translate {
        machine: PathBuf,
        /// Shear parameter for the generator matrices (must be >= 2).
        #[arg(long, default_value_t = 2)]
        n: i64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ComposeOp {
    /// Intersect a machine with a total DFA (machine file, then DFA file).
    IntersectRegular,
    /// Intersect two blind machines.
    IntersectBlind,
    /// Union of two machines over the same alphabet.
    Union,
    /// Concatenation of two machines over the same alphabet.
    Concat,
    /// Star of one non-blind machine.
    Star,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version are successful exits; anything else is
            // a usage error.
            let code = if err.exit_code() == 0 { 0 } else { 3 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Run { machine, input, budget, trace } => cmd_run(&machine, &input, budget, trace),
        Command::Encode { k, word } => cmd_encode(k, &word),
        Command::Decode { vector } => cmd_decode(&vector),
        Command::Zoo { action } => match action {
            ZooCommand::List => cmd_zoo_list(),
            ZooCommand::Export { name, l } => cmd_zoo_export(&name, l),
        },
        Command::Compose { op, files } => cmd_compose(op, &files),
        Command::Check { machine, oracle, max_len, budget } => {
            cmd_check(&machine, &oracle, max_len, budget)
        }
        Command::Efa { action } => match action {
            EfaCommand::Run { machine, input, budget } => cmd_efa_run(&machine, &input, budget),
            EfaCommand::Translate { machine, n } => cmd_efa_translate(&machine, n),
        },
    }
}

fn exit_for(outcome: Outcome) -> ExitCode {
    match outcome {
        Outcome::Accept => ExitCode::SUCCESS,
        Outcome::Reject => ExitCode::from(1),
        Outcome::Inconclusive => ExitCode::from(2),
    }
}

fn read_file(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_hva(path: &Path) -> Result<HvaMachine, String> {
    let text = read_file(path)?;
    HvaMachine::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_efa(path: &Path) -> Result<EfaMachine, String> {
    let text = read_file(path)?;
    EfaMachine::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_dfa(path: &Path) -> Result<Dfa, String> {
    let text = read_file(path)?;
    Dfa::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Reads a machine file in any of the three formats, telling them apart by
/// their distinguishing top-level keys: group-register machines carry
/// "group", counter machines carry "counters", vector automata carry
/// neither.
fn load_any_machine(path: &Path) -> Result<ZooMachine, String> {
    let text = read_file(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| format!("{}: not valid JSON: {e}", path.display()))?;
    if value.get("group").is_some() {
        EfaMachine::from_json(&text)
            .map(ZooMachine::Efa)
            .map_err(|e| format!("{}: {e}", path.display()))
    } else if value.get("counters").is_some() {
        CounterMachine::from_json(&text)
            .map(ZooMachine::Counter)
            .map_err(|e| format!("{}: {e}", path.display()))
    } else {
        HvaMachine::from_json(&text)
            .map(ZooMachine::Hva)
            .map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn cmd_run(machine: &Path, input: &str, budget: u64, trace: bool) -> Result<ExitCode, String> {
    let m = load_hva(machine)?;
    let opts = RunOptions { budget, want_trace: trace, dedup: true };
    let verdict = engine::run(&m, input, &opts).map_err(|e| e.to_string())?;
    out!(
        "{} ({} configurations expanded, max frontier {})",
        verdict.outcome.as_str(),
        verdict.stats.configurations_expanded,
        verdict.stats.max_frontier
    );
    if verdict.outcome == Outcome::Inconclusive {
        out!("expansion budget of {budget} exhausted before the run settled");
    }
    if trace {
        if let Some(steps) = &verdict.trace {
            out!("{:#}", engine::trace_to_json(steps));
        }
    }
    Ok(exit_for(verdict.outcome))
}

fn cmd_encode(k: usize, word: &str) -> Result<ExitCode, String> {
    let vector = sternbrocot::encode(k, word).map_err(|e| e.to_string())?;
    out!("{vector}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_decode(vector: &str) -> Result<ExitCode, String> {
    let vector = parse_vector(vector)?;
    match sternbrocot::decode(&vector) {
        Ok(word) => {
            out!("{word}");
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            out!("invalid");
            eprintln!("{e}");
            Ok(ExitCode::from(1))
        }
    }
}

fn parse_vector(text: &str) -> Result<QVector, String> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| format!("expected a vector like [2,3], got {text:?}"))?;
    let mut entries = Vec::new();
    for piece in inner.split(',') {
        let piece = piece.trim();
        entries.push(Rational::parse(piece).map_err(|e| format!("entry {piece:?}: {e}"))?);
    }
    Ok(QVector::from_rationals(entries))
}

fn cmd_zoo_list() -> Result<ExitCode, String> {
    out!("machines:");
    for name in zoo::names() {
        let blurb = zoo::describe(name).map_err(|e| e.to_string())?;
        out!("  {name:<14}{blurb}");
    }
    out!();
    out!("oracle-only languages (usable with `check --oracle`):");
    for name in zoo::oracle_only_names() {
        let blurb = zoo::describe(name).map_err(|e| e.to_string())?;
        out!("  {name:<14}{blurb}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_zoo_export(name: &str, l: Option<usize>) -> Result<ExitCode, String> {
    if zoo::oracle_only_names().contains(&name) {
        return Err(format!(
            "{name:?} is an oracle-only language with no machine to export; \
             use it with `check --oracle {name}`"
        ));
    }
    let entry = match l {
        Some(l) => {
            if !name.starts_with("mpal") {
                return Err(format!("--l only applies to the mpal family, not {name:?}"));
            }
            zoo::build_mpal(l).map_err(|e| e.to_string())?
        }
        None => zoo::build(name).map_err(|e| e.to_string())?,
    };
    out!("{}", entry.machine.to_json());
    Ok(ExitCode::SUCCESS)
}

fn cmd_compose(op: ComposeOp, files: &[PathBuf]) -> Result<ExitCode, String> {
    let composed = match op {
        ComposeOp::IntersectRegular => {
            let [machine, dfa] =
                expect_files(files, "intersect-regular takes a machine file and a DFA file")?;
            let m = load_hva(machine)?;
            let d = load_dfa(dfa)?;
            constructions::intersect_regular(&m, &d).map_err(|e| e.to_string())?
        }
        ComposeOp::IntersectBlind => {
            let [left, right] = expect_files(files, "intersect-blind takes two machine files")?;
            constructions::intersect_blind(&load_hva(left)?, &load_hva(right)?)
                .map_err(|e| e.to_string())?
        }
        ComposeOp::Union => {
            let [left, right] = expect_files(files, "union takes two machine files")?;
            constructions::union_nondet(&load_hva(left)?, &load_hva(right)?)
                .map_err(|e| e.to_string())?
        }
        ComposeOp::Concat => {
            let [left, right] = expect_files(files, "concat takes two machine files")?;
            constructions::concat_nondet(&load_hva(left)?, &load_hva(right)?)
                .map_err(|e| e.to_string())?
        }
        ComposeOp::Star => {
            let [inner] = expect_files(files, "star takes one machine file")?;
            constructions::star_nondet(&load_hva(inner)?).map_err(|e| e.to_string())?
        }
    };
    out!("{}", composed.to_json());
    Ok(ExitCode::SUCCESS)
}

fn expect_files<'a, const N: usize>(
    files: &'a [PathBuf],
    usage: &str,
) -> Result<[&'a PathBuf; N], String> {
    if files.len() != N {
        return Err(format!("{usage}; {} given", files.len()));
    }
    let mut it = files.iter();
    Ok(std::array::from_fn(|_| it.next().expect("length checked above")))
}

fn cmd_check(
    machine: &Path,
    oracle: &str,
    max_len: usize,
    budget: u64,
) -> Result<ExitCode, String> {
    let m = load_any_machine(machine)?;
    let oracle = zoo::oracle(oracle).map_err(|e| e.to_string())?;
    let report = zoo::check(&m, &*oracle, max_len, &CheckOptions { budget });
    out!("{}", report.summary());
    const SHOWN: usize = 20;
    for failure in report.failures.iter().take(SHOWN) {
        out!("  {failure}");
    }
    if report.failures.len() > SHOWN {
        out!("  ... and {} more", report.failures.len() - SHOWN);
    }
    Ok(if report.ok() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_efa_run(machine: &Path, input: &str, budget: u64) -> Result<ExitCode, String> {
    let m = load_efa(machine)?;
    let opts = RunOptions { budget, want_trace: false, dedup: true };
    let verdict = freegroup::run_efa(&m, input, &opts).map_err(|e| e.to_string())?;
    out!(
        "{} ({} configurations expanded, max frontier {})",
        verdict.outcome.as_str(),
        verdict.stats.configurations_expanded,
        verdict.stats.max_frontier
    );
    if verdict.outcome == Outcome::Inconclusive {
        out!("expansion budget of {budget} exhausted before the run settled");
    }
    Ok(exit_for(verdict.outcome))
}

fn cmd_efa_translate(machine: &Path, n: i64) -> Result<ExitCode, String> {
    let m = load_efa(machine)?;
    let translated = match m.group {
        GroupTag::F2 => freegroup::translate_efa_f2(&m, n),
        GroupTag::F2xF2 => freegroup::translate_efa_f2xf2(&m, n),
    }
    .map_err(|e| e.to_string())?;
    out!("{}", translated.to_json());
    Ok(ExitCode::SUCCESS)
}
