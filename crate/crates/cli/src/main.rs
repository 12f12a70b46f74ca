use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use abmirror_cli::{
    parse_json, parse_payload, run, AnalysisRequest, CliError, Command, GramDoc, Options, DEFAULT_SEED,
};
use abmirror_core::periods::NumericMode;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Mirror symmetry checks for lattice-polarized abelian surfaces.
///
/// Every command reads a JSON document from INPUT, or from standard input
/// when INPUT is omitted or `-`.
#[derive(Debug, Parser)]
#[command(name = "abmirror", version)]
struct Cli {
    /// Coordinate box for embedding and representation searches.
    #[arg(long, global = true, default_value_t = abmirror_core::mirror::DEFAULT_BOUND)]
    bound: u64,
    /// Largest group order handed to brute-force isometry search.
    #[arg(long, global = true, default_value_t = abmirror_core::disc::DEFAULT_CAP)]
    cap: u64,
    #[arg(long, global = true, value_enum, default_value_t = Numeric::Exact)]
    numeric: Numeric,
    /// Seed for sampled oracle runs.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Doc)]
    format: Format,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Numeric {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Pretty-printed JSON.
    Doc,
    /// Human-readable summary.
    Text,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Full report for `{"gram": [[...]]}`.
    Analyze { input: Option<PathBuf> },
    /// Partner test for `{"a": [[...]], "b": [[...]]}`, or two gram documents A and B.
    MirrorPair { a: Option<PathBuf>, b: Option<PathBuf> },
    /// Self-mirror verdict with an anti-automorphism witness.
    SelfMirror { input: Option<PathBuf> },
    /// Symplectic dual of `{"gram", "b", "kappa", "reference"?}`.
    Dual { input: Option<PathBuf> },
    /// Plucker vector and flags of `{"rows": [[[re, im] x 4] x 2]}`.
    Period { input: Option<PathBuf> },
    /// Criterion vs brute force over `{"entry_bound", "max_det", "samples"?, "grams"?}`.
    Oracle { input: Option<PathBuf> },
    /// Family table for `{"family", "from", "to", "threads"?}`.
    Sweep { input: Option<PathBuf> },
}

fn read_input(path: Option<&Path>) -> Result<Value, CliError> {
    let text = match path {
        None => read_stdin()?,
        Some(p) if p == Path::new("-") => read_stdin()?,
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
    };
    parse_json(&text)
}

fn read_stdin() -> Result<String, CliError> {
    let mut s = String::new();
    std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Io(format!("stdin: {e}")))?;
    Ok(s)
}

fn gram_of(path: &Path) -> Result<Value, CliError> {
    let v = read_input(Some(path))?;
    parse_payload::<GramDoc>(&v).map_err(|e| CliError::Validation(format!("{}: {}", path.display(), e.message())))?;
    Ok(v["gram"].clone())
}

fn request(cli: &Cli) -> Result<AnalysisRequest, CliError> {
    let (command, payload) = match &cli.command {
        Sub::Analyze { input } => (Command::Analyze, read_input(input.as_deref())?),
        Sub::MirrorPair { a: Some(a), b: Some(b) } => {
            (Command::MirrorPair, json!({ "a": gram_of(a)?, "b": gram_of(b)? }))
        }
        Sub::MirrorPair { a, .. } => (Command::MirrorPair, read_input(a.as_deref())?),
        Sub::SelfMirror { input } => (Command::SelfMirror, read_input(input.as_deref())?),
        Sub::Dual { input } => (Command::Dual, read_input(input.as_deref())?),
        Sub::Period { input } => (Command::Period, read_input(input.as_deref())?),
        Sub::Oracle { input } => (Command::Oracle, read_input(input.as_deref())?),
        Sub::Sweep { input } => (Command::Sweep, read_input(input.as_deref())?),
    };
    let numeric = match cli.numeric {
        Numeric::Exact => NumericMode::Exact,
        Numeric::Float => NumericMode::Float,
    };
    let options = Options { bound: cli.bound, cap: cli.cap, numeric, seed: cli.seed };
    Ok(AnalysisRequest { command, payload, options })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = request(&cli).and_then(|r| run(&r));
    match result {
        Ok(resp) => {
            match cli.format {
                Format::Doc => println!("{}", pretty(&resp.document)),
                Format::Text => println!("{}", resp.text),
            }
            ExitCode::from(resp.status.code() as u8)
        }
        Err(e) => {
            if cli.format == Format::Doc {
                println!("{}", pretty(&e.document()));
            }
            eprintln!("abmirror: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
