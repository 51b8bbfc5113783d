mod commands;
mod echo_cmd;
mod source;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use echolab_core::Error;
use serde_json::{json, Value};

use crate::commands::{AlignArgs, AnalyzeArgs, EvalArgs, KbonacciArgs, PairsArgs};
use crate::echo_cmd::EchoArgs;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Budget(_) | Error::PrefixTooShort { .. }) => EXIT_BUDGET,
            CliError::Core(Error::InsufficientData { .. } | Error::Internal(_)) => EXIT_FAILED,
            _ => EXIT_USAGE,
        }
    }
}

/// What a subcommand produced, in both renderings.
pub struct Report {
    pub text: String,
    pub json: Value,
    pub code: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "echolab", version, about = "Substitutive words, balanced pairs and echoing certificates")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Print version, start time and elapsed time to stderr as JSON
    #[arg(long, global = true)]
    meta: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Incidence matrix, primitivity and Pisot verdicts
    Analyze(AnalyzeArgs),
    /// Balanced-pair closure and the coincidence condition
    Pairs(PairsArgs),
    /// Build or load an echoing certificate and verify it
    Echo(Box<EchoArgs>),
    /// The explicit k-bonacci pair system and its cycle-cover checks
    Kbonacci(KbonacciArgs),
    /// Enclose the number whose base-beta digits are the fixed point
    Eval(EvalArgs),
    /// Show the fixed point against two of its shifts
    Align(AlignArgs),
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::Pairs(a) => commands::pairs(a),
        Command::Echo(a) => echo_cmd::echo(a),
        Command::Kbonacci(a) => commands::kbonacci(a),
        Command::Eval(a) => commands::eval(a),
        Command::Align(a) => commands::align(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let unix_time = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let code = match run(&cli) {
        Ok(report) => {
            let body = match cli.format {
                Format::Text => report.text,
                Format::Json => serde_json::to_string_pretty(&report.json).expect("reports serialize") + "\n",
            };
            // a closed pipe (e.g. `| head`) is not worth a panic
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            report.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    if cli.meta {
        let meta = json!({
            "version": env!("CARGO_PKG_VERSION"),
            "unix_time": unix_time,
            "elapsed_ms": started.elapsed().as_millis() as u64,
            "exit_code": code,
        });
        eprintln!("{meta}");
    }
    ExitCode::from(code)
}
