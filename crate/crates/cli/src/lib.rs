//! The `summa` command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use summa_core::Error;

mod args;
mod commands;
pub mod report;
pub mod suites;

pub use args::*;
pub use report::{Cell, Check, Report, Table};

pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_GUARD: i32 = 4;
pub const EXIT_INVALID: i32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "summa", version, about = "Exact finite-scale checks for sums, measures, dyadic analysis, martingales and paths")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct Global {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "table")]
    pub format: Format,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, env = "SUMMA_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Absolute tolerance for float comparisons.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Largest index set enumerated exhaustively.
    #[arg(long, global = true)]
    pub guard_subsets: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sequence norms and their inequalities.
    #[command(subcommand)]
    Norms(NormsCmd),
    /// Unordered sums of finite and streamed families.
    #[command(subcommand)]
    Sums(SumsCmd),
    /// Measures on finite atomic spaces.
    #[command(subcommand)]
    Measures(MeasuresCmd),
    /// Dyadic steps, maximal functions and Rademacher sums.
    #[command(subcommand)]
    Dyadic(DyadicCmd),
    /// Filtrations, martingales and stopping times.
    #[command(subcommand)]
    Mart(MartCmd),
    /// Polylines: length, variation, path measures and Stieltjes sums.
    #[command(subcommand)]
    Path(PathCmd),
    /// Unit-ball geometry of finite-dimensional norms.
    #[command(subcommand)]
    Convexity(ConvexityCmd),
    /// Named verification batteries.
    Suite(SuiteArgs),
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_INPUT,
        Error::Guard { .. } => EXIT_GUARD,
        _ => EXIT_INVALID,
    }
}

/// Parses `args`, runs the command and writes the report; returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let echo = std::iter::once("summa".to_string())
        .chain(args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()))
        .collect::<Vec<_>>()
        .join(" ");
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    if let Some(tau) = cli.global.tol {
        summa_core::scalar::set_tolerance(tau);
    }
    if let Some(g) = cli.global.guard_subsets {
        summa_core::sums::set_subset_guard(g);
    }
    let report = match commands::dispatch(&cli, echo) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "summa: {e}");
            return exit_code(&e);
        }
    };
    let text = report.render(cli.global.format);
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &text).map_err(|e| e.to_string()),
        None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "summa: cannot write report: {e}");
        return EXIT_INVALID;
    }
    if report.passed() {
        0
    } else {
        EXIT_CHECK_FAILED
    }
}
