//! Command-line surface for `farkas-core`.
//!
//! Every command renders to `farkas 1`-style text (default) or TSV and
//! returns an exit status: 0 for a verified positive outcome, 1 for a
//! verified negative one, 2 for errors. Output is a pure function of the
//! inputs and flags; wall-clock timings go to stderr only.

use std::io::Read as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub mod commands;
pub mod output;

pub use commands::{ExactCheck, RunReport};
pub use output::{Format, Outcome, Status};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("{0}")]
    Failed(String),
}

#[derive(Debug, Parser)]
#[command(name = "farkas", version, about = "Certified decisions for the Farkas alternative")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Absolute tolerance; defaults to 1e-9·(1 + max(|A|, |b|)) per instance.
    #[arg(long, global = true, env = "FARKAS_TOL")]
    pub tol: Option<f64>,
    /// Seed for commands that sample.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Print per-instance wall-clock timings to stderr.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Membership,
    Separation,
    Random,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide membership for each instance file (`-` reads stdin).
    Decide {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Cross-check with the exact oracle when m, n ≤ 6.
        #[arg(long)]
        exact_check: bool,
    },
    /// Nearest point of the cone to b.
    Project { file: PathBuf },
    /// Reduce coefficients to an independent support.
    Reduce {
        file: PathBuf,
        /// Coefficients; defaults to the file's `x` field, else the projection's.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Rewrite Ax as λ·Au with u optimal.
    Optimal {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, default_value_t = farkas_core::decomposition::DEFAULT_NMAX)]
        nmax: usize,
    },
    /// Check the certificate section of an instance file.
    Verify { file: PathBuf },
    /// Generate a seeded instance.
    Gen {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = BranchArg::Random)]
        branch: BranchArg,
        #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        hi: f64,
    },
    /// Lower bound on ‖Au‖ over optimal u.
    Cbound {
        file: PathBuf,
        #[arg(long, default_value_t = farkas_core::decomposition::DEFAULT_NMAX)]
        nmax: usize,
        /// Random optimal vectors for the upper estimate; 0 skips it.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// The logarithmic cone: members (1, −1/k) with a non-member limit.
    DemoLncone {
        #[arg(long, default_value_t = 10)]
        kmax: usize,
    },
    /// Check that limits of convergent sequences in K stay in K.
    Closedness {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 40)]
        terms: usize,
        #[arg(long, default_value_t = 4)]
        max_m: usize,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        #[arg(long, default_value_t = 1e-7)]
        verify_tol: f64,
    },
}

/// Runs a parsed command line, returning the report without writing it.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if let Some(tol) = cli.common.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::Argument(format!("--tol must be positive and finite, got {tol}")));
        }
    }
    commands::dispatch(&cli.common, &cli.command)
}

/// Parses, runs, writes output, and returns the process exit code.
pub fn main_with_args<I, S>(args: I) -> u8
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Status::Error.code() } else { Status::Ok.code() };
        }
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return Status::Error.code();
        }
    };
    let rendered = outcome.render(cli.common.format);
    let written = match &cli.common.output {
        Some(path) => std::fs::write(path, rendered).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{rendered}");
            Ok(())
        }
    };
    match written {
        Ok(()) => outcome.status.code(),
        Err(e) => {
            eprintln!("error: {e}");
            Status::Error.code()
        }
    }
}

pub(crate) fn read_source(path: &Path) -> Result<String, CliError> {
    let label = path.display().to_string();
    if label == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|source| CliError::Io { path: label, source })?;
        return Ok(text);
    }
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: label, source })
}
