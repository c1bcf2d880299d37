//! `irrepcore` command-line tool.
//!
//! Exit codes: 0 success, 1 verification failure, 2 domain or capacity error, 64 usage error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "irrepcore", version, about = "E(3)-equivariant tensor algebra tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Blob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LayoutArg {
    General,
    Compact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParamsKind {
    Dense,
    Tensor,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate real spherical harmonics; prints `l,m,value` rows.
    Sh {
        /// Vector as `x,y,z`.
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long = "L")]
        max_degree: usize,
    },
    /// Build the Clebsch-Gordan table and export it.
    Cgc {
        #[arg(long = "L")]
        max_degree: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named equivariance suite; prints one JSON line per operation.
    Check {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long = "L", default_value_t = 2)]
        max_degree: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "F", default_value_t = 4)]
        features: usize,
    },
    /// Time the table build, tensor products and harmonic evaluation.
    Bench {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Calls per timed loop.
        #[arg(long, default_value_t = 10_000)]
        calls: usize,
    },
    /// Featurize a displacement vector with a radial basis; prints `l,m,k,value` rows.
    Featurize {
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long = "L")]
        max_degree: usize,
        #[arg(long, default_value = "gaussian")]
        radial_kind: String,
        #[arg(long, default_value_t = 8)]
        radial_count: usize,
        #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
        cutoff: f64,
        /// Also write the features as an `IRRF` blob.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Initialize layer parameters and write them as an `E3PR` blob.
    Params {
        #[arg(long, value_enum)]
        kind: ParamsKind,
        #[arg(long = "L")]
        max_degree: usize,
        #[arg(long = "F", default_value_t = 4)]
        features: usize,
        /// Output features of a dense layer.
        #[arg(long = "F-out")]
        features_out: Option<usize>,
        #[arg(long, value_enum, default_value = "general")]
        layout: LayoutArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
