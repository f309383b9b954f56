//! `specmax`: evaluate spectral max functions, test subgradient membership,
//! compare subderivative formulas with finite differences, and run a
//! subgradient stabilization demo.
//!
//! Exit codes: 0 success or member, 1 non-member or failed check, 2 usage or
//! parse error, 3 domain error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use specmax::stabilize::StepRule;
use specmax::Builtin;

#[derive(Debug, Parser)]
#[command(
    name = "specmax",
    version,
    about = "Variational analysis of spectral max functions"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Structural-zero tolerance; the simplex tolerance is 10× and the
    /// inequality slack 0.1× this value.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Machine-readable output for commands that default to text or CSV.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SetKind {
    /// Regular subdifferential.
    Rsd,
    /// Its recession cone.
    Recession,
    /// Block structure shared by all limiting subgradients.
    LimitingStructure,
    /// Chain-rule representation (nonderogatory active eigenvalues).
    Chain,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// φ(X), the eigenvalues with multiplicities, and the active ones.
    Eval {
        /// Square matrix, rows of [re, im] pairs.
        matrix: PathBuf,
        #[arg(long = "f", default_value = "abscissa")]
        f: Builtin,
    },
    /// Test Y against a subdifferential set at a declared Jordan structure.
    Membership {
        spec: PathBuf,
        y: PathBuf,
        #[arg(long = "f", default_value = "abscissa")]
        f: Builtin,
        #[arg(long, value_enum, default_value = "rsd")]
        set: SetKind,
    },
    /// Subderivative formulas, optionally against a finite-difference oracle.
    Subderivative {
        #[command(subcommand)]
        kind: SubderivativeKind,
    },
    /// Reproduce the reference 3×3 fixtures A and B as a table of checks.
    PaperExamples {
        /// Length of the approximating sequence B^ν.
        #[arg(long, default_value_t = 100)]
        nu: usize,
    },
    /// Oracle suite for a member Y (sampled when not given).
    Verify {
        spec: PathBuf,
        #[arg(long = "f", default_value = "abscissa")]
        f: Builtin,
        #[arg(long)]
        y: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Subgradient descent on θ ↦ φ(A0 + Σ θ_k A_k); CSV trajectory.
    Stabilize {
        family: PathBuf,
        #[arg(long = "f", default_value = "abscissa")]
        f: Builtin,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long, default_value = "diminishing", value_parser = parse_rule)]
        step_rule: StepRule,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Starting parameters, comma separated (default all zero).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        theta0: Option<Vec<f64>>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SubderivativeKind {
    /// dφ(X̃)(Z) at a declared matrix.
    Matrix {
        spec: PathBuf,
        z: PathBuf,
        #[arg(long = "f", default_value = "abscissa")]
        f: Builtin,
        /// Also report finite-difference quotients.
        #[arg(long)]
        oracle: bool,
    },
    /// d𝔣(p̃)(v) at p̃ = Π(λ − λ_j)^{n_j}.
    Poly {
        /// `{"roots": [[re, im], …], "multiplicities": [n_1, …]}`
        roots: PathBuf,
        /// Coefficients of v by increasing power.
        v: PathBuf,
        #[arg(long = "f", default_value = "abscissa")]
        f: Builtin,
        #[arg(long)]
        oracle: bool,
    },
}

fn parse_rule(s: &str) -> Result<StepRule, String> {
    s.parse().map_err(|e: specmax::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match commands::run(&cli) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
