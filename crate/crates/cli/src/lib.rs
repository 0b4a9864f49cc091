//! Command-line front end for `sep2n`.
//!
//! Exit codes: 0 success or separable, 1 entangled / inconclusive / failed
//! verification, 2 ambiguous, 64 usage or malformed file, 65 invalid data,
//! 70 numerical failure.

pub mod commands;
pub mod exit;
pub mod experiment;
pub mod files;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sep2n::ToleranceConfig;

use crate::exit::Failure;

#[derive(Debug, Parser)]
#[command(name = "sep2n", version, about = "Decide and certify separability of 2xN density operators")]
pub struct Cli {
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ToleranceArgs {
    /// Relative eigenvalue cutoff for rank and kernel decisions.
    #[arg(long, global = true, value_name = "TOL")]
    pub rank_tol: Option<f64>,
    /// Most negative eigenvalue still treated as positive semidefinite.
    #[arg(long, global = true, value_name = "TOL")]
    pub psd_tol: Option<f64>,
    /// Largest accepted reconstruction error relative to the trace.
    #[arg(long, global = true, value_name = "TOL")]
    pub recon_tol: Option<f64>,
}

impl ToleranceArgs {
    pub fn config(&self) -> Result<ToleranceConfig<f64>, Failure> {
        let mut cfg = ToleranceConfig::default();
        if let Some(t) = self.rank_tol {
            cfg.rank_tol = t;
        }
        if let Some(t) = self.psd_tol {
            cfg.psd_tol = t;
        }
        if let Some(t) = self.recon_tol {
            cfg.recon_tol = t;
        }
        cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Two qubits: peres2x2; PT-invariant: theorem2; rank ≤ N: rank-n; otherwise certificate.
    Auto,
    /// PT-invariant operators.
    Theorem2,
    /// PPT operators of rank at most N.
    RankN,
    /// Complete two-qubit procedure.
    Peres2x2,
    /// Norm certificate.
    Certificate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    /// G·G† with G of size 2N × rank.
    Density,
    /// Mixture of random product projectors.
    Separable,
    /// Random state with positive partial transpose.
    Ppt,
    /// Random state with a negative partial-transpose eigenvalue.
    Npt,
    /// (ρ + ρ^T_A)/2 of a random PPT state.
    PtInvariant,
    /// p·|ψ⁻⟩⟨ψ⁻| + (1 − p)·I/4 (two qubits).
    Werner,
    /// Random product projector.
    Product,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the smallest eigenvalue of the partial transpose (exit 0 PPT, 1 NPT, 2 within --psd-tol of zero).
    Ppt {
        state: PathBuf,
    },
    /// Build a separable decomposition.
    Decompose {
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        /// Optimize the certificate scales (certificate method only).
        #[arg(long)]
        optimize_a: bool,
        /// Where to write the decomposition file.
        #[arg(short, long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run the norm certificate and print its value.
    Certify {
        state: PathBuf,
        /// Optimize the scales a_i by coordinate search.
        #[arg(long)]
        optimize_a: bool,
        /// Use the norm-product test ‖(ρ+ρ^T_A)^-1‖·‖ρ−ρ^T_A‖ ≤ 1 instead.
        #[arg(long, conflicts_with = "optimize_a")]
        norm_product: bool,
        /// Where to write the decomposition when certified.
        #[arg(short, long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Check a decomposition file against a state file (exit 0 match, 1 mismatch).
    Verify {
        state: PathBuf,
        decomposition: PathBuf,
    },
    /// Generate a seeded random state file.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        /// Dimension N of the second factor.
        #[arg(short = 'n', long, default_value_t = 2)]
        dim_b: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rank for `density` (default 2N).
        #[arg(long)]
        rank: Option<usize>,
        /// Number of product terms for `separable` (default N).
        #[arg(long)]
        terms: Option<usize>,
        /// Mixing parameter for `werner`.
        #[arg(long)]
        p: Option<f64>,
        /// Output file; stdout when omitted.
        #[arg(short, long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run batch sweeps described by a JSON config and write CSV.
    Experiment {
        config: PathBuf,
        /// Output CSV; stdout when omitted.
        #[arg(short, long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Fill the wall_time column (makes the output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, A>(args: I) -> u8
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("sep2n: {f}");
            f.code
        }
    }
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    let cfg = cli.tolerances.config()?;
    match &cli.command {
        Command::Ppt { state } => commands::ppt(state, &cfg),
        Command::Decompose { state, method, optimize_a, out } => {
            commands::decompose(state, *method, *optimize_a, out.as_deref(), &cfg)
        }
        Command::Certify { state, optimize_a, norm_product, out } => {
            commands::certify(state, *optimize_a, *norm_product, out.as_deref(), &cfg)
        }
        Command::Verify { state, decomposition } => commands::verify(state, decomposition, &cfg),
        Command::Gen { kind, dim_b, seed, rank, terms, p, out } => {
            commands::gen(*kind, *dim_b, *seed, *rank, *terms, *p, out.as_deref())
        }
        Command::Experiment { config, out, timing } => experiment::run(config, out.as_deref(), *timing, &cfg),
    }
}
