//! Batch sweeps with CSV output.
//!
//! A config is a JSON object with a `sweeps` array; each sweep names a
//! `family` and its parameters:
//!
//! ```json
//! {"sweeps": [
//!   {"family": "werner", "params": [0.0, 0.3, 0.36]},
//!   {"family": "werner_bisection", "lo": 0.2, "hi": 0.5, "steps": 30},
//!   {"family": "pt_perturbation", "dim_b": 3, "seed": 7, "instances": 4,
//!    "params": [0.0, 0.01, 0.1], "optimize_a": false},
//!   {"family": "pt_invariant", "dim_b": 4, "seed": 1, "instances": 10},
//!   {"family": "two_qubit", "seed": 1, "instances": 20}
//! ]}
//! ```
//!
//! Sweeps expand into jobs that run in parallel; rows are written in job
//! order, so the CSV depends only on the config and tolerances unless
//! `--timing` is given.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use sep2n::bipartite::verify_decomposition;
use sep2n::certificate::{sigma_y_kron, theorem3_certify, AStrategy, Verdict};
use sep2n::decompose::decompose_pt_invariant;
use sep2n::linalg::operator_norm;
use sep2n::peres::{decompose_2x2, TwoQubitVerdict};
use sep2n::stategen::{random_density, random_pt_invariant, werner, StateRng};
use sep2n::{DensityOperator, Error, ToleranceConfig, C};

use crate::exit::{self, Failure};
use crate::files::read_json;

#[derive(Debug, Clone, Deserialize)]
pub struct Config {
    pub sweeps: Vec<Sweep>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Sweep {
    /// Two-qubit decision on `werner(p)` for each listed `p`.
    Werner { params: Vec<f64> },
    /// Bisection on `p` for the separable/entangled switch of the Werner family.
    WernerBisection { lo: f64, hi: f64, steps: usize },
    /// Certificate on `ρ_pt + ε·σ_y⊗E` for random PT-invariant `ρ_pt` and
    /// random Hermitian `E` of unit operator norm.
    PtPerturbation {
        dim_b: usize,
        #[serde(default)]
        seed: u64,
        instances: usize,
        params: Vec<f64>,
        #[serde(default)]
        optimize_a: bool,
    },
    /// Decomposition of random PT-invariant states.
    PtInvariant {
        dim_b: usize,
        #[serde(default)]
        seed: u64,
        instances: usize,
    },
    /// Two-qubit decision on random density matrices of rank `1 + seed % 4`.
    TwoQubit {
        #[serde(default)]
        seed: u64,
        instances: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub family: &'static str,
    pub param: f64,
    pub verdict: String,
    pub norm_value: Option<f64>,
    pub terms: Option<usize>,
    pub recon_error: Option<f64>,
    pub wall_time: Option<f64>,
}

impl Row {
    fn new(family: &'static str, param: f64, verdict: &str) -> Self {
        Self {
            family,
            param,
            verdict: verdict.to_string(),
            norm_value: None,
            terms: None,
            recon_error: None,
            wall_time: None,
        }
    }
}

#[derive(Debug, Clone)]
enum Job {
    Werner(f64),
    Bisection { lo: f64, hi: f64, steps: usize },
    Perturbation { dim_b: usize, seed: u64, eps: f64, optimize_a: bool },
    PtInvariant { dim_b: usize, seed: u64 },
    TwoQubit { seed: u64 },
}

fn expand(config: &Config) -> Result<Vec<Job>, Failure> {
    let mut jobs = Vec::new();
    for sweep in &config.sweeps {
        match sweep {
            Sweep::Werner { params } => jobs.extend(params.iter().map(|&p| Job::Werner(p))),
            Sweep::WernerBisection { lo, hi, steps } => {
                if lo.is_nan() || hi.is_nan() || lo >= hi {
                    return Err(Failure::usage(format!("werner_bisection needs lo < hi, got {lo} and {hi}")));
                }
                jobs.push(Job::Bisection { lo: *lo, hi: *hi, steps: *steps });
            }
            Sweep::PtPerturbation { dim_b, seed, instances, params, optimize_a } => {
                for i in 0..*instances as u64 {
                    for &eps in params {
                        jobs.push(Job::Perturbation {
                            dim_b: *dim_b,
                            seed: seed.wrapping_add(i),
                            eps,
                            optimize_a: *optimize_a,
                        });
                    }
                }
            }
            Sweep::PtInvariant { dim_b, seed, instances } => {
                jobs.extend((0..*instances as u64).map(|i| Job::PtInvariant { dim_b: *dim_b, seed: seed.wrapping_add(i) }))
            }
            Sweep::TwoQubit { seed, instances } => {
                jobs.extend((0..*instances as u64).map(|i| Job::TwoQubit { seed: seed.wrapping_add(i) }))
            }
        }
    }
    for job in &jobs {
        match job {
            Job::Werner(p) if !(0.0..=1.0).contains(p) => {
                return Err(Failure::usage(format!("werner parameter {p} outside [0, 1]")))
            }
            Job::Bisection { lo, hi, .. } if *lo < 0.0 || *hi > 1.0 => {
                return Err(Failure::usage("werner_bisection bounds must lie in [0, 1]"))
            }
            Job::Perturbation { dim_b: 0, .. } | Job::PtInvariant { dim_b: 0, .. } => {
                return Err(Failure::usage("dim_b must be at least 1"))
            }
            _ => {}
        }
    }
    Ok(jobs)
}

fn error_row(family: &'static str, param: f64, e: &Error) -> Row {
    let kind = if exit::classify(e) == exit::DATA { "invalid" } else { "error" };
    Row::new(family, param, kind)
}

fn two_qubit_row(family: &'static str, param: f64, rho: &DensityOperator<f64>, cfg: &ToleranceConfig<f64>) -> Row {
    match decompose_2x2(rho, cfg) {
        Ok(TwoQubitVerdict::Separable { decomposition, .. }) => {
            let mut row = Row::new(family, param, "separable");
            row.terms = Some(decomposition.len());
            row.recon_error = verify_decomposition(rho, &decomposition, cfg).ok().map(|v| v.relative_error);
            row
        }
        Ok(TwoQubitVerdict::Entangled { .. }) => Row::new(family, param, "entangled"),
        Ok(TwoQubitVerdict::Ambiguous { .. }) => Row::new(family, param, "ambiguous"),
        Err(e) => error_row(family, param, &e),
    }
}

/// `ρ_pt + ε·σ_y⊗E`; `E` comes from a stream separate from `ρ_pt`'s.
pub fn perturbed_state(dim_b: usize, seed: u64, eps: f64) -> sep2n::Result<DensityOperator<f64>> {
    let base = random_pt_invariant::<f64>(dim_b, seed)?;
    let mut rng = StateRng::new(seed ^ 0x9e37_79b9_7f4a_7c15);
    let g = rng.gaussian_matrix::<f64>(dim_b, dim_b);
    let e = (&g + g.adjoint()) * C::new(0.5, 0.0);
    let e = &e * C::new(1.0 / operator_norm(&e), 0.0);
    let m = base.matrix() + sigma_y_kron(&e) * C::new(eps, 0.0);
    DensityOperator::new(dim_b, m, &ToleranceConfig::default())
}

fn run_job(job: &Job, timing: bool, cfg: &ToleranceConfig<f64>) -> Vec<Row> {
    let timed = |f: &dyn Fn() -> Row| -> Row {
        let start = Instant::now();
        let mut row = f();
        if timing {
            row.wall_time = Some(start.elapsed().as_secs_f64());
        }
        row
    };
    match job {
        Job::Werner(p) => vec![timed(&|| two_qubit_row("werner", *p, &werner(*p), cfg))],
        Job::Bisection { lo, hi, steps } => {
            let (mut lo, mut hi) = (*lo, *hi);
            let mut rows = Vec::with_capacity(*steps);
            for _ in 0..*steps {
                let mid = 0.5 * (lo + hi);
                let row = timed(&|| two_qubit_row("werner_bisection", mid, &werner(mid), cfg));
                if row.verdict == "separable" {
                    lo = mid;
                } else {
                    hi = mid;
                }
                rows.push(row);
            }
            rows
        }
        Job::Perturbation { dim_b, seed, eps, optimize_a } => vec![timed(&|| {
            let rho = match perturbed_state(*dim_b, *seed, *eps) {
                Ok(rho) => rho,
                Err(Error::NotPsd { .. }) => return Row::new("pt_perturbation", *eps, "not_psd"),
                Err(e) => return error_row("pt_perturbation", *eps, &e),
            };
            let strategy = if *optimize_a { AStrategy::Optimize } else { AStrategy::Default };
            match theorem3_certify(&rho, strategy, cfg) {
                Ok(report) => {
                    let certified = report.verdict == Verdict::CertifiedSeparable;
                    let mut row = Row::new("pt_perturbation", *eps, if certified { "certified" } else { "inconclusive" });
                    row.norm_value = Some(report.norm_value);
                    if let Some(dec) = &report.decomposition {
                        row.terms = Some(dec.len());
                        row.recon_error = verify_decomposition(&rho, dec, cfg).ok().map(|v| v.relative_error);
                    }
                    row
                }
                Err(e) => error_row("pt_perturbation", *eps, &e),
            }
        })],
        Job::PtInvariant { dim_b, seed } => vec![timed(&|| {
            let param = *seed as f64;
            let rho = match random_pt_invariant::<f64>(*dim_b, *seed) {
                Ok(rho) => rho,
                Err(e) => return error_row("pt_invariant", param, &e),
            };
            match decompose_pt_invariant(&rho, cfg) {
                Ok((dec, _)) => {
                    let mut row = Row::new("pt_invariant", param, "separable");
                    row.terms = Some(dec.len());
                    row.recon_error = verify_decomposition(&rho, &dec, cfg).ok().map(|v| v.relative_error);
                    row
                }
                Err(e) => error_row("pt_invariant", param, &e),
            }
        })],
        Job::TwoQubit { seed } => vec![timed(&|| {
            let param = *seed as f64;
            match random_density::<f64>(2, 1 + (*seed % 4) as usize, *seed) {
                Ok(rho) => two_qubit_row("two_qubit", param, &rho, cfg),
                Err(e) => error_row("two_qubit", param, &e),
            }
        })],
    }
}

/// Rows for every job of `config`, in job order.
pub fn rows(config: &Config, timing: bool, cfg: &ToleranceConfig<f64>) -> Result<Vec<Row>, Failure> {
    let jobs = expand(config)?;
    let per_job: Vec<Vec<Row>> = jobs.par_iter().map(|job| run_job(job, timing, cfg)).collect();
    Ok(per_job.into_iter().flatten().collect())
}

pub fn write_csv<W: std::io::Write>(rows: &[Row], sink: W) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(sink);
    for row in rows {
        w.serialize(row).map_err(|e| Failure::usage(e.to_string()))?;
    }
    w.flush().map_err(|e| Failure::usage(e.to_string()))
}

pub fn run(config: &Path, out: Option<&Path>, timing: bool, cfg: &ToleranceConfig<f64>) -> Result<u8, Failure> {
    let config: Config = read_json(config)?;
    let rows = rows(&config, timing, cfg)?;
    match out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            write_csv(&rows, file)?;
        }
        None => write_csv(&rows, std::io::stdout().lock())?,
    }
    let failed = rows.iter().filter(|r| r.verdict == "error").count();
    if failed > 0 {
        eprintln!("sep2n: {failed} instance(s) hit a numerical failure");
        return Ok(exit::SOFTWARE);
    }
    Ok(exit::OK)
}
