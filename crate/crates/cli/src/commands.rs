//! One function per subcommand. Reports go to stdout as `key: value` lines.

use std::path::Path;

use clap::ValueEnum;
use sep2n::bipartite::{partial_transpose_matrix, pt_defect, verify_decomposition};
use sep2n::certificate::{corollary3_check, theorem3_certify, AStrategy, CertificateReport, Method, Verdict};
use sep2n::decompose::{decompose_pt_invariant, decompose_rank_n};
use sep2n::linalg::{min_eigenvalue, rank_kernel_range};
use sep2n::peres::{decompose_2x2, TwoQubitVerdict};
use sep2n::stategen::{
    random_density, random_npt, random_ppt, random_product, random_pt_invariant, random_separable, werner,
};
use sep2n::{DensityOperator, Error, SeparableDecomposition, ToleranceConfig};

use crate::exit::{self, Failure};
use crate::files::{read_json, write_json, DecompositionFile, StateFile};
use crate::{GenKind, MethodArg};

pub fn load_state(path: &Path, cfg: &ToleranceConfig<f64>) -> Result<DensityOperator<f64>, Failure> {
    read_json::<StateFile>(path)?.to_operator(cfg)
}

pub fn min_pt_eigenvalue(rho: &DensityOperator<f64>) -> Result<f64, Failure> {
    Ok(min_eigenvalue(&partial_transpose_matrix(rho.matrix(), rho.dim_b()))?)
}

pub fn ppt(path: &Path, cfg: &ToleranceConfig<f64>) -> Result<u8, Failure> {
    let rho = load_state(path, cfg)?;
    let m = min_pt_eigenvalue(&rho)?;
    println!("min_pt_eigenvalue: {m}");
    let (verdict, code) = if m.abs() <= cfg.psd_tol {
        ("ambiguous", exit::AMBIGUOUS)
    } else if m > 0.0 {
        ("ppt", exit::OK)
    } else {
        ("npt", exit::NEGATIVE)
    };
    println!("verdict: {verdict}");
    Ok(code)
}

/// The concrete method `auto` resolves to.
pub fn auto_method(rho: &DensityOperator<f64>, cfg: &ToleranceConfig<f64>) -> Result<MethodArg, Failure> {
    let n = rho.dim_b();
    if n == 2 {
        return Ok(MethodArg::Peres2x2);
    }
    if pt_defect(rho) <= cfg.recon_tol * rho.trace().abs().max(1.0) {
        return Ok(MethodArg::Theorem2);
    }
    let (rank, _, _) = rank_kernel_range(rho.matrix(), cfg)?;
    Ok(if rank <= n { MethodArg::RankN } else { MethodArg::Certificate })
}

fn method_name(m: MethodArg) -> String {
    m.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

fn certificate_method_name(m: Method) -> &'static str {
    match m {
        Method::Corollary3 => "norm-product",
        Method::Theorem3Default => "norm-default",
        Method::Theorem3Optimized => "norm-optimized",
    }
}

fn print_certificate(report: &CertificateReport<f64>) {
    println!("certificate: {}", certificate_method_name(report.method));
    println!("norm_value: {}", report.norm_value);
    println!("support_ok: {}", report.support_ok);
    if let Some(p) = report.norm_product {
        println!("norm_product: {p}");
    }
}

fn finish_separable(
    rho: &DensityOperator<f64>,
    dec: &SeparableDecomposition<f64>,
    out: Option<&Path>,
    cfg: &ToleranceConfig<f64>,
) -> Result<u8, Failure> {
    let v = verify_decomposition(rho, dec, cfg)?;
    if !v.ok {
        return Err(Failure {
            code: exit::SOFTWARE,
            message: format!("decomposition does not reconstruct the input (relative error {:e})", v.relative_error),
        });
    }
    println!("verdict: separable");
    println!("terms: {}", dec.len());
    println!("recon_error: {}", v.relative_error);
    if let Some(path) = out {
        write_json(Some(path), &DecompositionFile::from_decomposition(dec))?;
    }
    Ok(exit::OK)
}

pub fn decompose(
    path: &Path,
    method: MethodArg,
    optimize_a: bool,
    out: Option<&Path>,
    cfg: &ToleranceConfig<f64>,
) -> Result<u8, Failure> {
    let rho = load_state(path, cfg)?;
    let method = if method == MethodArg::Auto { auto_method(&rho, cfg)? } else { method };
    println!("method: {}", method_name(method));
    let min_pt = min_pt_eigenvalue(&rho)?;
    if method != MethodArg::Peres2x2 && min_pt < -cfg.psd_tol {
        println!("verdict: entangled");
        println!("min_pt_eigenvalue: {min_pt}");
        return Ok(exit::NEGATIVE);
    }
    let dec = match method {
        MethodArg::Peres2x2 => match decompose_2x2(&rho, cfg)? {
            TwoQubitVerdict::Separable { decomposition, .. } => decomposition,
            TwoQubitVerdict::Entangled { min_pt_eigenvalue } => {
                println!("verdict: entangled");
                println!("min_pt_eigenvalue: {min_pt_eigenvalue}");
                return Ok(exit::NEGATIVE);
            }
            TwoQubitVerdict::Ambiguous { min_pt_eigenvalue } => {
                println!("verdict: ambiguous");
                println!("min_pt_eigenvalue: {min_pt_eigenvalue}");
                return Ok(exit::AMBIGUOUS);
            }
        },
        MethodArg::Theorem2 => decompose_pt_invariant(&rho, cfg)?.0,
        MethodArg::RankN => decompose_rank_n(&rho, cfg)?.0,
        MethodArg::Certificate | MethodArg::Auto => {
            let strategy = if optimize_a { AStrategy::Optimize } else { AStrategy::Default };
            let report = theorem3_certify(&rho, strategy, cfg)?;
            print_certificate(&report);
            match report.decomposition {
                Some(d) => d,
                None => {
                    println!("verdict: inconclusive");
                    return Ok(exit::NEGATIVE);
                }
            }
        }
    };
    finish_separable(&rho, &dec, out, cfg)
}

pub fn certify(
    path: &Path,
    optimize_a: bool,
    norm_product: bool,
    out: Option<&Path>,
    cfg: &ToleranceConfig<f64>,
) -> Result<u8, Failure> {
    let rho = load_state(path, cfg)?;
    let report = if norm_product {
        corollary3_check(&rho, cfg)?
    } else {
        let strategy = if optimize_a { AStrategy::Optimize } else { AStrategy::Default };
        theorem3_certify(&rho, strategy, cfg)?
    };
    print_certificate(&report);
    match (&report.verdict, &report.decomposition) {
        (Verdict::CertifiedSeparable, Some(dec)) => {
            println!("verdict: certified");
            println!("terms: {}", dec.len());
            if let Some(path) = out {
                write_json(Some(path), &DecompositionFile::from_decomposition(dec))?;
            }
            Ok(exit::OK)
        }
        _ => {
            println!("verdict: inconclusive");
            Ok(exit::NEGATIVE)
        }
    }
}

pub fn verify(state: &Path, decomposition: &Path, cfg: &ToleranceConfig<f64>) -> Result<u8, Failure> {
    let rho = load_state(state, cfg)?;
    let file: DecompositionFile = read_json(decomposition)?;
    let n = file.dim_b()?;
    if n != rho.dim_b() {
        return Err(Failure::data(format!(
            "dimension mismatch: state is 2x{}, decomposition is 2x{n}",
            rho.dim_b()
        )));
    }
    let dec = file.to_decomposition()?;
    let v = verify_decomposition(&rho, &dec, cfg)?;
    println!("terms: {}", dec.len());
    println!("weights_positive: {}", v.weights_positive);
    println!("recon_error: {}", v.relative_error);
    println!("verdict: {}", if v.ok { "match" } else { "mismatch" });
    Ok(if v.ok { exit::OK } else { exit::NEGATIVE })
}

fn gen_failure(e: Error) -> Failure {
    match e {
        Error::InvalidArgument(m) => Failure::usage(m),
        other => other.into(),
    }
}

pub fn generate(
    kind: GenKind,
    dim_b: usize,
    seed: u64,
    rank: Option<usize>,
    terms: Option<usize>,
    p: Option<f64>,
) -> Result<DensityOperator<f64>, Failure> {
    if dim_b == 0 {
        return Err(Failure::usage("--dim-b must be at least 1"));
    }
    let rho = match kind {
        GenKind::Density => random_density(dim_b, rank.unwrap_or(2 * dim_b), seed),
        GenKind::Separable => random_separable(dim_b, terms.unwrap_or(dim_b), seed).map(|(rho, _)| rho),
        GenKind::Ppt => random_ppt(dim_b, seed).map(|s| s.state),
        GenKind::Npt => random_npt(dim_b, seed).map(|s| s.state),
        GenKind::PtInvariant => random_pt_invariant(dim_b, seed),
        GenKind::Product => Ok(DensityOperator::projector(dim_b, &random_product(dim_b, seed))),
        GenKind::Werner => {
            let p = p.ok_or_else(|| Failure::usage("werner requires --p"))?;
            if dim_b != 2 {
                return Err(Failure::usage("werner states are two-qubit states (--dim-b 2)"));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Failure::usage(format!("--p must lie in [0, 1], got {p}")));
            }
            Ok(werner(p))
        }
    };
    rho.map_err(gen_failure)
}

pub fn gen(
    kind: GenKind,
    dim_b: usize,
    seed: u64,
    rank: Option<usize>,
    terms: Option<usize>,
    p: Option<f64>,
    out: Option<&Path>,
) -> Result<u8, Failure> {
    let rho = generate(kind, dim_b, seed, rank, terms, p)?;
    let label = kind.to_possible_value().map(|v| v.get_name().to_string());
    let seed = (kind != GenKind::Werner).then_some(seed);
    write_json(out, &StateFile::from_operator(&rho, label, seed))?;
    Ok(exit::OK)
}
