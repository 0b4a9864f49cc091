//! A sufficient separability test with an explicit witness.
//!
//! Any Hermitian `ρ` on `C^2 ⊗ C^N` splits as `ρ_s + σ_y ⊗ B` with
//! `ρ_s = (ρ + ρ^{T_A})/2` and `σ_y = i(|0⟩⟨1| − |1⟩⟨0|)`. Writing
//! `B = Σ λ_i |v_i⟩⟨v_i|` and choosing `a_i > 0`,
//! `C = Σ |λ_i| (a_i²|0⟩⟨0| + a_i⁻²|1⟩⟨1|) ⊗ |v_i⟩⟨v_i|` is positive and
//! PT-invariant, and `C + σ_y⊗B = Σ |λ_i| |w_i,v_i⟩⟨w_i,v_i|` with
//! `w_i = a_i|0⟩ − i·sign(λ_i)/a_i |1⟩`. Whenever `ρ_s ≥ C` the remainder
//! `ρ_s − C` is PT-invariant and positive, hence decomposable, and `ρ` is
//! separable.

use crate::bipartite::{partial_transpose_matrix, verify_decomposition, DensityOperator, ProductVector, SeparableDecomposition};
use crate::decompose::decompose_pt_invariant;
use crate::error::{Error, Result};
use crate::linalg::{self, clamp_psd, eig_hermitian, inv_sqrt_psd, max_abs_entry, operator_norm, sqrt_psd, ToleranceConfig};
use crate::{cr, lit, to_f64, CMatrix, CVector, Real, C};

/// `ρ = rho_s + σ_y ⊗ b` with `rho_s` PT-invariant.
#[derive(Debug, Clone)]
pub struct PTSplit<T: Real> {
    pub rho_s: DensityOperator<T>,
    pub b: CMatrix<T>,
}

/// `B = Σ λ_i |v_i⟩⟨v_i|` plus the scale `a_i` attached to each term.
#[derive(Debug, Clone, PartialEq)]
pub struct BDecomposition<T: Real> {
    pub lambdas: Vec<T>,
    pub vs: Vec<CVector<T>>,
    pub a: Vec<T>,
}

impl<T: Real> BDecomposition<T> {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn reconstruct(&self, dim_b: usize) -> CMatrix<T> {
        let mut m = CMatrix::zeros(dim_b, dim_b);
        for (l, v) in self.lambdas.iter().zip(&self.vs) {
            m += v * v.adjoint() * cr(*l);
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    CertifiedSeparable,
    /// The sufficient condition failed; says nothing about entanglement.
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Corollary3,
    Theorem3Default,
    Theorem3Optimized,
}

/// How the scales `a_i` are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AStrategy {
    /// All `a_i = 1`.
    Default,
    /// Coordinate descent, see [`optimize_a`].
    Optimize,
}

#[derive(Debug, Clone)]
pub struct CertificateReport<T: Real> {
    pub verdict: Verdict,
    /// `‖C^{1/2} ρ_s^{-1/2}‖²`; reported on failure too.
    pub norm_value: T,
    pub support_ok: bool,
    /// Present iff the verdict is [`Verdict::CertifiedSeparable`].
    pub decomposition: Option<SeparableDecomposition<T>>,
    pub method: Method,
    pub b_decomposition: BDecomposition<T>,
    /// `‖(ρ+ρ^{T_A})^{-1}‖·‖ρ−ρ^{T_A}‖` when the norm-product test ran.
    pub norm_product: Option<T>,
}

/// `σ_y ⊗ B` with `σ_y = i(|0⟩⟨1| − |1⟩⟨0|)`.
pub fn sigma_y_kron<T: Real>(b: &CMatrix<T>) -> CMatrix<T> {
    let n = b.nrows();
    let i = C::new(T::zero(), T::one());
    let mut out = CMatrix::zeros(2 * n, 2 * n);
    out.view_mut((0, n), (n, n)).copy_from(&(b * i));
    out.view_mut((n, 0), (n, n)).copy_from(&(b * (-i)));
    out
}

pub fn pt_split<T: Real>(rho: &DensityOperator<T>) -> PTSplit<T> {
    let n = rho.dim_b();
    let m = rho.matrix();
    let half = cr(lit::<T>(0.5));
    let rho_s = (m + partial_transpose_matrix(m, n)) * half;
    let d01 = (rho.block(0, 1) - rho.block(1, 0)) * half;
    let b = linalg::symmetrize(&(d01 * C::new(T::zero(), -T::one())));
    PTSplit { rho_s: rho.with_matrix(linalg::symmetrize(&rho_s)), b }
}

impl<T: Real> PTSplit<T> {
    /// `‖ρ − ρ_s − σ_y⊗B‖`, zero up to rounding for Hermitian `ρ`.
    pub fn reassembly_defect(&self, rho: &DensityOperator<T>) -> T {
        operator_norm(&(rho.matrix() - self.rho_s.matrix() - sigma_y_kron(&self.b)))
    }
}

/// Spectral decomposition of `B`, dropping eigenvalues with
/// `|λ| ≤ cutoff`; every `a_i` starts at one.
pub fn spectral_b<T: Real>(b: &CMatrix<T>, cutoff: T) -> Result<BDecomposition<T>> {
    let eig = eig_hermitian(b)?;
    let mut out = BDecomposition { lambdas: Vec::new(), vs: Vec::new(), a: Vec::new() };
    for j in 0..eig.dim() {
        let l = eig.eigenvalues[j];
        if l.abs() > cutoff {
            out.lambdas.push(l);
            out.vs.push(eig.eigenvectors.column(j).into_owned());
            out.a.push(T::one());
        }
    }
    Ok(out)
}

/// `C = Σ |λ_i| (a_i²|0⟩⟨0| + a_i⁻²|1⟩⟨1|) ⊗ |v_i⟩⟨v_i|`.
pub fn build_c<T: Real>(bd: &BDecomposition<T>, dim_b: usize) -> CMatrix<T> {
    let n = dim_b;
    let mut out = CMatrix::zeros(2 * n, 2 * n);
    for ((l, v), a) in bd.lambdas.iter().zip(&bd.vs).zip(&bd.a) {
        let p = v * v.adjoint() * cr(l.abs());
        let a2 = *a * *a;
        let mut top = out.view_mut((0, 0), (n, n));
        top += &p * cr(a2);
        let mut bottom = out.view_mut((n, n), (n, n));
        bottom += &p * cr(T::one() / a2);
    }
    out
}

/// `|w⟩ = a|0⟩ − i·sign(λ)/a |1⟩`.
pub fn w_vector<T: Real>(lambda: T, a: T) -> CVector<T> {
    let s = if lambda < T::zero() { -T::one() } else { T::one() };
    CVector::from_column_slice(&[cr(a), C::new(T::zero(), -s / a)])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma6Result<T> {
    pub ok: bool,
    pub norm_value: T,
    pub support_ok: bool,
}

/// Tests `X − Y ≥ 0` for positive `X`, `Y` through the support of `Y` and
/// `‖Y^{1/2} X^{-1/2}‖² ≤ 1`.
pub fn lemma6_check<T: Real>(x: &CMatrix<T>, y: &CMatrix<T>, cfg: &ToleranceConfig<T>) -> Result<Lemma6Result<T>> {
    if x.shape() != y.shape() {
        return Err(Error::DimensionMismatch { expected: x.nrows(), got: y.nrows() });
    }
    let x_inv_sqrt = inv_sqrt_psd(x, cfg)?;
    let y_sqrt = sqrt_psd(y, cfg)?;
    let (_, _, range) = linalg::rank_kernel_range(x, cfg)?;
    let q = CMatrix::identity(x.nrows(), x.nrows()) - range.projector();
    let outside = operator_norm(&(&q * y * &q));
    let support_ok = outside <= cfg.rank_tol * operator_norm(y);
    let s = operator_norm(&(y_sqrt * x_inv_sqrt));
    let norm_value = s * s;
    Ok(Lemma6Result { ok: support_ok && norm_value <= T::one() + cfg.psd_tol, norm_value, support_ok })
}

/// Cheap form of the operator-inequality norm: `λ_max(K C K)` with `K = X^{+1/2}`.
fn norm_with_a<T: Real>(k: &CMatrix<T>, bd: &BDecomposition<T>, dim_b: usize) -> T {
    let c = build_c(bd, dim_b);
    let m = linalg::symmetrize(&(k * c * k));
    eig_hermitian(&m).map(|e| e.max().max(T::zero())).unwrap_or(T::max_value().unwrap())
}

const GOLDEN_EVALS: usize = 50;
const SWEEPS: usize = 5;

/// Coordinate descent on the scales `a_i`, each coordinate by golden-section
/// search over `log a_i ∈ [−3, 3]`. Never returns anything worse than
/// all-ones.
pub fn optimize_a<T: Real>(
    rho_s: &DensityOperator<T>,
    lambdas: &[T],
    vs: &[CVector<T>],
    cfg: &ToleranceConfig<T>,
) -> Result<Vec<T>> {
    let n = rho_s.dim_b();
    let mut bd = BDecomposition { lambdas: lambdas.to_vec(), vs: vs.to_vec(), a: vec![T::one(); lambdas.len()] };
    if bd.is_empty() {
        return Ok(bd.a);
    }
    let k = inv_sqrt_psd(rho_s.matrix(), cfg)?;
    let mut best = norm_with_a(&k, &bd, n);
    let phi = lit::<T>((5f64.sqrt() - 1.0) / 2.0);
    for _ in 0..SWEEPS {
        let sweep_start = best;
        for i in 0..bd.len() {
            let eval = |t: T, bd: &mut BDecomposition<T>| {
                let keep = bd.a[i];
                bd.a[i] = t.exp();
                let v = norm_with_a(&k, bd, n);
                bd.a[i] = keep;
                v
            };
            let (mut lo, mut hi) = (lit::<T>(-3.0), lit::<T>(3.0));
            let mut x1 = hi - phi * (hi - lo);
            let mut x2 = lo + phi * (hi - lo);
            let mut f1 = eval(x1, &mut bd);
            let mut f2 = eval(x2, &mut bd);
            for _ in 2..GOLDEN_EVALS {
                if f1 <= f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - phi * (hi - lo);
                    f1 = eval(x1, &mut bd);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + phi * (hi - lo);
                    f2 = eval(x2, &mut bd);
                }
            }
            let (t, f) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
            if f < best {
                best = f;
                bd.a[i] = t.exp();
            }
        }
        if sweep_start - best <= lit::<T>(1e-14) * sweep_start.max(T::one()) {
            break;
        }
    }
    Ok(bd.a)
}

fn check_state<T: Real>(rho: &DensityOperator<T>, cfg: &ToleranceConfig<T>) -> Result<()> {
    let eig = eig_hermitian(rho.matrix())?;
    if eig.min() < cfg.psd_floor(eig.max()) {
        return Err(Error::NotPsd { min_eigenvalue: to_f64(eig.min()) });
    }
    Ok(())
}

fn infinite<T: Real>() -> T {
    lit(f64::INFINITY)
}

/// Report for an indefinite `ρ_s`: no `C ≥ 0` fits under it.
fn indefinite_report<T: Real>(bd: BDecomposition<T>, method: Method) -> CertificateReport<T> {
    CertificateReport {
        verdict: Verdict::Inconclusive,
        norm_value: infinite(),
        support_ok: false,
        decomposition: None,
        method,
        b_decomposition: bd,
        norm_product: None,
    }
}

/// Runs the norm test with the spectral decomposition of `B` and, when it
/// passes, assembles the separable decomposition of `ρ`.
pub fn theorem3_certify<T: Real>(
    rho: &DensityOperator<T>,
    strategy: AStrategy,
    cfg: &ToleranceConfig<T>,
) -> Result<CertificateReport<T>> {
    check_state(rho, cfg)?;
    let n = rho.dim_b();
    let split = pt_split(rho);
    let mut bd = spectral_b(&split.b, cfg.rank_tol * split.rho_s.norm())?;
    let method = match strategy {
        AStrategy::Default => Method::Theorem3Default,
        AStrategy::Optimize => Method::Theorem3Optimized,
    };
    if !split.rho_s.is_psd(cfg)? {
        return Ok(indefinite_report(bd, method));
    }
    match strategy {
        AStrategy::Default => {}
        AStrategy::Optimize => {
            bd.a = optimize_a(&split.rho_s, &bd.lambdas, &bd.vs, cfg)?;
        }
    }
    let c = build_c(&bd, n);
    let check = lemma6_check(split.rho_s.matrix(), &c, cfg)?;
    let mut report = CertificateReport {
        verdict: Verdict::Inconclusive,
        norm_value: check.norm_value,
        support_ok: check.support_ok,
        decomposition: None,
        method,
        b_decomposition: bd,
        norm_product: None,
    };
    if !check.ok {
        return Ok(report);
    }
    let remainder = linalg::symmetrize(&(split.rho_s.matrix() - &c));
    let remainder = (&remainder + partial_transpose_matrix(&remainder, n)) * cr(lit::<T>(0.5));
    let remainder = match clamp_psd(&remainder, cfg) {
        Ok((m, _)) => m,
        Err(Error::NotPsd { .. }) => return Ok(report),
        Err(e) => return Err(e),
    };
    let remainder = rho.with_matrix(remainder);
    let mut dec = if max_abs_entry(remainder.matrix()) > T::zero() {
        decompose_pt_invariant(&remainder, cfg)?.0
    } else {
        SeparableDecomposition::empty(n)
    };
    let bd = &report.b_decomposition;
    for ((l, v), a) in bd.lambdas.iter().zip(&bd.vs).zip(&bd.a) {
        dec.push(l.abs(), &ProductVector { e: w_vector(*l, *a), f: v.clone() });
    }
    let v = verify_decomposition(rho, &dec, cfg)?;
    if !v.ok {
        return Err(Error::NumericalFailure(format!(
            "certificate decomposition does not reconstruct the input (relative error {:e})",
            to_f64(v.relative_error)
        )));
    }
    report.verdict = Verdict::CertifiedSeparable;
    report.decomposition = Some(dec);
    Ok(report)
}

/// Norm-product test: `ρ + ρ^{T_A}` of full rank and
/// `‖(ρ+ρ^{T_A})^{-1}‖·‖ρ−ρ^{T_A}‖ ≤ 1`. On a pass the decomposition comes
/// from [`theorem3_certify`] with all `a_i = 1`.
pub fn corollary3_check<T: Real>(rho: &DensityOperator<T>, cfg: &ToleranceConfig<T>) -> Result<CertificateReport<T>> {
    check_state(rho, cfg)?;
    let n = rho.dim_b();
    let m = rho.matrix();
    let pt = partial_transpose_matrix(m, n);
    let sum = linalg::symmetrize(&(m + &pt));
    let eig = eig_hermitian(&sum)?;
    let full = eig.rank(cfg) == 2 * n && eig.min() > T::zero();
    let product = if full { operator_norm(&(m - &pt)) / eig.min() } else { T::max_value().unwrap() };
    let passes = full && product <= T::one();
    if passes {
        let mut report = theorem3_certify(rho, AStrategy::Default, cfg)?;
        if report.verdict != Verdict::CertifiedSeparable {
            return Err(Error::NumericalFailure(format!(
                "norm-product test passed ({:e}) but the certificate norm is {:e}",
                to_f64(product),
                to_f64(report.norm_value)
            )));
        }
        report.method = Method::Corollary3;
        report.norm_product = Some(product);
        return Ok(report);
    }
    let split = pt_split(rho);
    let bd = spectral_b(&split.b, cfg.rank_tol * split.rho_s.norm())?;
    if !split.rho_s.is_psd(cfg)? {
        return Ok(indefinite_report(bd, Method::Corollary3));
    }
    let check = lemma6_check(split.rho_s.matrix(), &build_c(&bd, n), cfg)?;
    Ok(CertificateReport {
        verdict: Verdict::Inconclusive,
        norm_value: check.norm_value,
        support_ok: check.support_ok,
        decomposition: None,
        method: Method::Corollary3,
        b_decomposition: bd,
        norm_product: full.then_some(product),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipartite::{basis_vector, cvec, kron_vec, partial_transpose_a, pt_defect};
    use crate::stategen::{random_npt, random_ppt, random_pt_invariant, werner, StateRng};

    fn cfg() -> ToleranceConfig<f64> {
        ToleranceConfig::default()
    }

    fn bell() -> DensityOperator<f64> {
        let s = 0.5f64.sqrt();
        DensityOperator::projector(2, &cvec(&[(s, 0.0), (0.0, 0.0), (0.0, 0.0), (s, 0.0)]))
    }

    /// `(1+κ)/2·ρ0 + (1−κ)/2·ρ0^{T_A}`: same `ρ_s` as `ρ0`, `B` scaled by `κ`.
    fn tilted(rho0: &DensityOperator<f64>, kappa: f64) -> DensityOperator<f64> {
        let pt = partial_transpose_a(rho0);
        rho0.with_matrix(rho0.matrix() * C::new((1.0 + kappa) / 2.0, 0.0) + pt.matrix() * C::new((1.0 - kappa) / 2.0, 0.0))
    }

    #[test]
    fn split_of_pt_invariant_has_zero_b() {
        let rho = random_pt_invariant::<f64>(3, 1).unwrap();
        let s = pt_split(&rho);
        assert!(max_abs_entry(&s.b) < 1e-15);
    }

    #[test]
    fn split_recovers_planted_b() {
        let n = 3;
        let mut rng = StateRng::new(2);
        let g = rng.gaussian_matrix::<f64>(n, n);
        let mut e = linalg::symmetrize(&g) * C::new(0.01, 0.0);
        let tr = e.trace() / C::new(n as f64, 0.0);
        e -= CMatrix::identity(n, n) * tr;
        let m = sigma_y_kron(&e) + CMatrix::identity(2 * n, 2 * n) * C::new(1.0 / (2 * n) as f64, 0.0);
        let rho = DensityOperator::from_hermitian(n, m).unwrap();
        let s = pt_split(&rho);
        assert!(max_abs_entry(&(s.b - e)) < 1e-15);
    }

    #[test]
    fn split_of_bell() {
        let rho = bell();
        let s = pt_split(&rho);
        let expected = CMatrix::from_row_slice(2, 2, &[C::new(0.0, 0.0), C::new(0.0, -0.25), C::new(0.0, 0.25), C::new(0.0, 0.0)]);
        assert!(max_abs_entry(&(&s.b - expected)) < 1e-15);
        assert!(s.reassembly_defect(&rho) < 1e-15);
    }

    #[test]
    fn split_identities_on_random_hermitian() {
        for seed in 0..200u64 {
            let n = 1 + (seed as usize % 5);
            let g = StateRng::new(seed).gaussian_matrix::<f64>(2 * n, 2 * n);
            let rho = DensityOperator::from_hermitian(n, linalg::symmetrize(&g)).unwrap();
            let s = pt_split(&rho);
            assert!(s.reassembly_defect(&rho) <= 1e-12 * rho.trace().abs().max(1.0));
            assert!(pt_defect(&s.rho_s) <= 1e-12);
            assert!(linalg::hermitian_defect(&s.b) == 0.0);
        }
    }

    #[test]
    fn c_examples() {
        // a = 1: C = 1 ⊗ |B|
        let rho = random_ppt::<f64>(3, 5).unwrap().state;
        let s = pt_split(&rho);
        let bd = spectral_b(&s.b, 0.0).unwrap();
        assert!(max_abs_entry(&(bd.reconstruct(3) - &s.b)) < 1e-14);
        let abs_b = eig_hermitian(&s.b).unwrap().map(|l| l.abs());
        let expected = crate::bipartite::kron_identity2(&abs_b);
        assert!(max_abs_entry(&(build_c(&bd, 3) - expected)) < 1e-14);

        let single = BDecomposition { lambdas: vec![1.0], vs: vec![basis_vector(2, 0)], a: vec![2.0] };
        let c = build_c(&single, 2);
        let mut expected = CMatrix::zeros(4, 4);
        expected[(0, 0)] = C::new(4.0, 0.0);
        expected[(2, 2)] = C::new(0.25, 0.0);
        assert!(max_abs_entry(&(c - expected)) < 1e-15);

        let empty = BDecomposition::<f64> { lambdas: vec![], vs: vec![], a: vec![] };
        assert_eq!(build_c(&empty, 2), CMatrix::zeros(4, 4));
    }

    #[test]
    fn w_terms_reproduce_c_plus_sigma_y_b() {
        let rho = random_ppt::<f64>(3, 6).unwrap().state;
        let s = pt_split(&rho);
        let mut bd = spectral_b(&s.b, 0.0).unwrap();
        bd.a = vec![0.7, 1.3, 2.0];
        let mut m = CMatrix::zeros(6, 6);
        for ((l, v), a) in bd.lambdas.iter().zip(&bd.vs).zip(&bd.a) {
            let x = kron_vec(&w_vector(*l, *a), v);
            m += &x * x.adjoint() * C::new(l.abs(), 0.0);
        }
        assert!(max_abs_entry(&(m - build_c(&bd, 3) - sigma_y_kron(&s.b))) < 1e-14);
    }

    #[test]
    fn lemma6_examples() {
        let id = CMatrix::<f64>::identity(2, 2);
        let r = lemma6_check(&id, &(&id * C::new(0.5, 0.0)), &cfg()).unwrap();
        assert!(r.ok && r.support_ok);
        assert!((r.norm_value - 0.5).abs() < 1e-14);

        let mut x = CMatrix::<f64>::zeros(2, 2);
        x[(0, 0)] = C::new(1.0, 0.0);
        let mut y = CMatrix::<f64>::zeros(2, 2);
        y[(1, 1)] = C::new(1.0, 0.0);
        let r = lemma6_check(&x, &y, &cfg()).unwrap();
        assert!(!r.support_ok && !r.ok);
    }

    #[test]
    fn lemma6_agrees_with_eigenvalue_oracle() {
        let mut band = 0;
        for seed in 0..300u64 {
            let n = 2 + (seed as usize % 4);
            let mut rng = StateRng::new(seed);
            let gx = rng.gaussian_matrix::<f64>(n, n);
            let gy = rng.gaussian_matrix::<f64>(n, n);
            let x = &gx * gx.adjoint();
            let scale = 0.05 + 0.3 * rng.uniform();
            let y = &gy * gy.adjoint() * C::new(scale, 0.0);
            let r = lemma6_check(&x, &y, &cfg()).unwrap();
            let oracle = linalg::min_eigenvalue(&(&x - &y)).unwrap() >= -1e-9;
            if (r.norm_value - 1.0).abs() <= 1e-7 {
                band += 1;
                continue;
            }
            assert_eq!(r.ok, oracle, "seed {seed}: norm {}", r.norm_value);
        }
        assert!(band < 5);
    }

    #[test]
    fn pt_invariant_certifies_with_zero_norm() {
        let rho = random_pt_invariant::<f64>(3, 11).unwrap();
        let r = theorem3_certify(&rho, AStrategy::Default, &cfg()).unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedSeparable);
        assert!(r.norm_value < 1e-12);
        let c = corollary3_check(&rho, &cfg()).unwrap();
        assert_eq!(c.verdict, Verdict::CertifiedSeparable);
        assert!(c.norm_product.unwrap() < 1e-12);
    }

    #[test]
    fn bell_is_inconclusive() {
        let r = theorem3_certify(&bell(), AStrategy::Optimize, &cfg()).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(r.decomposition.is_none());
        assert_eq!(corollary3_check(&bell(), &cfg()).unwrap().verdict, Verdict::Inconclusive);
    }

    #[test]
    fn small_tilt_certifies() {
        for seed in 0..30u64 {
            let rho0 = random_ppt::<f64>(2 + seed as usize % 3, seed).unwrap().state;
            let rho = tilted(&rho0, 1e-3);
            let r = theorem3_certify(&rho, AStrategy::Default, &cfg()).unwrap();
            assert_eq!(r.verdict, Verdict::CertifiedSeparable);
            let dec = r.decomposition.unwrap();
            assert!(crate::bipartite::verify_with_tol(&rho, &dec, 1e-8).unwrap().ok);
        }
    }

    #[test]
    fn norm_product_implies_certificate() {
        let mut passes = 0;
        for seed in 0..200u64 {
            let n = 2 + (seed as usize % 3);
            let rho0 = random_ppt::<f64>(n, seed).unwrap().state;
            let kappa = StateRng::new(seed + 5).uniform();
            let rho = tilted(&rho0, kappa);
            let c = corollary3_check(&rho, &cfg()).unwrap();
            if c.verdict == Verdict::CertifiedSeparable {
                passes += 1;
                let t = theorem3_certify(&rho, AStrategy::Default, &cfg()).unwrap();
                assert_eq!(t.verdict, Verdict::CertifiedSeparable);
                assert!(t.norm_value <= c.norm_product.unwrap() + 1e-12);
            }
        }
        assert!(passes > 10);
    }

    #[test]
    fn rank_deficient_sum_is_inconclusive() {
        let rho = DensityOperator::projector(2, &kron_vec(&basis_vector(2, 0), &basis_vector(2, 0)));
        let c = corollary3_check(&rho, &cfg()).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert!(c.norm_product.is_none());
    }

    #[test]
    fn corollary3_threshold_by_bisection() {
        // ρ_s is fixed along the family and ‖ρ − ρ^{T_A}‖ is linear in κ, so
        // the norm-product test switches at κ* = 1/(‖S⁻¹‖·‖ρ0 − ρ0^{T_A}‖).
        for rho0 in [werner::<f64>(0.2), random_ppt::<f64>(2, 3).unwrap().state] {
            let m = rho0.matrix();
            let pt = partial_transpose_matrix(m, 2);
            let s_min = linalg::min_eigenvalue(&(m + &pt)).unwrap();
            let d = operator_norm(&(m - &pt));
            let expected = s_min / d;
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                let r = corollary3_check(&tilted(&rho0, mid), &cfg()).unwrap();
                if r.verdict == Verdict::CertifiedSeparable {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if expected < 1.0 {
                assert!((lo - expected).abs() < 1e-9, "{lo} vs {expected}");
            } else {
                assert!(lo > 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn optimize_a_examples() {
        let rho_s = DensityOperator::<f64>::maximally_mixed(2);
        assert!(optimize_a(&rho_s, &[], &[], &cfg()).unwrap().is_empty());
        let a = optimize_a(&rho_s, &[0.1], &[basis_vector(2, 1)], &cfg()).unwrap();
        assert_eq!(a, vec![1.0]);
    }

    #[test]
    fn optimize_a_never_worse() {
        for seed in 0..100u64 {
            let n = 2 + (seed as usize % 3);
            let rho = tilted(&random_ppt::<f64>(n, seed).unwrap().state, 0.9);
            let d = theorem3_certify(&rho, AStrategy::Default, &cfg()).unwrap();
            let o = theorem3_certify(&rho, AStrategy::Optimize, &cfg()).unwrap();
            assert!(o.norm_value <= d.norm_value + 1e-12, "seed {seed}");
            if o.verdict == Verdict::CertifiedSeparable {
                assert!(crate::bipartite::verify_with_tol(&rho, o.decomposition.as_ref().unwrap(), 1e-8).unwrap().ok);
            }
        }
    }

    #[test]
    fn never_certifies_npt() {
        for seed in 0..100u64 {
            let n = 2 + (seed as usize % 2);
            let rho = random_npt::<f64>(n, seed).unwrap().state;
            assert_eq!(theorem3_certify(&rho, AStrategy::Optimize, &cfg()).unwrap().verdict, Verdict::Inconclusive);
            assert_eq!(corollary3_check(&rho, &cfg()).unwrap().verdict, Verdict::Inconclusive);
        }
    }
}
