//! Constructive separable decompositions.
//!
//! [`decompose_pt_invariant`] handles `ρ = ρ^{T_A}`: product vectors with a
//! real A-side are peeled off the range until `rank ≤ N`, then a kernel
//! product vector removes one term and a `C^2 ⊗ f` slice, and the problem
//! recurses on `2 × (N−1)`. [`decompose_rank_n`] is the same induction for
//! PPT states of rank at most `N`. [`corollary2_decompose`] reduces a
//! state that is invariant under a partial transpose twisted by a symmetric
//! unitary to the PT-invariant case.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::bipartite::{
    compress_b, kron_a, partial_transpose_matrix, pt_defect, DensityOperator, ProductVector, SeparableDecomposition,
};
use crate::error::{Error, Result};
use crate::linalg::{self, clamp_psd, max_abs_entry, rank_kernel_range, ToleranceConfig};
use crate::product::{find_product_in_subspace, find_real_e_product};
use crate::reduction::{corollary1_subtract, lemma4_reduce, lemma4b_reduce};
use crate::{cr, lit, to_f64, CMatrix, CVector, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    RangeSubtract,
    KernelReduce,
    Compress,
    BaseCase,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step<T> {
    pub kind: StepKind,
    pub rank_before: usize,
    pub dim_b_before: usize,
    /// Largest negative eigenvalue magnitude zeroed after the step.
    pub clamp: T,
    /// `‖ρ − ρ^{T_A}‖` of the operator after the step, for the PT-invariant
    /// recursion.
    pub pt_defect: Option<T>,
}

/// Audit trail of a decomposition.
#[derive(Debug, Clone)]
pub struct DecompositionTrace<T> {
    pub steps: Vec<Step<T>>,
}

impl<T> Default for DecompositionTrace<T> {
    fn default() -> Self {
        Self { steps: Vec::new() }
    }
}

impl<T: Real> DecompositionTrace<T> {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn count(&self, kind: StepKind) -> usize {
        self.steps.iter().filter(|s| s.kind == kind).count()
    }

    pub fn max_clamp(&self) -> T {
        self.steps.iter().fold(T::zero(), |m, s| m.max(s.clamp))
    }

    pub fn max_pt_defect(&self) -> T {
        self.steps.iter().filter_map(|s| s.pt_defect).fold(T::zero(), |m, d| m.max(d))
    }

    fn record(&mut self, kind: StepKind, rank_before: usize, dim_b_before: usize, clamp: T, pt_defect: Option<T>) {
        self.steps.push(Step { kind, rank_before, dim_b_before, clamp, pt_defect });
    }
}

/// Upper bound on the number of terms [`decompose_pt_invariant`] produces
/// on `2 × N`.
pub fn term_bound(dim_b: usize) -> usize {
    dim_b * (dim_b + 3) / 2 + 2
}

fn check_psd<T: Real>(m: &CMatrix<T>, cfg: &ToleranceConfig<T>) -> Result<()> {
    let eig = linalg::eig_hermitian(m)?;
    if eig.min() < cfg.psd_floor(eig.max()) {
        return Err(Error::NotPsd { min_eigenvalue: to_f64(eig.min()) });
    }
    Ok(())
}

fn is_zero<T: Real>(rho: &DensityOperator<T>) -> bool {
    max_abs_entry(rho.matrix()) <= lit::<T>(1e-300)
}

/// Re-symmetrizes, optionally projects onto the PT-invariant part, and
/// clamps tolerance-level negative eigenvalues.
fn clean<T: Real>(rho: &DensityOperator<T>, pt_symmetric: bool, cfg: &ToleranceConfig<T>) -> Result<(DensityOperator<T>, T)> {
    let mut m = linalg::symmetrize(rho.matrix());
    if pt_symmetric {
        m = (&m + partial_transpose_matrix(&m, rho.dim_b())) * cr(lit::<T>(0.5));
    }
    let (m, clamp) = clamp_psd(&m, cfg)?;
    Ok((rho.with_matrix(m), clamp))
}

fn scalar_f<T: Real>() -> CVector<T> {
    CVector::from_element(1, cr(T::one()))
}

/// Terms of a 2×1 operator from its spectral decomposition.
fn base_case<T: Real>(rho: &DensityOperator<T>, real: bool, cfg: &ToleranceConfig<T>) -> Result<SeparableDecomposition<T>> {
    let mut dec = SeparableDecomposition::empty(1);
    if real {
        let m = rho.matrix();
        let re = DMatrix::from_fn(2, 2, |i, j| (m[(i, j)].re + m[(j, i)].re) * lit(0.5));
        let eig = SymmetricEigen::new(re);
        let max = eig.eigenvalues.iter().fold(T::zero(), |a, &l| a.max(l.abs()));
        for j in 0..2 {
            let l = eig.eigenvalues[j];
            if l > cfg.rank_tol * max && l > T::zero() {
                let e = CVector::from_fn(2, |i, _| cr(eig.eigenvectors[(i, j)]));
                dec.push(l, &ProductVector { e, f: scalar_f() });
            }
        }
    } else {
        let eig = linalg::eig_hermitian(rho.matrix())?;
        let cut = eig.cutoff(cfg);
        for j in 0..2 {
            let l = eig.eigenvalues[j];
            if l > cut && l > T::zero() {
                let e = eig.eigenvectors.column(j).into_owned();
                dec.push(l, &ProductVector { e, f: scalar_f() });
            }
        }
    }
    Ok(dec)
}

/// Separable decomposition of a PT-invariant positive operator.
///
/// Every A-side vector in the result is real.
pub fn decompose_pt_invariant<T: Real>(
    rho: &DensityOperator<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<(SeparableDecomposition<T>, DecompositionTrace<T>)> {
    let scale = rho.trace().abs().max(T::one());
    let defect = pt_defect(rho);
    if defect > cfg.recon_tol * scale {
        return Err(Error::NotPtInvariant { defect: to_f64(defect) });
    }
    check_psd(rho.matrix(), cfg)?;
    let mut trace = DecompositionTrace::default();
    let (rho, _) = clean(rho, true, cfg)?;
    let dec = pt_invariant_rec(rho, cfg, &mut trace)?;
    Ok((dec, trace))
}

fn pt_invariant_rec<T: Real>(
    mut rho: DensityOperator<T>,
    cfg: &ToleranceConfig<T>,
    trace: &mut DecompositionTrace<T>,
) -> Result<SeparableDecomposition<T>> {
    let n = rho.dim_b();
    let mut dec = SeparableDecomposition::empty(n);
    if is_zero(&rho) {
        return Ok(dec);
    }
    if n == 1 {
        let base = base_case(&rho, true, cfg)?;
        let rank = base.len();
        trace.record(StepKind::BaseCase, rank, 1, T::zero(), Some(pt_defect(&rho)));
        return Ok(base);
    }
    let mut iterations = 0;
    let (rank, kernel) = loop {
        let (rank, kernel, range) = rank_kernel_range(rho.matrix(), cfg)?;
        if rank == 0 {
            return Ok(dec);
        }
        if rank <= n {
            break (rank, kernel);
        }
        iterations += 1;
        if iterations > 2 * n {
            return Err(Error::NumericalFailure(format!("range subtraction did not reach rank {n} in {} steps", 2 * n)));
        }
        let found = find_real_e_product(&range, cfg)?;
        let sub = corollary1_subtract(&rho, &found.pv, cfg)?;
        dec.push(sub.weight, &sub.removed);
        let (next, clamp) = clean(&sub.reduced, true, cfg)?;
        rho = next;
        trace.record(StepKind::RangeSubtract, rank, n, clamp, Some(pt_defect(&rho)));
    };
    let found = find_product_in_subspace(&kernel, cfg)?;
    let red = lemma4b_reduce(&rho, &found.pv, cfg)?;
    if let Some((w, pv)) = &red.term {
        dec.push(*w, pv);
    }
    let (reduced, clamp) = clean(&red.reduced, true, cfg)?;
    trace.record(StepKind::KernelReduce, rank, n, clamp, Some(pt_defect(&reduced)));
    let (inner, lift) = compress_b(&reduced, &red.kernel_vector.f, cfg)?;
    trace.record(StepKind::Compress, rank, n, T::zero(), Some(pt_defect(&inner)));
    let sub = pt_invariant_rec(inner, cfg, trace)?;
    dec.extend(lift.lift_decomposition(&sub));
    Ok(dec)
}

/// Separable decomposition of a PPT operator of rank at most `N`.
pub fn decompose_rank_n<T: Real>(
    rho: &DensityOperator<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<(SeparableDecomposition<T>, DecompositionTrace<T>)> {
    check_psd(rho.matrix(), cfg)?;
    check_psd(&partial_transpose_matrix(rho.matrix(), rho.dim_b()), cfg)?;
    let mut trace = DecompositionTrace::default();
    let dec = rank_n_rec(rho.clone(), cfg, &mut trace)?;
    Ok((dec, trace))
}

fn rank_n_rec<T: Real>(
    rho: DensityOperator<T>,
    cfg: &ToleranceConfig<T>,
    trace: &mut DecompositionTrace<T>,
) -> Result<SeparableDecomposition<T>> {
    let n = rho.dim_b();
    if is_zero(&rho) {
        return Ok(SeparableDecomposition::empty(n));
    }
    let (rank, kernel, _) = rank_kernel_range(rho.matrix(), cfg)?;
    if rank == 0 {
        return Ok(SeparableDecomposition::empty(n));
    }
    if rank > n {
        return Err(Error::RankTooLarge { rank, dim_b: n });
    }
    if n == 1 {
        let base = base_case(&rho, false, cfg)?;
        trace.record(StepKind::BaseCase, rank, 1, T::zero(), None);
        return Ok(base);
    }
    let mut dec = SeparableDecomposition::empty(n);
    let found = find_product_in_subspace(&kernel, cfg)?;
    let red = lemma4_reduce(&rho, &found.pv, cfg)?;
    if let Some((w, pv)) = &red.term {
        dec.push(*w, pv);
    }
    let (reduced, clamp) = clean(&red.reduced, false, cfg)?;
    trace.record(StepKind::KernelReduce, rank, n, clamp, None);
    let (inner, lift) = compress_b(&reduced, &red.kernel_vector.f, cfg)?;
    trace.record(StepKind::Compress, rank, n, T::zero(), None);
    let sub = rank_n_rec(inner, cfg, trace)?;
    dec.extend(lift.lift_decomposition(&sub));
    Ok(dec)
}

fn unitary_defect<T: Real>(u: &CMatrix<T>) -> T {
    let n = u.nrows();
    max_abs_entry(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

/// Unitary `W` with `W·Wᵀ = U` for a symmetric unitary `U`.
///
/// The real and imaginary parts of such a `U` are commuting real symmetric
/// matrices, so a generic real combination of them has an orthogonal
/// eigenbasis `O` diagonalizing `U`; `W = O·diag(e^{iθ_j/2})`.
pub fn takagi_symmetric_unitary<T: Real>(u: &CMatrix<T>) -> Result<CMatrix<T>> {
    let n = u.nrows();
    if u.ncols() != n {
        return Err(Error::NotSquare { rows: n, cols: u.ncols() });
    }
    let tol = lit::<T>(1e-10);
    let defect = unitary_defect(u).max(max_abs_entry(&(u - u.transpose())));
    if defect > tol {
        return Err(Error::NotSymmetricUnitary { defect: to_f64(defect) });
    }
    let re = DMatrix::from_fn(n, n, |i, j| u[(i, j)].re);
    let im = DMatrix::from_fn(n, n, |i, j| u[(i, j)].im);
    let mut worst = T::max_value().unwrap();
    // irrational mixing weights, so no eigenvalue coincidence survives all four
    for t in [0.618_033_988_749_895, std::f64::consts::SQRT_2, -0.577_215_664_901_532, std::f64::consts::E] {
        let mix = &re + &im * lit::<T>(t);
        let mix = (&mix + mix.transpose()) * lit::<T>(0.5);
        let o = SymmetricEigen::new(mix).eigenvectors;
        let oc: CMatrix<T> = o.map(cr);
        let d = oc.transpose() * u * &oc;
        let w = CMatrix::from_fn(n, n, |i, j| {
            let z = d[(j, j)];
            let half = z.im.atan2(z.re) * lit(0.5);
            oc[(i, j)] * C::new(half.cos(), half.sin())
        });
        let err = max_abs_entry(&(&w * w.transpose() - u));
        if err <= tol {
            return Ok(w);
        }
        worst = worst.min(err);
    }
    Err(Error::NotSymmetricUnitary { defect: to_f64(worst) })
}

/// `(U⊗1) X^{T_A} (U⊗1)†`.
pub fn twisted_partial_transpose<T: Real>(m: &CMatrix<T>, u: &CMatrix<T>, dim_b: usize) -> CMatrix<T> {
    let big = kron_a(u, dim_b);
    &big * partial_transpose_matrix(m, dim_b) * big.adjoint()
}

/// Decomposition of `ρ = (U⊗1) ρ^{T_A} (U⊗1)†` for a symmetric unitary `U`.
pub fn corollary2_decompose<T: Real>(
    rho: &DensityOperator<T>,
    u: &CMatrix<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<SeparableDecomposition<T>> {
    if u.nrows() != 2 || u.ncols() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: u.nrows() });
    }
    let w = takagi_symmetric_unitary(u)?;
    let n = rho.dim_b();
    let scale = rho.trace().abs().max(T::one());
    let twisted = twisted_partial_transpose(rho.matrix(), u, n);
    let defect = linalg::operator_norm(&(rho.matrix() - twisted));
    if defect > cfg.recon_tol * scale {
        return Err(Error::TwistedInvarianceFailed { defect: to_f64(defect) });
    }
    let big = kron_a(&w, n);
    let rotated = rho.with_matrix(linalg::symmetrize(&(big.adjoint() * rho.matrix() * &big)));
    let rotated_defect = pt_defect(&rotated);
    if rotated_defect > cfg.recon_tol * scale {
        return Err(Error::TwistedInvarianceFailed { defect: to_f64(rotated_defect) });
    }
    let (dec, _) = decompose_pt_invariant(&rotated, cfg)?;
    Ok(dec.map_a(|e| &w * e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipartite::{assemble, basis_vector, cvec, kron_vec, verify_decomposition, verify_with_tol};
    use crate::stategen::{random_ppt, random_pt_invariant, random_separable};

    fn cfg() -> ToleranceConfig<f64> {
        ToleranceConfig::default()
    }

    fn check_pt_output(rho: &DensityOperator<f64>, dec: &SeparableDecomposition<f64>) {
        let v = verify_with_tol(rho, dec, 1e-8).unwrap();
        assert!(v.ok, "recon {:e}", v.relative_error);
        assert!(dec.max_imag_a() <= 1e-8);
        assert!(dec.len() <= term_bound(rho.dim_b()), "{} terms", dec.len());
    }

    #[test]
    fn maximally_mixed() {
        for n in 1..=5 {
            let rho = DensityOperator::<f64>::maximally_mixed(n);
            let (dec, _) = decompose_pt_invariant(&rho, &cfg()).unwrap();
            check_pt_output(&rho, &dec);
        }
    }

    #[test]
    fn single_real_product() {
        let e = linalg::normalized(&cvec::<f64>(&[(0.3, 0.0), (-0.8, 0.0)]));
        let f = linalg::normalized(&cvec::<f64>(&[(0.1, 0.4), (0.5, -0.2), (0.0, 0.3)]));
        let rho = DensityOperator::projector(3, &kron_vec(&e, &f));
        let (dec, _) = decompose_pt_invariant(&rho, &cfg()).unwrap();
        assert_eq!(dec.len(), 1);
        check_pt_output(&rho, &dec);
    }

    #[test]
    fn random_pt_invariant_states() {
        for n in 1..=5 {
            for seed in 0..30u64 {
                let rho = random_pt_invariant::<f64>(n, seed).unwrap();
                let (dec, trace) = decompose_pt_invariant(&rho, &cfg()).unwrap();
                check_pt_output(&rho, &dec);
                assert!(trace.max_pt_defect() <= 1e-8 * rho.trace());
            }
        }
    }

    #[test]
    fn rejects_non_invariant() {
        let rho = crate::stategen::werner::<f64>(0.2);
        assert!(matches!(decompose_pt_invariant(&rho, &cfg()), Err(Error::NotPtInvariant { .. })));
    }

    #[test]
    fn rank_n_single_product() {
        let e = cvec::<f64>(&[(0.6, 0.0), (0.0, 0.8)]);
        let f = basis_vector::<f64>(3, 1);
        let rho = DensityOperator::projector(3, &kron_vec(&e, &f));
        let (dec, _) = decompose_rank_n(&rho, &cfg()).unwrap();
        assert_eq!(dec.len(), 1);
        assert!(verify_decomposition(&rho, &dec, &cfg()).unwrap().ok);
    }

    #[test]
    fn rank_n_distinct_b_basis() {
        let es = [
            cvec::<f64>(&[(1.0, 0.0), (0.0, 0.0)]),
            linalg::normalized(&cvec::<f64>(&[(1.0, 0.0), (0.0, 1.0)])),
            linalg::normalized(&cvec::<f64>(&[(0.2, 0.0), (0.9, -0.3)])),
        ];
        let mut m = CMatrix::zeros(6, 6);
        for (k, e) in es.iter().enumerate() {
            let v = kron_vec(e, &basis_vector(3, k));
            m += &v * v.adjoint() * C::new((k + 1) as f64 / 6.0, 0.0);
        }
        let rho = DensityOperator::from_hermitian(3, m).unwrap();
        let (dec, _) = decompose_rank_n(&rho, &cfg()).unwrap();
        assert_eq!(dec.len(), 3);
        assert!(verify_with_tol(&rho, &dec, 1e-8).unwrap().ok);
    }

    #[test]
    fn rank_n_random_mixtures() {
        for n in 2..=5 {
            for seed in 0..40u64 {
                let (rho, _) = random_separable::<f64>(n, n, 100 * n as u64 + seed).unwrap();
                let (dec, _) = decompose_rank_n(&rho, &cfg()).unwrap();
                let v = verify_with_tol(&rho, &dec, 1e-8).unwrap();
                assert!(v.ok, "n={n} seed={seed} recon {:e}", v.relative_error);
            }
        }
    }

    #[test]
    fn rank_n_rejects_high_rank() {
        let rho = random_ppt::<f64>(2, 1).unwrap().state;
        assert!(matches!(decompose_rank_n(&rho, &cfg()), Err(Error::RankTooLarge { .. })));
    }

    #[test]
    fn takagi_examples() {
        let id = CMatrix::<f64>::identity(2, 2);
        let w = takagi_symmetric_unitary(&id).unwrap();
        assert!(max_abs_entry(&(&w * w.transpose() - &id)) < 1e-12);

        let theta = 1.1f64;
        let mut u = CMatrix::<f64>::identity(2, 2);
        u[(1, 1)] = C::new(theta.cos(), theta.sin());
        let w = takagi_symmetric_unitary(&u).unwrap();
        assert!(max_abs_entry(&(&w * w.transpose() - &u)) < 1e-12);
        assert!(unitary_defect(&w) < 1e-12);

        let sx = CMatrix::from_row_slice(2, 2, &[C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0)]);
        let w = takagi_symmetric_unitary(&sx).unwrap();
        assert!(max_abs_entry(&(&w * w.transpose() - &sx)) < 1e-12);
    }

    #[test]
    fn takagi_rejects_non_symmetric() {
        let sy = CMatrix::from_row_slice(2, 2, &[C::new(0.0, 0.0), C::new(0.0, -1.0), C::new(0.0, 1.0), C::new(0.0, 0.0)]);
        assert!(matches!(takagi_symmetric_unitary(&sy), Err(Error::NotSymmetricUnitary { .. })));
    }

    #[test]
    fn twisted_map_is_involution() {
        let sx = CMatrix::from_row_slice(2, 2, &[C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0)]);
        let rho = random_ppt::<f64>(3, 4).unwrap().state;
        let twice = twisted_partial_transpose(&twisted_partial_transpose(rho.matrix(), &sx, 3), &sx, 3);
        assert!(max_abs_entry(&(twice - rho.matrix())) < 1e-14);
    }

    fn twisted_symmetrization(sigma: &DensityOperator<f64>, u: &CMatrix<f64>) -> DensityOperator<f64> {
        let m = (sigma.matrix() + twisted_partial_transpose(sigma.matrix(), u, sigma.dim_b())) * C::new(0.5, 0.0);
        DensityOperator::from_hermitian(sigma.dim_b(), m).unwrap()
    }

    #[test]
    fn corollary2_identity_matches_pt_invariant() {
        let rho = random_pt_invariant::<f64>(3, 8).unwrap();
        let id = CMatrix::identity(2, 2);
        let a = corollary2_decompose(&rho, &id, &cfg()).unwrap();
        let (b, _) = decompose_pt_invariant(&rho, &cfg()).unwrap();
        assert_eq!(a.len(), b.len());
        assert!(max_abs_entry(&(assemble(&a).matrix() - assemble(&b).matrix())) < 1e-12);
    }

    #[test]
    fn corollary2_sigma_x_and_phase() {
        let sx = CMatrix::from_row_slice(2, 2, &[C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0)]);
        let mut ph = CMatrix::<f64>::identity(2, 2);
        ph[(1, 1)] = C::new(0.3f64.cos(), 0.3f64.sin());
        for u in [sx, ph] {
            for seed in 0..20u64 {
                let n = 2 + (seed as usize % 3);
                let sigma = random_ppt::<f64>(n, seed).unwrap().state;
                let rho = twisted_symmetrization(&sigma, &u);
                let dec = corollary2_decompose(&rho, &u, &cfg()).unwrap();
                assert!(verify_with_tol(&rho, &dec, 1e-8).unwrap().ok);
            }
        }
    }

    #[test]
    fn corollary2_rejects_untwisted_state() {
        let sx = CMatrix::from_row_slice(2, 2, &[C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 0.0)]);
        let rho = random_ppt::<f64>(2, 3).unwrap().state;
        assert!(matches!(corollary2_decompose(&rho, &sx, &cfg()), Err(Error::TwistedInvarianceFailed { .. })));
    }

    #[test]
    fn f32_pt_invariant() {
        let rho = random_pt_invariant::<f32>(3, 2).unwrap();
        let (dec, _) = decompose_pt_invariant(&rho, &ToleranceConfig::default()).unwrap();
        assert!(verify_with_tol(&rho, &dec, 1e-3).unwrap().ok);
    }
}
