//! Product-vector subtraction and kernel-driven reduction of `2 × N` states.
//!
//! Subtracting `λ|e,g⟩⟨e,g|` with the largest admissible `λ` keeps the state
//! positive and drops its rank; a product vector in the kernel lets a state
//! shed one separable term and lose a whole `C^2 ⊗ f` slice of support.

use crate::bipartite::{conj_a, hat, kron_vec, partial_transpose_matrix, pt_defect, sandwich_a, DensityOperator, ProductVector};
use crate::error::{Error, Result};
use crate::linalg::{self, vec_norm, HermitianEig, ToleranceConfig};
use crate::{cr, lit, to_f64, CMatrix, CVector, Real};

/// Which operator lost rank in a subtraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankDrop {
    Rho,
    RhoTA,
    /// `λ1` and `λ2` agree to within `1e-12` relative.
    Both,
}

#[derive(Debug, Clone)]
pub struct SubtractionResult<T: Real> {
    pub reduced: DensityOperator<T>,
    /// Weight of the unit product vector `removed`.
    pub weight: T,
    pub removed: ProductVector<T>,
    pub rank_dropped_on: RankDrop,
}

/// Outcome of the kernel case analysis for `|e,f⟩ ∈ K(ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelCase<T: Real> {
    /// `|ê,f⟩` is in the kernel as well.
    BothInKernel,
    /// `ρ|ê,f⟩ = |ê,g⟩` with this nonzero `g`.
    Reduced(CVector<T>),
}

/// Result of removing the kernel-induced term.
#[derive(Debug, Clone)]
pub struct KernelReduction<T: Real> {
    pub reduced: DensityOperator<T>,
    /// `(weight, unit product vector)`; absent in the [`KernelCase::BothInKernel`] case.
    pub term: Option<(T, ProductVector<T>)>,
    pub case: KernelCase<T>,
    /// The unit product vector the reduction was run with. For
    /// [`lemma4b_reduce`] this is the real combination actually used.
    pub kernel_vector: ProductVector<T>,
}

/// Spectral data needed to test range membership and evaluate `⟨v|ρ⁺|v⟩`.
struct RangeForm<T: Real> {
    eig: HermitianEig<T>,
    cut: T,
}

impl<T: Real> RangeForm<T> {
    fn new(m: &CMatrix<T>, cfg: &ToleranceConfig<T>) -> Result<Self> {
        let eig = linalg::eig_hermitian(m)?;
        let cut = eig.cutoff(cfg);
        Ok(Self { eig, cut })
    }

    /// `(‖(1 − P_R) v‖, ⟨v|ρ⁺|v⟩)` for a unit `v`.
    fn evaluate(&self, v: &CVector<T>) -> (T, T) {
        let mut outside = T::zero();
        let mut form = T::zero();
        for j in 0..self.eig.dim() {
            let c = (self.eig.eigenvectors.column(j).adjoint() * v)[(0, 0)].norm_sqr();
            let l = self.eig.eigenvalues[j];
            if l.abs() > self.cut && l > T::zero() {
                form += c / l;
            } else {
                outside += c;
            }
        }
        (outside.sqrt(), form)
    }
}

/// Normalizes both factors without touching their phases.
fn unit_factors<T: Real>(pv: &ProductVector<T>) -> ProductVector<T> {
    ProductVector { e: linalg::normalized(&pv.e), f: linalg::normalized(&pv.f) }
}

fn unit_vector_of<T: Real>(pv: &ProductVector<T>) -> (ProductVector<T>, CVector<T>) {
    let pv = unit_factors(pv);
    let v = kron_vec(&pv.e, &pv.f);
    (pv, v)
}

fn subtract<T: Real>(rho: &DensityOperator<T>, weight: T, v: &CVector<T>) -> DensityOperator<T> {
    let m = rho.matrix() - (v * v.adjoint()) * cr(weight);
    rho.with_matrix(linalg::symmetrize(&m))
}

/// `λ` for `|v⟩` in the range described by `form`, or the matching error.
fn max_weight<T: Real>(form: &RangeForm<T>, v: &CVector<T>, cfg: &ToleranceConfig<T>) -> Result<T> {
    let (residual, q) = form.evaluate(v);
    if residual > cfg.membership_tol {
        return Err(Error::NotInRange { residual: to_f64(residual) });
    }
    if q <= cfg.rank_tol {
        return Err(Error::ZeroDenominator { value: to_f64(q) });
    }
    Ok(T::one() / q)
}

/// Subtracts `λ|e,g⟩⟨e,g|` with `λ = 1/⟨e,g|ρ⁺|e,g⟩`, the largest weight
/// keeping `ρ` positive.
pub fn lemma1_subtract<T: Real>(
    rho: &DensityOperator<T>,
    pv: &ProductVector<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<SubtractionResult<T>> {
    check_dims(rho, pv)?;
    let (pv, v) = unit_vector_of(pv);
    let form = RangeForm::new(rho.matrix(), cfg)?;
    let weight = max_weight(&form, &v, cfg)?;
    Ok(SubtractionResult { reduced: subtract(rho, weight, &v), weight, removed: pv, rank_dropped_on: RankDrop::Rho })
}

/// As [`lemma1_subtract`] but keeping both `ρ` and `ρ^{T_A}` positive:
/// `λ = min(λ1, λ2)` with `λ2` taken from `|e*,g⟩` and `ρ^{T_A}`.
pub fn corollary1_subtract<T: Real>(
    rho: &DensityOperator<T>,
    pv: &ProductVector<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<SubtractionResult<T>> {
    check_dims(rho, pv)?;
    let (pv, v) = unit_vector_of(pv);
    let v_conj = kron_vec(&conj_a(&pv.e), &pv.f);
    let rho_ta = partial_transpose_matrix(rho.matrix(), rho.dim_b());
    let l1 = max_weight(&RangeForm::new(rho.matrix(), cfg)?, &v, cfg)?;
    let l2 = max_weight(&RangeForm::new(&rho_ta, cfg)?, &v_conj, cfg)?;
    let (weight, side) = if (l1 - l2).abs() <= lit::<T>(1e-12) * l1.max(l2) {
        (l1.min(l2), RankDrop::Both)
    } else if l1 < l2 {
        (l1, RankDrop::Rho)
    } else {
        (l2, RankDrop::RhoTA)
    };
    Ok(SubtractionResult { reduced: subtract(rho, weight, &v), weight, removed: pv, rank_dropped_on: side })
}

fn check_dims<T: Real>(rho: &DensityOperator<T>, pv: &ProductVector<T>) -> Result<()> {
    if pv.f.len() != rho.dim_b() || pv.e.len() != 2 {
        return Err(Error::DimensionMismatch { expected: rho.dim_b(), got: pv.f.len() });
    }
    Ok(())
}

fn check_kernel<T: Real>(rho: &DensityOperator<T>, v: &CVector<T>, cfg: &ToleranceConfig<T>) -> Result<()> {
    let residual = vec_norm(&(rho.matrix() * v));
    if residual > cfg.membership_tol * rho.norm() {
        return Err(Error::NotInKernel { residual: to_f64(residual) });
    }
    Ok(())
}

/// Splits on whether `|ê,f⟩` is also in the kernel when `|e,f⟩` is.
///
/// For PPT `ρ` the vector `ρ|ê,f⟩` has no `|e⟩` component; that is checked
/// against `membership_tol·‖ρ‖` and reported as
/// [`Error::StructureViolation`] when it fails.
pub fn lemma3_classify<T: Real>(
    rho: &DensityOperator<T>,
    pv: &ProductVector<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<KernelCase<T>> {
    check_dims(rho, pv)?;
    let (pv, v) = unit_vector_of(pv);
    check_kernel(rho, &v, cfg)?;
    let e_hat = hat(&pv.e);
    let norm = rho.norm();
    let w = rho.matrix() * kron_vec(&e_hat, &pv.f);
    if vec_norm(&w) <= cfg.rank_tol * norm {
        return Ok(KernelCase::BothInKernel);
    }
    let stray = vec_norm(&(sandwich_a(rho, &pv.e, &e_hat) * &pv.f));
    if stray > cfg.membership_tol * norm {
        return Err(Error::StructureViolation { residual: to_f64(stray) });
    }
    Ok(KernelCase::Reduced(sandwich_a(rho, &e_hat, &e_hat) * &pv.f))
}

/// Removes `|ê,g⟩⟨ê,g|/⟨g|f⟩` so that the result annihilates `C^2 ⊗ f`.
pub fn lemma4_reduce<T: Real>(
    rho: &DensityOperator<T>,
    pv: &ProductVector<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<KernelReduction<T>> {
    let case = lemma3_classify(rho, pv, cfg)?;
    let pv = unit_factors(pv);
    let g = match &case {
        KernelCase::BothInKernel => {
            return Ok(KernelReduction { reduced: rho.clone(), term: None, case, kernel_vector: pv });
        }
        KernelCase::Reduced(g) => g.clone(),
    };
    let e_hat = hat(&pv.e);
    let probe = kron_vec(&e_hat, &pv.f);
    let overlap = (probe.adjoint() * rho.matrix() * &probe)[(0, 0)].re;
    if overlap <= cfg.rank_tol * rho.norm() {
        return Err(Error::NonPositiveOverlap { value: to_f64(overlap) });
    }
    let g_norm = vec_norm(&g);
    let weight = g_norm * g_norm / overlap;
    let removed = ProductVector { e: e_hat, f: g.map(|z| z / cr(g_norm)) };
    let reduced = subtract(rho, weight, &removed.vector());
    Ok(KernelReduction { reduced, term: Some((weight, removed.normalized())), case, kernel_vector: pv })
}

/// [`lemma4_reduce`] for PT-invariant `ρ`, run with a real A-side vector so
/// that the removed term and the result stay PT-invariant.
///
/// Of `e + e*` and `(e − e*)/i` the one with the larger norm is tried first.
pub fn lemma4b_reduce<T: Real>(
    rho: &DensityOperator<T>,
    pv: &ProductVector<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<KernelReduction<T>> {
    check_dims(rho, pv)?;
    let defect = pt_defect(rho);
    if defect > cfg.recon_tol * rho.trace().abs().max(T::one()) {
        return Err(Error::NotPtInvariant { defect: to_f64(defect) });
    }
    let pv = unit_factors(pv);
    let e_conj = conj_a(&pv.e);
    let re = &pv.e + &e_conj;
    let im = (&pv.e - &e_conj).map(|z| z * crate::C::new(T::zero(), -T::one()));
    let mut options = [re, im];
    if vec_norm(&options[1]) > vec_norm(&options[0]) {
        options.swap(0, 1);
    }
    let mut best = T::max_value().unwrap();
    for cand in options {
        if vec_norm(&cand) <= cfg.colinear_tol {
            continue;
        }
        // drop any rounding-level imaginary parts
        let e_r = linalg::normalized(&cand.map(|z| cr(z.re)));
        let v = kron_vec(&e_r, &pv.f);
        let residual = vec_norm(&(rho.matrix() * &v));
        if residual <= cfg.membership_tol * rho.norm() {
            return lemma4_reduce(rho, &ProductVector { e: e_r, f: pv.f.clone() }, cfg);
        }
        best = best.min(residual);
    }
    Err(Error::RealizationFailed { residual: to_f64(best) })
}
