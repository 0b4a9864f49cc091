//! The `C^2 ⊗ C^N` tensor structure.
//!
//! Operators are `2N × 2N` with `|a,k⟩ ↦ a·N + k`, so the four `N × N`
//! blocks `block(a, a')` are the A-side matrix elements `⟨a|ρ|a'⟩_A`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{
    self, check_finite, check_hermitian, max_abs_entry, modulus, operator_norm, phase_fix, vec_norm,
    ToleranceConfig,
};
use crate::{cr, lit, to_f64, CMatrix, CVector, Real, C};

/// Hermitian operator on `C^2 ⊗ C^N`.
///
/// Constructed through [`DensityOperator::new`] it is also positive
/// semidefinite with positive trace; [`DensityOperator::from_hermitian`]
/// only checks shape and Hermiticity (partial transposes, differences of
/// states).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator<T: Real> {
    dim_b: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> DensityOperator<T> {
    pub fn new(dim_b: usize, matrix: CMatrix<T>, cfg: &ToleranceConfig<T>) -> Result<Self> {
        let op = Self::from_hermitian(dim_b, matrix)?;
        let trace = op.trace();
        if !trace.is_finite() || trace <= T::zero() {
            return Err(Error::NonPositiveTrace { trace: to_f64(trace) });
        }
        let eig = linalg::eig_hermitian(&op.matrix)?;
        if eig.min() < cfg.psd_floor(eig.max()) {
            return Err(Error::NotPsd { min_eigenvalue: to_f64(eig.min()) });
        }
        Ok(op)
    }

    pub fn from_hermitian(dim_b: usize, matrix: CMatrix<T>) -> Result<Self> {
        if dim_b == 0 {
            return Err(Error::InvalidArgument("dim_b must be at least 1".into()));
        }
        linalg::check_square(&matrix)?;
        if matrix.nrows() != 2 * dim_b {
            return Err(Error::DimensionMismatch { expected: 2 * dim_b, got: matrix.nrows() });
        }
        check_hermitian(&matrix)?;
        Ok(Self { dim_b, matrix: linalg::symmetrize(&matrix) })
    }

    /// No validation; callers guarantee shape and Hermiticity.
    pub(crate) fn from_raw(dim_b: usize, matrix: CMatrix<T>) -> Self {
        debug_assert_eq!(matrix.nrows(), 2 * dim_b);
        Self { dim_b, matrix }
    }

    pub fn zeros(dim_b: usize) -> Self {
        Self { dim_b, matrix: CMatrix::zeros(2 * dim_b, 2 * dim_b) }
    }

    pub fn maximally_mixed(dim_b: usize) -> Self {
        let n = 2 * dim_b;
        let scale = cr(T::one() / T::from_usize(n).unwrap());
        Self { dim_b, matrix: CMatrix::identity(n, n) * scale }
    }

    /// `|v⟩⟨v|` for a vector of length `2N`.
    pub fn projector(dim_b: usize, v: &CVector<T>) -> Self {
        Self { dim_b, matrix: v * v.adjoint() }
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        2 * self.dim_b
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.diagonal().iter().fold(T::zero(), |a, z| a + z.re)
    }

    pub fn is_normalized(&self, cfg: &ToleranceConfig<T>) -> bool {
        (self.trace() - T::one()).abs() <= cfg.recon_tol
    }

    pub fn normalized(&self) -> Self {
        let t = self.trace();
        Self { dim_b: self.dim_b, matrix: self.matrix.map(|z| z / cr(t)) }
    }

    /// `⟨a|ρ|a'⟩_A` as an `N × N` matrix.
    pub fn block(&self, a: usize, a2: usize) -> CMatrix<T> {
        let n = self.dim_b;
        self.matrix.view((a * n, a2 * n), (n, n)).into_owned()
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        linalg::min_eigenvalue(&self.matrix)
    }

    pub fn is_psd(&self, cfg: &ToleranceConfig<T>) -> Result<bool> {
        linalg::is_psd(&self.matrix, cfg)
    }

    pub fn norm(&self) -> T {
        operator_norm(&self.matrix)
    }

    pub(crate) fn with_matrix(&self, matrix: CMatrix<T>) -> Self {
        Self { dim_b: self.dim_b, matrix }
    }
}

/// `|e⟩ ⊗ |f⟩` with `e ∈ C^2`, `f ∈ C^N`, both nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductVector<T: Real> {
    pub e: CVector<T>,
    pub f: CVector<T>,
}

impl<T: Real> ProductVector<T> {
    pub fn new(e: CVector<T>, f: CVector<T>) -> Result<Self> {
        if e.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: e.len() });
        }
        if f.is_empty() {
            return Err(Error::InvalidArgument("B-side vector is empty".into()));
        }
        check_finite(&CMatrix::from_column_slice(2, 1, e.as_slice()))?;
        check_finite(&CMatrix::from_column_slice(f.len(), 1, f.as_slice()))?;
        if vec_norm(&e) == T::zero() || vec_norm(&f) == T::zero() {
            return Err(Error::InvalidArgument("product vector factor is zero".into()));
        }
        Ok(Self { e, f })
    }

    pub fn dim_b(&self) -> usize {
        self.f.len()
    }

    /// Both factors normalized with the deterministic phase convention.
    pub fn normalized(&self) -> Self {
        Self { e: phase_fix(&self.e), f: phase_fix(&self.f) }
    }

    /// `‖e‖²·‖f‖²`.
    pub fn norm_sqr(&self) -> T {
        let n = vec_norm(&self.e) * vec_norm(&self.f);
        n * n
    }

    /// The `2N` vector `e ⊗ f`.
    pub fn vector(&self) -> CVector<T> {
        kron_vec(&self.e, &self.f)
    }

    /// Same B-side vector, A-side complex conjugated.
    pub fn conj_a(&self) -> Self {
        Self { e: conj_a(&self.e), f: self.f.clone() }
    }
}

pub fn kron_vec<T: Real>(e: &CVector<T>, f: &CVector<T>) -> CVector<T> {
    let n = f.len();
    CVector::from_fn(e.len() * n, |i, _| e[i / n] * f[i % n])
}

/// One weighted term `w·|e,f⟩⟨e,f|` with unit `e` and `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term<T: Real> {
    pub weight: T,
    pub pv: ProductVector<T>,
}

/// `Σ w_i |e_i,f_i⟩⟨e_i,f_i|` with explicit weights and unit factors.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableDecomposition<T: Real> {
    dim_b: usize,
    terms: Vec<Term<T>>,
}

impl<T: Real> SeparableDecomposition<T> {
    pub fn empty(dim_b: usize) -> Self {
        Self { dim_b, terms: Vec::new() }
    }

    /// Takes terms as given. Weights are not checked here so that a
    /// tampered certificate can still be loaded and rejected by
    /// [`verify_decomposition`].
    pub fn from_terms(dim_b: usize, terms: Vec<Term<T>>) -> Result<Self> {
        for t in &terms {
            if t.pv.dim_b() != dim_b {
                return Err(Error::DimensionMismatch { expected: dim_b, got: t.pv.dim_b() });
            }
        }
        Ok(Self { dim_b, terms })
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn terms(&self) -> &[Term<T>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `weight·|e,f⟩⟨e,f|` for unnormalized `e`, `f`; the norms are
    /// folded into the stored weight.
    pub fn push(&mut self, weight: T, pv: &ProductVector<T>) {
        debug_assert_eq!(pv.dim_b(), self.dim_b);
        self.terms.push(Term { weight: weight * pv.norm_sqr(), pv: pv.normalized() });
    }

    pub fn extend(&mut self, other: SeparableDecomposition<T>) {
        debug_assert_eq!(other.dim_b, self.dim_b);
        self.terms.extend(other.terms);
    }

    /// Applies `e ↦ map(e)` to every A-side factor.
    pub fn map_a<F: Fn(&CVector<T>) -> CVector<T>>(&self, map: F) -> Self {
        let mut out = Self::empty(self.dim_b);
        for t in &self.terms {
            out.push(t.weight, &ProductVector { e: map(&t.pv.e), f: t.pv.f.clone() });
        }
        out
    }

    /// Largest imaginary part over all (phase-fixed) A-side factors.
    pub fn max_imag_a(&self) -> T {
        self.terms
            .iter()
            .flat_map(|t| t.pv.e.iter().map(|z| z.im.abs()))
            .fold(T::zero(), |m, x| m.max(x))
    }

    pub fn total_weight(&self) -> T {
        self.terms.iter().fold(T::zero(), |a, t| a + t.weight)
    }
}

/// Swaps the off-diagonal `N × N` blocks of a `2N × 2N` matrix.
pub fn partial_transpose_matrix<T: Real>(m: &CMatrix<T>, dim_b: usize) -> CMatrix<T> {
    let n = dim_b;
    let mut out = m.clone();
    out.view_mut((0, n), (n, n)).copy_from(&m.view((n, 0), (n, n)));
    out.view_mut((n, 0), (n, n)).copy_from(&m.view((0, n), (n, n)));
    out
}

/// Partial transpose on the qubit factor in the computational basis.
pub fn partial_transpose_a<T: Real>(rho: &DensityOperator<T>) -> DensityOperator<T> {
    rho.with_matrix(partial_transpose_matrix(&rho.matrix, rho.dim_b))
}

/// Componentwise complex conjugate in the computational basis.
pub fn conj_a<T: Real>(e: &CVector<T>) -> CVector<T> {
    e.map(|z| z.conj())
}

/// Unit vector orthogonal to `e = (α, β)`: `(−β*, α*)/‖e‖`.
pub fn hat<T: Real>(e: &CVector<T>) -> CVector<T> {
    let n = vec_norm(e);
    CVector::from_column_slice(&[-e[1].conj() / cr(n), e[0].conj() / cr(n)])
}

/// `⟨e1|_A ρ |e2⟩_A`, an `N × N` operator on B.
pub fn sandwich_a<T: Real>(rho: &DensityOperator<T>, e1: &CVector<T>, e2: &CVector<T>) -> CMatrix<T> {
    sandwich_a_matrix(&rho.matrix, rho.dim_b, e1, e2)
}

pub(crate) fn sandwich_a_matrix<T: Real>(
    m: &CMatrix<T>,
    dim_b: usize,
    e1: &CVector<T>,
    e2: &CVector<T>,
) -> CMatrix<T> {
    let n = dim_b;
    let mut out = CMatrix::zeros(n, n);
    for a in 0..2 {
        for b in 0..2 {
            let c = e1[a].conj() * e2[b];
            out += m.view((a * n, b * n), (n, n)) * c;
        }
    }
    out
}

/// `⟨f1|_B ρ |f2⟩_B`, a `2 × 2` operator on A.
pub fn sandwich_b<T: Real>(rho: &DensityOperator<T>, f1: &CVector<T>, f2: &CVector<T>) -> CMatrix<T> {
    let n = rho.dim_b;
    let mut out = CMatrix::zeros(2, 2);
    for a in 0..2 {
        for b in 0..2 {
            let blk = rho.matrix.view((a * n, b * n), (n, n));
            out[(a, b)] = (f1.adjoint() * blk * f2)[(0, 0)];
        }
    }
    out
}

/// `Σ w_i |e_i,f_i⟩⟨e_i,f_i|`.
pub fn assemble<T: Real>(dec: &SeparableDecomposition<T>) -> DensityOperator<T> {
    let n = 2 * dec.dim_b;
    let mut m = CMatrix::zeros(n, n);
    for t in &dec.terms {
        let v = t.pv.vector();
        m += (&v * v.adjoint()) * cr(t.weight);
    }
    DensityOperator::from_raw(dec.dim_b, linalg::symmetrize(&m))
}

/// Outcome of checking a decomposition against an operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification<T> {
    pub ok: bool,
    /// `‖ρ − Σ w_i |e_i,f_i⟩⟨e_i,f_i|‖`.
    pub error: T,
    /// `error` divided by `trace(ρ)`.
    pub relative_error: T,
    pub weights_positive: bool,
}

/// Passes iff every weight is positive and the reconstruction error is at
/// most `recon_tol · trace(ρ)`.
pub fn verify_decomposition<T: Real>(
    rho: &DensityOperator<T>,
    dec: &SeparableDecomposition<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<Verification<T>> {
    verify_with_tol(rho, dec, cfg.recon_tol)
}

pub fn verify_with_tol<T: Real>(
    rho: &DensityOperator<T>,
    dec: &SeparableDecomposition<T>,
    tol: T,
) -> Result<Verification<T>> {
    if rho.dim_b != dec.dim_b {
        return Err(Error::DimensionMismatch { expected: rho.dim_b, got: dec.dim_b });
    }
    let weights_positive = dec.terms.iter().all(|t| t.weight > T::zero());
    let error = operator_norm(&(rho.matrix() - assemble(dec).matrix()));
    let trace = rho.trace().abs();
    let relative_error = if trace > T::zero() { error / trace } else { error };
    let ok = weights_positive && relative_error <= tol;
    Ok(Verification { ok, error, relative_error, weights_positive })
}

/// Isometry `V: C^{N-1} → C^N` onto the orthogonal complement of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lift<T: Real> {
    pub isometry: CMatrix<T>,
}

impl<T: Real> Lift<T> {
    pub fn lift_vector(&self, f: &CVector<T>) -> CVector<T> {
        &self.isometry * f
    }

    pub fn lift_decomposition(&self, dec: &SeparableDecomposition<T>) -> SeparableDecomposition<T> {
        let mut out = SeparableDecomposition::empty(self.isometry.nrows());
        for t in &dec.terms {
            let pv = ProductVector { e: t.pv.e.clone(), f: self.lift_vector(&t.pv.f) };
            out.push(t.weight, &pv);
        }
        out
    }

    /// `(1⊗V) ρ' (1⊗V)†`.
    pub fn embed(&self, rho: &DensityOperator<T>) -> DensityOperator<T> {
        let w = kron_identity2(&self.isometry);
        DensityOperator::from_raw(self.isometry.nrows(), linalg::symmetrize(&(&w * rho.matrix() * w.adjoint())))
    }
}

/// `1_2 ⊗ M`.
pub(crate) fn kron_identity2<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let (r, c) = m.shape();
    let mut out = CMatrix::zeros(2 * r, 2 * c);
    out.view_mut((0, 0), (r, c)).copy_from(m);
    out.view_mut((r, c), (r, c)).copy_from(m);
    out
}

/// `U ⊗ 1_N` for a `2 × 2` matrix `U`.
pub fn kron_a<T: Real>(u: &CMatrix<T>, dim_b: usize) -> CMatrix<T> {
    let n = dim_b;
    let mut out = CMatrix::zeros(2 * n, 2 * n);
    for a in 0..2 {
        for b in 0..2 {
            for k in 0..n {
                out[(a * n + k, b * n + k)] = u[(a, b)];
            }
        }
    }
    out
}

/// Isometry onto `f^⊥` from pivoted Gram–Schmidt over the computational
/// basis. Real when `f` is real up to a global phase.
pub fn complement_isometry<T: Real>(f: &CVector<T>) -> CMatrix<T> {
    let n = f.len();
    let f = linalg::normalized(f);
    let mut basis: Vec<CVector<T>> = vec![f];
    let mut remaining: Vec<usize> = (0..n).collect();
    while basis.len() < n {
        // pick the computational vector with the largest component outside the
        // current span
        let mut best: Option<(usize, CVector<T>, T)> = None;
        for (slot, &k) in remaining.iter().enumerate() {
            let mut v = CVector::zeros(n);
            v[k] = C::new(T::one(), T::zero());
            for b in &basis {
                let c = linalg::inner(b, &v);
                v -= b * c;
            }
            let norm = vec_norm(&v);
            if best.as_ref().is_none_or(|(_, _, bn)| norm > *bn) {
                best = Some((slot, v, norm));
            }
        }
        let (slot, mut v, _) = best.expect("computational basis spans C^N");
        // second pass for orthogonality
        for b in &basis {
            let c = linalg::inner(b, &v);
            v -= b * c;
        }
        basis.push(linalg::normalized(&v));
        remaining.remove(slot);
    }
    let mut out = CMatrix::zeros(n, n - 1);
    for (j, b) in basis.iter().skip(1).enumerate() {
        out.set_column(j, b);
    }
    out
}

/// Restricts `ρ` to `C^2 ⊗ f^⊥` when `ρ` annihilates `C^2 ⊗ f`.
pub fn compress_b<T: Real>(
    rho: &DensityOperator<T>,
    f: &CVector<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<(DensityOperator<T>, Lift<T>)> {
    let n = rho.dim_b;
    if f.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.len() });
    }
    if n < 2 {
        return Err(Error::InvalidArgument("cannot compress a 2x1 operator".into()));
    }
    let residual = support_residual(rho, f);
    let scale = rho.norm().max(lit(f64::MIN_POSITIVE));
    if residual > cfg.membership_tol * scale {
        return Err(Error::SupportNotReduced { residual: to_f64(residual) });
    }
    let v = complement_isometry(f);
    let w = kron_identity2(&v);
    let compressed = linalg::symmetrize(&(w.adjoint() * rho.matrix() * &w));
    Ok((DensityOperator::from_raw(n - 1, compressed), Lift { isometry: v }))
}

/// `max_a ‖ρ (|a⟩ ⊗ f̂)‖`.
pub fn support_residual<T: Real>(rho: &DensityOperator<T>, f: &CVector<T>) -> T {
    let f = linalg::normalized(f);
    (0..2)
        .map(|a| {
            let mut e = CVector::zeros(2);
            e[a] = C::new(T::one(), T::zero());
            vec_norm(&(rho.matrix() * kron_vec(&e, &f)))
        })
        .fold(T::zero(), |m, x| m.max(x))
}

/// `‖ρ − ρ^{T_A}‖`.
pub fn pt_defect<T: Real>(rho: &DensityOperator<T>) -> T {
    operator_norm(&(rho.matrix() - partial_transpose_matrix(rho.matrix(), rho.dim_b)))
}

/// Computational basis vector `|k⟩` of `C^n`.
pub fn basis_vector<T: Real>(n: usize, k: usize) -> CVector<T> {
    let mut v = CVector::zeros(n);
    v[k] = C::new(T::one(), T::zero());
    v
}

/// Builds a vector from `(re, im)` pairs.
pub fn cvec<T: Real>(entries: &[(f64, f64)]) -> CVector<T> {
    DVector::from_iterator(entries.len(), entries.iter().map(|&(re, im)| C::new(lit(re), lit(im))))
}

/// Largest `|x|` over entries; used to compare vectors up to a global phase.
pub fn phase_distance<T: Real>(a: &CVector<T>, b: &CVector<T>) -> T {
    let c = linalg::inner(a, b);
    let m = modulus(c);
    let phase = if m > T::zero() { c / cr(m) } else { cr(T::one()) };
    max_abs_entry(&CMatrix::from_column_slice(a.len(), 1, (a * phase - b).as_slice()))
}
