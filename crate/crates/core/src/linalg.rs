//! Dense Hermitian kernels with an explicit tolerance policy.
//!
//! Everything here goes through the eigendecomposition: pseudo-inverse,
//! square roots, rank and kernel/range extraction. Dimensions in this crate
//! stay small (a few dozen at most), so determinism wins over speed.

use nalgebra::{DVector, SymmetricEigen, SVD};

use crate::error::{Error, Result};
use crate::{cr, lit, to_f64, CMatrix, CVector, Real, C};

/// Numerical thresholds shared by every routine in the crate.
///
/// `rank_tol` is relative to the largest eigenvalue magnitude; the others are
/// absolute for trace-one inputs and are scaled by the operator size where a
/// routine says so.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig<T> {
    /// Eigenvalues with `|λ| ≤ rank_tol · max|λ|` count as zero.
    pub rank_tol: T,
    /// Most negative eigenvalue still accepted as positive semidefinite.
    pub psd_tol: T,
    /// Largest accepted reconstruction defect.
    pub recon_tol: T,
    /// Colinearity threshold for pairs of vectors.
    pub colinear_tol: T,
    /// Largest accepted residual when testing a unit vector against a subspace.
    pub membership_tol: T,
}

impl<T: Real> Default for ToleranceConfig<T> {
    fn default() -> Self {
        Self {
            rank_tol: lit(T::RANK_TOL),
            psd_tol: lit(T::PSD_TOL),
            recon_tol: lit(T::RECON_TOL),
            colinear_tol: lit(T::COLINEAR_TOL),
            membership_tol: lit(T::MEMBERSHIP_TOL),
        }
    }
}

impl<T: Real> ToleranceConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rank_tol", self.rank_tol),
            ("psd_tol", self.psd_tol),
            ("recon_tol", self.recon_tol),
            ("colinear_tol", self.colinear_tol),
            ("membership_tol", self.membership_tol),
        ];
        for (name, v) in fields {
            if !v.is_finite() || v <= T::zero() {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Most negative eigenvalue accepted for an operator whose largest
    /// eigenvalue is `scale`.
    pub fn psd_floor(&self, scale: T) -> T {
        -self.psd_tol * scale.max(T::one())
    }
}

/// Spectral decomposition `H = V·diag(λ)·V†` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianEig<T: Real> {
    pub eigenvalues: DVector<T>,
    pub eigenvectors: CMatrix<T>,
}

impl<T: Real> HermitianEig<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_abs(&self) -> T {
        self.eigenvalues.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    pub fn min(&self) -> T {
        self.eigenvalues.iter().copied().fold(T::max_value().unwrap(), |m, x| m.min(x))
    }

    pub fn max(&self) -> T {
        self.eigenvalues.iter().copied().fold(T::min_value().unwrap(), |m, x| m.max(x))
    }

    /// Magnitude below which an eigenvalue is treated as zero.
    pub fn cutoff(&self, cfg: &ToleranceConfig<T>) -> T {
        cfg.rank_tol * self.max_abs()
    }

    pub fn rank(&self, cfg: &ToleranceConfig<T>) -> usize {
        let cut = self.cutoff(cfg);
        if self.max_abs() == T::zero() {
            return 0;
        }
        self.eigenvalues.iter().filter(|l| l.abs() > cut).count()
    }

    /// `V·diag(f(λ))·V†`.
    pub fn map<F: Fn(T) -> T>(&self, f: F) -> CMatrix<T> {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for j in 0..n {
            let s = f(self.eigenvalues[j]);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= s);
        }
        symmetrize(&(scaled * self.eigenvectors.adjoint()))
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.map(|x| x)
    }

    fn columns_where<F: Fn(T) -> bool>(&self, keep: F) -> CMatrix<T> {
        let idx: Vec<usize> = (0..self.dim()).filter(|&j| keep(self.eigenvalues[j])).collect();
        let mut out = CMatrix::zeros(self.dim(), idx.len());
        for (c, &j) in idx.iter().enumerate() {
            out.set_column(c, &self.eigenvectors.column(j));
        }
        out
    }
}

pub fn max_abs_entry<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(modulus(*z)))
}

#[inline]
pub fn modulus<T: Real>(z: C<T>) -> T {
    z.norm_sqr().sqrt()
}

/// Largest entry of `|H - H†|`.
pub fn hermitian_defect<T: Real>(h: &CMatrix<T>) -> T {
    max_abs_entry(&(h - h.adjoint()))
}

/// `(H + H†)/2`.
pub fn symmetrize<T: Real>(h: &CMatrix<T>) -> CMatrix<T> {
    (h + h.adjoint()) * cr(lit::<T>(0.5))
}

pub fn check_square<T: Real>(h: &CMatrix<T>) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(Error::NotSquare { rows: h.nrows(), cols: h.ncols() });
    }
    Ok(())
}

pub fn check_finite<T: Real>(h: &CMatrix<T>) -> Result<()> {
    if h.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Rejects non-square, non-finite or non-Hermitian input.
pub fn check_hermitian<T: Real>(h: &CMatrix<T>) -> Result<()> {
    check_square(h)?;
    check_finite(h)?;
    let defect = hermitian_defect(h);
    let allowed = lit::<T>(T::HERMITIAN_TOL) * max_abs_entry(h).max(T::one());
    if defect > allowed {
        return Err(Error::NotHermitian { defect: to_f64(defect) });
    }
    Ok(())
}

pub fn eig_hermitian<T: Real>(h: &CMatrix<T>) -> Result<HermitianEig<T>> {
    check_hermitian(h)?;
    let n = h.nrows();
    if n == 0 {
        return Ok(HermitianEig { eigenvalues: DVector::zeros(0), eigenvectors: CMatrix::zeros(0, 0) });
    }
    let se = SymmetricEigen::new(symmetrize(h));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&j| se.eigenvalues[j]));
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (c, &j) in order.iter().enumerate() {
        eigenvectors.set_column(c, &se.eigenvectors.column(j));
    }
    Ok(HermitianEig { eigenvalues, eigenvectors })
}

pub fn min_eigenvalue<T: Real>(h: &CMatrix<T>) -> Result<T> {
    Ok(eig_hermitian(h)?.min())
}

fn eig_psd<T: Real>(h: &CMatrix<T>, cfg: &ToleranceConfig<T>) -> Result<HermitianEig<T>> {
    let eig = eig_hermitian(h)?;
    if eig.dim() > 0 && eig.min() < cfg.psd_floor(eig.max()) {
        return Err(Error::NotPsd { min_eigenvalue: to_f64(eig.min()) });
    }
    Ok(eig)
}

pub fn is_psd<T: Real>(h: &CMatrix<T>, cfg: &ToleranceConfig<T>) -> Result<bool> {
    match eig_psd(h, cfg) {
        Ok(_) => Ok(true),
        Err(Error::NotPsd { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Moore–Penrose pseudo-inverse of a PSD operator.
pub fn pseudo_inverse<T: Real>(h: &CMatrix<T>, cfg: &ToleranceConfig<T>) -> Result<CMatrix<T>> {
    let eig = eig_psd(h, cfg)?;
    let cut = eig.cutoff(cfg);
    Ok(eig.map(|l| if l.abs() > cut && l > T::zero() { T::one() / l } else { T::zero() }))
}

/// PSD square root; eigenvalues inside the tolerance band are clamped to 0.
pub fn sqrt_psd<T: Real>(h: &CMatrix<T>, cfg: &ToleranceConfig<T>) -> Result<CMatrix<T>> {
    let eig = eig_psd(h, cfg)?;
    Ok(eig.map(|l| l.max(T::zero()).sqrt()))
}

/// Square root of the pseudo-inverse, `(H⁺)^{1/2}`.
pub fn inv_sqrt_psd<T: Real>(h: &CMatrix<T>, cfg: &ToleranceConfig<T>) -> Result<CMatrix<T>> {
    let eig = eig_psd(h, cfg)?;
    let cut = eig.cutoff(cfg);
    Ok(eig.map(|l| if l.abs() > cut && l > T::zero() { T::one() / l.sqrt() } else { T::zero() }))
}

/// Replaces eigenvalues in `[psd floor, 0)` by zero. Returns the clamped
/// operator and the magnitude of the largest clamp.
pub fn clamp_psd<T: Real>(h: &CMatrix<T>, cfg: &ToleranceConfig<T>) -> Result<(CMatrix<T>, T)> {
    let eig = eig_psd(h, cfg)?;
    let worst = eig.min().min(T::zero()).abs();
    if worst == T::zero() {
        return Ok((symmetrize(h), T::zero()));
    }
    Ok((eig.map(|l| l.max(T::zero())), worst))
}

/// Largest singular value.
pub fn operator_norm<T: Real>(m: &CMatrix<T>) -> T {
    if m.nrows() == 0 || m.ncols() == 0 {
        return T::zero();
    }
    let svd = SVD::new(m.clone(), false, false);
    svd.singular_values.iter().fold(T::zero(), |a, &s| a.max(s))
}

/// Rank plus orthonormal kernel and range bases of a Hermitian operator.
pub fn rank_kernel_range<T: Real>(
    h: &CMatrix<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<(usize, Subspace<T>, Subspace<T>)> {
    let eig = eig_hermitian(h)?;
    Ok(split_spectrum(&eig, cfg))
}

pub(crate) fn split_spectrum<T: Real>(
    eig: &HermitianEig<T>,
    cfg: &ToleranceConfig<T>,
) -> (usize, Subspace<T>, Subspace<T>) {
    let n = eig.dim();
    let cut = eig.cutoff(cfg);
    let zero = eig.max_abs() == T::zero();
    let kernel = eig.columns_where(|l| zero || l.abs() <= cut);
    let range = eig.columns_where(|l| !zero && l.abs() > cut);
    let rank = range.ncols();
    (rank, Subspace::from_orthonormal(n, kernel), Subspace::from_orthonormal(n, range))
}

pub fn vec_norm<T: Real>(v: &CVector<T>) -> T {
    v.iter().fold(T::zero(), |a, z| a + z.norm_sqr()).sqrt()
}

pub fn inner<T: Real>(a: &CVector<T>, b: &CVector<T>) -> C<T> {
    a.iter().zip(b.iter()).fold(C::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

pub fn normalized<T: Real>(v: &CVector<T>) -> CVector<T> {
    let n = vec_norm(v);
    v.map(|z| z / cr(n))
}

/// Normalizes `v` and rotates its global phase so that the first component
/// of non-negligible size is real and positive.
pub fn phase_fix<T: Real>(v: &CVector<T>) -> CVector<T> {
    let v = normalized(v);
    let biggest = v.iter().fold(T::zero(), |m, z| m.max(modulus(*z)));
    let thresh = biggest * lit::<T>(1e-6);
    match v.iter().find(|z| modulus(**z) > thresh) {
        Some(&z) => {
            let phase = z / cr(modulus(z));
            v.map(|x| x * phase.conj())
        }
        None => v,
    }
}

/// Smallest singular value of `m` and a matching unit right singular vector.
///
/// Wide matrices are padded with zero rows so a full set of right singular
/// vectors is available.
pub fn smallest_right_singular<T: Real>(m: &CMatrix<T>) -> (T, CVector<T>) {
    let cols = m.ncols();
    let padded = if m.nrows() < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let (j, s) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, T::max_value().unwrap()), |best, (j, s)| if s < best.1 { (j, s) } else { best });
    let v = v_t.row(j).adjoint();
    (s, v)
}

/// Orthonormal basis of a linear subspace of `C^ambient_dim`, stored as
/// columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<T: Real> {
    ambient_dim: usize,
    basis: CMatrix<T>,
}

impl<T: Real> Subspace<T> {
    /// Wraps `basis` after checking `basis†·basis = I`.
    pub fn new(basis: CMatrix<T>) -> Result<Self> {
        check_finite(&basis)?;
        let k = basis.ncols();
        let gram = basis.adjoint() * &basis;
        let defect = max_abs_entry(&(gram - CMatrix::identity(k, k)));
        if defect > lit(T::RECON_TOL * 1e-2) {
            return Err(Error::NumericalFailure(format!(
                "subspace basis not orthonormal (defect {:e})",
                to_f64(defect)
            )));
        }
        Ok(Self { ambient_dim: basis.nrows(), basis })
    }

    pub(crate) fn from_orthonormal(ambient_dim: usize, basis: CMatrix<T>) -> Self {
        debug_assert_eq!(basis.nrows(), ambient_dim);
        Self { ambient_dim, basis }
    }

    /// Span of the columns of `vectors`.
    pub fn span(vectors: &CMatrix<T>, cfg: &ToleranceConfig<T>) -> Result<Self> {
        let gram = symmetrize(&(vectors * vectors.adjoint()));
        let eig = eig_hermitian(&gram)?;
        let (_, _, range) = split_spectrum(&eig, cfg);
        Ok(range)
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self { ambient_dim, basis: CMatrix::identity(ambient_dim, ambient_dim) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMatrix<T> {
        &self.basis
    }

    pub fn projector(&self) -> CMatrix<T> {
        &self.basis * self.basis.adjoint()
    }

    /// `‖v − P v‖` for the orthogonal projector `P` onto the subspace.
    pub fn residual(&self, v: &CVector<T>) -> T {
        let coeffs = self.basis.adjoint() * v;
        vec_norm(&(v - &self.basis * coeffs))
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn complement(&self) -> Self {
        let n = self.ambient_dim;
        if self.dim() == 0 {
            return Self::full(n);
        }
        let comp = symmetrize(&(CMatrix::identity(n, n) - self.projector()));
        let eig = eig_hermitian(&comp).expect("projector complement is Hermitian");
        let basis = eig.columns_where(|l| l > lit(0.5));
        Self { ambient_dim: n, basis }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx_eq::*;

    mod approx_eq {
        pub fn close(a: f64, b: f64, tol: f64) -> bool {
            (a - b).abs() <= tol
        }
    }

    fn c(re: f64, im: f64) -> C<f64> {
        C::new(re, im)
    }

    fn diag(v: &[f64]) -> CMatrix<f64> {
        CMatrix::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0))))
    }

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    fn random_psd(n: usize, rank: usize, seed: &mut u64) -> CMatrix<f64> {
        let g = CMatrix::from_fn(n, rank, |_, _| c(lcg(seed), lcg(seed)));
        symmetrize(&(&g * g.adjoint()))
    }

    #[test]
    fn eig_of_identity_and_diagonal() {
        let e = eig_hermitian(&CMatrix::<f64>::identity(2, 2)).unwrap();
        assert_eq!(e.eigenvalues.as_slice(), &[1.0, 1.0]);
        let e = eig_hermitian(&diag(&[3.0, 1.0])).unwrap();
        assert!(close(e.eigenvalues[0], 1.0, 1e-15) && close(e.eigenvalues[1], 3.0, 1e-15));
    }

    #[test]
    fn eig_of_pauli_y() {
        // det(σ_y − λ) = λ² − 1
        let sy = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let e = eig_hermitian(&sy).unwrap();
        assert!(close(e.eigenvalues[0], -1.0, 1e-14));
        assert!(close(e.eigenvalues[1], 1.0, 1e-14));
        assert!(max_abs_entry(&(e.reconstruct() - sy)) < 1e-14);
    }

    #[test]
    fn eig_rejects_bad_input() {
        let m = CMatrix::<f64>::zeros(2, 3);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotSquare { .. })));
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1e-6, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
        let m = CMatrix::from_row_slice(1, 1, &[c(f64::NAN, 0.0)]);
        assert!(matches!(eig_hermitian(&m), Err(Error::NonFinite)));
    }

    #[test]
    fn pseudo_inverse_cases() {
        let cfg = ToleranceConfig::default();
        let id = CMatrix::<f64>::identity(3, 3);
        assert!(max_abs_entry(&(pseudo_inverse(&id, &cfg).unwrap() - &id)) < 1e-15);
        let p = pseudo_inverse(&diag(&[2.0, 0.0]), &cfg).unwrap();
        assert!(max_abs_entry(&(p - diag(&[0.5, 0.0]))) < 1e-15);
        assert!(matches!(pseudo_inverse(&diag(&[1.0, -0.1]), &cfg), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn moore_penrose_identities_on_random_psd() {
        let cfg = ToleranceConfig::default();
        let mut seed = 11;
        for trial in 0..500 {
            let n = 2 + trial % 7;
            let r = 1 + trial % n;
            let p = random_psd(n, r, &mut seed);
            let pp = pseudo_inverse(&p, &cfg).unwrap();
            assert!(max_abs_entry(&(&p * &pp * &p - &p)) < 1e-10);
            assert!(max_abs_entry(&(&pp * &p * &pp - &pp)) < 1e-10 * max_abs_entry(&pp).max(1.0));
            let proj = &p * &pp;
            assert!(hermitian_defect(&proj) < 1e-10);
            assert!(max_abs_entry(&(&proj * &proj - &proj)) < 1e-10);
        }
    }

    #[test]
    fn sqrt_cases() {
        let cfg = ToleranceConfig::default();
        let s = sqrt_psd(&diag(&[4.0, 9.0]), &cfg).unwrap();
        assert!(max_abs_entry(&(s - diag(&[2.0, 3.0]))) < 1e-14);
        let id = CMatrix::<f64>::identity(4, 4);
        assert!(max_abs_entry(&(sqrt_psd(&id, &cfg).unwrap() - &id)) < 1e-15);
        let mut seed = 3;
        for _ in 0..100 {
            let h = random_psd(5, 5, &mut seed);
            let s = sqrt_psd(&h, &cfg).unwrap();
            assert!(max_abs_entry(&(&s * &s - &h)) < 1e-10);
        }
        // tiny negative eigenvalue is clamped
        let s = sqrt_psd(&diag(&[1.0, -1e-12]), &cfg).unwrap();
        assert!(max_abs_entry(&(s - diag(&[1.0, 0.0]))) < 1e-15);
    }

    #[test]
    fn operator_norm_cases() {
        assert!(close(operator_norm(&CMatrix::<f64>::identity(5, 5)), 1.0, 1e-15));
        assert!(close(operator_norm(&diag(&[1.0, -3.0])), 3.0, 1e-14));
        let mut seed = 5;
        for _ in 0..50 {
            let u = CVector::from_fn(4, |_, _| c(lcg(&mut seed), lcg(&mut seed)));
            let v = CVector::from_fn(3, |_, _| c(lcg(&mut seed), lcg(&mut seed)));
            let m = &u * v.adjoint();
            let expected = vec_norm(&u) * vec_norm(&v);
            assert!(close(operator_norm(&m), expected, 1e-12));
        }
    }

    #[test]
    fn submultiplicative_norm() {
        let mut seed = 9;
        for _ in 0..500 {
            let a = CMatrix::from_fn(4, 4, |_, _| c(lcg(&mut seed), lcg(&mut seed)));
            let b = CMatrix::from_fn(4, 4, |_, _| c(lcg(&mut seed), lcg(&mut seed)));
            assert!(operator_norm(&(&a * &b)) <= operator_norm(&a) * operator_norm(&b) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn rank_kernel_range_cases() {
        let cfg = ToleranceConfig::default();
        let (r, k, rg) = rank_kernel_range(&CMatrix::<f64>::identity(4, 4), &cfg).unwrap();
        assert_eq!((r, k.dim(), rg.dim()), (4, 0, 4));
        let (r, k, _) = rank_kernel_range(&diag(&[1.0, 0.0, 0.0, 0.0]), &cfg).unwrap();
        assert_eq!((r, k.dim()), (1, 3));
        let (r, k, _) = rank_kernel_range(&CMatrix::<f64>::zeros(3, 3), &cfg).unwrap();
        assert_eq!((r, k.dim()), (0, 3));
    }

    #[test]
    fn rank_invariant_under_unitary_conjugation() {
        let cfg = ToleranceConfig::default();
        let mut seed = 21;
        for trial in 0..500 {
            let n = 2 + trial % 6;
            let r = 1 + trial % n;
            let h = random_psd(n, r, &mut seed);
            let g = CMatrix::from_fn(n, n, |_, _| c(lcg(&mut seed), lcg(&mut seed)));
            let u = nalgebra::QR::new(g).q();
            let conj = symmetrize(&(&u * &h * u.adjoint()));
            let (r1, k1, _) = rank_kernel_range(&h, &cfg).unwrap();
            let (r2, _, _) = rank_kernel_range(&conj, &cfg).unwrap();
            assert_eq!(r1, r);
            assert_eq!(r1, r2);
            assert_eq!(k1.dim() + r1, n);
        }
    }

    #[test]
    fn subspace_residual_and_complement() {
        let basis = CMatrix::from_column_slice(3, 1, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let s = Subspace::new(basis).unwrap();
        let comp = s.complement();
        assert_eq!(comp.dim(), 2);
        let v = CVector::from_column_slice(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(close(s.residual(&v), 1.0, 1e-15));
        assert!(comp.residual(&v) < 1e-15);
        assert!(Subspace::new(CMatrix::from_element(2, 1, c(1.0, 0.0))).is_err());
    }

    #[test]
    fn null_vector_of_wide_matrix() {
        let m = CMatrix::from_row_slice(1, 2, &[c(1.0, 0.0), c(1.0, 0.0)]);
        let (s, v) = smallest_right_singular(&m);
        assert!(s < 1e-15);
        assert!(vec_norm(&(&m * &v)) < 1e-15);
    }

    #[test]
    fn generic_over_f32() {
        let cfg = ToleranceConfig::<f32>::default();
        let h = CMatrix::<f32>::from_diagonal(&DVector::from_vec(vec![C::new(4.0f32, 0.0), C::new(1.0, 0.0)]));
        let s = sqrt_psd(&h, &cfg).unwrap();
        assert!((s[(0, 0)].re - 2.0).abs() < 1e-6);
        assert_eq!(rank_kernel_range(&h, &cfg).unwrap().0, 2);
    }
}
