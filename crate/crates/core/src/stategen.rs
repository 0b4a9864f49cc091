//! Seeded generators for test instances.
//!
//! The random stream is ChaCha8 keyed with the 64-bit seed in little-endian
//! order (remaining key bytes zero, stream 0). Uniform doubles take the top
//! 53 bits of each `u64`; Gaussians use the Box–Muller transform on pairs of
//! uniforms, and Dirichlet weights are normalized `-ln(u)` draws. This keeps
//! every generated value reproducible from the seed in any language that has
//! a ChaCha8 implementation.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bipartite::{
    kron_vec, partial_transpose_matrix, DensityOperator, ProductVector, SeparableDecomposition,
};
use crate::error::{Error, Result};
use crate::linalg::{self, Subspace, ToleranceConfig};
use crate::{lit, CMatrix, CVector, Real, C};

/// Rejection samplers give up after this many draws.
pub const MAX_ATTEMPTS: usize = 100_000;

/// Seed of a generator stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl From<u64> for Seed {
    fn from(s: u64) -> Self {
        Seed(s)
    }
}

/// Deterministic source of uniforms and Gaussians.
pub struct StateRng {
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl StateRng {
    pub fn new(seed: impl Into<Seed>) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.into().0.to_le_bytes());
        Self { inner: ChaCha8Rng::from_seed(key), spare: None }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = std::f64::consts::TAU * u2;
        self.spare = Some(r * t.sin());
        r * t.cos()
    }

    /// Complex Gaussian with independent standard-normal parts.
    pub fn complex_gaussian<T: Real>(&mut self) -> C<T> {
        let re = self.gaussian();
        let im = self.gaussian();
        C::new(lit(re), lit(im))
    }

    pub fn gaussian_matrix<T: Real>(&mut self, rows: usize, cols: usize) -> CMatrix<T> {
        // row-major fill so the stream layout does not depend on storage order
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = self.complex_gaussian();
            }
        }
        m
    }

    pub fn gaussian_vector<T: Real>(&mut self, n: usize) -> CVector<T> {
        CVector::from_iterator(n, (0..n).map(|_| self.complex_gaussian()))
    }

    /// Unit vector, uniformly distributed on the sphere.
    pub fn unit_vector<T: Real>(&mut self, n: usize) -> CVector<T> {
        linalg::normalized(&self.gaussian_vector(n))
    }

    pub fn product_vector<T: Real>(&mut self, dim_b: usize) -> ProductVector<T> {
        let e = self.unit_vector(2);
        let f = self.unit_vector(dim_b);
        ProductVector { e, f }
    }

    /// Flat Dirichlet weights summing to one.
    pub fn dirichlet(&mut self, k: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..k).map(|_| -(1.0 - self.uniform()).ln()).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / s).collect()
    }

    /// Haar-ish unitary from the QR factorization of a Gaussian matrix with
    /// the diagonal phases of `R` removed.
    pub fn unitary<T: Real>(&mut self, n: usize) -> CMatrix<T> {
        let g = self.gaussian_matrix::<T>(n, n);
        let qr = nalgebra::QR::new(g);
        let (mut q, r) = (qr.q(), qr.r());
        for j in 0..n {
            let d = r[(j, j)];
            let m = linalg::modulus(d);
            if m > T::zero() {
                let phase = d / C::new(m, T::zero());
                q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
            }
        }
        q
    }
}

/// A rejection-sampled state plus the number of draws it took.
#[derive(Debug, Clone)]
pub struct Sampled<T: Real> {
    pub state: DensityOperator<T>,
    pub attempts: usize,
}

fn wishart<T: Real>(rng: &mut StateRng, dim_b: usize, cols: usize) -> DensityOperator<T> {
    let g = rng.gaussian_matrix::<T>(2 * dim_b, cols);
    DensityOperator::from_raw(dim_b, linalg::symmetrize(&(&g * g.adjoint()))).normalized()
}

/// `G·G†/tr` for a `2N × rank` complex Gaussian `G`.
pub fn random_density<T: Real>(dim_b: usize, rank: usize, seed: impl Into<Seed>) -> Result<DensityOperator<T>> {
    if dim_b == 0 || rank == 0 || rank > 2 * dim_b {
        return Err(Error::InvalidArgument(format!("rank {rank} invalid for 2x{dim_b}")));
    }
    let mut rng = StateRng::new(seed);
    Ok(wishart(&mut rng, dim_b, rank))
}

/// Mixture of `k` random product projectors with Dirichlet weights, plus the
/// ground-truth decomposition.
pub fn random_separable<T: Real>(
    dim_b: usize,
    k_terms: usize,
    seed: impl Into<Seed>,
) -> Result<(DensityOperator<T>, SeparableDecomposition<T>)> {
    if dim_b == 0 || k_terms == 0 {
        return Err(Error::InvalidArgument("need dim_b ≥ 1 and at least one term".into()));
    }
    let mut rng = StateRng::new(seed);
    let mut dec = SeparableDecomposition::empty(dim_b);
    let weights = rng.dirichlet(k_terms);
    for w in weights {
        let pv = rng.product_vector(dim_b);
        dec.push(lit(w), &pv);
    }
    let rho = crate::bipartite::assemble(&dec);
    Ok((rho, dec))
}

fn min_pt_eigenvalue<T: Real>(rho: &DensityOperator<T>) -> T {
    linalg::min_eigenvalue(&partial_transpose_matrix(rho.matrix(), rho.dim_b()))
        .expect("partial transpose of a Hermitian operator is Hermitian")
}

/// PPT state by rejection from `G·G†` with `G` of size `2N × 4N`.
pub fn random_ppt<T: Real>(dim_b: usize, seed: impl Into<Seed>) -> Result<Sampled<T>> {
    let cfg = ToleranceConfig::<T>::default();
    let mut rng = StateRng::new(seed);
    for attempt in 1..=MAX_ATTEMPTS {
        let rho = wishart::<T>(&mut rng, dim_b, 4 * dim_b);
        if min_pt_eigenvalue(&rho) >= -cfg.psd_tol {
            return Ok(Sampled { state: rho, attempts: attempt });
        }
    }
    Err(Error::RejectionExhausted { attempts: MAX_ATTEMPTS })
}

/// NPT state by rejection from full-rank `G·G†` (`G` square).
pub fn random_npt<T: Real>(dim_b: usize, seed: impl Into<Seed>) -> Result<Sampled<T>> {
    if dim_b == 0 {
        return Err(Error::InvalidArgument("dim_b must be at least 1".into()));
    }
    let cfg = ToleranceConfig::<T>::default();
    let mut rng = StateRng::new(seed);
    for attempt in 1..=MAX_ATTEMPTS {
        let rho = wishart::<T>(&mut rng, dim_b, 2 * dim_b);
        if min_pt_eigenvalue(&rho) < -cfg.psd_tol {
            return Ok(Sampled { state: rho, attempts: attempt });
        }
    }
    Err(Error::RejectionExhausted { attempts: MAX_ATTEMPTS })
}

/// `(ρ + ρ^{T_A})/2` of a random PPT state.
pub fn random_pt_invariant<T: Real>(dim_b: usize, seed: impl Into<Seed>) -> Result<DensityOperator<T>> {
    let rho = random_ppt::<T>(dim_b, seed)?.state;
    Ok(pt_symmetrize(&rho))
}

/// `(ρ + ρ^{T_A})/2`.
pub fn pt_symmetrize<T: Real>(rho: &DensityOperator<T>) -> DensityOperator<T> {
    let m = (rho.matrix() + partial_transpose_matrix(rho.matrix(), rho.dim_b())) * C::new(lit(0.5), T::zero());
    DensityOperator::from_raw(rho.dim_b(), m)
}

/// `p·|ψ⁻⟩⟨ψ⁻| + (1−p)·I/4` with `ψ⁻ = (|01⟩ − |10⟩)/√2`.
pub fn werner<T: Real>(p: T) -> DensityOperator<T> {
    let s = lit::<T>(0.5).sqrt();
    let z = T::zero();
    let singlet = CVector::from_column_slice(&[C::new(z, z), C::new(s, z), C::new(-s, z), C::new(z, z)]);
    let quarter = (T::one() - p) * lit(0.25);
    let m = singlet.clone() * singlet.adjoint() * C::new(p, z) + CMatrix::identity(4, 4) * C::new(quarter, z);
    DensityOperator::from_raw(2, m)
}

/// Orthonormalized Gaussian columns.
pub fn random_subspace<T: Real>(ambient: usize, dim: usize, seed: impl Into<Seed>) -> Result<Subspace<T>> {
    if dim > ambient {
        return Err(Error::InvalidArgument(format!("dim {dim} exceeds ambient {ambient}")));
    }
    let mut rng = StateRng::new(seed);
    let g = rng.gaussian_matrix::<T>(ambient, dim);
    let q = nalgebra::QR::new(g).q();
    Subspace::new(q.columns(0, dim).into_owned())
}

/// Separable state whose kernel contains a chosen random product vector
/// `|e,f⟩`: every term is either `|ê,b⟩` or `|a,b⟩` with `b ⊥ f`, picked
/// by a fair coin (always the former when `N = 1`).
pub fn separable_with_kernel_product<T: Real>(
    dim_b: usize,
    k_terms: usize,
    seed: impl Into<Seed>,
) -> Result<(DensityOperator<T>, SeparableDecomposition<T>, ProductVector<T>)> {
    if dim_b == 0 || k_terms == 0 {
        return Err(Error::InvalidArgument("need dim_b ≥ 1 and at least one term".into()));
    }
    let mut rng = StateRng::new(seed);
    let target = rng.product_vector::<T>(dim_b);
    let e_perp = crate::bipartite::hat(&target.e);
    let mut dec = SeparableDecomposition::empty(dim_b);
    for w in rng.dirichlet(k_terms) {
        let pv = if dim_b == 1 || rng.uniform() < 0.5 {
            ProductVector { e: e_perp.clone(), f: rng.unit_vector(dim_b) }
        } else {
            let a = rng.unit_vector(2);
            let mut b: CVector<T> = rng.gaussian_vector(dim_b);
            let c = linalg::inner(&target.f, &b);
            b -= &target.f * c;
            ProductVector { e: a, f: linalg::normalized(&b) }
        };
        dec.push(lit(w), &pv);
    }
    Ok((crate::bipartite::assemble(&dec), dec, target))
}

/// PT-invariant state with `|e,f⟩` in its kernel.
///
/// Even seeds (and every `N = 1` seed) use an `e` that is real up to a
/// random global phase, so that the kernel reduction has a term to remove;
/// odd seeds use a genuinely complex `e`, which forces all of `C^2 ⊗ f` into
/// the kernel.
pub fn pt_invariant_with_kernel_product<T: Real>(
    dim_b: usize,
    k_terms: usize,
    seed: impl Into<Seed>,
) -> Result<(DensityOperator<T>, ProductVector<T>)> {
    if dim_b == 0 || k_terms == 0 {
        return Err(Error::InvalidArgument("need dim_b ≥ 1 and at least one term".into()));
    }
    let seed = seed.into();
    let mut rng = StateRng::new(seed);
    let real_direction = dim_b == 1 || seed.0 % 2 == 0;
    let f = rng.unit_vector::<T>(dim_b);
    let e = if real_direction {
        let (x, y) = (rng.gaussian(), rng.gaussian());
        let phase = std::f64::consts::TAU * rng.uniform();
        let ph = C::new(lit::<T>(phase.cos()), lit::<T>(phase.sin()));
        linalg::normalized(&CVector::from_column_slice(&[ph * lit::<T>(x), ph * lit::<T>(y)]))
    } else {
        rng.unit_vector::<T>(2)
    };
    let e_perp_real = {
        let r = e.map(|z| z * e[0].conj());
        let r = if linalg::modulus(e[0]) > lit(1e-3) { r } else { e.map(|z| z * e[1].conj()) };
        crate::bipartite::hat(&linalg::normalized(&r.map(|z| C::new(z.re, T::zero()))))
    };
    let mut dec = SeparableDecomposition::empty(dim_b);
    for w in rng.dirichlet(k_terms) {
        let pv = if real_direction && (dim_b == 1 || rng.uniform() < 0.5) {
            ProductVector { e: e_perp_real.clone(), f: rng.unit_vector(dim_b) }
        } else {
            let a = rng.unit_vector(2);
            let mut b: CVector<T> = rng.gaussian_vector(dim_b);
            let c = linalg::inner(&f, &b);
            b -= &f * c;
            ProductVector { e: a, f: linalg::normalized(&b) }
        };
        dec.push(lit(w), &pv);
    }
    let rho = pt_symmetrize(&crate::bipartite::assemble(&dec));
    Ok((rho, ProductVector { e, f }))
}

/// Random product vector `|e,f⟩` as a `2N` vector.
pub fn random_product<T: Real>(dim_b: usize, seed: impl Into<Seed>) -> CVector<T> {
    let mut rng = StateRng::new(seed);
    let pv = rng.product_vector::<T>(dim_b);
    kron_vec(&pv.e, &pv.f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipartite::{partial_transpose_a, pt_defect, verify_decomposition};

    #[test]
    fn stream_is_reproducible() {
        let mut a = StateRng::new(42);
        let mut b = StateRng::new(42);
        for _ in 0..100 {
            assert_eq!(a.gaussian().to_bits(), b.gaussian().to_bits());
        }
        let x = random_density::<f64>(3, 6, 7).unwrap();
        let y = random_density::<f64>(3, 6, 7).unwrap();
        assert_eq!(x, y);
        assert_ne!(x, random_density::<f64>(3, 6, 8).unwrap());
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = StateRng::new(1);
        let xs: Vec<f64> = (0..20000).map(|_| rng.gaussian()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!(mean.abs() < 0.03 && (var - 1.0).abs() < 0.05);
    }

    #[test]
    fn random_density_rank_and_trace() {
        let cfg = ToleranceConfig::default();
        for seed in 0..50u64 {
            let full = random_density::<f64>(3, 6, seed).unwrap();
            assert!((full.trace() - 1.0).abs() < 1e-14);
            assert_eq!(linalg::rank_kernel_range(full.matrix(), &cfg).unwrap().0, 6);
            let pure = random_density::<f64>(3, 1, seed).unwrap();
            assert_eq!(linalg::rank_kernel_range(pure.matrix(), &cfg).unwrap().0, 1);
        }
        assert!(random_density::<f64>(2, 5, 0).is_err());
    }

    #[test]
    fn separable_ground_truth_verifies_and_is_ppt() {
        let cfg = ToleranceConfig::default();
        for seed in 0..100u64 {
            let n = 1 + (seed as usize % 4);
            let k = 1 + (seed as usize % 5);
            let (rho, dec) = random_separable::<f64>(n, k, seed).unwrap();
            assert!(verify_decomposition(&rho, &dec, &cfg).unwrap().ok);
            assert!(partial_transpose_a(&rho).min_eigenvalue().unwrap() >= -cfg.psd_tol);
            if k == 1 {
                assert_eq!(linalg::rank_kernel_range(rho.matrix(), &cfg).unwrap().0, 1);
            }
        }
    }

    #[test]
    fn pt_invariant_generator() {
        let cfg = ToleranceConfig::default();
        for seed in 0..30u64 {
            let n = 1 + (seed as usize % 6);
            let rho = random_pt_invariant::<f64>(n, seed).unwrap();
            assert!(pt_defect(&rho) <= 1e-14);
            assert!(rho.is_psd(&cfg).unwrap());
            if n == 1 {
                assert!(rho.matrix().iter().all(|z| z.im.abs() <= 1e-15));
            }
        }
    }

    #[test]
    fn ppt_and_npt_samplers() {
        let cfg = ToleranceConfig::<f64>::default();
        for seed in 0..40u64 {
            let n = 2 + (seed as usize % 2);
            let npt = random_npt::<f64>(n, seed).unwrap();
            assert!(partial_transpose_a(&npt.state).min_eigenvalue().unwrap() < -cfg.psd_tol);
            let ppt = random_ppt::<f64>(n, seed).unwrap();
            assert!(ppt.state.is_psd(&cfg).unwrap());
            assert!(partial_transpose_a(&ppt.state).is_psd(&cfg).unwrap());
            assert!(ppt.attempts >= 1);
        }
    }

    #[test]
    fn werner_pt_spectrum_closed_form() {
        // min eigenvalue of the partial transpose is (1 - 3p)/4
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let min = partial_transpose_a(&werner(p)).min_eigenvalue().unwrap();
            assert!((min - (1.0 - 3.0 * p) / 4.0).abs() < 1e-12);
        }
        let w0 = werner(0.0f64);
        assert!(linalg::max_abs_entry(&(w0.matrix() - CMatrix::identity(4, 4) * C::new(0.25, 0.0))) < 1e-16);
    }

    #[test]
    fn planted_kernel_product() {
        for seed in 0..20u64 {
            let n = 1 + (seed as usize % 4);
            let (rho, dec, pv) = separable_with_kernel_product::<f64>(n, 2 * n, seed).unwrap();
            assert!(linalg::vec_norm(&(rho.matrix() * pv.vector())) < 1e-13);
            let v = verify_decomposition(&rho, &dec, &ToleranceConfig::default()).unwrap();
            assert!(v.ok);
        }
    }

    #[test]
    fn planted_pt_invariant_kernel_product() {
        for seed in 0..20u64 {
            let n = 1 + (seed as usize % 4);
            let (rho, pv) = pt_invariant_with_kernel_product::<f64>(n, 2 * n, seed).unwrap();
            assert!(linalg::vec_norm(&(rho.matrix() * pv.vector())) < 1e-13);
            assert!(pt_defect(&rho) < 1e-15);
            assert!(rho.min_eigenvalue().unwrap() > -1e-14);
        }
    }

    #[test]
    fn subspace_generator() {
        let s = random_subspace::<f64>(6, 3, 5).unwrap();
        let gram = s.basis().adjoint() * s.basis();
        assert!(linalg::max_abs_entry(&(gram - CMatrix::identity(3, 3))) < 1e-12);
        assert_eq!(s, random_subspace::<f64>(6, 3, 5).unwrap());
        let full = random_subspace::<f64>(4, 4, 9).unwrap();
        let p = full.projector();
        assert!(linalg::max_abs_entry(&(p - CMatrix::identity(4, 4))) < 1e-12);
    }

    #[test]
    fn unitary_generator() {
        let mut rng = StateRng::new(3);
        let u = rng.unitary::<f64>(4);
        assert!(linalg::max_abs_entry(&(u.adjoint() * &u - CMatrix::identity(4, 4))) < 1e-13);
    }
}
