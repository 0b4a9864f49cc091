//! Constructive partial-transpose test for two qubits.
//!
//! A PPT two-qubit state is reduced step by step until a kernel contains a
//! product vector (then the problem collapses to `2 × 1`) or the state turns
//! out to be PT-invariant in a rotated A basis. Every step yields explicit
//! product terms, so a separable verdict always carries its decomposition.

use crate::bipartite::{
    compress_b, conj_a, hat, kron_a, kron_vec, partial_transpose_matrix, pt_defect, sandwich_b, verify_decomposition,
    DensityOperator, ProductVector, SeparableDecomposition,
};
use crate::decompose::decompose_pt_invariant;
use crate::error::{Error, Result};
use crate::linalg::{self, clamp_psd, max_abs_entry, modulus, rank_kernel_range, vec_norm, Subspace, ToleranceConfig};
use crate::product::find_product_in_subspace;
use crate::reduction::{corollary1_subtract, lemma4_reduce};
use crate::{cr, lit, to_f64, CMatrix, CVector, Real, C};

/// `Ψ1 ∝ |e,f⟩ − |ê,g⟩` and `Ψ2 ∝ |e*,h⟩ − |ê*,f⟩`.
#[derive(Debug, Clone)]
pub struct PsiDecomposition<T: Real> {
    /// Unit A-side vector.
    pub e: CVector<T>,
    pub f: CVector<T>,
    pub g: CVector<T>,
    pub h: CVector<T>,
    /// `e ∝ α|0⟩ + |1⟩`; `None` for `e = |0⟩`.
    pub alpha: Option<C<T>>,
    /// Largest of the proportionality and colinearity residuals.
    pub residual: T,
}

/// Which operator a step worked on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Rho,
    RhoTA,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PeresStep<T> {
    /// A kernel product vector reduced the problem to `2 × 1`.
    KernelProduct { side: Side, kernel_dim: usize },
    /// A range product vector was subtracted because a kernel was empty.
    RangeSubtract { side: Side },
    /// Core case with `h = k² g`: the `|a,b⟩` term was subtracted.
    CoreSubtract { k_squared: T, identity_defect: T },
    /// Core case with `h ∦ g`: PT-invariant after an A-side rotation.
    CoreRotation { pt_defect: T, identity_defect: T },
}

#[derive(Debug, Clone)]
pub enum TwoQubitVerdict<T: Real> {
    Separable { decomposition: SeparableDecomposition<T>, trace: Vec<PeresStep<T>> },
    Entangled { min_pt_eigenvalue: T },
    /// The smallest PT eigenvalue is within `psd_tol` of zero and the
    /// construction did not go through.
    Ambiguous { min_pt_eigenvalue: T },
}

impl<T: Real> TwoQubitVerdict<T> {
    pub fn is_separable(&self) -> bool {
        matches!(self, Self::Separable { .. })
    }
}

/// `T = t0·1 + n·σ` with the standard Pauli matrices.
pub fn bloch_vector<T: Real>(t: &CMatrix<T>) -> (T, [T; 3]) {
    let half = lit::<T>(0.5);
    let t0 = (t[(0, 0)].re + t[(1, 1)].re) * half;
    let off = (t[(0, 1)] + t[(1, 0)].conj()) * cr(half);
    (t0, [off.re, -off.im, (t[(0, 0)].re - t[(1, 1)].re) * half])
}

fn cross<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3<T: Real>(a: &[T; 3]) -> T {
    dot(a, a).sqrt()
}

/// SU(2) element rotating unit `m` onto `+ŷ` (or leaving it if already
/// there), built as `cos(θ/2)·1 − i sin(θ/2)·k·σ`.
fn rotation_to_y<T: Real>(m: &[T; 3]) -> CMatrix<T> {
    let y = [T::zero(), T::one(), T::zero()];
    let c = dot(m, &y).max(-T::one()).min(T::one());
    let axis = cross(m, &y);
    let s = norm3(&axis);
    let (k, theta) = if s <= lit(1e-15) {
        if c > T::zero() {
            return CMatrix::identity(2, 2);
        }
        ([T::one(), T::zero(), T::zero()], T::pi())
    } else {
        ([axis[0] / s, axis[1] / s, axis[2] / s], s.atan2(c))
    };
    let (sh, ch) = (theta * lit(0.5)).sin_cos();
    let i = C::new(T::zero(), T::one());
    let z = T::zero();
    // k·σ = [[kz, kx − i ky], [kx + i ky, −kz]]
    let ks = CMatrix::from_row_slice(
        2,
        2,
        &[C::new(k[2], z), C::new(k[0], -k[1]), C::new(k[0], k[1]), C::new(-k[2], z)],
    );
    CMatrix::identity(2, 2) * cr(ch) - ks * (i * cr(sh))
}

/// Ratio of the Schmidt coefficients of a two-qubit vector, smaller over
/// larger, and the leading product term.
pub fn schmidt<T: Real>(psi: &CVector<T>) -> (T, ProductVector<T>) {
    let m = CMatrix::from_fn(2, 2, |a, k| psi[2 * a + k]);
    let svd = nalgebra::SVD::new(m, true, true);
    let (u, v_t) = (svd.u.expect("u requested"), svd.v_t.expect("v_t requested"));
    let s = &svd.singular_values;
    let (big, small) = if s[0] >= s[1] { (0, 1) } else { (1, 0) };
    let ratio = if s[big] > T::zero() { s[small] / s[big] } else { T::zero() };
    let e = u.column(big).into_owned();
    let f = v_t.row(big).transpose();
    (ratio, ProductVector { e, f })
}

fn colinearity<T: Real>(a: &CVector<T>, b: &CVector<T>) -> T {
    let (na, nb) = (vec_norm(a), vec_norm(b));
    if na == T::zero() || nb == T::zero() {
        return T::one();
    }
    modulus(linalg::inner(a, b)) / (na * nb)
}

fn csqrt<T: Real>(z: C<T>) -> C<T> {
    let r = modulus(z);
    let re = ((r + z.re) * lit(0.5)).max(T::zero()).sqrt();
    let im = ((r - z.re) * lit(0.5)).max(T::zero()).sqrt();
    C::new(re, if z.im < T::zero() { -im } else { im })
}

/// Roots `(p, q)` of `c_pp p² + c_pq p q + c_qq q²`, as unit 2-vectors.
fn homogeneous_roots<T: Real>(c_pp: C<T>, c_pq: C<T>, c_qq: C<T>) -> Vec<(C<T>, C<T>)> {
    let one = cr(T::one());
    let zero = cr(T::zero());
    let (a, b, c) = (modulus(c_pp), modulus(c_pq), modulus(c_qq));
    let scale = a.max(b).max(c);
    if scale == T::zero() {
        return Vec::new();
    }
    let tiny = lit::<T>(1e-14) * scale;
    if a <= tiny && c <= tiny {
        return vec![(one, zero), (zero, one)];
    }
    let solve = |lead: C<T>, mid: C<T>, last: C<T>| -> Vec<C<T>> {
        // lead·t² + mid·t + last = 0 with lead ≠ 0, stable form
        let disc = csqrt(mid * mid - lead * last * cr(lit(4.0)));
        let sign = if (mid.conj() * disc).re >= T::zero() { one } else { -one };
        let qv = -(mid + sign * disc) * cr(lit(0.5));
        let r1 = qv / lead;
        let r2 = if modulus(qv) > T::zero() { last / qv } else { r1 };
        vec![r1, r2]
    };
    let norm = |p: C<T>, q: C<T>| {
        let n = (p.norm_sqr() + q.norm_sqr()).sqrt();
        (p / cr(n), q / cr(n))
    };
    if a >= c {
        // t = p/q
        solve(c_pp, c_pq, c_qq).into_iter().map(|t| norm(t, one)).collect()
    } else {
        // s = q/p
        solve(c_qq, c_pq, c_pp).into_iter().map(|s| norm(one, s)).collect()
    }
}

fn psi_candidate<T: Real>(psi1: &CVector<T>, psi2: &CVector<T>, e: CVector<T>) -> Option<PsiDecomposition<T>> {
    let e = linalg::normalized(&e);
    let e_hat = hat(&e);
    let e_conj = conj_a(&e);
    let e_hat_conj = conj_a(&e_hat);
    let side = |psi: &CVector<T>, a: &CVector<T>| -> CVector<T> {
        CVector::from_fn(2, |k, _| a[0].conj() * psi[k] + a[1].conj() * psi[2 + k])
    };
    let f = side(psi1, &e);
    let g = -side(psi1, &e_hat);
    let h_raw = side(psi2, &e_conj);
    let f2 = -side(psi2, &e_hat_conj);
    let ff = linalg::inner(&f, &f);
    if modulus(ff) == T::zero() {
        return None;
    }
    let c = linalg::inner(&f, &f2) / ff;
    if modulus(c) == T::zero() {
        return None;
    }
    let h = h_raw.map(|z| z / c);
    let r1 = vec_norm(&(psi1 - (kron_vec(&e, &f) - kron_vec(&e_hat, &g))));
    let rebuilt2 = (kron_vec(&e_conj, &h) - kron_vec(&e_hat_conj, &f)) * c;
    let r2 = vec_norm(&(psi2 - rebuilt2));
    let col = T::one() - colinearity(&f, &f2);
    let residual = r1.max(r2).max(col.abs());
    let alpha = if modulus(e[1]) > lit::<T>(1e-14) { Some(e[0] / e[1]) } else { None };
    Some(PsiDecomposition { e, f, g, h, alpha, residual })
}

fn check_kernel_vectors<T: Real>(psi1: &CVector<T>, psi2: &CVector<T>, cfg: &ToleranceConfig<T>) -> Result<()> {
    if psi1.len() != 4 || psi2.len() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: psi1.len().max(psi2.len()) });
    }
    for psi in [psi1, psi2] {
        if schmidt(psi).0 <= cfg.colinear_tol {
            return Err(Error::InvalidArgument("kernel vector is a product vector".into()));
        }
    }
    Ok(())
}

/// One candidate per root of the quadratic, unfiltered.
pub fn psi_candidates<T: Real>(
    psi1: &CVector<T>,
    psi2: &CVector<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<Vec<PsiDecomposition<T>>> {
    check_kernel_vectors(psi1, psi2, cfg)?;
    let psi1 = linalg::normalized(psi1);
    let psi2 = linalg::normalized(psi2);
    // with e = (p*, q*): rows of C are p·Ψ1_0 + q·Ψ1_1 and −q·Ψ2_0 + p·Ψ2_1
    let a0 = [psi1[0], psi1[1]];
    let a1 = [psi1[2], psi1[3]];
    let b0 = [psi2[0], psi2[1]];
    let b1 = [psi2[2], psi2[3]];
    let c_pp = a0[0] * b1[1] - a0[1] * b1[0];
    let c_qq = a1[1] * b0[0] - a1[0] * b0[1];
    let c_pq = a1[0] * b1[1] - a0[0] * b0[1] + a0[1] * b0[0] - a1[1] * b1[0];
    let mut roots = homogeneous_roots(c_pp, c_pq, c_qq);
    if roots.is_empty() {
        // det C vanishes identically: every e works
        let one = cr(T::one());
        let zero = cr(T::zero());
        roots = vec![(zero, one), (one, zero)];
    }
    Ok(roots
        .into_iter()
        .filter_map(|(p, q)| psi_candidate(&psi1, &psi2, CVector::from_column_slice(&[p.conj(), q.conj()])))
        .collect())
}

/// Writes the kernel vectors of `ρ` and `ρ^{T_A}` in the forms
/// `Ψ1 ∝ |e,f⟩ − |ê,g⟩`, `Ψ2 ∝ |e*,h⟩ − |ê*,f⟩` with a shared `f`.
///
/// `e` solves a quadratic; both roots are tried and the one with the
/// smallest residual is kept.
pub fn psi_construct<T: Real>(
    psi1: &CVector<T>,
    psi2: &CVector<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<PsiDecomposition<T>> {
    let Some(best) = psi_candidates(psi1, psi2, cfg)?
        .into_iter()
        .min_by(|a, b| a.residual.partial_cmp(&b.residual).unwrap_or(std::cmp::Ordering::Equal))
    else {
        return Err(Error::DegenerateQuadratic { residual: f64::INFINITY });
    };
    if best.residual > cfg.membership_tol {
        return Err(Error::DegenerateQuadratic { residual: to_f64(best.residual) });
    }
    let limit = T::one() - cfg.colinear_tol;
    if colinearity(&best.f, &best.g) > limit || colinearity(&best.f, &best.h) > limit {
        return Err(Error::InconsistentF { defect: to_f64(best.residual) });
    }
    Ok(best)
}

/// `max(‖⟨f|ρ|f⟩ − ⟨g|ρ|h⟩‖, ‖⟨f|ρ|f⟩ − ⟨h|ρ|g⟩‖)` relative to `‖⟨f|ρ|f⟩‖`.
pub fn core_identity_defect<T: Real>(rho: &DensityOperator<T>, pd: &PsiDecomposition<T>) -> T {
    let ff = sandwich_b(rho, &pd.f, &pd.f);
    let gh = sandwich_b(rho, &pd.g, &pd.h);
    let hg = sandwich_b(rho, &pd.h, &pd.g);
    let scale = max_abs_entry(&ff).max(lit(f64::MIN_POSITIVE));
    max_abs_entry(&(&ff - gh)).max(max_abs_entry(&(&ff - hg))) / scale
}

/// What the core case produced.
#[derive(Debug, Clone)]
pub enum CoreResolution<T: Real> {
    /// `|a,b⟩` subtracted; one kernel has grown to dimension two.
    Subtracted { reduced: DensityOperator<T>, weight: T, removed: ProductVector<T>, k_squared: T },
    /// Complete decomposition from the rotated PT-invariant operator.
    Rotated { decomposition: SeparableDecomposition<T>, pt_defect: T },
}

/// Resolves the core case from `h = α_c f + β g`: either `α_c = 0` and
/// `β = k² > 0`, so `|a,b⟩` with `a = e + kê`, `b ⊥ f − kg` lies in both
/// ranges, or `ρ` is PT-invariant after the A-side rotation that puts the
/// Bloch vectors of `⟨f|ρ|f⟩` and `⟨g|ρ|g⟩` in the x–z plane.
pub fn resolve_core<T: Real>(
    rho: &DensityOperator<T>,
    pd: &PsiDecomposition<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<CoreResolution<T>> {
    let basis = CMatrix::from_columns(&[pd.f.clone(), pd.g.clone()]);
    let coeffs = basis
        .lu()
        .solve(&pd.h)
        .ok_or_else(|| Error::NumericalFailure("f and g are linearly dependent".into()))?;
    let (alpha_c, beta) = (coeffs[0], coeffs[1]);
    let h_norm = vec_norm(&pd.h).max(lit(f64::MIN_POSITIVE));
    let alpha_small = modulus(alpha_c) * vec_norm(&pd.f) <= cfg.colinear_tol * h_norm;
    let beta_positive = beta.re > T::zero() && beta.im.abs() <= cfg.colinear_tol * modulus(beta);
    if alpha_small && beta_positive {
        let k = beta.re.sqrt();
        let a = &pd.e + hat(&pd.e) * cr(k);
        let b = hat(&(&pd.f - &pd.g * cr(k)));
        let pv = ProductVector { e: a, f: b };
        let sub = corollary1_subtract(rho, &pv, cfg)?;
        return Ok(CoreResolution::Subtracted {
            reduced: sub.reduced,
            weight: sub.weight,
            removed: sub.removed,
            k_squared: beta.re,
        });
    }
    let (_, n_f) = bloch_vector(&sandwich_b(rho, &pd.f, &pd.f));
    let (_, n_g) = bloch_vector(&sandwich_b(rho, &pd.g, &pd.g));
    let normal = cross(&n_f, &n_g);
    let scale = norm3(&n_f) * norm3(&n_g);
    let m = if norm3(&normal) > lit::<T>(1e-12) * scale && scale > T::zero() {
        normal
    } else if norm3(&n_f) > T::zero() {
        // parallel Bloch vectors: any normal to n_f will do; take the part of
        // ŷ orthogonal to it
        let nf = [n_f[0] / norm3(&n_f), n_f[1] / norm3(&n_f), n_f[2] / norm3(&n_f)];
        let y = [T::zero(), T::one(), T::zero()];
        let d = dot(&nf, &y);
        let r = [y[0] - d * nf[0], y[1] - d * nf[1], y[2] - d * nf[2]];
        if norm3(&r) > lit(1e-12) { r } else { [T::one(), T::zero(), T::zero()] }
    } else {
        [T::zero(), T::one(), T::zero()]
    };
    let len = norm3(&m);
    let mut m = [m[0] / len, m[1] / len, m[2] / len];
    if m[1] < T::zero() {
        m = [-m[0], -m[1], -m[2]];
    }
    let u = rotation_to_y(&m);
    let big = kron_a(&u, 2);
    let rotated = rho.with_matrix(linalg::symmetrize(&(&big * rho.matrix() * big.adjoint())));
    let defect = pt_defect(&rotated);
    if defect > cfg.recon_tol * rho.trace().abs().max(T::one()) {
        return Err(Error::NeitherCaseMatches {
            alpha: to_f64(modulus(alpha_c)),
            beta_re: to_f64(beta.re),
            beta_im: to_f64(beta.im),
            pt_defect: to_f64(defect),
        });
    }
    let (dec, _) = decompose_pt_invariant(&rotated, cfg)?;
    let u_inv = u.adjoint();
    Ok(CoreResolution::Rotated { decomposition: dec.map_a(|e| &u_inv * e), pt_defect: defect })
}

/// Projects onto operators with `ρ ≥ 0` and `ρ^{T_A} ≥ 0` by alternating
/// clamps; only tolerance-level negative eigenvalues are touched.
fn clean_ppt<T: Real>(rho: &DensityOperator<T>, cfg: &ToleranceConfig<T>) -> Result<DensityOperator<T>> {
    let mut m = linalg::symmetrize(rho.matrix());
    for _ in 0..3 {
        m = clamp_psd(&m, cfg)?.0;
        let (pt, worst) = clamp_psd(&partial_transpose_matrix(&m, 2), cfg)?;
        m = partial_transpose_matrix(&pt, 2);
        if worst == T::zero() {
            break;
        }
    }
    Ok(rho.with_matrix(m))
}

/// Removes the kernel-induced term along `pv` and finishes on `2 × 1`.
fn finish_via_kernel<T: Real>(
    rho: &DensityOperator<T>,
    pv: &ProductVector<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<SeparableDecomposition<T>> {
    let red = lemma4_reduce(rho, pv, cfg)?;
    let mut dec = SeparableDecomposition::empty(2);
    if let Some((w, t)) = &red.term {
        dec.push(*w, t);
    }
    let reduced = rho.with_matrix(clamp_psd(red.reduced.matrix(), cfg)?.0);
    let (inner, lift) = compress_b(&reduced, &red.kernel_vector.f, cfg)?;
    let eig = linalg::eig_hermitian(inner.matrix())?;
    let cut = eig.cutoff(cfg);
    let mut base = SeparableDecomposition::empty(1);
    for j in 0..2 {
        let l = eig.eigenvalues[j];
        if l > cut && l > T::zero() {
            let e = eig.eigenvectors.column(j).into_owned();
            base.push(l, &ProductVector { e, f: CVector::from_element(1, cr(T::one())) });
        }
    }
    dec.extend(lift.lift_decomposition(&base));
    Ok(dec)
}

/// A product vector in the one-dimensional kernel, if its Schmidt ratio is
/// below `colinear_tol`; any product vector when the kernel is larger.
fn kernel_product<T: Real>(kernel: &Subspace<T>, cfg: &ToleranceConfig<T>) -> Result<Option<ProductVector<T>>> {
    match kernel.dim() {
        0 => Ok(None),
        1 => {
            let (ratio, pv) = schmidt(&kernel.basis().column(0).into_owned());
            Ok((ratio <= cfg.colinear_tol).then_some(pv))
        }
        _ => Ok(Some(find_product_in_subspace(kernel, cfg)?.pv)),
    }
}

const MAX_ROUNDS: usize = 8;

fn construct<T: Real>(
    rho: &DensityOperator<T>,
    cfg: &ToleranceConfig<T>,
) -> Result<(SeparableDecomposition<T>, Vec<PeresStep<T>>)> {
    let mut rho = clean_ppt(rho, cfg)?;
    let mut dec = SeparableDecomposition::empty(2);
    let mut trace = Vec::new();
    for _ in 0..MAX_ROUNDS {
        if max_abs_entry(rho.matrix()) <= lit::<T>(1e-300) {
            return Ok((dec, trace));
        }
        let rho_ta = rho.with_matrix(partial_transpose_matrix(rho.matrix(), 2));
        let (_, k1, r1) = rank_kernel_range(rho.matrix(), cfg)?;
        let (_, k2, r2) = rank_kernel_range(rho_ta.matrix(), cfg)?;
        if k1.dim() == 4 {
            return Ok((dec, trace));
        }
        if let Some(pv) = kernel_product(&k1, cfg)? {
            trace.push(PeresStep::KernelProduct { side: Side::Rho, kernel_dim: k1.dim() });
            dec.extend(finish_via_kernel(&rho, &pv, cfg)?);
            return Ok((dec, trace));
        }
        if let Some(pv) = kernel_product(&k2, cfg)? {
            trace.push(PeresStep::KernelProduct { side: Side::RhoTA, kernel_dim: k2.dim() });
            dec.extend(finish_via_kernel(&rho_ta, &pv, cfg)?.map_a(conj_a));
            return Ok((dec, trace));
        }
        let step = if k2.dim() == 0 {
            let found = find_product_in_subspace(&r1, cfg)?;
            trace.push(PeresStep::RangeSubtract { side: Side::Rho });
            corollary1_subtract(&rho, &found.pv, cfg)?
        } else if k1.dim() == 0 {
            let found = find_product_in_subspace(&r2, cfg)?;
            trace.push(PeresStep::RangeSubtract { side: Side::RhoTA });
            corollary1_subtract(&rho, &found.pv.conj_a(), cfg)?
        } else {
            let psi1 = k1.basis().column(0).into_owned();
            let psi2 = k2.basis().column(0).into_owned();
            let pd = psi_construct(&psi1, &psi2, cfg)?;
            let identity_defect = core_identity_defect(&rho, &pd);
            match resolve_core(&rho, &pd, cfg)? {
                CoreResolution::Rotated { decomposition, pt_defect } => {
                    trace.push(PeresStep::CoreRotation { pt_defect, identity_defect });
                    dec.extend(decomposition);
                    return Ok((dec, trace));
                }
                CoreResolution::Subtracted { reduced, weight, removed, k_squared } => {
                    trace.push(PeresStep::CoreSubtract { k_squared, identity_defect });
                    crate::reduction::SubtractionResult {
                        reduced,
                        weight,
                        removed,
                        rank_dropped_on: crate::reduction::RankDrop::Both,
                    }
                }
            }
        };
        dec.push(step.weight, &step.removed);
        rho = clean_ppt(&step.reduced, cfg)?;
    }
    Err(Error::NumericalFailure(format!("two-qubit reduction did not finish in {MAX_ROUNDS} rounds")))
}

/// Decides separability of a two-qubit state and, when separable, returns a
/// decomposition.
pub fn decompose_2x2<T: Real>(rho: &DensityOperator<T>, cfg: &ToleranceConfig<T>) -> Result<TwoQubitVerdict<T>> {
    if rho.dim_b() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: rho.dim_b() });
    }
    let eig = linalg::eig_hermitian(rho.matrix())?;
    if eig.min() < cfg.psd_floor(eig.max()) {
        return Err(Error::NotPsd { min_eigenvalue: to_f64(eig.min()) });
    }
    let min_pt = linalg::min_eigenvalue(&partial_transpose_matrix(rho.matrix(), 2))?;
    let band = cfg.psd_tol;
    if min_pt < -band {
        return Ok(TwoQubitVerdict::Entangled { min_pt_eigenvalue: min_pt });
    }
    let attempt = construct(rho, cfg).and_then(|(dec, trace)| {
        let v = verify_decomposition(rho, &dec, cfg)?;
        if v.ok {
            Ok((dec, trace))
        } else {
            Err(Error::NumericalFailure(format!(
                "two-qubit decomposition does not reconstruct the input (relative error {:e})",
                to_f64(v.relative_error)
            )))
        }
    });
    match attempt {
        Ok((decomposition, trace)) => Ok(TwoQubitVerdict::Separable { decomposition, trace }),
        Err(_) if min_pt.abs() <= band => Ok(TwoQubitVerdict::Ambiguous { min_pt_eigenvalue: min_pt }),
        Err(e) => Err(e),
    }
}
