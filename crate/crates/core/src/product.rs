//! Product vectors inside subspaces of `C^2 ⊗ C^N`.
//!
//! With `{Ψ_i}` an orthonormal basis of `H^⊥` written as
//! `Ψ_i = Σ_k A*_{ik}|0,k⟩ + B*_{ik}|1,k⟩`, a product vector
//! `(e_0|0⟩ + e_1|1⟩) ⊗ f` lies in `H` iff `(e_0 A + e_1 B) f = 0`. For
//! `dim H = N` the pencil is square and has `N` roots counted projectively;
//! for `dim H > N` it is wide and has a null vector for every `e`.

use nalgebra::Schur;

use crate::bipartite::{basis_vector, kron_vec, ProductVector};
use crate::error::{Error, Result};
use crate::linalg::{self, modulus, smallest_right_singular, vec_norm, Subspace, ToleranceConfig};
use crate::{cr, lit, to_f64, CMatrix, CVector, Real, C};

/// The matrices `A`, `B` of the pencil `αA + B`, one row per vector of an
/// orthonormal basis of `H^⊥`.
#[derive(Debug, Clone)]
pub struct PencilSystem<T: Real> {
    pub a: CMatrix<T>,
    pub b: CMatrix<T>,
}

impl<T: Real> PencilSystem<T> {
    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn dim_b(&self) -> usize {
        self.a.ncols()
    }

    /// `e_0 A + e_1 B`.
    pub fn at(&self, e: &CVector<T>) -> CMatrix<T> {
        &self.a * e[0] + &self.b * e[1]
    }

    /// `‖(e_0 A + e_1 B) f‖` for unit `e`, `f`.
    pub fn residual(&self, e: &CVector<T>, f: &CVector<T>) -> T {
        let e = linalg::normalized(e);
        let f = linalg::normalized(f);
        vec_norm(&(self.at(&e) * f))
    }

    /// `AA† + BB†`, the identity when the rows come from an orthonormal set.
    pub fn gram(&self) -> CMatrix<T> {
        &self.a * self.a.adjoint() + &self.b * self.b.adjoint()
    }
}

/// A product vector found in a subspace, with its diagnostics.
#[derive(Debug, Clone)]
pub struct ProductMatch<T: Real> {
    /// Unit, phase-fixed factors.
    pub pv: ProductVector<T>,
    /// `e ∝ α|0⟩ + |1⟩`; `None` for the root at infinity (`e = |0⟩`).
    pub alpha: Option<C<T>>,
    /// `‖(1 − P_H)|e,f⟩‖`.
    pub membership_residual: T,
    /// `‖(e_0 A + e_1 B) f‖`.
    pub pencil_residual: T,
}

fn dim_b_of<T: Real>(h: &Subspace<T>) -> Result<usize> {
    let n2 = h.ambient_dim();
    if n2 == 0 || !n2.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("ambient dimension {n2} is not 2N")));
    }
    Ok(n2 / 2)
}

/// Pencil built from an orthonormal basis of the complement of `h`.
pub fn build_pencil<T: Real>(h: &Subspace<T>) -> Result<PencilSystem<T>> {
    let n = dim_b_of(h)?;
    if h.dim() < n {
        return Err(Error::SubspaceTooSmall { dim: h.dim(), required: n });
    }
    let comp = h.complement();
    let psi = comp.basis();
    let rows = psi.ncols();
    let a = CMatrix::from_fn(rows, n, |i, k| psi[(k, i)].conj());
    let b = CMatrix::from_fn(rows, n, |i, k| psi[(n + k, i)].conj());
    Ok(PencilSystem { a, b })
}

fn alpha_of<T: Real>(e: &CVector<T>) -> Option<C<T>> {
    if modulus(e[1]) <= lit::<T>(1e-14) * modulus(e[0]) {
        None
    } else {
        Some(e[0] / e[1])
    }
}

fn make_match<T: Real>(h: &Subspace<T>, pencil: &PencilSystem<T>, e: &CVector<T>, f: &CVector<T>) -> ProductMatch<T> {
    let pv = ProductVector { e: e.clone(), f: f.clone() }.normalized();
    let membership_residual = h.residual(&kron_vec(&pv.e, &pv.f));
    let pencil_residual = pencil.residual(&pv.e, &pv.f);
    ProductMatch { alpha: alpha_of(&pv.e), pv, membership_residual, pencil_residual }
}

/// Basis changes `G = [c | d]` tried for the square pencil. With
/// `e = β·c + d` the pencil becomes `β A' + B'` where `A' = c_0 A + c_1 B`;
/// a `G` with well-conditioned `A'` keeps every root finite, including the
/// `α → ∞` solutions of `αA + B`.
fn mixings<T: Real>() -> Vec<(CVector<T>, CVector<T>)> {
    let mut out = vec![(basis_vector(2, 0), basis_vector(2, 1))];
    for &(theta, phi) in &[(0.7f64, 0.3f64), (1.3, 1.9), (2.1, 0.8), (0.4, 2.7)] {
        let (s, c) = theta.sin_cos();
        let ph = C::new(lit::<T>(phi.cos()), lit::<T>(phi.sin()));
        let cvec = CVector::from_column_slice(&[cr(lit(c)), ph * cr(lit::<T>(s))]);
        let dvec = CVector::from_column_slice(&[-(ph.conj()) * cr(lit::<T>(s)), cr(lit(c))]);
        out.push((cvec, dvec));
    }
    out
}

fn smallest_singular_value<T: Real>(m: &CMatrix<T>) -> T {
    smallest_right_singular(m).0
}

/// Newton refinement of a root `(β, f)` of `(β A' + B') f = 0` with the
/// normalization `c†f = 1`.
fn refine_root<T: Real>(ap: &CMatrix<T>, bp: &CMatrix<T>, beta: C<T>, f: &CVector<T>) -> (C<T>, CVector<T>) {
    let n = ap.ncols();
    let anchor = linalg::normalized(f);
    let mut f = anchor.clone();
    let mut beta = beta;
    let mut best = (beta, anchor.clone(), vec_norm(&((ap * beta + bp) * &anchor)));
    for _ in 0..6 {
        let m = ap * beta + bp;
        let mut rhs = CVector::zeros(n + 1);
        let r = &m * &f;
        rhs.rows_mut(0, n).copy_from(&(-&r));
        rhs[n] = -(linalg::inner(&anchor, &f) - cr(T::one()));
        let mut jac = CMatrix::zeros(n + 1, n + 1);
        jac.view_mut((0, 0), (n, n)).copy_from(&m);
        jac.view_mut((0, n), (n, 1)).copy_from(&(ap * &f));
        for k in 0..n {
            jac[(n, k)] = anchor[k].conj();
        }
        let Some(step) = jac.lu().solve(&rhs) else { break };
        if !step.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            break;
        }
        f += step.rows(0, n);
        beta += step[n];
        let f_cur = linalg::normalized(&f);
        let res = vec_norm(&((ap * beta + bp) * &f_cur));
        if res < best.2 {
            best = (beta, f_cur.clone(), res);
        }
        if vec_norm(&step) <= lit::<T>(1e-15) * (T::one() + modulus(beta)) {
            break;
        }
    }
    (best.0, best.1)
}

/// All roots of the square pencil as unit A-side vectors with their null
/// vectors, refined by Newton iteration. Empty when the pencil is not square.
pub fn pencil_roots<T: Real>(pencil: &PencilSystem<T>) -> Vec<(CVector<T>, CVector<T>)> {
    let n = pencil.dim_b();
    if pencil.rows() != n || n == 0 {
        return Vec::new();
    }
    let mut best: Option<(T, CVector<T>, CVector<T>)> = None;
    let scale = T::one();
    for (c, d) in mixings::<T>() {
        let ap = pencil.at(&c);
        let s = smallest_singular_value(&ap);
        if best.as_ref().is_none_or(|b| s > b.0) {
            best = Some((s, c, d));
        }
        if s >= lit::<T>(1e-3) * scale {
            break;
        }
    }
    let (smin, c, d) = best.expect("at least one mixing");
    if smin <= lit::<T>(1e-13) {
        return Vec::new();
    }
    let ap = pencil.at(&c);
    let bp = pencil.at(&d);
    let Some(inv) = ap.clone().try_inverse() else { return Vec::new() };
    let companion = -(inv * &bp);
    let (_, tri) = Schur::new(companion).unpack();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let beta0 = tri[(j, j)];
        let (_, f0) = smallest_right_singular(&(&ap * beta0 + &bp));
        let (beta, f) = refine_root(&ap, &bp, beta0, &f0);
        let e = linalg::normalized(&(&c * beta + &d));
        out.push((e, f));
    }
    out
}

/// Some product vector in `h`, for `dim h ≥ N`.
///
/// Square case: every pencil root is refined and the one with the smallest
/// membership residual wins, ties going to the smallest `|α|`. Larger
/// subspaces are handled by [`find_real_e_product`].
pub fn find_product_in_subspace<T: Real>(h: &Subspace<T>, cfg: &ToleranceConfig<T>) -> Result<ProductMatch<T>> {
    let n = dim_b_of(h)?;
    if h.dim() < n {
        return Err(Error::SubspaceTooSmall { dim: h.dim(), required: n });
    }
    if h.dim() > n {
        return find_real_e_product(h, cfg);
    }
    let pencil = build_pencil(h)?;
    let mut candidates: Vec<ProductMatch<T>> =
        pencil_roots(&pencil).iter().map(|(e, f)| make_match(h, &pencil, e, f)).collect();
    if candidates.is_empty() {
        // singular pencil: det(e_0 A + e_1 B) vanishes identically, any e works
        for e in fallback_grid::<T>() {
            let (_, f) = smallest_right_singular(&pencil.at(&e));
            candidates.push(make_match(h, &pencil, &e, &f));
        }
    }
    select_best(candidates, cfg)
}

fn fallback_grid<T: Real>() -> Vec<CVector<T>> {
    let s = lit::<T>(0.5).sqrt();
    vec![
        basis_vector(2, 1),
        basis_vector(2, 0),
        CVector::from_column_slice(&[cr(s), cr(s)]),
        CVector::from_column_slice(&[cr(s), cr(-s)]),
        CVector::from_column_slice(&[C::new(T::zero(), s), cr(s)]),
    ]
}

fn alpha_size<T: Real>(m: &ProductMatch<T>) -> T {
    m.alpha.map(modulus).unwrap_or(T::max_value().unwrap())
}

fn select_best<T: Real>(candidates: Vec<ProductMatch<T>>, cfg: &ToleranceConfig<T>) -> Result<ProductMatch<T>> {
    let tie = lit::<T>(1e-14);
    let best = candidates.into_iter().fold(None::<ProductMatch<T>>, |acc, m| match acc {
        None => Some(m),
        Some(b) => {
            let better = m.membership_residual + tie < b.membership_residual
                || ((m.membership_residual - b.membership_residual).abs() <= tie && alpha_size(&m) < alpha_size(&b));
            Some(if better { m } else { b })
        }
    });
    match best {
        Some(m) if m.membership_residual <= cfg.membership_tol => Ok(m),
        Some(m) => Err(Error::NumericalFailure(format!(
            "no product vector found: best membership residual {:e}",
            to_f64(m.membership_residual)
        ))),
        None => Err(Error::NumericalFailure("pencil produced no candidates".into())),
    }
}

/// Real grid `0, 1, −1, 2, −2, …` for the A-side parameter.
fn real_alpha_grid<T: Real>() -> impl Iterator<Item = T> {
    std::iter::once(T::zero()).chain((1..=8).flat_map(|k| {
        let x = T::from_usize(k).unwrap();
        [x, -x]
    }))
}

/// A product vector `|e_r, f⟩` in `h` with real `e_r`, for `dim h > N`.
pub fn find_real_e_product<T: Real>(h: &Subspace<T>, cfg: &ToleranceConfig<T>) -> Result<ProductMatch<T>> {
    let n = dim_b_of(h)?;
    if h.dim() <= n {
        return Err(Error::SubspaceTooSmall { dim: h.dim(), required: n + 1 });
    }
    let pencil = build_pencil(h)?;
    let mut tried = Vec::new();
    for alpha in real_alpha_grid::<T>() {
        let e = CVector::from_column_slice(&[cr(alpha), cr(T::one())]);
        let (sigma, f) = smallest_right_singular(&pencil.at(&e));
        let m = make_match(h, &pencil, &e, &f);
        if sigma <= cfg.rank_tol && m.membership_residual <= cfg.membership_tol {
            return Ok(m);
        }
        tried.push(m);
    }
    select_best(tried, cfg)
}
