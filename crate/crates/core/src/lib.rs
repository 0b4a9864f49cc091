//! Constructive separability for density operators on `C^2 ⊗ C^N`.
//!
//! The crate decides and certifies separability of two-by-N bipartite
//! states. Every positive answer comes with an explicit certificate: a list
//! of weighted product vectors that sums back to the input operator.
//!
//! - [`decompose`]: operators invariant under partial transposition of the
//!   qubit factor, rank-deficient PPT operators, and the twisted
//!   (symmetric-unitary) invariance.
//! - [`certificate`]: a norm test that certifies states close to their
//!   partial transpose and builds the decomposition when it passes.
//! - [`peres`]: the complete two-qubit decision procedure; every PPT state is
//!   decomposed, every NPT state is reported as entangled.
//!
//! Basis convention: the tensor basis element `|a,k⟩` (`a ∈ {0,1}`,
//! `k ∈ 0..N`) is stored at row/column `a·N + k`.
//!
//! All numerical code is generic over the real scalar type ([`Real`]); the
//! `*64` aliases below fix it to `f64`, which is what the CLI and the
//! tolerance defaults are calibrated for.

#![forbid(unsafe_code)]

pub mod bipartite;
pub mod certificate;
pub mod decompose;
pub mod error;
pub mod linalg;
pub mod peres;
pub mod product;
pub mod reduction;
pub mod stategen;

use nalgebra::{DMatrix, DVector, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

pub use bipartite::{DensityOperator, ProductVector, SeparableDecomposition, Term};
pub use error::{Error, Result};
pub use linalg::{Subspace, ToleranceConfig};

/// Real scalar type the algorithms are generic over.
///
/// The associated constants are the tolerance defaults for the type; the
/// `f64` values are the calibrated ones, the `f32` values are loosened to
/// match single precision.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + std::fmt::Display {
    /// Largest tolerated `|H - H†|` entry, relative to `max(1, max|H|)`.
    const HERMITIAN_TOL: f64;
    const RANK_TOL: f64;
    const PSD_TOL: f64;
    const RECON_TOL: f64;
    const COLINEAR_TOL: f64;
    const MEMBERSHIP_TOL: f64;
}

impl Real for f64 {
    const HERMITIAN_TOL: f64 = 1e-12;
    const RANK_TOL: f64 = 1e-9;
    const PSD_TOL: f64 = 1e-9;
    const RECON_TOL: f64 = 1e-8;
    const COLINEAR_TOL: f64 = 1e-8;
    const MEMBERSHIP_TOL: f64 = 1e-8;
}

impl Real for f32 {
    const HERMITIAN_TOL: f64 = 1e-5;
    const RANK_TOL: f64 = 1e-4;
    const PSD_TOL: f64 = 1e-4;
    const RECON_TOL: f64 = 1e-3;
    const COLINEAR_TOL: f64 = 1e-3;
    const MEMBERSHIP_TOL: f64 = 1e-3;
}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;
/// Dense complex matrix.
pub type CMatrix<T> = DMatrix<Complex<T>>;
/// Dense complex column vector.
pub type CVector<T> = DVector<Complex<T>>;

pub type DensityOperator64 = DensityOperator<f64>;
pub type ProductVector64 = ProductVector<f64>;
pub type SeparableDecomposition64 = SeparableDecomposition<f64>;
pub type Subspace64 = Subspace<f64>;
pub type ToleranceConfig64 = ToleranceConfig<f64>;
pub type Matrix64 = CMatrix<f64>;
pub type Vector64 = CVector<f64>;

/// Converts an `f64` literal into `T`.
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub(crate) fn cr<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}
