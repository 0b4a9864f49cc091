use thiserror::Error;

/// Errors raised by the separability routines.
///
/// Numerical quantities are carried as `f64` regardless of the scalar type
/// the computation ran in.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |H - H†| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator trace must be positive (got {trace:e})")]
    NonPositiveTrace { trace: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operator does not annihilate C^2 ⊗ f (residual {residual:e})")]
    SupportNotReduced { residual: f64 },

    #[error("subspace dimension {dim} too small (need {required})")]
    SubspaceTooSmall { dim: usize, required: usize },

    #[error("vector is not in the range (residual {residual:e})")]
    NotInRange { residual: f64 },

    #[error("vector is not in the kernel (residual {residual:e})")]
    NotInKernel { residual: f64 },

    #[error("<v|ρ⁺|v> = {value:e} is effectively zero")]
    ZeroDenominator { value: f64 },

    #[error("ρ|ê,f⟩ has an |e⟩ component of size {residual:e}")]
    StructureViolation { residual: f64 },

    #[error("overlap <ê,f|ρ|ê,f> = {value:e} is not positive")]
    NonPositiveOverlap { value: f64 },

    #[error("operator is not invariant under partial transposition (defect {defect:e})")]
    NotPtInvariant { defect: f64 },

    #[error("no real A-side combination lies in the kernel (residual {residual:e})")]
    RealizationFailed { residual: f64 },

    #[error("matrix is not a symmetric unitary (defect {defect:e})")]
    NotSymmetricUnitary { defect: f64 },

    #[error("twisted partial-transpose invariance fails (defect {defect:e})")]
    TwistedInvarianceFailed { defect: f64 },

    #[error("operator has rank {rank} on C^2 ⊗ C^{dim_b}; rank ≤ {dim_b} is required")]
    RankTooLarge { rank: usize, dim_b: usize },

    #[error("kernel-vector construction failed on both quadratic roots (best residual {residual:e})")]
    DegenerateQuadratic { residual: f64 },

    #[error("the two extractions of f are not colinear (defect {defect:e})")]
    InconsistentF { defect: f64 },

    #[error(
        "core case unresolved: alpha={alpha:e}, beta=({beta_re:e},{beta_im:e}), rotated pt defect {pt_defect:e}"
    )]
    NeitherCaseMatches {
        alpha: f64,
        beta_re: f64,
        beta_im: f64,
        pt_defect: f64,
    },

    #[error("rejection sampling gave up after {attempts} attempts")]
    RejectionExhausted { attempts: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
