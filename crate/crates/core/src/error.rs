use thiserror::Error;

/// Errors shared by every module in the crate.
///
/// `name()` returns the stable short name that the command line layer
/// prints on its diagnostic stream; tests match on those names, so they
/// are part of the public contract.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("matrix is not Hermitian: asymmetry {asym:.3e} exceeds {tol:.3e}")]
    NotHermitian { asym: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    NotPositive { min_eig: f64 },

    #[error("matrix is singular where an inverse is required: {what}")]
    Singular { what: String },

    #[error("matrices do not commute: residual {residual:.3e}")]
    NotCommuting { residual: f64 },

    #[error("matrix is not idempotent: residual {residual:.3e}")]
    NotIdempotent { residual: f64 },

    #[error("matrix is not a symmetry: residual {residual:.3e}")]
    NotSymmetry { residual: f64 },

    #[error("columns are not orthonormal: residual {residual:.3e}")]
    NotOrthonormal { residual: f64 },

    #[error("symmetry pair violates the intertwining relation: residual {residual:.3e}")]
    InvalidPair { residual: f64 },

    #[error("E is not a J-projection for this J: residual {residual:.3e}")]
    NotJProjection { residual: f64 },

    #[error("no J-projection onto this subspace exists: compression of J is singular")]
    NoJProjection,

    #[error("rank detection is unstable: no spectral gap at the cut ({detail})")]
    RankInstability { detail: String },

    #[error("precondition violated: {what}")]
    Precondition { what: String },

    #[error("generator configuration invalid: {what}")]
    InvalidConfig { what: String },

    #[error("eigenvalue kernel failed to converge")]
    KernelFailure,
}

impl Error {
    /// Stable short name, used as the machine-readable error tag.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonFinite { .. } => "NonFinite",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotPositive { .. } => "NotPositive",
            Error::Singular { .. } => "Singular",
            Error::NotCommuting { .. } => "NotCommuting",
            Error::NotIdempotent { .. } => "NotIdempotent",
            Error::NotSymmetry { .. } => "NotSymmetry",
            Error::NotOrthonormal { .. } => "NotOrthonormal",
            Error::InvalidPair { .. } => "InvalidPair",
            Error::NotJProjection { .. } => "NotJProjection",
            Error::NoJProjection => "NoJProjection",
            Error::RankInstability { .. } => "RankInstability",
            Error::Precondition { .. } => "Precondition",
            Error::InvalidConfig { .. } => "InvalidConfig",
            Error::KernelFailure => "KernelFailure",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
