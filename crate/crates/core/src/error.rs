use thiserror::Error;

/// Errors produced by the state-set classification and disentanglement
/// machinery.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("matrix entries must be finite (found NaN or infinity)")]
    NonFinite,

    #[error("matrix is not Hermitian (asymmetry {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("not a valid density matrix: {reason}")]
    NotDensityMatrix { reason: String },

    #[error("matrices #{first} and #{second} do not commute (commutator norm {residual:.3e})")]
    NonCommuting {
        first: usize,
        second: usize,
        residual: f64,
    },

    #[error(
        "simultaneous diagonalization failed after {attempts} attempts \
         (best attempt left a normalized off-diagonal residual of {residual:.3e})"
    )]
    DiagonalizationFailed { attempts: usize, residual: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("state vector norm {norm} deviates from 1 by 50% or more; refusing to renormalize")]
    BadNorm { norm: f64 },

    #[error("unsupported dimensions {da}x{db}: {context}")]
    UnsupportedDims {
        da: usize,
        db: usize,
        context: String,
    },

    #[error("tolerance values must be non-negative and finite")]
    BadTolerance,

    #[error("state set must contain at least one member")]
    EmptySet,

    #[error("duplicate state label: {0:?}")]
    DuplicateLabel(String),

    #[error("unknown state label: {0:?}")]
    UnknownLabel(String),

    #[error("no set member matches the input state (closest distance {best:.3e})")]
    NoMatch { best: f64 },

    #[error("input matches members #{first} and #{second} within tolerance; identification is ambiguous")]
    AmbiguousMatch { first: usize, second: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;
