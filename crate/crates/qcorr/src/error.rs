use thiserror::Error;

/// Crate-wide error type; every variant names the violated contract.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |m[r,c] - conj(m[c,r])| = {deviation:.3e})")]
    NonHermitian { deviation: f64 },

    #[error("trace deviates from 1 (got {trace:.12e})")]
    TraceDeviation { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("vector is not normalized (norm = {norm:.12e})")]
    NotNormalized { norm: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry (NaN or infinity) in input")]
    NonFinite,

    #[error("invalid entropy index q = {q}; q must be positive")]
    InvalidQ { q: f64 },

    #[error("unrecognized entropy tag {tag:?}; expected vn | linear | tsallis:<q> | renyi:<q>")]
    InvalidTag { tag: String },

    #[error("entropy functional {tag} has no trace form f; operation requires one")]
    NotTraceForm { tag: String },

    #[error("projector set does not resolve the identity (max deviation {deviation:.3e})")]
    IncompleteProjectors { deviation: f64 },

    #[error("projectors are not mutually orthogonal idempotents (max deviation {deviation:.3e})")]
    NonOrthogonalProjectors { deviation: f64 },

    #[error("basis vectors are not orthonormal (max deviation {deviation:.3e})")]
    NonOrthonormalBasis { deviation: f64 },

    #[error("Kraus set is not trace-preserving (max deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("functional {tag} is not convex enough for the two-qubit formation formula; valid index interval is ({lo:.4}, {hi:.4})")]
    NonConvexFunctional { tag: String, lo: f64, hi: f64 },

    #[error("eigensolver failed to converge on a {n}x{n} matrix")]
    EigenFailed { n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("state file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl Error {
    /// CLI exit code: 1 for failed checks/assertions, 2 for bad input.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::CheckFailed(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
