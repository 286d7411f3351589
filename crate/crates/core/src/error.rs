use thiserror::Error;

/// Errors surfaced by the library's fallible operations.
///
/// Numeric diagnostics are stored as `f64` regardless of the working scalar
/// type so the error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid qubit index {index} for a {n_qubits}-qubit register")]
    InvalidQubitIndex { index: usize, n_qubits: usize },

    #[error("register of {requested} qubits exceeds the {max}-qubit cap")]
    QubitCapExceeded { requested: usize, max: usize },

    #[error("matrix is not Hermitian (max asymmetry {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("matrix is not unitary (max |U†U - I| entry {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("operator is not a valid POVM effect: {0}")]
    InvalidEffect(String),

    #[error("POVM elements do not sum to identity (max deviation {deviation:e})")]
    IncompletePovm { deviation: f64 },

    #[error("state trace {trace} is outside (0, 1]")]
    InvalidTrace { trace: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("purification is degenerate: effective bias equals 1/2, no outcome contrast")]
    DegenerateBias,

    #[error("measurement effects carry no outcome contrast (equal diagonal weights)")]
    NoMeasurementContrast,

    #[error("eigenvalue iteration failed to converge")]
    EigenNoConvergence,

    #[error("outcome distribution inconsistent with the three-parameter model (residual {residual:e} above 1e-4)")]
    InconsistentDistribution { residual: f64 },

    #[error("iteration failed to reach the target after {limit} rounds")]
    IterationLimit { limit: usize },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
