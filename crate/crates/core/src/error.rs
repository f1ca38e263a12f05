use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("negative eigenvalue {0:e} below clamping threshold")]
    NegativeEigenvalue(f64),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("channel is not trace preserving (completeness residual {0:e})")]
    NotTracePreserving(f64),

    #[error("correlated product needs equal operator counts ({0} vs {1})")]
    OperatorCountMismatch(usize, usize),

    #[error("convention {convention} is not defined for d = {dim}")]
    InvalidConvention { convention: String, dim: usize },

    #[error("no unit-fidelity correction for outcome ({i}, {m}) at d = {dim} (best fidelity {best})")]
    NoExactCorrection { dim: usize, i: usize, m: usize, best: f64 },

    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
