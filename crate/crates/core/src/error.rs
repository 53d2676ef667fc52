use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0} (supported: {1})")]
    UnsupportedDimension(usize, &'static str),

    #[error("quadrature order {order} too low, need at least {required}")]
    InsufficientOrder { order: usize, required: usize },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("zero window: the STFT window must not vanish identically")]
    ZeroWindow,

    #[error("phase-space grid too coarse: h_xi * y_max = {product:.4} exceeds pi")]
    GridTooCoarse { product: f64 },

    #[error("zero denominator norm")]
    ZeroNorm,

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("decay ratio underflowed before t = {0}; reduce the horizon")]
    Underflow(f64),

    #[error("exponents outside the well-posedness range: {0}")]
    Inadmissible(String),

    #[error("Picard iteration did not converge after {iterations} iterations (last difference {last_difference:.3e})")]
    NoConvergence { iterations: usize, last_difference: f64 },

    #[error("solution diverged at t = {time}: {reason}")]
    Diverged { time: f64, reason: String },

    #[error("malformed container: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
