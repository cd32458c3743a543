use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{0}` must be strictly positive")]
    NonPositiveParameter(&'static str),

    #[error("parameter `{0}` must be finite")]
    NonFiniteParameter(&'static str),

    #[error("matrix entries must be finite")]
    NonFiniteEntry,

    #[error("matrix data has {len} entries, expected {rows}x{cols}")]
    BadMatrixData { rows: usize, cols: usize, len: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not nilpotent; use the rk4 integrator")]
    NotNilpotent,

    #[error("derivative became non-finite at t = {t}")]
    NonFiniteDerivative { t: f64 },

    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("simulation would take {steps} steps (limit {limit})")]
    StepCountExceeded { steps: f64, limit: f64 },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("requested pole {re}{im:+}i is not strictly in the left half-plane")]
    UnstablePoleRequested { re: f64, im: f64 },

    #[error("chain of order {expected} needs {expected} poles, got {got}")]
    PoleCountMismatch { expected: usize, got: usize },

    #[error("complex poles must come in conjugate pairs")]
    UnpairedComplexPole,

    #[error("chain input gain must be nonzero")]
    ZeroInputGain,

    #[error("unsupported chain order {0} (expected 2 or 4)")]
    UnsupportedChainOrder(usize),

    #[error("closed loop failed the internal Hurwitz check")]
    InternalStabilityCheckFailed,
}

pub type Result<T> = std::result::Result<T, Error>;
