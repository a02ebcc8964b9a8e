use thiserror::Error;

/// Errors raised by the modelling, proximal and solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("clipping threshold must be positive and finite, got {0}")]
    InvalidThreshold(f64),
    #[error("sample {index} is not finite")]
    NonFiniteSample { index: usize },
    #[error("sample {index} has magnitude {value} above the clipping threshold {theta}")]
    AboveThreshold { index: usize, value: f64, theta: f64 },
    #[error("word length must be at least 1 bit, got {0}")]
    InvalidWordLength(u32),
    #[error("index {index} out of range for a signal of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("model order {order} must be smaller than the frame length {len}")]
    OrderTooLarge { order: usize, len: usize },
    #[error("autocorrelation is degenerate (zero energy or singular recursion)")]
    DegenerateAutocorrelation,
    #[error("negative regularization weight {0}")]
    NegativeWeight(f64),
    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("consistency set is malformed: {0}")]
    MalformedSpec(&'static str),
    #[error("non-finite iterate in Douglas-Rachford at iteration {iteration}")]
    Diverged { iteration: usize },
    #[error("AR coefficients grew to {max_abs:e} at outer iteration {iteration}")]
    CoefficientBlowup { iteration: usize, max_abs: f64 },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("frame layout is invalid: {0}")]
    InvalidLayout(&'static str),
    #[error("position {0} is not covered by any synthesis window")]
    Uncovered(usize),
    #[error("input signal is empty")]
    EmptySignal,
    #[error("reference signal has zero energy")]
    ZeroReference,
}

pub type Result<T> = core::result::Result<T, Error>;
