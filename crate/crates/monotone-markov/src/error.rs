use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A distribution failed validation (unsorted weights, bad mass, NaN).
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A model or spec was constructed with unusable parameters.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Bad argument to an operation (empty grids, out-of-range levels).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A chain produced NaN or infinity. The step index is the first
    /// offender, counting the initial state as step 0.
    #[error("non-finite state at step {step}")]
    NonFiniteState { step: usize },

    /// A chain left its declared state space.
    #[error("state {value} outside [{lo}, {hi}] at step {step}")]
    StateOutOfRange {
        step: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// The requested coupling needs structure the kernel does not carry.
    #[error("kernel '{kernel}' does not support coupling mode {mode}")]
    UnsupportedCoupling { kernel: String, mode: &'static str },

    /// `state_at` was queried outside the simulated horizon.
    #[error("time {t} outside simulated horizon [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },

    /// Tail estimation was asked for with too little usable data.
    #[error("not enough tail data: {0}")]
    InsufficientTailData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
