use thiserror::Error;

/// Errors raised by the flux engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FluxError {
    #[error("qubit count mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    Unnormalized { norm_sqr: f64 },

    #[error("{what} exceeds the cap: {requested} > {cap}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series truncated at order {order} leaves a remainder bound of {bound:e} (need < {tolerance:e})")]
    TruncationInsufficient {
        order: usize,
        bound: f64,
        tolerance: f64,
    },

    #[error(
        "optimizer did not converge after {iterations} iterations (best objective {best_value})"
    )]
    NoConvergence {
        iterations: usize,
        best_value: f64,
        best_point: Vec<f64>,
    },

    #[error("integrator step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("flux amplitude magnitude {0} exceeds 1")]
    AmplitudeTooLarge(f64),
}

pub type Result<T> = std::result::Result<T, FluxError>;
