use thiserror::Error;

/// Errors raised by constructors and evaluators in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SplineError {
    #[error("gamma pole: argument {re}{im:+}i lies within 1e-12 of a nonpositive integer")]
    GammaPole { re: f64, im: f64 },

    #[error("principal power of a zero base is undefined")]
    ZeroBase,

    #[error("integer order must be at least {min}, got {got}")]
    InvalidIntegerOrder { got: usize, min: usize },

    #[error("complex order must satisfy Re z > 1, got {re}{im:+}i")]
    InvalidComplexOrder { re: f64, im: f64 },

    #[error("rate must be positive, got {0}")]
    NonPositiveRate(f64),

    #[error("rate tuple must be non-empty with at least one nonzero rate")]
    DegenerateRates,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid is not closed under the inverse partition maps: {0}")]
    GridNotClosed(String),

    #[error("scaling vector invalid: {0}")]
    InvalidScaling(String),

    #[error("partition invalid: {0}")]
    InvalidPartition(String),

    #[error("operation requires a {expected} partition")]
    WrongPartition { expected: &'static str },

    #[error("fixed-point iteration did not converge within {max_iter} iterations (last step {last_step:e})")]
    MaxIterExceeded { max_iter: usize, last_step: f64 },

    #[error("quadrature did not converge on [{a}, {b}] at depth {depth}")]
    QuadratureNonConvergence { a: f64, b: f64, depth: usize },

    #[error("decay fit needs at least 3 usable points, got {0}")]
    TooFewDecayPoints(usize),

    #[error("singular collocation system")]
    SingularSystem,

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, SplineError>;
