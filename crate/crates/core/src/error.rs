use thiserror::Error;

use crate::order::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("sets live in different ordered spaces")]
    SpaceMismatch,

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("non-finite successor at x={x:?}, input #{input}, d={d:?}")]
    Evaluation { x: Vec<f64>, input: usize, d: Vec<f64> },

    #[error("matrix {matrix} entry ({row},{col}) violates monotonicity (conjugated value {value})")]
    SignViolation {
        matrix: usize,
        row: usize,
        col: usize,
        value: f64,
    },

    #[error("discretization step {tau} breaks monotonicity in v (1 - 2*tau*f2*v_max/m = {slope})")]
    Discretization { tau: f64, slope: f64 },

    #[error("precondition failed: {message} (point {point:?})")]
    Precondition { message: String, point: Point },

    #[error("state {0:?} is outside the controller domain")]
    Domain(Point),

    #[error("no admissible input keeps {0:?} inside the invariant")]
    NoSafeInput(Point),

    #[error("controller failed at step {step}: {source}")]
    Simulation {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
