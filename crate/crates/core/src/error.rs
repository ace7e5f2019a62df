use thiserror::Error;

/// Errors produced by the library. Verification failures are reported through
/// report structs, not through this type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid function spec: {0}")]
    InvalidSpec(String),

    #[error("unknown builtin function `{0}`")]
    UnknownBuiltin(String),

    #[error("sample count {values} does not match grid length {grid}")]
    LengthMismatch { grid: usize, values: usize },

    #[error("evaluation point {0} is negative or not finite")]
    BadAbscissa(f64),

    #[error("function violates the linear-growth condition: {0}")]
    GrowthViolation(String),

    #[error("G transform is unbounded below at x = {x}")]
    UnboundedBelow { x: f64 },

    #[error("non-finite intermediate value: {0}")]
    NonFinite(String),

    #[error("hull class mismatch: expected {expected}, input is {actual}")]
    WrongClass {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("tail slope of this function was estimated from samples; pass the override to verify it anyway")]
    EstimatedTail,

    #[error("no hyperbolic arc connects ({x1}, {y1}) and ({x2}, {y2})")]
    NoValidArc { x1: f64, y1: f64, x2: f64, y2: f64 },

    #[error("invalid cone program: {0}")]
    InvalidCone(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
