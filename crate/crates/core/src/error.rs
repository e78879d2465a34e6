use thiserror::Error;

/// Errors raised across the library. Check findings (violations) are data,
/// not errors, and live in the report types instead.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("closing residual {residual:e} at vertex {vertex} exceeds tolerance")]
    NonClosing { vertex: usize, residual: f64 },
    #[error("layout mismatch at vertex {vertex}: {distance:e}")]
    Layout { vertex: usize, distance: f64 },
    #[error("degenerate projection: {0}")]
    Degenerate(String),
    #[error("lift error: {0}")]
    Lift(String),
    #[error("flip error: {0}")]
    Flip(String),
    #[error("strip error: {0}")]
    Strip(String),
    #[error("strip angle condition violated: {0}")]
    Condition(String),
    #[error("singular face: {0}")]
    SingularFace(String),
    #[error("extension error at facet {facet}: {reason}")]
    Extension { facet: String, reason: String },
    #[error("reachability error: {unfilled} brick vertices could not be filled")]
    Reachability { unfilled: usize },
    #[error("recursion error: {0}")]
    Recursion(String),
    #[error("inconsistent pattern: {0}")]
    Inconsistent(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("window too small: need radius {required}, have {available}")]
    WindowTooSmall { required: f64, available: f64 },
    #[error("parse error at line {line}, column {column} (byte {offset}): {message}")]
    Parse { line: usize, column: usize, offset: usize, message: String },
    #[error("unsupported schema version {0}")]
    Version(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit code: 2 for bad input, 3 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonClosing { .. }
            | Error::Layout { .. }
            | Error::SingularFace(_)
            | Error::Extension { .. }
            | Error::Reachability { .. }
            | Error::Recursion(_)
            | Error::Inconsistent(_)
            | Error::Numeric(_) => 3,
            _ => 2,
        }
    }
}
