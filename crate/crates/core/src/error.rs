use thiserror::Error;

/// Errors reported by the library. Negative analytic verdicts (not
/// single-peaked, not a clone structure, ...) are values, not errors.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid order: {0}")]
    InvalidOrder(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid candidate set: {0}")]
    InvalidSet(String),

    #[error("candidate {id} out of range (m = {m})")]
    OutOfRange { id: usize, m: usize },

    #[error("set {0} is not a clone set of the profile")]
    NotClone(String),

    #[error("sets {0} and {1} overlap")]
    Overlapping(String, String),

    #[error("family is not a clone structure: {0}")]
    NotCloneStructure(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed tree: {0}")]
    MalformedTree(String),

    #[error("{0}")]
    Io(String),

    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
