use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A register, matrix or enumeration exceeds a configured size limit.
    #[error("capacity exceeded: {what} requires {requested}, limit is {limit}")]
    Capacity {
        what: String,
        requested: usize,
        limit: usize,
    },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A quantity that must hold by construction drifted beyond tolerance.
    #[error("numerical consistency violated: {0}")]
    Numerical(String),

    #[error("amplification undefined: {0}")]
    UndefinedAmplification(String),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn capacity(what: impl Into<String>, requested: usize, limit: usize) -> Self {
        Error::Capacity {
            what: what.into(),
            requested,
            limit,
        }
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
