use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is not invertible over k[z, 1/z]: determinant {determinant} is not a unit")]
    NotInvertible { determinant: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("rank {rank} and degree {degree} are not coprime; no simple sheaf exists")]
    NotCoprime { rank: i64, degree: i64 },
    #[error("pushforward is decomposable: {}", summands.join(" + "))]
    Decomposable { summands: Vec<String> },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Error {
        Error::InvalidArgument(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Error {
        Error::Validation(msg.into())
    }

    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::NotInvertible { .. } => "not-invertible",
            Error::Validation(_) => "validation",
            Error::Unsupported(_) => "unsupported",
            Error::NotCoprime { .. } => "not-coprime",
            Error::Decomposable { .. } => "decomposable-pushforward",
        }
    }

    pub fn context(&self) -> Value {
        match self {
            Error::NotInvertible { determinant } => json!({ "determinant": determinant }),
            Error::NotCoprime { rank, degree } => json!({ "rank": rank, "degree": degree }),
            Error::Decomposable { summands } => json!({ "summands": summands }),
            _ => json!({}),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "code": self.code(), "message": self.to_string(), "context": self.context() })
    }
}
