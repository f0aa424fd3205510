use thiserror::Error;

/// Errors raised by grid construction, transforms and verifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("support violation: {0}")]
    Support(String),

    #[error("aliasing detected: {0}")]
    Aliasing(String),

    #[error("normalization violated: {0}")]
    Normalization(String),

    #[error("function is identically zero")]
    ZeroFunction,

    #[error("convention mismatch: {0}")]
    Convention(String),

    #[error("polynomial degree {degree} exceeds bound {max}")]
    DegreeOverflow { degree: u32, max: u32 },

    #[error("s = -1 is singular for this construction; the momentum-side dual is not implemented")]
    SingularOrdering,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the discretization itself (support, aliasing)
    /// rather than by the caller's configuration.
    pub fn is_numerical_guard(&self) -> bool {
        matches!(self, Error::Support(_) | Error::Aliasing(_) | Error::Normalization(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
