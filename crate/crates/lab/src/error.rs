use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// Bad configuration or arguments.
    #[error("usage: {0}")]
    Usage(String),
    /// A computed identity or oracle comparison failed.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Core(#[from] shortint_core::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

pub type LabResult<T> = Result<T, LabError>;

impl LabError {
    /// 2 for usage errors, 3 for verification failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use shortint_core::Error as E;
        match self {
            LabError::Usage(_) => 2,
            LabError::Verification(_) => 3,
            LabError::Core(e) => match e {
                E::Parameter(_) | E::Precondition(_) | E::Parse { .. } | E::Domain(_) | E::OutOfRange { .. } => 2,
                E::Identity { .. } | E::Invariant(_) => 3,
                _ => 1,
            },
            _ => 1,
        }
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> LabError {
    LabError::Usage(msg.into())
}
