use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("segment of {len} integers exceeds the configured capacity of {capacity}")]
    Capacity { len: u64, capacity: u64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{n} lies outside the range [{lo}, {hi})")]
    OutOfRange { n: u64, lo: u64, hi: u64 },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("identity violated: residual {residual:e} exceeds tolerance {tolerance:e}")]
    Identity { residual: f64, tolerance: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

macro_rules! param_err {
    ($($arg:tt)*) => {
        $crate::error::Error::Parameter(alloc::format!($($arg)*))
    };
}
pub(crate) use param_err;
