use thiserror::Error;

/// Failure modes shared by every engine and estimator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Parameters or seed configurations that can never describe a valid run.
    #[error("configuration error: {0}")]
    Config(String),
    /// A point or target lies outside the domain it is used with.
    #[error("domain error: {0}")]
    Domain(String),
    /// Caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! config_err {
    ($($arg:tt)*) => { $crate::error::Error::Config(format!($($arg)*)) };
}
macro_rules! domain_err {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}
macro_rules! contract_err {
    ($($arg:tt)*) => { $crate::error::Error::Contract(format!($($arg)*)) };
}

pub(crate) use config_err;
pub(crate) use contract_err;
pub(crate) use domain_err;
