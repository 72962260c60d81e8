use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("path has {actual} observations after y_0, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("could not start worker pool: {0}")]
    WorkerPool(String),

    #[error("signal is not stable: sup |S| = {sup} exceeds 1 - eps = {limit}")]
    Unstable { sup: f64, limit: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}

/// Fails with [`Error::InvalidParameter`] unless `ok` holds.
pub(crate) fn ensure(ok: bool, name: &'static str, value: f64, reason: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(name, value, reason))
    }
}
