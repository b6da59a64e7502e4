use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated one of its documented invariants.
    #[error("invalid parameter `{name}`: {constraint} (got {value})")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
        value: String,
    },

    /// Inputs were well-formed but carry no usable signal (zero variance, empty grid, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: {malformed} of {total} data lines malformed (limit 1%), first at lines {lines:?}")]
    TooManyMalformed {
        path: PathBuf,
        malformed: usize,
        total: usize,
        lines: Vec<u64>,
    },

    #[error("simulation aborted at step {step}: asset {asset} mid price {price} is not positive")]
    NonPositivePrice { step: u64, asset: usize, price: f64 },

    #[error("configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, constraint: &'static str, value: impl ToString) -> Self {
        Error::InvalidParameter {
            name,
            constraint,
            value: value.to_string(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Fails with [`Error::InvalidParameter`] unless `ok` holds.
pub(crate) fn ensure(ok: bool, name: &'static str, constraint: &'static str, value: f64) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::invalid(name, constraint, value))
    }
}
