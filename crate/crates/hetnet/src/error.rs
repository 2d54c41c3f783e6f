use thiserror::Error;

/// Errors surfaced by the analysis, simulation, and CLI layers.
#[derive(Error, Debug)]
pub enum Error {
    /// A parameter violated its documented constraint. `key` names the
    /// offending field, `constraint` states the rule it broke.
    #[error("invalid parameter `{key}`: requires {constraint}")]
    InvalidParameter { key: String, constraint: String },

    /// An operation was called outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature exhausted its subdivision budget. The best
    /// estimate and its error bound are carried along.
    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound}")]
    Accuracy { estimate: f64, error_bound: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(key: &str, constraint: &str) -> Self {
        Error::InvalidParameter {
            key: key.to_string(),
            constraint: constraint.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
