use thiserror::Error;

/// Errors raised by the model, the solvers and the estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model parameter violates its constraint, e.g. `mu > 0`.
    #[error("invalid parameter: {name} must satisfy {constraint} (got {value})")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
        value: f64,
    },

    /// Argument outside the region where a cumulant or price is finite.
    #[error("{what} diverges at {arg}: domain is {arg_name} < {bound}")]
    Domain {
        what: &'static str,
        arg_name: &'static str,
        arg: f64,
        bound: f64,
    },

    /// An exponent in a Monte Carlo utility estimate exceeded the safe range.
    #[error("exponent overflow in {estimator}: {exponent:.3e} exceeds {cap:.1}")]
    Overflow {
        estimator: &'static str,
        exponent: f64,
        cap: f64,
    },

    #[error("root bracket [{lo}, {hi}] does not contain a sign change")]
    NoBracket { lo: f64, hi: f64 },

    #[error("invalid grid: {0}")]
    Grid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            constraint: "> 0",
            value,
        })
    }
}

pub(crate) fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            constraint: ">= 0",
            value,
        })
    }
}
