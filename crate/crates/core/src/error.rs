use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain of the requested operation.
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    /// A generalized Pochhammer symbol in a series denominator vanishes.
    #[error("generalized Pochhammer symbol ({mu})_{partition} vanishes (alpha = {alpha})")]
    PochhammerZero {
        mu: String,
        partition: String,
        alpha: f64,
    },

    /// A parameter sits on a pole of a gamma-function product.
    #[error("parameter {param} = {location} is a pole (j = {j}, m = {m})")]
    Pole {
        param: &'static str,
        location: f64,
        j: usize,
        m: u64,
    },

    /// An evaluation point lies outside the admissible region.
    #[error("evaluation point outside the domain: {0}")]
    Domain(String),

    #[error("integrand is not finite at {0}")]
    NonFiniteIntegrand(String),

    #[error("ill-conditioned computation: {0}")]
    IllConditioned(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain_check(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::ParameterDomain(msg()))
    }
}
