use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {value} outside the domain of {what} (requires {requirement})")]
    Domain {
        what: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("no pair of consecutive zeros found in [{from}, {to}]")]
    SearchExhausted { from: f64, to: f64 },

    #[error("quadrature failed to converge on panel [{a}, {b}] (estimated error {est_error:e})")]
    Nonconvergence { a: f64, b: f64, est_error: f64 },

    #[error("{x} exceeds the prime table limit {limit}")]
    OutOfRange { x: f64, limit: u64 },

    #[error("ordinate {t} outside ladder range [{t_min}, {t_max}]")]
    LadderRange { t: f64, t_min: f64, t_max: f64 },

    #[error("iterate of depth {depth} escaped the ladder range (value {value})")]
    RangeEscape { depth: usize, value: f64 },

    #[error("Newton inversion failed at target {target}")]
    NewtonDivergence { target: f64 },

    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error("invalid partition {parts:?} of {total}")]
    InvalidPartition { parts: Vec<usize>, total: usize },

    #[error("root not bracketed: target {target:e} outside profile range [{min:e}, {max:e}]")]
    RootNotBracketed { target: f64, min: f64, max: f64 },

    #[error("division by a vanishing zeta value at tau = {tau}")]
    ZeroDivide { tau: f64 },

    #[error("cache i/o: {0}")]
    Cache(String),

    #[error("report format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
