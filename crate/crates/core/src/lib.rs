//! Ladder functions on the critical line of the Riemann zeta
//! function: evaluation of Z(t), the ladder φ₁ and its iterates, the
//! disconnected sets they generate, and checks of the product-integral
//! relations between them.

pub mod critical_line;
pub mod error;
pub mod exec;
pub mod formulas;
pub mod interp;
pub mod ladder;
pub mod primes;
pub mod quadrature;
pub mod report;

pub use error::{Error, Result};
