pub mod cayley_menger;
pub mod cost;
pub mod error;
pub mod expectation;
pub mod poly;
pub mod quadrature;
pub mod sampling;
pub mod scalar;
pub mod simplex;
pub mod transport;

#[cfg(test)]
mod test_support;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
