//! Exact commutative algebra: Gaussian rationals, multivariate polynomials over
//! named formal generators, and Laurent polynomials in the distinguished variable ρ.
//!
//! Everything here is immutable once built and free of floating point.

mod gaussian;
mod generator;
mod poly;
mod symbol;

pub use gaussian::GaussianRational;
pub use generator::{Generator, Tag};
pub use num_rational::BigRational;
pub use poly::{Monomial, MultiPoly};
pub use symbol::{SymbolExpr, RHO};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("parse error: {0}")]
    Parse(String),
}
