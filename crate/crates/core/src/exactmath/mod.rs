//! Exact arithmetic: rationals, p-adic digits, finite fields, polynomials,
//! matrices and Jordan structure.

pub mod field;
pub mod jordan;
pub mod matrix;
pub mod padic;
pub mod poly;
pub mod rational;

pub use field::{Fe, FiniteField};
pub use jordan::{generalized_eigenspace, unipotent_block_sizes};
pub use matrix::Matrix;
pub use padic::{from_p_adic_digits, p_adic_digits};
pub use poly::Poly;
pub use rational::{frac, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MathError {
    #[error("integer overflow")]
    Overflow,
    #[error("{what} {value} out of range (bound {bound})")]
    OutOfRange { what: &'static str, value: i64, bound: i64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("no element of order {n} in F_{q}")]
    NoRootOfUnity { n: u64, q: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("division is not exact")]
    InexactDivision,
    #[error("denominator does not split into linear factors")]
    NotSplit,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error("linear system has no solution")]
    Inconsistent,
    #[error("subspace is not invariant")]
    NotInvariant,
}
