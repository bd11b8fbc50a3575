//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Every polynomial lives in a [`Ring`], an ordered list of variable names.
//! Terms are kept in graded-lexicographic order over that variable order and
//! zero coefficients are never stored, so two polynomials are equal exactly
//! when their term maps are equal.

mod algebra;
mod monomial;
mod parse;
mod poly;

pub use algebra::{exact_divide, reduce_weierstrass, substitute, univariate_gcd, Binding};
pub use monomial::Monomial;
pub use parse::parse_poly;
pub use poly::{poly_arith, ArithOp, MultiPoly, Ring};

use thiserror::Error;

/// Exact rational number, always stored in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("unknown variable `{name}` at column {column}")]
    UnknownVariable { name: String, column: usize },
    #[error("negative exponent at column {column}")]
    NegativeExponent { column: usize },
    #[error("exponent at column {column} does not fit in 32 bits")]
    ExponentTooLarge { column: usize },
    #[error("ring mismatch: [{left}] vs [{right}]")]
    RingMismatch { left: String, right: String },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("inexact division: the divisor does not divide the dividend")]
    InexactDivision,
    #[error("polynomial is not univariate in `{var}`")]
    NotUnivariate { var: String },
    #[error("zero denominator in the binding for `{var}`")]
    ZeroDenominator { var: String },
    #[error("variable `{0}` is not in the ring")]
    MissingVariable(String),
    #[error("duplicate variable `{0}` in ring")]
    DuplicateVariable(String),
}
