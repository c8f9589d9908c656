//! Exact arithmetic: rationals, polynomials, rational functions in s1, s2, s3,
//! and torus characters in t1, t2, t3.

pub mod character;
pub mod linalg;
pub mod linear;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod scalar;
pub mod univariate;

pub use character::{chern_character_eval, euler_class, LaurentPoly, TCharacter};
pub use linear::LinearForm;
pub use poly::Poly;
pub use ratfunc::RationalFunction;
pub use scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("a monomial with nonzero coefficient has zero weight")]
    ZeroWeight,
    #[error("character does not reduce to a Laurent polynomial: {0}")]
    NotPolynomial(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot invert {0}: numerator is not a product of linear forms")]
    NotInvertible(String),
    #[error("pole along {0} survives the specialization")]
    PoleSurvived(String),
    #[error("denominator factor has zero grading; no ascending expansion")]
    NotExpandable,
    #[error("integer overflow in linear form coefficients")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
}
