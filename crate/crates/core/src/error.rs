use thiserror::Error;

use crate::nondegen::NondegeneracyVerdict;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown variable `{name}` at position {position}")]
    UnknownVariable { name: String, position: usize },

    #[error("negative exponent at position {position}")]
    NegativeExponent { position: usize },

    #[error("invalid variable list: {0}")]
    Variables(String),

    #[error("invalid mapping: {0}")]
    InvalidMapping(String),

    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("coefficient denominator {denominator} is divisible by p = {p}")]
    DenominatorDivisible { denominator: String, p: u64 },

    #[error("coordinate {index} of the evaluation point vanishes mod {p}")]
    ZeroCoordinate { index: usize, p: u64 },

    #[error("cone is not simplicial")]
    NonSimplicial,

    #[error("Newton polyhedron has no facet with positive offset")]
    NoPositiveFacet,

    #[error("enumeration of {required} points exceeds the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u64 },

    #[error("rational functions over different q ({0} and {1})")]
    MismatchedQ(u64, u64),

    #[error("division by the zero function")]
    DivisionByZero,

    #[error("{0}")]
    NotDivisible(String),

    #[error("mapping is degenerate: {0}")]
    Degenerate(Box<NondegeneracyVerdict>),

    #[error("wrong fan kind: expected {expected}, found {found}")]
    FanKind { expected: &'static str, found: &'static str },
}
