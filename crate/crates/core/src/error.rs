use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("cyclotomic level mismatch: {0} vs {1}")]
    LevelMismatch(u64, u64),
    #[error("level {from} does not divide target level {to}")]
    LevelNotDivisible { from: u64, to: u64 },
    #[error("element is not in the subfield of level {0}")]
    NotInSubfield(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{d} is not coprime to level {level}")]
    NotCoprime { d: i64, level: u64 },
    #[error("element is not an algebraic integer (denominator {0})")]
    NotIntegral(String),
    #[error("prime {p} divides level {level}")]
    PrimeDividesLevel { p: u64, level: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("series is not invertible: {0}")]
    NotInvertible(String),
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("coefficient of q^{exponent} is beyond the certified window")]
    BeyondPrecision { exponent: String },
    #[error(
        "series has fractional exponents (denominator {0}) where a level-1 series is required"
    )]
    FractionalExponents(u64),
    #[error("nonzero remainder after reduction to a polynomial in j: {0}")]
    NonzeroRemainder(String),
    #[error("invalid Fricke index: {0}")]
    InvalidFrickeIndex(String),
    #[error("invalid eta quotient: {0}")]
    InvalidEtaQuotient(String),
    #[error("matrix {0} is not in SL2(Z)")]
    NotUnimodular(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("valuation precision exhausted: valuation is at least {0}; lift further")]
    ValuationPrecisionExhausted(u32),
    #[error("cyclotomic parts did not cancel: {0}")]
    ZetaNotCancelled(String),
    #[error("parse error: {0}")]
    Parse(String),
}
