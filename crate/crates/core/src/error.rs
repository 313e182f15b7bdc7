//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("bezout(0, 0) is undefined")]
    BezoutBothZero,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("element does not match the group shape: {0}")]
    ParentMismatch(String),
    #[error("operation is undefined on the identity element")]
    IdentityInput,
    #[error("unsupported subgroup shape: {0}")]
    UnsupportedShape(String),
    #[error("torsion moduli must be >= 2 and form a divisibility chain")]
    BadTorsionModuli,
    #[error("free-group letter index {0} out of range")]
    LetterOutOfRange(usize),
    #[error("word exponent too large to expand")]
    ExponentOverflow,
    #[error("precondition violated: {0}")]
    Precondition(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("subgroup generator does not live in the claimed factor: {0}")]
    GeneratorOutsideFactor(String),
    #[error("subgroups of a free factor must be cyclic (exactly one non-identity generator)")]
    NonCyclicFreeSubgroup,
    #[error("identity generator is not allowed for a cyclic subgroup")]
    IdentityGenerator,
    #[error("factor letter name clash: {0}")]
    LetterClash(String),
    #[error("word letter does not belong to either factor: {0}")]
    ForeignLetter(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("homomorphism enumeration budget exceeded: {0} candidates")]
    Budget(u128),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeparateError {
    #[error("g lies in the cyclic subgroup generated by c (exponent {0})")]
    GInC(String),
    #[error("the residual criterion fails: {0}")]
    CriterionFailed(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Enum(#[from] EnumError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Parse errors carry the source position; semantic errors name the site.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DslError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("semantic error at line {line}: {msg}")]
    Semantic { line: usize, msg: String },
}
