use thiserror::Error;

use crate::term::Name;

/// Which elimination restriction a rejected `case` violated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EliminationRestriction {
    /// A `Prop` inductive eliminated into `Set`/`Type` without having zero
    /// constructors or a single constructor whose arguments are all proofs.
    PropIntoInformative,
    /// A `Set` inductive eliminated into `Type` without being small.
    LargeOverNonSmall,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error("unbound variable `{0}`")]
    UnboundVariable(Name),
    #[error("unknown global `{0}`")]
    UnknownGlobal(Name),
    #[error("not a function: {0}")]
    NotAFunction(String),
    #[error("{0}")]
    SortMismatch(String),
    #[error("{0}")]
    UniverseError(String),
    #[error("{0}")]
    IllTyped(String),
    #[error("reduction fuel exhausted after {0} steps")]
    FuelExhausted(u64),
    #[error("malformed case on `{ind}`: {reason}")]
    MalformedCase { ind: Name, reason: String },
    #[error("`{0}` is already declared")]
    NameClash(Name),
    #[error("arity of `{0}` is not an arity concluding in Prop or Set: {1}")]
    NotAnArity(Name, String),
    #[error("`{ind}` occurs non-strictly-positively in constructor `{constructor}`")]
    PositivityViolation { ind: Name, constructor: Name },
    #[error("constructor `{constructor}` is ill-typed: {reason}")]
    ConstructorIllTyped { constructor: Name, reason: String },
    #[error("illegal elimination of `{ind}` ({restriction:?})")]
    IllegalElimination { ind: Name, restriction: EliminationRestriction },
    #[error("branch {index} of case on `{ind}`: {reason}")]
    BranchMismatch { ind: Name, index: usize, reason: String },
    #[error("motive of case on `{ind}`: {reason}")]
    MotiveMismatch { ind: Name, reason: String },
    #[error("fixpoint `{name}` is not guarded: {reason}")]
    GuardViolation { name: Name, reason: String },
    #[error("fixpoint annotation is not a type: {0}")]
    AnnotationNotAType(String),
    #[error("witness for `{axiom}` has the wrong type: {reason}")]
    WitnessTypeMismatch { axiom: Name, reason: String },
    #[error("axiom `{0}` has no registered parametricity witness")]
    MissingWitness(Name),
    #[error("`{0}` is not a small inductive definition; its large eliminations have no relational translation")]
    NotSmallInductive(Name),
    #[error("not supported: {0}")]
    NotSupported(String),
    #[error("embedding check failed for `{name}`: {source}")]
    EmbeddingFailed { name: Name, source: Box<Error> },
}

impl Error {
    /// A stable identifier used in diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnboundVariable(_) => "UnboundVariable",
            Error::UnknownGlobal(_) => "UnknownGlobal",
            Error::NotAFunction(_) => "NotAFunction",
            Error::SortMismatch(_) => "SortMismatch",
            Error::UniverseError(_) => "UniverseError",
            Error::IllTyped(_) => "IllTyped",
            Error::FuelExhausted(_) => "FuelExhausted",
            Error::MalformedCase { .. } => "MalformedCase",
            Error::NameClash(_) => "NameClash",
            Error::NotAnArity(..) => "NotAnArity",
            Error::PositivityViolation { .. } => "PositivityViolation",
            Error::ConstructorIllTyped { .. } => "ConstructorIllTyped",
            Error::IllegalElimination { .. } => "IllegalElimination",
            Error::BranchMismatch { .. } => "BranchMismatch",
            Error::MotiveMismatch { .. } => "MotiveMismatch",
            Error::GuardViolation { .. } => "GuardViolation",
            Error::AnnotationNotAType(_) => "AnnotationNotAType",
            Error::WitnessTypeMismatch { .. } => "WitnessTypeMismatch",
            Error::MissingWitness(_) => "MissingWitness",
            Error::NotSmallInductive(_) => "NotSmallInductive",
            Error::NotSupported(_) => "NotSupported",
            Error::EmbeddingFailed { .. } => "EmbeddingFailed",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
