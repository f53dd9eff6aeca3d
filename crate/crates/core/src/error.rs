use thiserror::Error;

use crate::nash::NashTrace;

/// Errors raised by the engine.
///
/// Variants split into two families: input problems (bad indices, parse
/// failures, out-of-range family parameters) and mathematical-domain
/// failures, which [`Error::is_domain_error`] identifies. The command-line
/// front end maps the first family to exit code 1 and the second to 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("variable count mismatch: expected {expected}, found {found}")]
    VariableCountMismatch { expected: usize, found: usize },

    #[error("variable index {index} out of bounds for {nvars} variables")]
    IndexOutOfBounds { index: usize, nvars: usize },

    #[error("division by a series with zero constant term")]
    DivisionByNonUnit,

    #[error("invalid arc: {0}")]
    InvalidArc(String),

    #[error("invalid variety: {0}")]
    InvalidVariety(String),

    #[error("arc does not lie on the variety: {0}")]
    ArcNotOnVariety(String),

    #[error("arc is contained in the maximum multiplicity locus")]
    ArcInMaxMult,

    #[error("working precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("elimination is not separated: {0}")]
    ElimNotSeparated(String),

    #[error("weighted algebra is not differentially closed")]
    NotClosed,

    #[error("strict transform is not exact: {0}")]
    NonExactStrictTransform(String),

    #[error("blowup simulation requires a hypersurface, found {0} defining polynomials")]
    NotHypersurface(usize),

    #[error("no monomial arc solves the exponent balance: {0}")]
    NoMonomialSolution(String),

    #[error("axis witness rejected: {0}")]
    WitnessRejected(String),

    #[error("Nash sequence did not drop within {} steps", .0.steps.len())]
    MaxStepsExceeded(Box<NashTrace>),

    #[error("family parameter N = {n} outside {lo}..{hi}")]
    FamilyOutOfRange { n: i64, lo: i64, hi: i64 },

    #[error("family exponent {exponent} for variable {var} is not positive at N = {n}")]
    NonPositiveExponent { var: usize, n: i64, exponent: i64 },

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),
}

impl Error {
    /// Short stable name used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::VariableCountMismatch { .. } => "VariableCountMismatch",
            Error::IndexOutOfBounds { .. } => "IndexOutOfBounds",
            Error::DivisionByNonUnit => "DivisionByNonUnit",
            Error::InvalidArc(_) => "InvalidArc",
            Error::InvalidVariety(_) => "InvalidVariety",
            Error::ArcNotOnVariety(_) => "ArcNotOnVariety",
            Error::ArcInMaxMult => "ArcInMaxMult",
            Error::PrecisionExhausted(_) => "PrecisionExhausted",
            Error::ElimNotSeparated(_) => "ElimNotSeparated",
            Error::NotClosed => "NotClosed",
            Error::NonExactStrictTransform(_) => "NonExactStrictTransform",
            Error::NotHypersurface(_) => "NotHypersurface",
            Error::NoMonomialSolution(_) => "NoMonomialSolution",
            Error::WitnessRejected(_) => "WitnessRejected",
            Error::MaxStepsExceeded(_) => "MaxStepsExceeded",
            Error::FamilyOutOfRange { .. } => "FamilyOutOfRange",
            Error::NonPositiveExponent { .. } => "NonPositiveExponent",
            Error::Parse { .. } => "ParseError",
            Error::Usage(_) => "UsageError",
            Error::OracleMismatch(_) => "OracleMismatch",
        }
    }

    /// Whether this is a mathematical-domain failure rather than bad input.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            Error::DivisionByNonUnit
                | Error::ArcNotOnVariety(_)
                | Error::ArcInMaxMult
                | Error::PrecisionExhausted(_)
                | Error::ElimNotSeparated(_)
                | Error::NotClosed
                | Error::NonExactStrictTransform(_)
                | Error::NotHypersurface(_)
                | Error::NoMonomialSolution(_)
                | Error::WitnessRejected(_)
                | Error::MaxStepsExceeded(_)
                | Error::OracleMismatch(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
