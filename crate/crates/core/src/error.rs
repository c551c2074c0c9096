use core::fmt;

use crate::arena::{ArenaError, Objective, VertexId};
use crate::value::ValueError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    Arena(ArenaError),
    Value(ValueError),
    WrongObjective {
        expected: Objective,
    },
    /// MCR solvers need a single target with a 0 self-loop; see `normalize_target`.
    NotNormalized,
    /// The solver exceeded its proven iteration bound; indicates a bug.
    IterationBound {
        limit: u64,
    },
    /// A value moved against the direction the iteration is known to move in.
    Monotonicity {
        vertex: VertexId,
    },
    CapExceeded {
        what: &'static str,
    },
    TooManyStrategies {
        limit: u64,
    },
    MissingTrace,
    ProductTooLarge {
        limit: usize,
    },
    StepBudget {
        steps: usize,
    },
    UnsoundOracle {
        vertex: VertexId,
    },
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Arena(e) => e.fmt(f),
            Error::Value(e) => e.fmt(f),
            Error::WrongObjective { expected } => write!(f, "operation needs a {expected} arena"),
            Error::NotNormalized => f.write_str("arena has no canonical single target"),
            Error::IterationBound { limit } => write!(f, "iteration bound {limit} exceeded"),
            Error::Monotonicity { vertex } => write!(f, "monotonicity violated at vertex {vertex}"),
            Error::CapExceeded { what } => write!(f, "size cap exceeded: {what}"),
            Error::TooManyStrategies { limit } => write!(f, "more than {limit} memoryless strategies"),
            Error::MissingTrace => f.write_str("solve was run without recording the trace"),
            Error::ProductTooLarge { limit } => write!(f, "strategy product exceeds {limit} states"),
            Error::StepBudget { steps } => write!(f, "no lasso or target within {steps} steps"),
            Error::UnsoundOracle { vertex } => write!(f, "oracle candidate set misses the value of {vertex}"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

impl From<ArenaError> for Error {
    fn from(e: ArenaError) -> Self {
        Error::Arena(e)
    }
}

impl From<ValueError> for Error {
    fn from(e: ValueError) -> Self {
        Error::Value(e)
    }
}
