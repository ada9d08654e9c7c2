//! The machine model: amplitudes, the quantum register, the nonuple that
//! defines a machine, single-step semantics and well-formedness checks.

mod format;
mod linalg;
mod machine;
mod scalar;
mod step;
mod tape;
mod validate;

pub use format::{AnyMachine, MachineFile};
pub use linalg::{
    apply_unitary, measure, Matrix, MeasuredOutcome, Measurement, Outcome, ProjectorDefect,
    StateVector, UnitaryOp, OUTSIDE_LABEL,
};
pub use machine::{
    Action, ClassicalTransition, DeltaKey, Machine, MachineBuilder, Move, NamedMeasurement,
    NamedUnitary, RoundMarker, StateId, Symbol, TransitionBranch, TransitionKind,
};
pub use num_complex::Complex64;
pub use num_rational::BigRational;
pub use scalar::{
    format_rational, parse_rational, rational, rational_sqrt, rational_to_f64, Backend, IntoWeight,
    Scalar, Weight, FLOAT_TOLERANCE, MERGE_TOLERANCE,
};
pub use step::{step, Successor};
pub use tape::Tape;
pub use validate::{validate_machine, Violation};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("dimension must be positive")]
    EmptyDimension,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("irrational amplitude: sqrt({0}) is not rational")]
    IrrationalAmplitude(String),
    #[error("outcome with zero probability has no post-measurement state")]
    ZeroProbabilityOutcome,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no transition for state {state:?} on {symbol}{}", outcome.map(|o| format!(" after outcome {o}")).unwrap_or_default())]
    MissingTransition {
        state: String,
        symbol: Symbol,
        outcome: Option<usize>,
    },
    #[error("state {0:?} is halting and has no successors")]
    HaltingState(String),
    #[error("head at {head} outside the tape [0, {last}]")]
    HeadOutOfBounds { head: i64, last: usize },
    #[error("symbol {0:?} is not in the input alphabet")]
    UnknownSymbol(char),
    #[error("backend mismatch: expected {expected}, found {found}")]
    BackendMismatch { expected: Backend, found: Backend },
}
