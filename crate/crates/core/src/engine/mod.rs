//! Evaluation of machines on inputs.
//!
//! Every evaluator works on the configuration graph of a machine and a
//! word: nodes are `(classical state, head, register state)` triples, with
//! register states identified up to global phase. Three evaluators are
//! provided:
//!
//! * [`evolve_exact`] pushes the whole probability distribution forward
//!   one step at a time until the live mass drops below a residual bound;
//! * [`round_stats`] and [`closed_form`] solve the absorbing chain of one
//!   outer round and close it with the geometric series;
//! * [`run_monte_carlo`] samples trajectories with reproducible RNG
//!   streams.
//!
//! [`classify`] turns any of them into a one-sided-error verdict.

mod absorb;
mod classify;
mod evolve;
mod graph;
mod montecarlo;
mod rounds;

pub use classify::{classify, classify_any, Classification, EngineMode, Evidence, Verdict};
pub use evolve::{branch_sets, evolve_exact, evolve_weighted, Branch, BranchSet, Evolution};
pub use montecarlo::{run_monte_carlo, MonteCarlo, RunOutcome, RunVerdict};
pub use rounds::{closed_form, geometric_closure, round_stats, ClosedForm, RoundStats};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Backend, ModelError, Violation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("machine is not well formed: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidMachine(Vec<Violation>),
    #[error("state {0:?} is not a declared round marker")]
    NotAMarker(String),
    #[error("machine is not round-renewing: reached {state:?} at head {head} with a register state other than the declared one")]
    NotRoundRenewing { state: String, head: usize },
    #[error("non-halting machine: some probability mass never halts")]
    NonHalting,
    #[error("round markers hand control to each other in a cycle")]
    CyclicRounds,
    #[error("exploration budget of {0} configurations exhausted")]
    Budget(usize),
    #[error("epsilon must lie in (0, 1/2), got {0}")]
    InvalidEpsilon(f64),
    #[error("residual bound must lie in (0, 1), got {0}")]
    InvalidResidual(f64),
    #[error("n_runs must be at least 1")]
    NoRuns,
    #[error("a {found} machine cannot be evaluated with the {requested} backend")]
    BackendUnavailable { requested: Backend, found: Backend },
}

/// Knobs shared by all evaluators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EngineConfig {
    /// `evolve_exact` stops once the live mass is at most this.
    pub residual_bound: f64,
    /// Steps per evolution or per Monte Carlo run.
    pub step_cap: u64,
    /// Error budget for [`classify`].
    pub epsilon: f64,
    pub seed: u64,
    pub runs: u64,
    pub mode: EngineMode,
    /// Evaluate over another backend than the machine's own.
    pub backend: Option<Backend>,
    /// Largest configuration graph the closure and Monte Carlo evaluators
    /// will build.
    pub node_cap: usize,
    /// Accumulate `evolve_exact` masses as exact rationals. Only affects
    /// rational machines.
    pub exact_weights: bool,
}

pub const DEFAULT_RESIDUAL: f64 = 1e-6;
pub const DEFAULT_STEP_CAP: u64 = 1_000_000;
pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_RUNS: u64 = 10_000;
pub const DEFAULT_NODE_CAP: usize = 2_000_000;

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            residual_bound: DEFAULT_RESIDUAL,
            step_cap: DEFAULT_STEP_CAP,
            epsilon: DEFAULT_EPSILON,
            seed: 0,
            runs: DEFAULT_RUNS,
            mode: EngineMode::Closure,
            backend: None,
            node_cap: DEFAULT_NODE_CAP,
            exact_weights: false,
        }
    }
}

pub(crate) fn ensure_valid<S: crate::model::Scalar>(
    m: &crate::model::Machine<S>,
) -> Result<(), EngineError> {
    let v = crate::model::validate_machine(m);
    if v.is_empty() {
        Ok(())
    } else {
        Err(EngineError::InvalidMachine(v))
    }
}
