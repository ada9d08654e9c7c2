use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::model::{AnyMachine, Backend, IntoWeight, Machine, Scalar, Weight, FLOAT_TOLERANCE};

use super::evolve::evolve_weighted;
use super::montecarlo::run_monte_carlo_capped;
use super::rounds::closed_form;
use super::{EngineConfig, EngineError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineMode {
    /// Step-by-step distribution evolution.
    Exact,
    /// Round statistics closed with the geometric series.
    Closure,
    MonteCarlo,
}

impl std::fmt::Display for EngineMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EngineMode::Exact => "exact",
            EngineMode::Closure => "closure",
            EngineMode::MonteCarlo => "montecarlo",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Member,
    NonMember,
    Undecided,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Member => "member",
            Verdict::NonMember => "nonmember",
            Verdict::Undecided => "undecided",
        })
    }
}

/// What a verdict was based on.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Evidence {
    /// Lower bounds on the halting probabilities; the true values exceed
    /// them by at most `residual` in total.
    Bounds {
        accept_lower: f64,
        reject_lower: f64,
        residual: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        accept_exact: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        reject_exact: Option<String>,
        steps: u64,
        cutoff: bool,
    },
    Counts {
        runs: u64,
        accepts: u64,
        rejects: u64,
        cutoffs: u64,
        seed: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub mode: EngineMode,
    pub epsilon: f64,
    pub evidence: Evidence,
}

/// Decides membership of `w` with one-sided error `epsilon`.
///
/// * `Member`: rejection mass is zero (exactly for rational machines,
///   within `1e-9` otherwise) and the acceptance bound is at least
///   `1 - residual_bound`; for Monte Carlo, every run accepted.
/// * `NonMember`: the rejection bound (or frequency) is at least
///   `1 - epsilon`.
/// * `Undecided`: neither, e.g. because the budget ran out.
pub fn classify<S: Scalar>(
    m: &Machine<S>,
    w: &str,
    epsilon: f64,
    config: &EngineConfig,
) -> Result<Classification, EngineError>
where
    S::Prob: IntoWeight<f64>,
{
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(EngineError::InvalidEpsilon(epsilon));
    }
    let zero_tol = if S::BACKEND == Backend::Rational {
        0.0
    } else {
        FLOAT_TOLERANCE
    };
    let (verdict, evidence) = match config.mode {
        EngineMode::Exact => {
            let e = evolve_weighted::<S, f64>(m, w, config.residual_bound, config.step_cap)?;
            let bounds = Evidence::Bounds {
                accept_lower: e.accepted,
                reject_lower: e.rejected,
                residual: e.residual,
                accept_exact: None,
                reject_exact: None,
                steps: e.steps,
                cutoff: e.cutoff,
            };
            (
                bounds_verdict(&bounds, epsilon, zero_tol, config.residual_bound),
                bounds,
            )
        }
        EngineMode::Closure => {
            let budget = config
                .node_cap
                .min(usize::try_from(config.step_cap).unwrap_or(usize::MAX));
            match closed_form(m, w, budget) {
                Ok(c) => {
                    let b = Evidence::Bounds {
                        accept_lower: c.accept.to_f64(),
                        reject_lower: c.reject.to_f64(),
                        residual: 0.0,
                        accept_exact: c.accept.exact_string(),
                        reject_exact: c.reject.exact_string(),
                        steps: c.explored as u64,
                        cutoff: false,
                    };
                    (
                        bounds_verdict(&b, epsilon, zero_tol, config.residual_bound),
                        b,
                    )
                }
                Err(EngineError::Budget(n)) => (
                    Verdict::Undecided,
                    Evidence::Bounds {
                        accept_lower: 0.0,
                        reject_lower: 0.0,
                        residual: 1.0,
                        accept_exact: None,
                        reject_exact: None,
                        steps: n as u64,
                        cutoff: true,
                    },
                ),
                Err(e) => return Err(e),
            }
        }
        EngineMode::MonteCarlo => {
            let mc = run_monte_carlo_capped(
                m,
                w,
                config.runs,
                config.seed,
                config.step_cap,
                config.node_cap,
            )?;
            let verdict = if mc.rejects == 0 && mc.cutoffs == 0 {
                Verdict::Member
            } else if mc.reject_frequency() >= 1.0 - epsilon {
                Verdict::NonMember
            } else {
                Verdict::Undecided
            };
            let counts = Evidence::Counts {
                runs: mc.n_runs(),
                accepts: mc.accepts,
                rejects: mc.rejects,
                cutoffs: mc.cutoffs,
                seed: config.seed,
            };
            (verdict, counts)
        }
    };
    Ok(Classification {
        verdict,
        mode: config.mode,
        epsilon,
        evidence,
    })
}

fn exact_bounds(
    m: &Machine<BigRational>,
    w: &str,
    config: &EngineConfig,
) -> Result<Evidence, EngineError> {
    let e =
        evolve_weighted::<BigRational, BigRational>(m, w, config.residual_bound, config.step_cap)?;
    Ok(Evidence::Bounds {
        accept_lower: e.accepted.to_f64(),
        reject_lower: e.rejected.to_f64(),
        residual: e.residual.to_f64(),
        accept_exact: e.accepted.exact_string(),
        reject_exact: e.rejected.exact_string(),
        steps: e.steps,
        cutoff: e.cutoff,
    })
}

fn bounds_verdict(b: &Evidence, epsilon: f64, zero_tol: f64, residual_bound: f64) -> Verdict {
    let Evidence::Bounds {
        accept_lower,
        reject_lower,
        ..
    } = *b
    else {
        unreachable!("bounds evidence expected")
    };
    if reject_lower <= zero_tol && accept_lower >= 1.0 - residual_bound {
        Verdict::Member
    } else if reject_lower >= 1.0 - epsilon {
        Verdict::NonMember
    } else {
        Verdict::Undecided
    }
}

/// [`classify`] for a machine of either backend, honoring
/// `config.backend` and, for rational machines in exact mode,
/// `config.exact_weights`.
pub fn classify_any(
    m: &AnyMachine,
    w: &str,
    epsilon: f64,
    config: &EngineConfig,
) -> Result<Classification, EngineError> {
    match (m, config.backend) {
        (AnyMachine::Rational(r), None | Some(Backend::Rational))
            if config.mode == EngineMode::Exact && config.exact_weights =>
        {
            if !(epsilon > 0.0 && epsilon < 0.5) {
                return Err(EngineError::InvalidEpsilon(epsilon));
            }
            let b = exact_bounds(r, w, config)?;
            let verdict = bounds_verdict(&b, epsilon, 0.0, config.residual_bound);
            Ok(Classification {
                verdict,
                mode: config.mode,
                epsilon,
                evidence: b,
            })
        }
        (AnyMachine::Rational(r), None | Some(Backend::Rational)) => {
            classify(r, w, epsilon, config)
        }
        (AnyMachine::Rational(_), Some(Backend::Float)) => {
            classify(&m.to_float(), w, epsilon, config)
        }
        (AnyMachine::Float(f), None | Some(Backend::Float)) => classify(f, w, epsilon, config),
        (AnyMachine::Float(_), Some(Backend::Rational)) => Err(EngineError::BackendUnavailable {
            requested: Backend::Rational,
            found: Backend::Float,
        }),
    }
}
