use crate::model::{IntoWeight, Machine, Scalar, StateId, StateVector, Tape, Weight};

use super::graph::{ConfigGraph, Kind};
use super::{ensure_valid, EngineError};

/// One weighted configuration of the evolving distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Branch<S: Scalar, W> {
    pub weight: W,
    pub classical: StateId,
    pub head: usize,
    pub quantum: StateVector<S>,
}

/// The distribution after some number of steps: live branches plus the
/// mass that has already halted.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchSet<S: Scalar, W> {
    pub live: Vec<Branch<S, W>>,
    pub accepted_mass: W,
    pub rejected_mass: W,
}

impl<S: Scalar, W: Weight> BranchSet<S, W> {
    pub fn live_mass(&self) -> W {
        self.live
            .iter()
            .fold(W::zero(), |acc, b| acc + b.weight.clone())
    }

    pub fn total_mass(&self) -> W {
        self.accepted_mass.clone() + self.rejected_mass.clone() + self.live_mass()
    }
}

/// Result of [`evolve_exact`].
#[derive(Clone, Debug, PartialEq)]
pub struct Evolution<W> {
    /// Mass accepted so far: a lower bound on the acceptance probability.
    pub accepted: W,
    /// Mass rejected so far: a lower bound on the rejection probability.
    pub rejected: W,
    /// Mass still live; the true probabilities lie within this of the bounds.
    pub residual: W,
    pub steps: u64,
    /// True when the step cap stopped the evolution above the residual bound.
    pub cutoff: bool,
    /// Number of live configurations after each step, starting with step 0.
    pub trace: Vec<usize>,
    /// Largest `|accepted + rejected + live - 1|` seen at any step.
    pub max_conservation_error: f64,
}

impl<W: Weight> Evolution<W> {
    pub fn accept_lower(&self) -> f64 {
        self.accepted.to_f64()
    }

    pub fn reject_lower(&self) -> f64 {
        self.rejected.to_f64()
    }

    pub fn residual_f64(&self) -> f64 {
        self.residual.to_f64()
    }
}

/// Stepwise evolution of the full distribution of `m` on `w`, with masses
/// accumulated in `f64`.
///
/// Configurations are merged when their classical state and head agree and
/// their register states agree up to global phase (exactly for rational
/// machines, within `1e-12` per component for float machines). Evolution
/// stops once the live mass is at most `residual_bound` or after
/// `step_cap` steps.
pub fn evolve_exact<S: Scalar>(
    m: &Machine<S>,
    w: &str,
    residual_bound: f64,
    step_cap: u64,
) -> Result<Evolution<f64>, EngineError> {
    evolve_weighted::<S, f64>(m, w, residual_bound, step_cap)
}

/// [`evolve_exact`] with masses accumulated in `W`. With `W = BigRational`
/// on a rational machine, conservation holds exactly at every step; the
/// rationals grow by roughly one bit per step, so keep `step_cap` modest.
pub fn evolve_weighted<S, W>(
    m: &Machine<S>,
    w: &str,
    residual_bound: f64,
    step_cap: u64,
) -> Result<Evolution<W>, EngineError>
where
    S: Scalar,
    W: Weight,
    S::Prob: IntoWeight<W>,
{
    let mut run = Evolver::<S, W>::start(m, w, residual_bound)?;
    while !run.finished() && run.steps < step_cap {
        run.advance()?;
    }
    Ok(run.finish())
}

pub(crate) struct Evolver<'m, S: Scalar, W> {
    graph: ConfigGraph<'m, S>,
    residual_bound: f64,
    weights: Vec<W>,
    active: Vec<usize>,
    next: Vec<W>,
    touched: Vec<bool>,
    edges: Vec<Option<Vec<(usize, Kind, W)>>>,
    accepted: (W, W),
    rejected: (W, W),
    live: W,
    steps: u64,
    trace: Vec<usize>,
    max_error: f64,
}

impl<'m, S, W> Evolver<'m, S, W>
where
    S: Scalar,
    W: Weight,
    S::Prob: IntoWeight<W>,
{
    pub fn start(m: &'m Machine<S>, w: &str, residual_bound: f64) -> Result<Self, EngineError> {
        if !(residual_bound > 0.0 && residual_bound < 1.0) {
            return Err(EngineError::InvalidResidual(residual_bound));
        }
        ensure_valid(m)?;
        let tape = Tape::checked(w, m.alphabet())?;
        let mut graph = ConfigGraph::new(m, tape, usize::MAX);
        let init = graph.initial();
        let mut run = Evolver {
            graph,
            residual_bound,
            weights: Vec::new(),
            active: Vec::new(),
            next: Vec::new(),
            touched: Vec::new(),
            edges: Vec::new(),
            accepted: (W::zero(), W::zero()),
            rejected: (W::zero(), W::zero()),
            live: W::zero(),
            steps: 0,
            trace: Vec::new(),
            max_error: 0.0,
        };
        run.grow();
        match run.graph.kind(init) {
            Kind::Accept => run.accepted.0 = W::one(),
            Kind::Reject => run.rejected.0 = W::one(),
            Kind::Live => {
                run.weights[init] = W::one();
                run.active.push(init);
                run.live = W::one();
            }
        }
        run.trace.push(run.active.len());
        run.check_conservation();
        Ok(run)
    }

    fn grow(&mut self) {
        let n = self.graph.len();
        if self.weights.len() < n {
            self.weights.resize(n, W::zero());
            self.next.resize(n, W::zero());
            self.touched.resize(n, false);
            self.edges.resize(n, None);
        }
    }

    fn finished(&self) -> bool {
        self.active.is_empty() || self.live.to_f64() <= self.residual_bound
    }

    fn edges_of(&mut self, x: usize) -> Result<(), EngineError> {
        if self.edges[x].is_some() {
            return Ok(());
        }
        self.graph.expand(x)?;
        self.grow();
        let es = self
            .graph
            .edges(x)
            .iter()
            .map(|(t, p)| (*t, self.graph.kind(*t), p.into_weight()))
            .collect();
        self.edges[x] = Some(es);
        Ok(())
    }

    pub fn advance(&mut self) -> Result<(), EngineError> {
        let active = std::mem::take(&mut self.active);
        for &x in &active {
            self.edges_of(x)?;
        }
        let mut next_active = Vec::with_capacity(active.len());
        for &x in &active {
            let wx = std::mem::replace(&mut self.weights[x], W::zero());
            for (t, kind, p) in self.edges[x].as_ref().expect("expanded above") {
                let mass = wx.clone() * p.clone();
                match kind {
                    Kind::Accept => {
                        W::compensated_add(&mut self.accepted.0, &mut self.accepted.1, mass)
                    }
                    Kind::Reject => {
                        W::compensated_add(&mut self.rejected.0, &mut self.rejected.1, mass)
                    }
                    Kind::Live => {
                        self.next[*t] = self.next[*t].clone() + mass;
                        if !self.touched[*t] {
                            self.touched[*t] = true;
                            next_active.push(*t);
                        }
                    }
                }
            }
        }
        next_active.sort_unstable();
        let mut live = W::zero();
        for &t in &next_active {
            self.touched[t] = false;
            self.weights[t] = std::mem::replace(&mut self.next[t], W::zero());
            live = live + self.weights[t].clone();
        }
        self.active = next_active;
        self.live = live;
        self.steps += 1;
        self.trace.push(self.active.len());
        self.check_conservation();
        Ok(())
    }

    fn check_conservation(&mut self) {
        let total = self.accepted.0.clone()
            + self.accepted.1.clone()
            + self.rejected.0.clone()
            + self.rejected.1.clone()
            + self.live.clone();
        let err = if W::EXACT {
            if total == W::one() {
                0.0
            } else {
                (total - W::one()).abs_f64().max(f64::MIN_POSITIVE)
            }
        } else {
            (total.to_f64() - 1.0).abs()
        };
        self.max_error = self.max_error.max(err);
    }

    /// Snapshot of the current distribution.
    pub fn branch_set(&self) -> BranchSet<S, W> {
        BranchSet {
            live: self
                .active
                .iter()
                .map(|&x| {
                    let c = self.graph.config(x);
                    Branch {
                        weight: self.weights[x].clone(),
                        classical: c.state,
                        head: c.head,
                        quantum: c.vector.clone(),
                    }
                })
                .collect(),
            accepted_mass: self.accepted.0.clone() + self.accepted.1.clone(),
            rejected_mass: self.rejected.0.clone() + self.rejected.1.clone(),
        }
    }

    pub fn finish(self) -> Evolution<W> {
        Evolution {
            accepted: self.accepted.0 + self.accepted.1,
            rejected: self.rejected.0 + self.rejected.1,
            cutoff: !self.active.is_empty() && self.live.to_f64() > self.residual_bound,
            residual: self.live,
            steps: self.steps,
            trace: self.trace,
            max_conservation_error: self.max_error,
        }
    }
}

/// Runs `steps` steps and returns every intermediate distribution,
/// starting with the initial one.
pub fn branch_sets<S, W>(
    m: &Machine<S>,
    w: &str,
    steps: u64,
) -> Result<Vec<BranchSet<S, W>>, EngineError>
where
    S: Scalar,
    W: Weight,
    S::Prob: IntoWeight<W>,
{
    let mut run = Evolver::<S, W>::start(m, w, f64::MIN_POSITIVE)?;
    let mut out = vec![run.branch_set()];
    for _ in 0..steps {
        if run.active.is_empty() {
            break;
        }
        run.advance()?;
        out.push(run.branch_set());
    }
    Ok(out)
}
