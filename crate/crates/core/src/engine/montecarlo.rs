use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::model::{IntoWeight, Machine, Scalar, Tape};

use super::graph::{ConfigGraph, Kind};
use super::{ensure_valid, EngineError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RunVerdict {
    Accept,
    Reject,
    Cutoff,
}

/// One sampled trajectory. Run `i` draws from stream `i` of a ChaCha8
/// generator seeded with `seed`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RunOutcome {
    pub verdict: RunVerdict,
    pub steps_used: u64,
    pub seed: u64,
    pub run_index: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarlo {
    pub accepts: u64,
    pub rejects: u64,
    pub cutoffs: u64,
    /// Sorted by run index.
    pub runs: Vec<RunOutcome>,
}

impl MonteCarlo {
    pub fn n_runs(&self) -> u64 {
        self.runs.len() as u64
    }

    pub fn accept_frequency(&self) -> f64 {
        self.accepts as f64 / self.n_runs() as f64
    }

    pub fn reject_frequency(&self) -> f64 {
        self.rejects as f64 / self.n_runs() as f64
    }
}

struct Table {
    kinds: Vec<Kind>,
    /// Cumulative probabilities and targets, per node.
    cumulative: Vec<Vec<(f64, usize)>>,
    start: usize,
}

impl Table {
    fn build<S: Scalar>(m: &Machine<S>, w: &str, node_cap: usize) -> Result<Self, EngineError> {
        let tape = Tape::checked(w, m.alphabet())?;
        let mut graph = ConfigGraph::new(m, tape, node_cap);
        let start = graph.initial();
        graph.explore(start)?;
        let n = graph.len();
        let mut kinds = Vec::with_capacity(n);
        let mut cumulative = Vec::with_capacity(n);
        for x in 0..n {
            kinds.push(graph.kind(x));
            graph.expand(x)?;
            let mut acc = 0.0;
            let row = graph
                .edges(x)
                .iter()
                .map(|(t, p)| {
                    acc += IntoWeight::<f64>::into_weight(p);
                    (acc, *t)
                })
                .collect();
            cumulative.push(row);
        }
        Ok(Table {
            kinds,
            cumulative,
            start,
        })
    }

    fn sample(&self, rng: &mut ChaCha8Rng, step_cap: u64) -> (RunVerdict, u64) {
        let mut x = self.start;
        let mut steps = 0;
        loop {
            match self.kinds[x] {
                Kind::Accept => return (RunVerdict::Accept, steps),
                Kind::Reject => return (RunVerdict::Reject, steps),
                Kind::Live => {}
            }
            if steps >= step_cap {
                return (RunVerdict::Cutoff, steps);
            }
            let row = &self.cumulative[x];
            let u: f64 = rng.random::<f64>() * row.last().map_or(1.0, |r| r.0);
            x = row
                .iter()
                .find(|(c, _)| u < *c)
                .unwrap_or(&row[row.len() - 1])
                .1;
            steps += 1;
        }
    }
}

/// Samples `n_runs` independent trajectories of `m` on `w`, each capped at
/// `step_cap` steps. Runs execute in parallel; results are reproducible
/// for equal arguments.
pub fn run_monte_carlo<S: Scalar>(
    m: &Machine<S>,
    w: &str,
    n_runs: u64,
    master_seed: u64,
    step_cap: u64,
) -> Result<MonteCarlo, EngineError> {
    run_monte_carlo_capped(m, w, n_runs, master_seed, step_cap, super::DEFAULT_NODE_CAP)
}

pub(crate) fn run_monte_carlo_capped<S: Scalar>(
    m: &Machine<S>,
    w: &str,
    n_runs: u64,
    master_seed: u64,
    step_cap: u64,
    node_cap: usize,
) -> Result<MonteCarlo, EngineError> {
    if n_runs == 0 {
        return Err(EngineError::NoRuns);
    }
    ensure_valid(m)?;
    let table = Table::build(m, w, node_cap)?;
    let runs: Vec<RunOutcome> = (0..n_runs)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(i);
            let (verdict, steps_used) = table.sample(&mut rng, step_cap);
            RunOutcome {
                verdict,
                steps_used,
                seed: master_seed,
                run_index: i,
            }
        })
        .collect();
    let count = |v| runs.iter().filter(|r| r.verdict == v).count() as u64;
    Ok(MonteCarlo {
        accepts: count(RunVerdict::Accept),
        rejects: count(RunVerdict::Reject),
        cutoffs: count(RunVerdict::Cutoff),
        runs,
    })
}
