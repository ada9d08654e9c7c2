use std::collections::{HashMap, VecDeque};

use crate::model::{step, Machine, Scalar, StateId, StateVector, Tape, MERGE_TOLERANCE};

use super::EngineError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Live,
    Accept,
    Reject,
}

#[derive(Clone, Debug)]
pub(crate) struct Config<S: Scalar> {
    pub state: StateId,
    pub head: usize,
    pub vector: StateVector<S>,
}

/// Lazily expanded graph of configurations reachable on one tape.
/// Register states are stored with a canonical global phase, so two
/// configurations that differ only by phase share a node.
pub(crate) struct ConfigGraph<'m, S: Scalar> {
    pub machine: &'m Machine<S>,
    pub tape: Tape,
    nodes: Vec<Config<S>>,
    edges: Vec<Option<Vec<(usize, S::Prob)>>>,
    buckets: HashMap<(StateId, usize), Vec<usize>>,
    expansions: usize,
    budget: usize,
}

impl<'m, S: Scalar> ConfigGraph<'m, S> {
    pub fn new(machine: &'m Machine<S>, tape: Tape, budget: usize) -> Self {
        ConfigGraph {
            machine,
            tape,
            nodes: Vec::new(),
            edges: Vec::new(),
            buckets: HashMap::new(),
            expansions: 0,
            budget,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn config(&self, idx: usize) -> &Config<S> {
        &self.nodes[idx]
    }

    pub fn kind(&self, idx: usize) -> Kind {
        let s = self.nodes[idx].state;
        if self.machine.is_accepting(s) {
            Kind::Accept
        } else if self.machine.is_rejecting(s) {
            Kind::Reject
        } else {
            Kind::Live
        }
    }

    pub fn intern(&mut self, state: StateId, head: usize, vector: &StateVector<S>) -> usize {
        let vector = vector.canonical_phase(MERGE_TOLERANCE);
        let bucket = self.buckets.entry((state, head)).or_default();
        if let Some(&i) = bucket
            .iter()
            .find(|&&i| self.nodes[i].vector.approx_eq(&vector, MERGE_TOLERANCE))
        {
            return i;
        }
        let i = self.nodes.len();
        bucket.push(i);
        self.nodes.push(Config {
            state,
            head,
            vector,
        });
        self.edges.push(None);
        i
    }

    pub fn initial(&mut self) -> usize {
        let v = StateVector::basis(self.machine.quantum_dim(), self.machine.q_init());
        self.intern(self.machine.s_init(), 0, &v)
    }

    /// The node for `(state, head, |q_basis>)`.
    pub fn basis_node(&mut self, state: StateId, head: usize, basis: usize) -> usize {
        let v = StateVector::basis(self.machine.quantum_dim(), basis);
        self.intern(state, head, &v)
    }

    /// Computes the successors of `idx` if not done yet. Parallel edges to
    /// the same node are merged.
    pub fn expand(&mut self, idx: usize) -> Result<(), EngineError> {
        if self.edges[idx].is_some() {
            return Ok(());
        }
        if self.kind(idx) != Kind::Live {
            self.edges[idx] = Some(Vec::new());
            return Ok(());
        }
        if self.expansions >= self.budget {
            return Err(EngineError::Budget(self.budget));
        }
        self.expansions += 1;
        let c = &self.nodes[idx];
        let succ = step(self.machine, c.state, c.head, &c.vector, &self.tape)?;
        let mut out: Vec<(usize, S::Prob)> = Vec::with_capacity(succ.len());
        for s in succ {
            let t = self.intern(s.state, s.head, &s.vector);
            match out.iter_mut().find(|(j, _)| *j == t) {
                Some((_, p)) => *p = p.clone() + s.probability,
                None => out.push((t, s.probability)),
            }
        }
        self.edges[idx] = Some(out);
        Ok(())
    }

    pub fn edges(&self, idx: usize) -> &[(usize, S::Prob)] {
        self.edges[idx]
            .as_deref()
            .expect("node expanded before use")
    }

    /// Expands everything reachable from `start`.
    pub fn explore(&mut self, start: usize) -> Result<(), EngineError> {
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            if seen.len() < self.len() {
                seen.resize(self.len(), false);
            }
            if seen[x] {
                continue;
            }
            seen[x] = true;
            self.expand(x)?;
            for &(t, _) in self.edges(x) {
                if t >= seen.len() || !seen[t] {
                    queue.push_back(t);
                }
            }
        }
        Ok(())
    }
}
