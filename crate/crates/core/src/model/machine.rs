use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::linalg::{Measurement, UnitaryOp};
use super::scalar::{Backend, Scalar};

/// A tape symbol: one of the two end markers or an input letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Left,
    Right,
    Letter(char),
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Left => f.write_str("⊢"),
            Symbol::Right => f.write_str("⊣"),
            Symbol::Letter(c) => write!(f, "{c}"),
        }
    }
}

/// Head movement after a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Move {
    Left,
    Stay,
    Right,
}

impl Move {
    pub fn offset(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Stay => 0,
            Move::Right => 1,
        }
    }

    pub fn from_offset(d: i64) -> Option<Move> {
        match d {
            -1 => Some(Move::Left),
            0 => Some(Move::Stay),
            1 => Some(Move::Right),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransitionKind {
    Deterministic,
    Probabilistic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionBranch {
    pub probability: BigRational,
    pub next: StateId,
    pub head_move: Move,
}

/// The classical part of a step: where the control goes and how the head
/// moves, possibly at random.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalTransition {
    pub kind: TransitionKind,
    pub branches: Vec<TransitionBranch>,
}

impl ClassicalTransition {
    pub fn deterministic(next: StateId, head_move: Move) -> Self {
        ClassicalTransition {
            kind: TransitionKind::Deterministic,
            branches: vec![TransitionBranch {
                probability: BigRational::one(),
                next,
                head_move,
            }],
        }
    }

    pub fn probabilistic(branches: Vec<(BigRational, StateId, Move)>) -> Self {
        ClassicalTransition {
            kind: TransitionKind::Probabilistic,
            branches: branches
                .into_iter()
                .map(|(probability, next, head_move)| TransitionBranch {
                    probability,
                    next,
                    head_move,
                })
                .collect(),
        }
    }

    /// Fair coin between two targets.
    pub fn coin(heads: (StateId, Move), tails: (StateId, Move)) -> Self {
        let half = BigRational::new(1.into(), 2.into());
        Self::probabilistic(vec![
            (half.clone(), heads.0, heads.1),
            (half, tails.0, tails.1),
        ])
    }

    pub fn total_probability(&self) -> BigRational {
        self.branches
            .iter()
            .fold(BigRational::zero(), |acc, b| acc + &b.probability)
    }
}

/// What the quantum register does at a step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Unitary(usize),
    Measure(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeltaKey {
    pub state: StateId,
    pub symbol: Symbol,
    /// Outcome index, present only when the step measures.
    pub outcome: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedUnitary<S> {
    pub name: String,
    pub op: UnitaryOp<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NamedMeasurement<S> {
    pub name: String,
    pub measurement: Measurement<S>,
}

/// The loop head of a round-renewing machine: every time control enters
/// `state`, the head must be at `head` and the register in `|q_basis>`
/// (up to global phase).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RoundMarker {
    pub state: StateId,
    pub head: usize,
    pub basis: usize,
}

/// A two-way quantum finite automaton with classical states.
///
/// `theta` picks the quantum action for a (non-halting state, tape symbol)
/// pair and `delta` the classical transition; after a measurement `delta` is
/// additionally keyed by the outcome index.
#[derive(Clone, Debug, PartialEq)]
pub struct Machine<S> {
    pub(crate) name: String,
    pub(crate) states: Vec<String>,
    pub(crate) quantum_dim: usize,
    pub(crate) alphabet: Vec<char>,
    pub(crate) unitaries: Vec<NamedUnitary<S>>,
    pub(crate) measurements: Vec<NamedMeasurement<S>>,
    pub(crate) theta: BTreeMap<(StateId, Symbol), Action>,
    pub(crate) delta: BTreeMap<DeltaKey, ClassicalTransition>,
    pub(crate) q_init: usize,
    pub(crate) s_init: StateId,
    pub(crate) accept: BTreeSet<StateId>,
    pub(crate) reject: BTreeSet<StateId>,
    pub(crate) round_markers: Vec<RoundMarker>,
}

impl<S: Scalar> Machine<S> {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn backend(&self) -> Backend {
        S::BACKEND
    }

    pub fn quantum_dim(&self) -> usize {
        self.quantum_dim
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|n| n == name).map(StateId)
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.states.len()).map(StateId)
    }

    pub fn unitaries(&self) -> &[NamedUnitary<S>] {
        &self.unitaries
    }

    pub fn measurements(&self) -> &[NamedMeasurement<S>] {
        &self.measurements
    }

    pub fn unitary(&self, index: usize) -> &UnitaryOp<S> {
        &self.unitaries[index].op
    }

    pub fn measurement(&self, index: usize) -> &Measurement<S> {
        &self.measurements[index].measurement
    }

    pub fn theta(&self, state: StateId, symbol: Symbol) -> Option<Action> {
        self.theta.get(&(state, symbol)).copied()
    }

    pub fn delta(
        &self,
        state: StateId,
        symbol: Symbol,
        outcome: Option<usize>,
    ) -> Option<&ClassicalTransition> {
        self.delta.get(&DeltaKey {
            state,
            symbol,
            outcome,
        })
    }

    pub fn theta_entries(&self) -> impl Iterator<Item = (&(StateId, Symbol), &Action)> {
        self.theta.iter()
    }

    pub fn delta_entries(&self) -> impl Iterator<Item = (&DeltaKey, &ClassicalTransition)> {
        self.delta.iter()
    }

    pub fn q_init(&self) -> usize {
        self.q_init
    }

    pub fn s_init(&self) -> StateId {
        self.s_init
    }

    pub fn accept_states(&self) -> &BTreeSet<StateId> {
        &self.accept
    }

    pub fn reject_states(&self) -> &BTreeSet<StateId> {
        &self.reject
    }

    pub fn is_accepting(&self, s: StateId) -> bool {
        self.accept.contains(&s)
    }

    pub fn is_rejecting(&self, s: StateId) -> bool {
        self.reject.contains(&s)
    }

    pub fn is_halting(&self, s: StateId) -> bool {
        self.is_accepting(s) || self.is_rejecting(s)
    }

    pub fn round_markers(&self) -> &[RoundMarker] {
        &self.round_markers
    }

    pub fn round_marker(&self, state: StateId) -> Option<&RoundMarker> {
        self.round_markers.iter().find(|m| m.state == state)
    }

    /// Γ: both markers followed by the input alphabet.
    pub fn tape_symbols(&self) -> Vec<Symbol> {
        let mut out = vec![Symbol::Left, Symbol::Right];
        out.extend(self.alphabet.iter().map(|&c| Symbol::Letter(c)));
        out
    }

    /// Same machine over another amplitude field.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Machine<T> {
        Machine {
            name: self.name.clone(),
            states: self.states.clone(),
            quantum_dim: self.quantum_dim,
            alphabet: self.alphabet.clone(),
            unitaries: self
                .unitaries
                .iter()
                .map(|u| NamedUnitary {
                    name: u.name.clone(),
                    op: u.op.map(&f),
                })
                .collect(),
            measurements: self
                .measurements
                .iter()
                .map(|m| NamedMeasurement {
                    name: m.name.clone(),
                    measurement: m.measurement.map(&f),
                })
                .collect(),
            theta: self.theta.clone(),
            delta: self.delta.clone(),
            q_init: self.q_init,
            s_init: self.s_init,
            accept: self.accept.clone(),
            reject: self.reject.clone(),
            round_markers: self.round_markers.clone(),
        }
    }
}

/// Incremental construction of a [`Machine`]. Nothing is checked here;
/// run [`crate::model::validate_machine`] on the result.
#[derive(Clone, Debug)]
pub struct MachineBuilder<S> {
    machine: Machine<S>,
    identity: Option<usize>,
}

impl<S: Scalar> MachineBuilder<S> {
    pub fn new(name: impl Into<String>, quantum_dim: usize, alphabet: &[char]) -> Self {
        MachineBuilder {
            machine: Machine {
                name: name.into(),
                states: Vec::new(),
                quantum_dim,
                alphabet: alphabet.to_vec(),
                unitaries: Vec::new(),
                measurements: Vec::new(),
                theta: BTreeMap::new(),
                delta: BTreeMap::new(),
                q_init: 0,
                s_init: StateId(0),
                accept: BTreeSet::new(),
                reject: BTreeSet::new(),
                round_markers: Vec::new(),
            },
            identity: None,
        }
    }

    /// Continues building from an existing machine.
    pub fn from_machine(machine: Machine<S>) -> Self {
        let dim = machine.quantum_dim;
        let identity = machine
            .unitaries
            .iter()
            .position(|u| u.op.dim() == dim && u.op.matrix().is_identity(0.0));
        MachineBuilder { machine, identity }
    }

    pub fn rename(&mut self, name: &str) {
        self.machine.name = name.to_string();
    }

    pub fn quantum_dim(&self) -> usize {
        self.machine.quantum_dim
    }

    /// Id of the state called `name`, creating it on first use.
    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(id) = self.machine.state_id(name) {
            return id;
        }
        self.machine.states.push(name.to_string());
        StateId(self.machine.states.len() - 1)
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.machine.states[s.0]
    }

    /// Registers a unitary; an existing operator with the same name is reused.
    pub fn unitary(&mut self, name: &str, op: UnitaryOp<S>) -> usize {
        if let Some(i) = self.machine.unitaries.iter().position(|u| u.name == name) {
            return i;
        }
        self.machine.unitaries.push(NamedUnitary {
            name: name.to_string(),
            op,
        });
        self.machine.unitaries.len() - 1
    }

    pub fn identity(&mut self) -> usize {
        if let Some(i) = self.identity {
            return i;
        }
        let dim = self.machine.quantum_dim;
        let i = self.unitary("I", UnitaryOp::identity(dim));
        self.identity = Some(i);
        i
    }

    pub fn measurement(&mut self, name: &str, measurement: Measurement<S>) -> usize {
        if let Some(i) = self
            .machine
            .measurements
            .iter()
            .position(|m| m.name == name)
        {
            return i;
        }
        self.machine.measurements.push(NamedMeasurement {
            name: name.to_string(),
            measurement,
        });
        self.machine.measurements.len() - 1
    }

    pub fn set_theta(&mut self, state: StateId, symbol: Symbol, action: Action) {
        self.machine.theta.insert((state, symbol), action);
    }

    pub fn set_delta(
        &mut self,
        state: StateId,
        symbol: Symbol,
        outcome: Option<usize>,
        t: ClassicalTransition,
    ) {
        self.machine.delta.insert(
            DeltaKey {
                state,
                symbol,
                outcome,
            },
            t,
        );
    }

    /// Unitary step followed by `t`.
    pub fn on_unitary(
        &mut self,
        state: StateId,
        symbol: Symbol,
        op: usize,
        t: ClassicalTransition,
    ) {
        self.set_theta(state, symbol, Action::Unitary(op));
        self.set_delta(state, symbol, None, t);
    }

    /// Identity on the register, deterministic move.
    pub fn go(&mut self, state: StateId, symbol: Symbol, next: StateId, mv: Move) {
        let id = self.identity();
        self.on_unitary(
            state,
            symbol,
            id,
            ClassicalTransition::deterministic(next, mv),
        );
    }

    /// Identity on the register, random classical move.
    pub fn go_random(&mut self, state: StateId, symbol: Symbol, t: ClassicalTransition) {
        let id = self.identity();
        self.on_unitary(state, symbol, id, t);
    }

    /// Measurement step with one classical transition per outcome index.
    pub fn on_measure(
        &mut self,
        state: StateId,
        symbol: Symbol,
        meas: usize,
        per_outcome: Vec<ClassicalTransition>,
    ) {
        self.set_theta(state, symbol, Action::Measure(meas));
        for (i, t) in per_outcome.into_iter().enumerate() {
            self.set_delta(state, symbol, Some(i), t);
        }
    }

    pub fn has_rule(&self, state: StateId, symbol: Symbol) -> bool {
        self.machine.theta.contains_key(&(state, symbol))
    }

    pub fn accept(&mut self, s: StateId) {
        self.machine.accept.insert(s);
    }

    pub fn reject(&mut self, s: StateId) {
        self.machine.reject.insert(s);
    }

    pub fn initial(&mut self, s: StateId, q: usize) {
        self.machine.s_init = s;
        self.machine.q_init = q;
    }

    pub fn round_marker(&mut self, state: StateId, head: usize, basis: usize) {
        self.machine.round_markers.retain(|m| m.state != state);
        self.machine
            .round_markers
            .push(RoundMarker { state, head, basis });
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        self.machine.tape_symbols()
    }

    /// Sends every non-halting (state, symbol) pair without a rule to
    /// `trap` with the register untouched. Used for pairs the control never
    /// reaches, so the machine is total.
    pub fn fill_unset(&mut self, trap: StateId) {
        let symbols = self.symbols();
        for s in (0..self.machine.states.len()).map(StateId) {
            if self.machine.is_halting(s) {
                continue;
            }
            for &sym in &symbols {
                if !self.has_rule(s, sym) {
                    self.go(s, sym, trap, Move::Stay);
                }
            }
        }
    }

    pub fn build(self) -> Machine<S> {
        self.machine
    }
}
