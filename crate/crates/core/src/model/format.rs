//! Text format for machines.
//!
//! A machine file is TOML with one section per component of the nonuple:
//!
//! ```toml
//! name = "flip"
//! backend = "rational"        # or "float"
//! quantum_dim = 2
//! alphabet = "ab"
//! states = ["start", "yes", "no"]
//! q_init = 0
//! s_init = "start"
//! accept = ["yes"]
//! reject = ["no"]
//!
//! [[unitaries]]
//! name = "X"
//! rows = [["0", "1"], ["1", "0"]]
//!
//! [[measurements]]
//! name = "Z"
//! outcomes = [
//!   { label = "q0", projector = [["1", "0"], ["0", "0"]] },
//!   { label = "q1", projector = [["0", "0"], ["0", "1"]] },
//! ]
//!
//! [[theta]]
//! state = "start"
//! symbol = "LEFT"             # "LEFT", "RIGHT" or a single letter
//! unitary = "X"               # or: measure = "Z"
//!
//! [[delta]]
//! state = "start"
//! symbol = "LEFT"
//! outcome = 0                 # only after a measurement
//! branches = [{ p = "1", next = "yes", move = "stay" }]
//! ```
//!
//! Rational entries are written `p/q` (or integers / terminating decimals);
//! float entries as decimals with an optional imaginary part, `0.5-0.25i`.

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::linalg::{Matrix, Measurement, Outcome, UnitaryOp};
use super::machine::{
    Action, ClassicalTransition, Machine, MachineBuilder, Move, StateId, Symbol, TransitionKind,
};
use super::scalar::{format_rational, parse_rational, Backend, Scalar};
use super::ModelError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MachineFile {
    pub name: String,
    pub backend: Backend,
    pub quantum_dim: usize,
    pub alphabet: String,
    pub states: Vec<String>,
    pub q_init: usize,
    pub s_init: String,
    #[serde(default)]
    pub accept: Vec<String>,
    #[serde(default)]
    pub reject: Vec<String>,
    #[serde(default)]
    pub round_markers: Vec<MarkerEntry>,
    #[serde(default)]
    pub unitaries: Vec<UnitaryEntry>,
    #[serde(default)]
    pub measurements: Vec<MeasurementEntry>,
    #[serde(default)]
    pub theta: Vec<ThetaEntry>,
    #[serde(default)]
    pub delta: Vec<DeltaEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkerEntry {
    pub state: String,
    pub head: usize,
    pub basis: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitaryEntry {
    pub name: String,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementEntry {
    pub name: String,
    pub outcomes: Vec<OutcomeEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeEntry {
    pub label: String,
    pub projector: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaEntry {
    pub state: String,
    pub symbol: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeltaEntry {
    pub state: String,
    pub symbol: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<KindEntry>,
    pub branches: Vec<BranchEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindEntry {
    Deterministic,
    Probabilistic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveEntry {
    Left,
    Stay,
    Right,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchEntry {
    pub p: String,
    pub next: String,
    #[serde(rename = "move")]
    pub head_move: MoveEntry,
}

fn symbol_text(s: Symbol) -> String {
    match s {
        Symbol::Left => "LEFT".into(),
        Symbol::Right => "RIGHT".into(),
        Symbol::Letter(c) => c.to_string(),
    }
}

fn parse_symbol(text: &str) -> Result<Symbol, ModelError> {
    match text {
        "LEFT" => Ok(Symbol::Left),
        "RIGHT" => Ok(Symbol::Right),
        _ => {
            let mut cs = text.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => Ok(Symbol::Letter(c)),
                _ => Err(ModelError::Parse(format!("bad symbol {text:?}"))),
            }
        }
    }
}

fn move_entry(m: Move) -> MoveEntry {
    match m {
        Move::Left => MoveEntry::Left,
        Move::Stay => MoveEntry::Stay,
        Move::Right => MoveEntry::Right,
    }
}

fn entry_move(m: MoveEntry) -> Move {
    match m {
        MoveEntry::Left => Move::Left,
        MoveEntry::Stay => Move::Stay,
        MoveEntry::Right => Move::Right,
    }
}

fn render_matrix<S: Scalar>(m: &Matrix<S>) -> Vec<Vec<String>> {
    m.rows()
        .map(|r| r.iter().map(Scalar::render).collect())
        .collect()
}

fn parse_matrix<S: Scalar>(rows: &[Vec<String>]) -> Result<Matrix<S>, ModelError> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|x| S::parse(x)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Matrix::from_rows(rows)
}

impl MachineFile {
    pub fn from_machine<S: Scalar>(m: &Machine<S>) -> Self {
        let name = |s: StateId| m.state_name(s).to_string();
        MachineFile {
            name: m.name().to_string(),
            backend: S::BACKEND,
            quantum_dim: m.quantum_dim(),
            alphabet: m.alphabet().iter().collect(),
            states: m.states().map(name).collect(),
            q_init: m.q_init(),
            s_init: name(m.s_init()),
            accept: m.accept_states().iter().map(|&s| name(s)).collect(),
            reject: m.reject_states().iter().map(|&s| name(s)).collect(),
            round_markers: m
                .round_markers()
                .iter()
                .map(|r| MarkerEntry {
                    state: name(r.state),
                    head: r.head,
                    basis: r.basis,
                })
                .collect(),
            unitaries: m
                .unitaries()
                .iter()
                .map(|u| UnitaryEntry {
                    name: u.name.clone(),
                    rows: render_matrix(u.op.matrix()),
                })
                .collect(),
            measurements: m
                .measurements()
                .iter()
                .map(|meas| MeasurementEntry {
                    name: meas.name.clone(),
                    outcomes: meas
                        .measurement
                        .outcomes()
                        .iter()
                        .map(|o| OutcomeEntry {
                            label: o.label.clone(),
                            projector: render_matrix(&o.projector),
                        })
                        .collect(),
                })
                .collect(),
            theta: m
                .theta_entries()
                .map(|(&(s, sym), &a)| {
                    let (unitary, measure) = match a {
                        Action::Unitary(i) => (Some(m.unitaries()[i].name.clone()), None),
                        Action::Measure(i) => (None, Some(m.measurements()[i].name.clone())),
                    };
                    ThetaEntry {
                        state: name(s),
                        symbol: symbol_text(sym),
                        unitary,
                        measure,
                    }
                })
                .collect(),
            delta: m
                .delta_entries()
                .map(|(k, t)| DeltaEntry {
                    state: name(k.state),
                    symbol: symbol_text(k.symbol),
                    outcome: k.outcome,
                    kind: match (t.kind, t.branches.len() == 1) {
                        (TransitionKind::Deterministic, true)
                        | (TransitionKind::Probabilistic, false) => None,
                        (TransitionKind::Deterministic, false) => Some(KindEntry::Deterministic),
                        (TransitionKind::Probabilistic, true) => Some(KindEntry::Probabilistic),
                    },
                    branches: t
                        .branches
                        .iter()
                        .map(|b| BranchEntry {
                            p: format_rational(&b.probability),
                            next: name(b.next),
                            head_move: move_entry(b.head_move),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_machine<S: Scalar>(&self) -> Result<Machine<S>, ModelError> {
        if self.backend != S::BACKEND {
            return Err(ModelError::BackendMismatch {
                expected: S::BACKEND,
                found: self.backend,
            });
        }
        let alphabet: Vec<char> = self.alphabet.chars().collect();
        let mut b = MachineBuilder::<S>::new(self.name.clone(), self.quantum_dim, &alphabet);
        for s in &self.states {
            b.state(s);
        }
        let lookup = |b: &MachineBuilder<S>, name: &str| -> Result<StateId, ModelError> {
            (0..self.states.len())
                .map(StateId)
                .find(|&s| b.state_name(s) == name)
                .ok_or_else(|| ModelError::Parse(format!("unknown state {name:?}")))
        };
        for u in &self.unitaries {
            b.unitary(&u.name, UnitaryOp::new(parse_matrix(&u.rows)?));
        }
        for meas in &self.measurements {
            let outcomes = meas
                .outcomes
                .iter()
                .map(|o| {
                    Ok(Outcome {
                        label: o.label.clone(),
                        projector: parse_matrix(&o.projector)?,
                    })
                })
                .collect::<Result<Vec<_>, ModelError>>()?;
            b.measurement(&meas.name, Measurement::new(outcomes)?);
        }
        for t in &self.theta {
            let s = lookup(&b, &t.state)?;
            let sym = parse_symbol(&t.symbol)?;
            let action = match (&t.unitary, &t.measure) {
                (Some(u), None) => Action::Unitary(
                    self.unitaries
                        .iter()
                        .position(|x| &x.name == u)
                        .ok_or_else(|| ModelError::Parse(format!("unknown unitary {u:?}")))?,
                ),
                (None, Some(mm)) => Action::Measure(
                    self.measurements
                        .iter()
                        .position(|x| &x.name == mm)
                        .ok_or_else(|| ModelError::Parse(format!("unknown measurement {mm:?}")))?,
                ),
                _ => {
                    return Err(ModelError::Parse(format!(
                        "theta entry for ({}, {}) needs exactly one of unitary/measure",
                        t.state, t.symbol
                    )))
                }
            };
            b.set_theta(s, sym, action);
        }
        for d in &self.delta {
            let s = lookup(&b, &d.state)?;
            let sym = parse_symbol(&d.symbol)?;
            let branches = d
                .branches
                .iter()
                .map(|x| {
                    Ok((
                        parse_rational(&x.p)?,
                        lookup(&b, &x.next)?,
                        entry_move(x.head_move),
                    ))
                })
                .collect::<Result<Vec<(BigRational, StateId, Move)>, ModelError>>()?;
            // Without an explicit kind, a single branch is deterministic.
            let deterministic = match d.kind {
                Some(k) => k == KindEntry::Deterministic,
                None => branches.len() == 1,
            };
            let mut t = ClassicalTransition::probabilistic(branches);
            if deterministic {
                t.kind = TransitionKind::Deterministic;
            }
            b.set_delta(s, sym, d.outcome, t);
        }
        for a in &self.accept {
            let s = lookup(&b, a)?;
            b.accept(s);
        }
        for r in &self.reject {
            let s = lookup(&b, r)?;
            b.reject(s);
        }
        let s_init = lookup(&b, &self.s_init)?;
        b.initial(s_init, self.q_init);
        for r in &self.round_markers {
            let s = lookup(&b, &r.state)?;
            b.round_marker(s, r.head, r.basis);
        }
        Ok(b.build())
    }
}

/// A machine over either amplitude backend.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMachine {
    Rational(Machine<BigRational>),
    Float(Machine<Complex64>),
}

impl From<Machine<BigRational>> for AnyMachine {
    fn from(m: Machine<BigRational>) -> Self {
        AnyMachine::Rational(m)
    }
}

impl From<Machine<Complex64>> for AnyMachine {
    fn from(m: Machine<Complex64>) -> Self {
        AnyMachine::Float(m)
    }
}

impl AnyMachine {
    pub fn name(&self) -> &str {
        match self {
            AnyMachine::Rational(m) => m.name(),
            AnyMachine::Float(m) => m.name(),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            AnyMachine::Rational(_) => Backend::Rational,
            AnyMachine::Float(_) => Backend::Float,
        }
    }

    pub fn alphabet(&self) -> &[char] {
        match self {
            AnyMachine::Rational(m) => m.alphabet(),
            AnyMachine::Float(m) => m.alphabet(),
        }
    }

    /// The same machine over the float backend.
    pub fn to_float(&self) -> Machine<Complex64> {
        match self {
            AnyMachine::Rational(m) => m.map_scalar(|x| x.to_complex()),
            AnyMachine::Float(m) => m.clone(),
        }
    }

    pub fn to_file(&self) -> MachineFile {
        match self {
            AnyMachine::Rational(m) => MachineFile::from_machine(m),
            AnyMachine::Float(m) => MachineFile::from_machine(m),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_file()).expect("machine files always serialize")
    }

    pub fn from_toml(text: &str) -> Result<Self, ModelError> {
        let file: MachineFile =
            toml::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn from_file(file: &MachineFile) -> Result<Self, ModelError> {
        Ok(match file.backend {
            Backend::Rational => AnyMachine::Rational(file.to_machine()?),
            Backend::Float => AnyMachine::Float(file.to_machine()?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_machine;

    const FLIP: &str = r#"
name = "flip"
backend = "rational"
quantum_dim = 2
alphabet = "ab"
states = ["start", "yes", "no"]
q_init = 0
s_init = "start"
accept = ["yes"]
reject = ["no"]

[[unitaries]]
name = "X"
rows = [["0", "1"], ["1", "0"]]

[[measurements]]
name = "Z"
outcomes = [
  { label = "q0", projector = [["1", "0"], ["0", "0"]] },
  { label = "q1", projector = [["0", "0"], ["0", "1"]] },
]

[[theta]]
state = "start"
symbol = "LEFT"
unitary = "X"

[[delta]]
state = "start"
symbol = "LEFT"
branches = [{ p = "1", next = "start", move = "right" }]
"#;

    #[test]
    fn parses_documented_example() {
        let m = AnyMachine::from_toml(FLIP).unwrap();
        let AnyMachine::Rational(m) = m else {
            panic!("wrong backend")
        };
        assert_eq!(m.state_count(), 3);
        assert_eq!(m.theta(StateId(0), Symbol::Left), Some(Action::Unitary(0)));
        // Incomplete on purpose: only one rule is given.
        assert!(!validate_machine(&m).is_empty());
    }

    #[test]
    fn roundtrips_through_text() {
        let m = AnyMachine::from_toml(FLIP).unwrap();
        let again = AnyMachine::from_toml(&m.to_toml()).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn rejects_unknown_state_names() {
        let bad = FLIP.replace("next = \"start\"", "next = \"nowhere\"");
        assert!(matches!(
            AnyMachine::from_toml(&bad),
            Err(ModelError::Parse(_))
        ));
    }

    #[test]
    fn float_entries_roundtrip_exactly() {
        let text = FLIP.replace("\"rational\"", "\"float\"").replace(
            "[\"0\", \"1\"], [\"1\", \"0\"]",
            "[\"0.6\", \"0.8\"], [\"-0.8\", \"0.6\"]",
        );
        let m = AnyMachine::from_toml(&text).unwrap();
        assert_eq!(m.backend(), Backend::Float);
        assert_eq!(AnyMachine::from_toml(&m.to_toml()).unwrap(), m);
    }
}
