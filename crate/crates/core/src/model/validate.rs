use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::linalg::ProjectorDefect;
use super::machine::{Action, Machine, Move, Symbol, TransitionKind};
use super::scalar::{format_rational, Scalar};

/// One well-formedness problem found by [`validate_machine`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyRegister,
    NoStates,
    HaltSetsOverlap {
        state: String,
    },
    InitialBasisOutOfRange {
        q_init: usize,
        dim: usize,
    },
    MarkerInAlphabet {
        letter: char,
    },
    DuplicateLetter {
        letter: char,
    },
    NonUnitary {
        operator: String,
    },
    OperatorDimension {
        operator: String,
        expected: usize,
        found: usize,
    },
    BadProjector {
        measurement: String,
        defect: ProjectorDefect,
    },
    MissingTheta {
        state: String,
        symbol: Symbol,
    },
    MissingDelta {
        state: String,
        symbol: Symbol,
        outcome: Option<usize>,
    },
    UnknownOperator {
        state: String,
        symbol: Symbol,
    },
    UnknownState {
        state: String,
        symbol: Symbol,
    },
    NegativeProbability {
        state: String,
        symbol: Symbol,
        outcome: Option<usize>,
    },
    ProbabilitySum {
        state: String,
        symbol: Symbol,
        outcome: Option<usize>,
        sum: String,
    },
    NotDeterministic {
        state: String,
        symbol: Symbol,
        outcome: Option<usize>,
    },
    HeadEscapes {
        state: String,
        symbol: Symbol,
        outcome: Option<usize>,
    },
    RuleOnHaltingState {
        state: String,
        symbol: Symbol,
    },
    BadRoundMarker {
        state: String,
        reason: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let at = |state: &str, symbol: &Symbol, outcome: &Option<usize>| match outcome {
            Some(o) => format!("({state}, {symbol}, outcome {o})"),
            None => format!("({state}, {symbol})"),
        };
        match self {
            Violation::EmptyRegister => write!(f, "quantum register has dimension 0"),
            Violation::NoStates => write!(f, "machine has no classical states"),
            Violation::HaltSetsOverlap { state } => {
                write!(f, "state {state} is both accepting and rejecting")
            }
            Violation::InitialBasisOutOfRange { q_init, dim } => {
                write!(
                    f,
                    "initial basis state {q_init} out of range for dimension {dim}"
                )
            }
            Violation::MarkerInAlphabet { letter } => write!(f, "letter {letter:?} is reserved"),
            Violation::DuplicateLetter { letter } => write!(f, "letter {letter:?} listed twice"),
            Violation::NonUnitary { operator } => write!(f, "operator {operator} is not unitary"),
            Violation::OperatorDimension {
                operator,
                expected,
                found,
            } => {
                write!(
                    f,
                    "operator {operator} has dimension {found}, expected {expected}"
                )
            }
            Violation::BadProjector {
                measurement,
                defect,
            } => write!(f, "measurement {measurement}: {defect:?}"),
            Violation::MissingTheta { state, symbol } => {
                write!(f, "no action for {}", at(state, symbol, &None))
            }
            Violation::MissingDelta {
                state,
                symbol,
                outcome,
            } => {
                write!(f, "no transition for {}", at(state, symbol, outcome))
            }
            Violation::UnknownOperator { state, symbol } => {
                write!(
                    f,
                    "action for {} names an unknown operator",
                    at(state, symbol, &None)
                )
            }
            Violation::UnknownState { state, symbol } => {
                write!(
                    f,
                    "transition for {} targets an unknown state",
                    at(state, symbol, &None)
                )
            }
            Violation::NegativeProbability {
                state,
                symbol,
                outcome,
            } => {
                write!(
                    f,
                    "negative branch probability at {}",
                    at(state, symbol, outcome)
                )
            }
            Violation::ProbabilitySum {
                state,
                symbol,
                outcome,
                sum,
            } => {
                write!(
                    f,
                    "branch probabilities at {} sum to {sum}",
                    at(state, symbol, outcome)
                )
            }
            Violation::NotDeterministic {
                state,
                symbol,
                outcome,
            } => {
                write!(
                    f,
                    "deterministic transition at {} is not a single certain branch",
                    at(state, symbol, outcome)
                )
            }
            Violation::HeadEscapes {
                state,
                symbol,
                outcome,
            } => {
                write!(
                    f,
                    "transition at {} moves the head off the tape",
                    at(state, symbol, outcome)
                )
            }
            Violation::RuleOnHaltingState { state, symbol } => {
                write!(
                    f,
                    "halting state has a rule at {}",
                    at(state, symbol, &None)
                )
            }
            Violation::BadRoundMarker { state, reason } => {
                write!(f, "round marker {state}: {reason}")
            }
        }
    }
}

/// Every violation of the machine's well-formedness conditions; empty iff
/// the machine is well formed.
pub fn validate_machine<S: Scalar>(m: &Machine<S>) -> Vec<Violation> {
    let mut out = Vec::new();
    let dim = m.quantum_dim();
    if dim == 0 {
        out.push(Violation::EmptyRegister);
    }
    if m.state_count() == 0 {
        out.push(Violation::NoStates);
        return out;
    }
    if m.q_init() >= dim {
        out.push(Violation::InitialBasisOutOfRange {
            q_init: m.q_init(),
            dim,
        });
    }
    for s in m.accept_states().intersection(m.reject_states()) {
        out.push(Violation::HaltSetsOverlap {
            state: m.state_name(*s).to_string(),
        });
    }
    let mut seen = Vec::new();
    for &c in m.alphabet() {
        if seen.contains(&c) {
            out.push(Violation::DuplicateLetter { letter: c });
        }
        seen.push(c);
    }

    for u in m.unitaries() {
        if u.op.dim() != dim {
            out.push(Violation::OperatorDimension {
                operator: u.name.clone(),
                expected: dim,
                found: u.op.dim(),
            });
        } else if !u.op.is_unitary() {
            out.push(Violation::NonUnitary {
                operator: u.name.clone(),
            });
        }
    }
    for meas in m.measurements() {
        if meas.measurement.dim() != dim {
            out.push(Violation::OperatorDimension {
                operator: meas.name.clone(),
                expected: dim,
                found: meas.measurement.dim(),
            });
            continue;
        }
        for defect in meas.measurement.defects() {
            out.push(Violation::BadProjector {
                measurement: meas.name.clone(),
                defect,
            });
        }
    }

    let symbols = m.tape_symbols();
    for s in m.states() {
        let name = m.state_name(s).to_string();
        for &symbol in &symbols {
            let action = m.theta(s, symbol);
            if m.is_halting(s) {
                if action.is_some() {
                    out.push(Violation::RuleOnHaltingState {
                        state: name.clone(),
                        symbol,
                    });
                }
                continue;
            }
            let Some(action) = action else {
                out.push(Violation::MissingTheta {
                    state: name.clone(),
                    symbol,
                });
                continue;
            };
            let outcomes: Vec<Option<usize>> = match action {
                Action::Unitary(i) => {
                    if i >= m.unitaries().len() {
                        out.push(Violation::UnknownOperator {
                            state: name.clone(),
                            symbol,
                        });
                        continue;
                    }
                    vec![None]
                }
                Action::Measure(i) => {
                    if i >= m.measurements().len() {
                        out.push(Violation::UnknownOperator {
                            state: name.clone(),
                            symbol,
                        });
                        continue;
                    }
                    (0..m.measurement(i).outcomes().len()).map(Some).collect()
                }
            };
            for outcome in outcomes {
                let Some(t) = m.delta(s, symbol, outcome) else {
                    out.push(Violation::MissingDelta {
                        state: name.clone(),
                        symbol,
                        outcome,
                    });
                    continue;
                };
                check_transition(m, &name, symbol, outcome, t, &mut out);
            }
        }
    }

    for marker in m.round_markers() {
        let name = m.state_name(marker.state).to_string();
        if marker.state.0 >= m.state_count() {
            out.push(Violation::BadRoundMarker {
                state: name,
                reason: "unknown state".into(),
            });
        } else if m.is_halting(marker.state) {
            out.push(Violation::BadRoundMarker {
                state: name,
                reason: "state is halting".into(),
            });
        } else if marker.basis >= dim {
            out.push(Violation::BadRoundMarker {
                state: name,
                reason: format!("basis {} out of range", marker.basis),
            });
        }
    }
    out
}

fn check_transition<S: Scalar>(
    m: &Machine<S>,
    name: &str,
    symbol: Symbol,
    outcome: Option<usize>,
    t: &super::machine::ClassicalTransition,
    out: &mut Vec<Violation>,
) {
    let state = name.to_string();
    if t.branches.iter().any(|b| b.next.0 >= m.state_count()) {
        out.push(Violation::UnknownState {
            state: state.clone(),
            symbol,
        });
    }
    if t.branches.iter().any(|b| b.probability.is_negative()) {
        out.push(Violation::NegativeProbability {
            state: state.clone(),
            symbol,
            outcome,
        });
    }
    let sum: BigRational = t.total_probability();
    if !sum.is_one() {
        out.push(Violation::ProbabilitySum {
            state: state.clone(),
            symbol,
            outcome,
            sum: format_rational(&sum),
        });
    }
    if t.kind == TransitionKind::Deterministic
        && (t.branches.len() != 1 || !t.branches[0].probability.is_one())
    {
        out.push(Violation::NotDeterministic {
            state: state.clone(),
            symbol,
            outcome,
        });
    }
    let escapes = t.branches.iter().any(|b| {
        (symbol == Symbol::Left && b.head_move == Move::Left)
            || (symbol == Symbol::Right && b.head_move == Move::Right)
    });
    if escapes {
        out.push(Violation::HeadEscapes {
            state,
            symbol,
            outcome,
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::linalg::{Matrix, Measurement, Outcome, UnitaryOp};
    use crate::model::machine::{ClassicalTransition, MachineBuilder};
    use crate::model::scalar::rational;
    use num_complex::Complex64;

    fn trivial(op: UnitaryOp<BigRational>) -> Machine<BigRational> {
        let mut b = MachineBuilder::new("t", op.dim(), &['a']);
        let s = b.state("s");
        let acc = b.state("acc");
        b.accept(acc);
        let u = b.unitary("U", op);
        for sym in b.symbols() {
            b.on_unitary(
                s,
                sym,
                u,
                ClassicalTransition::deterministic(acc, Move::Stay),
            );
        }
        b.build()
    }

    #[test]
    fn identity_machine_is_valid() {
        assert!(validate_machine(&trivial(UnitaryOp::identity(2))).is_empty());
    }

    #[test]
    fn shear_is_reported_non_unitary() {
        let one = rational(1, 1);
        let zero = rational(0, 1);
        let shear =
            UnitaryOp::from_rows(vec![vec![one.clone(), one.clone()], vec![zero, one]]).unwrap();
        let v = validate_machine(&trivial(shear));
        assert_eq!(
            v,
            vec![Violation::NonUnitary {
                operator: "U".into()
            }]
        );
    }

    #[test]
    fn eq4_rotation_is_unitary() {
        let r = |n| rational(n, 5);
        let ua = UnitaryOp::from_rows(vec![
            vec![r(4), r(3), r(0)],
            vec![r(-3), r(4), r(0)],
            vec![r(0), r(0), r(5)],
        ])
        .unwrap();
        assert!(validate_machine(&trivial(ua)).is_empty());
    }

    #[test]
    fn missing_entries_and_bad_sums_are_listed() {
        let mut b = MachineBuilder::<BigRational>::new("t", 1, &['a']);
        let s = b.state("s");
        let r = b.state("r");
        b.reject(r);
        b.go_random(
            s,
            Symbol::Left,
            ClassicalTransition::probabilistic(vec![
                (rational(1, 3), r, Move::Right),
                (rational(1, 3), s, Move::Left),
            ]),
        );
        let v = validate_machine(&b.build());
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::ProbabilitySum { sum, .. } if sum == "2/3")));
        assert!(v.iter().any(|x| matches!(x, Violation::HeadEscapes { .. })));
        assert!(v.iter().any(|x| matches!(
            x,
            Violation::MissingTheta {
                symbol: Symbol::Right,
                ..
            }
        )));
    }

    #[test]
    fn measurement_outcomes_all_need_transitions() {
        let mut b = MachineBuilder::<Complex64>::new("t", 2, &[]);
        let s = b.state("s");
        let a = b.state("a");
        b.accept(a);
        let m = b.measurement("M", Measurement::computational(2));
        b.on_measure(
            s,
            Symbol::Left,
            m,
            vec![ClassicalTransition::deterministic(a, Move::Stay)],
        );
        b.go(s, Symbol::Right, a, Move::Stay);
        let v = validate_machine(&b.build());
        assert_eq!(
            v,
            vec![Violation::MissingDelta {
                state: "s".into(),
                symbol: Symbol::Left,
                outcome: Some(1)
            }]
        );
    }

    #[test]
    fn incomplete_measurement_is_reported() {
        let p = Matrix::outer(&crate::model::StateVector::<BigRational>::basis(2, 0));
        let meas = Measurement::new(vec![Outcome {
            label: "x".into(),
            projector: p,
        }])
        .unwrap();
        let mut b = MachineBuilder::<BigRational>::new("t", 2, &[]);
        let s = b.state("s");
        let a = b.state("a");
        b.accept(a);
        let mi = b.measurement("M", meas);
        for sym in b.symbols() {
            b.on_measure(
                s,
                sym,
                mi,
                vec![ClassicalTransition::deterministic(a, Move::Stay)],
            );
        }
        let v = validate_machine(&b.build());
        assert!(v.contains(&Violation::BadProjector {
            measurement: "M".into(),
            defect: ProjectorDefect::Incomplete
        }));
    }
}
