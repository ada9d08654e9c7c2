use super::linalg::{measure, StateVector};
use super::machine::{Action, ClassicalTransition, Machine, StateId};
use super::scalar::{Scalar, Weight};
use super::tape::Tape;
use super::ModelError;
use num_traits::{One, Zero};

/// One successor configuration of a step, with its probability.
#[derive(Clone, Debug, PartialEq)]
pub struct Successor<S: Scalar> {
    pub probability: S::Prob,
    pub state: StateId,
    pub head: usize,
    pub vector: StateVector<S>,
}

/// All successors of the configuration `(state, head, v)` on `tape`.
///
/// A unitary action yields one successor per classical branch; a
/// measurement yields the product of its non-zero outcomes with the
/// branches keyed by each outcome.
pub fn step<S: Scalar>(
    m: &Machine<S>,
    state: StateId,
    head: usize,
    v: &StateVector<S>,
    tape: &Tape,
) -> Result<Vec<Successor<S>>, ModelError> {
    if m.is_halting(state) {
        return Err(ModelError::HaltingState(m.state_name(state).to_string()));
    }
    if head > tape.last() {
        return Err(ModelError::HeadOutOfBounds {
            head: head as i64,
            last: tape.last(),
        });
    }
    let symbol = tape.symbol_at(head);
    let missing = |outcome| ModelError::MissingTransition {
        state: m.state_name(state).to_string(),
        symbol,
        outcome,
    };
    let action = m.theta(state, symbol).ok_or_else(|| missing(None))?;
    let mut out = Vec::new();
    match action {
        Action::Unitary(i) => {
            let next = m.unitary(i).matrix().apply(v)?;
            let t = m.delta(state, symbol, None).ok_or_else(|| missing(None))?;
            push_branches(&mut out, t, S::Prob::one(), &next, head, tape)?;
        }
        Action::Measure(i) => {
            for o in measure(m.measurement(i), v)? {
                let t = m
                    .delta(state, symbol, Some(o.index))
                    .ok_or_else(|| missing(Some(o.index)))?;
                push_branches(&mut out, t, o.probability, &o.post, head, tape)?;
            }
        }
    }
    Ok(out)
}

fn push_branches<S: Scalar>(
    out: &mut Vec<Successor<S>>,
    t: &ClassicalTransition,
    scale: S::Prob,
    v: &StateVector<S>,
    head: usize,
    tape: &Tape,
) -> Result<(), ModelError> {
    for b in &t.branches {
        let next_head = head as i64 + b.head_move.offset();
        if !tape.contains(next_head) {
            return Err(ModelError::HeadOutOfBounds {
                head: next_head,
                last: tape.last(),
            });
        }
        let p = scale.clone() * <S::Prob as Weight>::from_rational(&b.probability);
        if p == S::Prob::zero() {
            continue;
        }
        out.push(Successor {
            probability: p,
            state: b.next,
            head: next_head as usize,
            vector: v.clone(),
        });
    }
    Ok(())
}
