//! Sequential composition of two machines recognizing the intersection of
//! their languages, and the pseudoknot machine built from it.

use num_complex::Complex64;

use crate::model::{
    Action, ClassicalTransition, Machine, MachineBuilder, Matrix, Measurement, Move, Outcome,
    Scalar, StateId, StateVector, Symbol, UnitaryOp,
};

use super::leq::{build_l1, build_l2, RotationParams};
use super::parts::shape_guard;
use super::shape::BlockShape;

#[derive(Clone, Debug)]
pub struct IntersectionSpec<S> {
    pub m1: Machine<S>,
    pub m2: Machine<S>,
    pub epsilon1: f64,
    pub epsilon2: f64,
}

impl<S> IntersectionSpec<S> {
    /// `e1 + e2 - e1 e2`: a non-member is rejected by at least one of the
    /// two machines with this error.
    pub fn combined_error(&self) -> f64 {
        combined_error(self.epsilon1, self.epsilon2)
    }
}

pub fn combined_error(e1: f64, e2: f64) -> f64 {
    e1 + e2 - e1 * e2
}

/// Copies `m` into `b` with state names prefixed and operators embedded at
/// `offset`. Returns the state map. Measurement outcomes for the added
/// `outside` block go to `trap`.
fn embed_machine<S: Scalar>(
    b: &mut MachineBuilder<S>,
    m: &Machine<S>,
    prefix: &str,
    offset: usize,
    trap: StateId,
) -> Vec<StateId> {
    let total = b.quantum_dim();
    let states: Vec<StateId> = m
        .states()
        .map(|s| b.state(&format!("{prefix}{}", m.state_name(s))))
        .collect();
    let unitaries: Vec<usize> = m
        .unitaries()
        .iter()
        .map(|u| b.unitary(&format!("{prefix}{}", u.name), u.op.embed(offset, total)))
        .collect();
    let measurements: Vec<(usize, usize)> = m
        .measurements()
        .iter()
        .map(|x| {
            (
                b.measurement(
                    &format!("{prefix}{}", x.name),
                    x.measurement.embed(offset, total),
                ),
                x.measurement.outcomes().len(),
            )
        })
        .collect();
    for (&(s, sym), action) in m.theta_entries() {
        let mapped = match *action {
            Action::Unitary(i) => Action::Unitary(unitaries[i]),
            Action::Measure(i) => {
                let (j, outcomes) = measurements[i];
                if total > m.quantum_dim() {
                    b.set_delta(
                        states[s.0],
                        sym,
                        Some(outcomes),
                        ClassicalTransition::deterministic(trap, Move::Stay),
                    );
                }
                Action::Measure(j)
            }
        };
        b.set_theta(states[s.0], sym, mapped);
    }
    for (key, t) in m.delta_entries() {
        let branches = t
            .branches
            .iter()
            .map(|br| (br.probability.clone(), states[br.next.0], br.head_move))
            .collect();
        let mut mapped = ClassicalTransition::probabilistic(branches);
        mapped.kind = t.kind;
        b.set_delta(states[key.state.0], key.symbol, key.outcome, mapped);
    }
    for r in m.round_markers() {
        b.round_marker(states[r.state.0], r.head, offset + r.basis);
    }
    states
}

/// Composes `m1` and `m2` so that the result accepts exactly when `m1`
/// accepts and then `m2` accepts.
///
/// The register is the direct sum of both registers. `m1` runs on its own
/// block. Where `m1` would accept, the head returns to the left marker,
/// the register is measured in `m1`'s basis, and a swap moves the outcome
/// basis state to `m2`'s initial state. `m2` then runs on its block from
/// its initial classical state. Rejecting states of both machines reject;
/// only `m2`'s accepting states accept.
pub fn intersect<S: Scalar>(spec: &IntersectionSpec<S>) -> Machine<S> {
    let (m1, m2) = (&spec.m1, &spec.m2);
    let (d1, d2) = (m1.quantum_dim(), m2.quantum_dim());
    let total = d1 + d2;
    let mut alphabet = m1.alphabet().to_vec();
    alphabet.extend(m2.alphabet().iter().filter(|c| !m1.alphabet().contains(c)));

    let mut b = MachineBuilder::new(format!("{}&{}", m1.name(), m2.name()), total, &alphabet);
    let trap = b.state("trap");
    b.reject(trap);
    let s1 = embed_machine(&mut b, m1, "m1.", 0, trap);
    let s2 = embed_machine(&mut b, m2, "m2.", d1, trap);

    for &r in m1.reject_states() {
        b.reject(s1[r.0]);
    }
    for &r in m2.reject_states() {
        b.reject(s2[r.0]);
    }
    for &a in m2.accept_states() {
        b.accept(s2[a.0]);
    }

    let mut outcomes: Vec<Outcome<S>> = (0..d1)
        .map(|i| Outcome {
            label: format!("m1.q{i}"),
            projector: Matrix::outer(&StateVector::basis(total, i)),
        })
        .collect();
    outcomes.push(Outcome {
        label: "m2".into(),
        projector: Matrix::identity(d2).embed(d1, total, S::zero_amp()),
    });
    let bridge = b.measurement(
        "bridge",
        Measurement::new(outcomes).expect("square projectors"),
    );
    let target = d1 + m2.q_init();
    let zs: Vec<StateId> = (0..d1)
        .map(|i| {
            let z = b.state(&format!("z{i}"));
            let swap = UnitaryOp::new(Matrix::from_fn(total, |r, c| {
                let image = if c == i {
                    target
                } else if c == target {
                    i
                } else {
                    c
                };
                if r == image {
                    S::one_amp()
                } else {
                    S::zero_amp()
                }
            }));
            let u = b.unitary(&format!("swap(q{i},q{target})"), swap);
            b.on_unitary(
                z,
                Symbol::Left,
                u,
                ClassicalTransition::deterministic(s2[m2.s_init().0], Move::Stay),
            );
            z
        })
        .collect();
    let mut bridge_moves: Vec<ClassicalTransition> = zs
        .iter()
        .map(|&z| ClassicalTransition::deterministic(z, Move::Stay))
        .collect();
    bridge_moves.push(ClassicalTransition::deterministic(trap, Move::Stay));

    let symbols = b.symbols();
    for &a in m1.accept_states() {
        let s = s1[a.0];
        for &sym in &symbols {
            if sym == Symbol::Left {
                b.on_measure(s, sym, bridge, bridge_moves.clone());
            } else {
                b.go(s, sym, s, Move::Left);
            }
        }
    }
    b.initial(s1[m1.s_init().0], m1.q_init());
    b.fill_unset(trap);
    b.build()
}

/// Runs a deterministic check of `shape` before `m`, rejecting words that
/// do not match it.
pub fn prepend_guard<S: Scalar>(m: Machine<S>, prefix: &str, shape: &BlockShape) -> Machine<S> {
    let entry = m.s_init();
    let q = m.q_init();
    let mut b = MachineBuilder::from_machine(m);
    let reject = b.state(&format!("{prefix}.reject"));
    b.reject(reject);
    let start = shape_guard(&mut b, prefix, shape, entry, reject);
    b.initial(start, q);
    b.fill_unset(reject);
    b.build()
}

/// Shape checked before the two count machines run.
pub const PSEUDOKNOT_SHAPE: &str = "a+g+u+c+";

/// `{a^n g^m u^n c^m | n, m >= 1}` as the intersection of the `a`/`u` and
/// `g`/`c` count machines, behind an `a+g+u+c+` shape check.
pub fn build_pseudoknot(l1: RotationParams, l2: RotationParams) -> Machine<Complex64> {
    let spec = IntersectionSpec {
        m1: build_l1(l1),
        m2: build_l2(l2),
        epsilon1: 0.1,
        epsilon2: 0.1,
    };
    let mut m = prepend_guard(
        intersect(&spec),
        "shape",
        &BlockShape::parse(PSEUDOKNOT_SHAPE).expect("shape"),
    );
    m.name = "pseudoknot".into();
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::closed_form;
    use crate::model::validate_machine;

    #[test]
    fn error_composition() {
        assert_eq!(combined_error(0.0, 0.0), 0.0);
        assert!((combined_error(0.1, 0.1) - 0.19).abs() < 1e-15);
    }

    #[test]
    fn pseudoknot_validates() {
        let m = build_pseudoknot(RotationParams::default(), RotationParams::default());
        assert_eq!(validate_machine(&m), vec![]);
        assert_eq!(m.quantum_dim(), 4);
        assert_eq!(m.round_markers().len(), 2);
    }

    #[test]
    fn pseudoknot_members_are_accepted_surely() {
        let m = build_pseudoknot(RotationParams::default(), RotationParams::default());
        for w in ["aguc", "aaguuc", "aggucc"] {
            let c = closed_form(&m, w, 100_000).unwrap();
            assert!((c.accept - 1.0).abs() < 1e-9, "{w}: {}", c.accept);
        }
    }

    #[test]
    fn pseudoknot_rejects_count_mismatch() {
        let m = build_pseudoknot(RotationParams::default(), RotationParams::default());
        let c = closed_form(&m, "agucc", 100_000).unwrap();
        assert!(c.reject > 0.0);
        let c = closed_form(&m, "augc", 100_000).unwrap();
        assert_eq!(c.reject, 1.0);
    }
}
