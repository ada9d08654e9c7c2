//! The dumbbell machine: two count-equality phases on adjacent segments.

use num_complex::Complex64;

use crate::model::{Machine, MachineBuilder};

use super::hairpin::NUCLEOTIDES;
use super::leq::RotationParams;
use super::parts::{count_round, shape_guard, Boundary, CountRound, Pass};
use super::shape::BlockShape;

pub const DUMBBELL_SHAPE: &str = "a+u+g+c+";

/// `{a^n u^n g^m c^m | n, m >= 1}`.
///
/// A deterministic pass checks `a+u+g+c+`. The first phase compares the
/// `a` and `u` counts, using the first `g` as its right boundary; its walk
/// runs between the left marker and that `g`. On passing, control hands
/// over to the second phase, which compares the `g` and `c` counts and
/// walks between the last `u` and the right marker. Only the second phase
/// accepts.
pub fn build_dumbbell(first: RotationParams, second: RotationParams) -> Machine<Complex64> {
    let mut b = MachineBuilder::new("dumbbell", 2, &NUCLEOTIDES);
    let accept = b.state("accept");
    let reject = b.state("reject");
    b.accept(accept);
    b.reject(reject);
    let gc = count_round(
        &mut b,
        &CountRound {
            prefix: "gc",
            angle: second.angle,
            up: &['g'],
            down: &['c'],
            skip: &['a', 'u'],
            stop: Boundary::Right,
            walk_region: &['g', 'c'],
            walk_left: Boundary::Letter('u'),
            walk_right: Boundary::Right,
            coins: second.k,
            pass: Pass::Accept(accept),
            reject,
        },
    );
    let au = count_round(
        &mut b,
        &CountRound {
            prefix: "au",
            angle: first.angle,
            up: &['a'],
            down: &['u'],
            skip: &[],
            stop: Boundary::Letter('g'),
            walk_region: &['a', 'u'],
            walk_left: Boundary::Left,
            walk_right: Boundary::Letter('g'),
            coins: first.k,
            pass: Pass::Marker(gc),
            reject,
        },
    );
    let entry = shape_guard(
        &mut b,
        "shape",
        &BlockShape::parse(DUMBBELL_SHAPE).expect("shape"),
        au,
        reject,
    );
    b.initial(entry, 0);
    b.fill_unset(reject);
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{closed_form, round_stats};
    use crate::model::validate_machine;

    #[test]
    fn validates() {
        let m = build_dumbbell(RotationParams::default(), RotationParams::default());
        assert_eq!(validate_machine(&m), vec![]);
    }

    #[test]
    fn phases_walk_their_own_segments() {
        let m = build_dumbbell(RotationParams::with_k(1), RotationParams::with_k(1));
        let au = round_stats(&m, "aauuggcc", m.state_id("au.round").unwrap()).unwrap();
        assert!((au.p_acc - 0.5 / 5.0).abs() < 1e-12);
        assert!(au.p_rej.abs() < 1e-12);
        let gc = round_stats(&m, "aauugc", m.state_id("gc.round").unwrap()).unwrap();
        assert!((gc.p_acc - 0.5 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn members_accepted_and_mismatches_rejected() {
        let m = build_dumbbell(RotationParams::default(), RotationParams::default());
        for w in ["augc", "aauugc"] {
            let c = closed_form(&m, w, 100_000).unwrap();
            assert!((c.accept - 1.0).abs() < 1e-9, "{w}");
        }
        let c = closed_form(&m, "augcc", 100_000).unwrap();
        assert!(c.reject > 0.5);
        let c = closed_form(&m, "agcu", 100_000).unwrap();
        assert_eq!(c.reject, 1.0);
    }
}
