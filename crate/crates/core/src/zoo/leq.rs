//! Count-equality machines on a single qubit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{Machine, MachineBuilder};

use super::parts::{count_round, shape_guard, Boundary, CountRound, Pass};
use super::shape::BlockShape;

/// Default rotation per counted letter, `sqrt(2) pi`. Irrational over `pi`,
/// so `sin^2(d * angle) > 0` for every nonzero count difference `d`.
pub const DEFAULT_ANGLE: f64 = std::f64::consts::SQRT_2 * std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationParams {
    pub angle: f64,
    /// Fair coins flipped after the walk reaches its right boundary.
    pub k: u32,
}

impl Default for RotationParams {
    fn default() -> Self {
        RotationParams {
            angle: DEFAULT_ANGLE,
            k: 5,
        }
    }
}

impl RotationParams {
    pub fn with_k(k: u32) -> Self {
        RotationParams {
            k,
            ..Self::default()
        }
    }
}

/// Builds a machine accepting the words that match `shape` and contain as
/// many `up` letters as `down` letters.
///
/// A deterministic pass first rejects words outside `shape`. Each round
/// then rotates the qubit by `+angle` per `up` letter and `-angle` per
/// `down` letter, ignores `skip` letters, and measures: outcome `|q1>`
/// rejects, with probability `sin^2((#up - #down) angle)`. Survivors run
/// the walk-and-coins acceptance phase over the whole word, passing with
/// probability `2^-k / (n+1)`.
///
/// # Panics
///
/// If the letter sets overlap, if `shape` uses a letter outside them, or if
/// `k` is zero.
pub fn build_leq(
    params: RotationParams,
    up: &[char],
    down: &[char],
    skip: &[char],
    shape: &BlockShape,
) -> Machine<Complex64> {
    let mut alphabet: Vec<char> = up.iter().chain(down).chain(skip).copied().collect();
    alphabet.sort_unstable();
    let n = alphabet.len();
    alphabet.dedup();
    assert_eq!(
        n,
        alphabet.len(),
        "up, down and skip letters must be disjoint"
    );
    assert!(
        shape.letters().iter().all(|c| alphabet.contains(c)),
        "shape uses a letter outside the alphabet"
    );

    let mut b = MachineBuilder::new("leq", 2, &alphabet);
    let accept = b.state("accept");
    let reject = b.state("reject");
    b.accept(accept);
    b.reject(reject);
    let round = count_round(
        &mut b,
        &CountRound {
            prefix: "eq",
            angle: params.angle,
            up,
            down,
            skip,
            stop: Boundary::Right,
            walk_region: &alphabet,
            walk_left: Boundary::Left,
            walk_right: Boundary::Right,
            coins: params.k,
            pass: Pass::Accept(accept),
            reject,
        },
    );
    let entry = shape_guard(&mut b, "shape", shape, round, reject);
    b.initial(entry, 0);
    b.fill_unset(reject);
    b.build()
}

fn renamed(mut m: Machine<Complex64>, name: &str) -> Machine<Complex64> {
    m.name = name.to_string();
    m
}

/// Equal numbers of `a` and `b` in `a+b+`.
pub fn build_equal(params: RotationParams) -> Machine<Complex64> {
    build_leq(
        params,
        &['a'],
        &['b'],
        &[],
        &BlockShape::parse("a+b+").expect("shape"),
    )
}

/// `{a^n g* u^n c* | n >= 1}`.
pub fn build_l1(params: RotationParams) -> Machine<Complex64> {
    let shape = BlockShape::parse("a+g*u+c*").expect("shape");
    renamed(build_leq(params, &['a'], &['u'], &['g', 'c'], &shape), "l1")
}

/// `{a* g^m u* c^m | m >= 1}`.
pub fn build_l2(params: RotationParams) -> Machine<Complex64> {
    let shape = BlockShape::parse("a*g+u*c+").expect("shape");
    renamed(build_leq(params, &['g'], &['c'], &['a', 'u'], &shape), "l2")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{closed_form, round_stats};
    use crate::model::validate_machine;

    fn round(m: &Machine<Complex64>, w: &str) -> (f64, f64) {
        let marker = m.state_id("eq.round").unwrap();
        let rs = round_stats(m, w, marker).unwrap();
        (rs.p_acc, rs.p_rej)
    }

    #[test]
    fn builders_validate() {
        for m in [
            build_l1(RotationParams::default()),
            build_l2(RotationParams::default()),
            build_equal(RotationParams::default()),
        ] {
            assert_eq!(validate_machine(&m), vec![], "{}", m.name());
        }
    }

    #[test]
    fn balanced_round_never_rejects() {
        let m = build_l1(RotationParams::with_k(1));
        let (acc, rej) = round(&m, "agu");
        assert!(rej.abs() < 1e-12);
        assert!((acc - 0.5 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn unbalanced_round_rejects_by_sine_squared() {
        let m = build_l1(RotationParams::default());
        let (_, rej) = round(&m, "aau");
        assert!((rej - DEFAULT_ANGLE.sin().powi(2)).abs() < 1e-12);
        assert!((rej - 0.929108).abs() < 1e-6);
    }

    #[test]
    fn shape_violation_rejects_outright() {
        let m = build_l1(RotationParams::default());
        let c = closed_form(&m, "ua", 10_000).unwrap();
        assert_eq!((c.accept, c.reject), (0.0, 1.0));
    }
}
