//! Building blocks shared by the zoo machines: the shape check, the
//! random-walk acceptance phase and the rotation counting round.

use num_complex::Complex64;

use crate::model::{
    ClassicalTransition, MachineBuilder, Measurement, Move, Scalar, StateId, Symbol, UnitaryOp,
};

use super::shape::BlockShape;

/// A boundary of a sub-phase: one of the end markers, or a letter that the
/// control treats as one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Boundary {
    Left,
    Right,
    Letter(char),
}

impl Boundary {
    pub fn symbol(self) -> Symbol {
        match self {
            Boundary::Left => Symbol::Left,
            Boundary::Right => Symbol::Right,
            Boundary::Letter(c) => Symbol::Letter(c),
        }
    }
}

/// Where a successful acceptance phase sends control.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Pass {
    /// Halt accepting.
    Accept(StateId),
    /// Return the head to the left marker and enter this round marker.
    Marker(StateId),
}

pub(crate) struct Walk<'a> {
    pub prefix: &'a str,
    /// Letters the walk moves across.
    pub region: &'a [char],
    pub left: Boundary,
    pub right: Boundary,
    pub coins: u32,
    /// Round marker to renew at; it is entered at the left marker.
    pub marker: StateId,
    pub pass: Pass,
}

/// Adds the acceptance phase and returns its entry state.
///
/// The entry state moves the head left to `left` and steps right onto the
/// first region cell. From there a fair random walk runs until it hits a
/// boundary. Hitting `left` renews the round; hitting `right` is followed
/// by `coins` fair coin flips, and only all-heads passes. From cell 1 of a
/// region of length `L` the walk reaches `right` with probability
/// `1/(L+1)`, so a round passes with probability `2^-coins / (L+1)`.
pub(crate) fn acceptance_walk<S: Scalar>(b: &mut MachineBuilder<S>, w: &Walk<'_>) -> StateId {
    assert!(w.coins >= 1, "at least one coin flip is needed");
    let p = w.prefix;
    let rewind = b.state(&format!("{p}.walk_rewind"));
    let walk = b.state(&format!("{p}.walk"));
    let renew = b.state(&format!("{p}.renew"));
    let coins: Vec<StateId> = (2..=w.coins)
        .map(|i| b.state(&format!("{p}.coin{i}")))
        .collect();

    let left = w.left.symbol();
    let right = w.right.symbol();
    for sym in b.symbols() {
        if sym == left {
            b.go(rewind, sym, walk, Move::Right);
        } else if sym != Symbol::Left {
            b.go(rewind, sym, rewind, Move::Left);
        }
    }

    for &c in w.region {
        b.go_random(
            walk,
            Symbol::Letter(c),
            ClassicalTransition::coin((walk, Move::Left), (walk, Move::Right)),
        );
    }
    b.go(walk, left, renew, Move::Stay);

    let heads_target = match w.pass {
        Pass::Accept(acc) => acc,
        Pass::Marker(_) => b.state(&format!("{p}.pass")),
    };
    // Flip i of k happens in coin state i (the walk itself does flip 1).
    let flippers: Vec<StateId> = std::iter::once(walk).chain(coins.iter().copied()).collect();
    for (i, &s) in flippers.iter().enumerate() {
        let heads = flippers.get(i + 1).copied().unwrap_or(heads_target);
        b.go_random(
            s,
            right,
            ClassicalTransition::coin((heads, Move::Stay), (renew, Move::Stay)),
        );
    }

    rewind_then(b, renew, w.marker);
    if let Pass::Marker(next) = w.pass {
        rewind_then(b, heads_target, next);
    }
    rewind
}

/// `state` moves left until the left marker, then enters `next` there.
pub(crate) fn rewind_then<S: Scalar>(b: &mut MachineBuilder<S>, state: StateId, next: StateId) {
    for sym in b.symbols() {
        if sym == Symbol::Left {
            b.go(state, sym, next, Move::Stay);
        } else {
            b.go(state, sym, state, Move::Left);
        }
    }
}

/// Adds a single left-to-right pass that rejects unless the input matches
/// `shape`, then rewinds and enters `on_pass` at the left marker. Returns
/// the entry state, which expects the head on the left marker.
pub(crate) fn shape_guard<S: Scalar>(
    b: &mut MachineBuilder<S>,
    prefix: &str,
    shape: &BlockShape,
    on_pass: StateId,
    reject: StateId,
) -> StateId {
    let start = b.state(&format!("{prefix}.start"));
    let states: Vec<StateId> = (0..shape.state_count())
        .map(|i| b.state(&format!("{prefix}.q{i}")))
        .collect();
    let rewind = b.state(&format!("{prefix}.rewind"));
    b.go(start, Symbol::Left, states[0], Move::Right);
    let letters: Vec<char> = b
        .symbols()
        .into_iter()
        .filter_map(|s| {
            if let Symbol::Letter(c) = s {
                Some(c)
            } else {
                None
            }
        })
        .collect();
    for (q, &s) in states.iter().enumerate() {
        for &c in &letters {
            match shape.next(q, c) {
                Some(n) => b.go(s, Symbol::Letter(c), states[n], Move::Right),
                None => b.go(s, Symbol::Letter(c), reject, Move::Stay),
            }
        }
        if shape.accepting(q) {
            b.go(s, Symbol::Right, rewind, Move::Left);
        } else {
            b.go(s, Symbol::Right, reject, Move::Stay);
        }
    }
    rewind_then(b, rewind, on_pass);
    start
}

/// Rotation of the two-dimensional register by `angle`.
pub(crate) fn rotation(angle: f64) -> UnitaryOp<Complex64> {
    let (s, c) = angle.sin_cos();
    let re = |x: f64| Complex64::new(x, 0.0);
    UnitaryOp::from_rows(vec![vec![re(c), re(-s)], vec![re(s), re(c)]]).expect("2x2 rows")
}

pub(crate) struct CountRound<'a> {
    pub prefix: &'a str,
    pub angle: f64,
    pub up: &'a [char],
    pub down: &'a [char],
    pub skip: &'a [char],
    /// Where the count stops and the register is measured.
    pub stop: Boundary,
    pub walk_region: &'a [char],
    pub walk_left: Boundary,
    pub walk_right: Boundary,
    pub coins: u32,
    pub pass: Pass,
    pub reject: StateId,
}

/// Adds one equality round on a qubit and declares its marker, which is
/// returned. From the left marker the head sweeps right, rotating by
/// `+angle` on `up` letters and `-angle` on `down` letters, up to `stop`.
/// Measuring there rejects with probability `sin^2((#up - #down) angle)`;
/// otherwise the acceptance walk follows.
pub(crate) fn count_round(b: &mut MachineBuilder<Complex64>, r: &CountRound<'_>) -> StateId {
    let p = r.prefix;
    let marker = b.state(&format!("{p}.round"));
    let count = b.state(&format!("{p}.count"));
    let plus = b.unitary(&format!("R(+{})", r.angle), rotation(r.angle));
    let minus = b.unitary(&format!("R(-{})", r.angle), rotation(-r.angle));
    let z = b.measurement("Z", Measurement::computational(2));
    let id = b.identity();

    b.go(marker, Symbol::Left, count, Move::Right);
    for &c in r.up {
        b.on_unitary(
            count,
            Symbol::Letter(c),
            plus,
            ClassicalTransition::deterministic(count, Move::Right),
        );
    }
    for &c in r.down {
        b.on_unitary(
            count,
            Symbol::Letter(c),
            minus,
            ClassicalTransition::deterministic(count, Move::Right),
        );
    }
    for &c in r.skip {
        b.on_unitary(
            count,
            Symbol::Letter(c),
            id,
            ClassicalTransition::deterministic(count, Move::Right),
        );
    }
    let walk = acceptance_walk(
        b,
        &Walk {
            prefix: p,
            region: r.walk_region,
            left: r.walk_left,
            right: r.walk_right,
            coins: r.coins,
            marker,
            pass: r.pass,
        },
    );
    b.on_measure(
        count,
        r.stop.symbol(),
        z,
        vec![
            ClassicalTransition::deterministic(walk, Move::Stay),
            ClassicalTransition::deterministic(r.reject, Move::Stay),
        ],
    );
    b.round_marker(marker, 0, 0);
    marker
}
