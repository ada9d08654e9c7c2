//! The palindrome machine over `{a, u, g, c}`.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::model::{
    rational, ClassicalTransition, Machine, MachineBuilder, Measurement, Move, Symbol, UnitaryOp,
};

use super::parts::{acceptance_walk, Boundary, Pass, Walk};

pub const NUCLEOTIDES: [char; 4] = ['a', 'u', 'g', 'c'];

/// How the four letters are assigned rotations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LetterEncoding {
    /// Four rotations generating a free group, so the forward/inverse
    /// product is the identity only for palindromes.
    #[default]
    Distinct,
    /// `U_u = U_a` and `U_c = U_g`. Recognizes palindromes of the word
    /// projected onto the classes `{a, u}` and `{g, c}` only.
    Paired,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HairpinParams {
    /// Fair coins flipped after the walk reaches the right marker.
    pub k: u32,
    pub encoding: LetterEncoding,
}

impl Default for HairpinParams {
    fn default() -> Self {
        HairpinParams {
            k: 5,
            encoding: LetterEncoding::Distinct,
        }
    }
}

impl HairpinParams {
    pub fn with_k(k: u32) -> Self {
        HairpinParams {
            k,
            ..Self::default()
        }
    }
}

fn fifths(rows: [[i64; 3]; 3]) -> UnitaryOp<BigRational> {
    UnitaryOp::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|&x| rational(x, 5)).collect())
            .collect(),
    )
    .expect("3x3 rows")
}

/// Rotation by `atan(3/4)` in the `(q0, q1)` plane.
pub fn u_a() -> UnitaryOp<BigRational> {
    fifths([[4, 3, 0], [-3, 4, 0], [0, 0, 5]])
}

/// Rotation by `atan(3/4)` in the `(q0, q2)` plane.
pub fn u_g() -> UnitaryOp<BigRational> {
    fifths([[4, 0, 3], [0, 5, 0], [-3, 0, 4]])
}

/// Rotation by `atan(3/4)` in the `(q1, q2)` plane.
fn conjugator() -> UnitaryOp<BigRational> {
    fifths([[5, 0, 0], [0, 4, 3], [0, -3, 4]])
}

/// `C^2` for the distinct encoding, `U_a` for the paired one.
pub fn u_u(encoding: LetterEncoding) -> UnitaryOp<BigRational> {
    match encoding {
        LetterEncoding::Distinct => conjugator().compose(&conjugator()).expect("same dimension"),
        LetterEncoding::Paired => u_a(),
    }
}

/// `C U_a C^T` for the distinct encoding, `U_g` for the paired one.
pub fn u_c(encoding: LetterEncoding) -> UnitaryOp<BigRational> {
    match encoding {
        LetterEncoding::Distinct => {
            let c = conjugator();
            c.inverse()
                .compose(&u_a())
                .and_then(|x| x.compose(&c))
                .expect("same dimension")
        }
        LetterEncoding::Paired => u_g(),
    }
}

/// The operator applied for `letter` on the forward pass.
pub fn letter_unitary(letter: char, encoding: LetterEncoding) -> Option<UnitaryOp<BigRational>> {
    match letter {
        'a' => Some(u_a()),
        'u' => Some(u_u(encoding)),
        'g' => Some(u_g()),
        'c' => Some(u_c(encoding)),
        _ => None,
    }
}

/// Builds the palindrome machine.
///
/// Each round starts on the left marker with the register in `|q0>`. A
/// forward pass applies the letter rotations, the head returns, and an
/// inverse pass applies their transposes in the same left-to-right order.
/// The register is then measured; any outcome other than `|q0>` rejects.
/// Otherwise a random walk from cell 1 that reaches the right marker
/// (probability `1/(n+1)`) followed by `k` heads accepts, and anything
/// else starts a new round. Panics if `k` is zero.
pub fn build_hairpin(params: HairpinParams) -> Machine<BigRational> {
    assert!(params.k >= 1, "k must be at least 1");
    let mut b = MachineBuilder::new("hairpin", 3, &NUCLEOTIDES);
    let start = b.state("start");
    let fwd = b.state("fwd");
    let back = b.state("back");
    let inv = b.state("inv");
    let accept = b.state("accept");
    let reject = b.state("reject");
    b.accept(accept);
    b.reject(reject);
    b.initial(start, 0);
    b.round_marker(start, 0, 0);

    b.go(start, Symbol::Left, fwd, Move::Right);
    for c in NUCLEOTIDES {
        let u = letter_unitary(c, params.encoding).expect("nucleotide");
        let name = format!("U_{c}");
        let forward = b.unitary(&name, u.clone());
        let inverse = b.unitary(&format!("{name}^T"), u.inverse());
        let sym = Symbol::Letter(c);
        b.on_unitary(
            fwd,
            sym,
            forward,
            ClassicalTransition::deterministic(fwd, Move::Right),
        );
        b.go(back, sym, back, Move::Left);
        b.on_unitary(
            inv,
            sym,
            inverse,
            ClassicalTransition::deterministic(inv, Move::Right),
        );
    }
    b.go(fwd, Symbol::Right, back, Move::Left);
    b.go(back, Symbol::Left, inv, Move::Right);

    let walk = acceptance_walk(
        &mut b,
        &Walk {
            prefix: "accept_phase",
            region: &NUCLEOTIDES,
            left: Boundary::Left,
            right: Boundary::Right,
            coins: params.k,
            marker: start,
            pass: Pass::Accept(accept),
        },
    );
    let z = b.measurement("Z", Measurement::computational(3));
    b.on_measure(
        inv,
        Symbol::Right,
        z,
        vec![
            ClassicalTransition::deterministic(walk, Move::Stay),
            ClassicalTransition::deterministic(reject, Move::Stay),
            ClassicalTransition::deterministic(reject, Move::Stay),
        ],
    );
    b.fill_unset(reject);
    b.build()
}
