//! Classical ground truth, independent of the model, engine and zoo code.
//!
//! [`decide`] answers membership by inspecting the word directly.
//! [`hairpin_reject_prob`] recomputes the palindrome machine's per-round
//! rejection with integer matrix products, and
//! [`brute_force_accept_prob`] sums the halting series term by term.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    /// Palindromes over `{a, u, g, c}`.
    Hairpin,
    /// `a^n g^m u^n c^m`, `n, m >= 1`.
    Pseudoknot,
    /// `a^n u^n g^m c^m`, `n, m >= 1`.
    Dumbbell,
    /// `a^n g* u^n c*`, `n >= 1`.
    AuCount,
    /// `a* g^m u* c^m`, `m >= 1`.
    GcCount,
    /// `a^n b^n`, `n >= 1`.
    Equal,
}

impl Language {
    pub const ALL: [Language; 6] = [
        Language::Hairpin,
        Language::Pseudoknot,
        Language::Dumbbell,
        Language::AuCount,
        Language::GcCount,
        Language::Equal,
    ];

    /// The catalog name of the machine recognizing this language.
    pub fn name(self) -> &'static str {
        match self {
            Language::Hairpin => "hairpin",
            Language::Pseudoknot => "pseudoknot",
            Language::Dumbbell => "dumbbell",
            Language::AuCount => "l1",
            Language::GcCount => "l2",
            Language::Equal => "leq",
        }
    }

    pub fn alphabet(self) -> &'static [char] {
        match self {
            Language::Equal => &['a', 'b'],
            _ => &['a', 'u', 'g', 'c'],
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("unknown language {0:?}")]
    UnknownLanguage(String),
    #[error("symbol {symbol:?} is not in the alphabet of {language}")]
    Symbol { language: Language, symbol: char },
    #[error("both per-round probabilities are zero: the round never halts")]
    NonHalting,
    #[error("series did not reach its tail bound within {0} terms")]
    TermCap(u64),
}

impl FromStr for Language {
    type Err = OracleError;

    fn from_str(s: &str) -> Result<Self, OracleError> {
        Language::ALL
            .into_iter()
            .find(|l| l.name() == s.to_ascii_lowercase())
            .ok_or_else(|| OracleError::UnknownLanguage(s.to_string()))
    }
}

/// Block counts of a member of a count-parameterized language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MembershipVerdict {
    pub language: Language,
    pub member: bool,
    /// Present iff `member` and the language is count-parameterized.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// Maximal runs of equal letters.
fn runs(w: &str) -> Vec<(char, usize)> {
    let mut out: Vec<(char, usize)> = Vec::new();
    for c in w.chars() {
        match out.last_mut() {
            Some((d, k)) if *d == c => *k += 1,
            _ => out.push((c, 1)),
        }
    }
    out
}

/// Counts of each letter of `pattern` if `w` is `p0^* p1^* ...`, with the
/// letters marked `true` required to occur.
fn blocks(w: &str, pattern: &[(char, bool)]) -> Option<Vec<usize>> {
    let mut counts = vec![0; pattern.len()];
    let mut at = 0;
    for (c, k) in runs(w) {
        let offset = pattern[at..].iter().position(|(p, _)| *p == c)?;
        at += offset;
        counts[at] = k;
        at += 1;
    }
    pattern
        .iter()
        .zip(&counts)
        .all(|((_, required), k)| !required || *k > 0)
        .then_some(counts)
}

/// Decides membership of `w` in `language`.
pub fn decide(language: Language, w: &str) -> Result<MembershipVerdict, OracleError> {
    if let Some(symbol) = w.chars().find(|c| !language.alphabet().contains(c)) {
        return Err(OracleError::Symbol { language, symbol });
    }
    let counted = |n: Option<usize>, m: Option<usize>| Some(Witness { n, m });
    let witness = match language {
        Language::Hairpin => {
            let member = w.chars().eq(w.chars().rev());
            return Ok(MembershipVerdict {
                language,
                member,
                witness: None,
            });
        }
        Language::Pseudoknot => blocks(w, &[('a', true), ('g', true), ('u', true), ('c', true)])
            .filter(|k| k[0] == k[2] && k[1] == k[3])
            .and_then(|k| counted(Some(k[0]), Some(k[1]))),
        Language::Dumbbell => blocks(w, &[('a', true), ('u', true), ('g', true), ('c', true)])
            .filter(|k| k[0] == k[1] && k[2] == k[3])
            .and_then(|k| counted(Some(k[0]), Some(k[2]))),
        Language::AuCount => blocks(w, &[('a', true), ('g', false), ('u', true), ('c', false)])
            .filter(|k| k[0] == k[2])
            .and_then(|k| counted(Some(k[0]), None)),
        Language::GcCount => blocks(w, &[('a', false), ('g', true), ('u', false), ('c', true)])
            .filter(|k| k[1] == k[3])
            .and_then(|k| counted(None, Some(k[1]))),
        Language::Equal => blocks(w, &[('a', true), ('b', true)])
            .filter(|k| k[0] == k[1])
            .and_then(|k| counted(Some(k[0]), None)),
    };
    Ok(MembershipVerdict {
        language,
        member: witness.is_some(),
        witness,
    })
}

type IntMatrix = [[i64; 3]; 3];

/// `5 U_a` and `5 U_g`, the letter rotations of the palindrome machine.
const A5: IntMatrix = [[4, 3, 0], [-3, 4, 0], [0, 0, 5]];
const G5: IntMatrix = [[4, 0, 3], [0, 5, 0], [-3, 0, 4]];
/// `5 C`, the rotation in the `(q1, q2)` plane relating the `a`/`g`
/// rotations to the `u`/`c` ones.
const C5: IntMatrix = [[5, 0, 0], [0, 4, 3], [0, -3, 4]];

fn mul(x: &IntMatrix, y: &IntMatrix) -> IntMatrix {
    let mut out = [[0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|l| x[i][l] * y[l][j]).sum();
        }
    }
    out
}

fn transpose(x: &IntMatrix) -> IntMatrix {
    let mut out = [[0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = x[j][i];
        }
    }
    out
}

/// Letter rotation as an integer matrix and the power of 5 it is scaled by.
fn scaled_letter(c: char, paired: bool) -> (IntMatrix, u32) {
    match (c, paired) {
        ('a', _) | ('u', true) => (A5, 1),
        ('g', _) | ('c', true) => (G5, 1),
        ('u', false) => (mul(&C5, &C5), 2),
        ('c', false) => (mul(&mul(&C5, &A5), &transpose(&C5)), 3),
        _ => panic!("letter {c:?} is not a nucleotide"),
    }
}

fn reject_prob(w: &str, paired: bool) -> BigRational {
    let letters: Vec<(IntMatrix, u32)> = w.chars().map(|c| scaled_letter(c, paired)).collect();
    let mut v: [BigInt; 3] = [BigInt::one(), BigInt::zero(), BigInt::zero()];
    let mut scale = 0u32;
    let mut apply = |m: &IntMatrix, s: u32| {
        v = std::array::from_fn(|i| (0..3).map(|j| BigInt::from(m[i][j]) * &v[j]).sum());
        scale += s;
    };
    for (m, s) in &letters {
        apply(m, *s);
    }
    for (m, s) in &letters {
        apply(&transpose(m), *s);
    }
    let off: BigInt = &v[1] * &v[1] + &v[2] * &v[2];
    BigRational::new(off, Pow::pow(BigInt::from(5), 2 * scale))
}

/// Per-round rejection probability `|gamma_1|^2 + |gamma_2|^2` of the
/// palindrome machine, with `gamma = W_n^T...W_1^T W_n...W_1 e_0`.
///
/// # Panics
///
/// If `w` contains a letter other than `a`, `u`, `g`, `c`.
pub fn hairpin_reject_prob(w: &str) -> BigRational {
    reject_prob(w, false)
}

/// As [`hairpin_reject_prob`] with `u` acting like `a` and `c` like `g`.
pub fn paired_hairpin_reject_prob(w: &str) -> BigRational {
    reject_prob(w, true)
}

/// Per-round rejection of a rotation machine whose counts differ by `d`.
pub fn rotation_reject_prob(d: i64, angle: f64) -> f64 {
    (d as f64 * angle).sin().powi(2)
}

const TAIL_BOUND: f64 = 1e-15;
const TERM_CAP: u64 = 100_000_000;

/// Sums `sum_i (1-a)^i (1-r)^i r` and `sum_i (1-a)^i (1-r)^(i+1) a` until
/// the remaining weight `(1-a)^T (1-r)^T` drops below `1e-15`.
pub fn brute_force_accept_prob(p_acc: f64, p_rej: f64) -> Result<(f64, f64), OracleError> {
    if p_acc == 0.0 && p_rej == 0.0 {
        return Err(OracleError::NonHalting);
    }
    let renew = (1.0 - p_acc) * (1.0 - p_rej);
    let (mut accept, mut reject) = (Kahan::default(), Kahan::default());
    let mut weight = 1.0;
    let mut terms = 0;
    while weight >= TAIL_BOUND {
        if terms == TERM_CAP {
            return Err(OracleError::TermCap(TERM_CAP));
        }
        reject.add(weight * p_rej);
        accept.add(weight * (1.0 - p_rej) * p_acc);
        weight *= renew;
        terms += 1;
    }
    Ok((accept.sum, reject.sum))
}

#[derive(Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn member(l: Language, w: &str) -> bool {
        decide(l, w).unwrap().member
    }

    #[test]
    fn palindromes() {
        assert!(member(Language::Hairpin, "agga"));
        assert!(member(Language::Hairpin, ""));
        assert!(!member(Language::Hairpin, "ag"));
    }

    #[test]
    fn count_languages_with_witnesses() {
        let v = decide(Language::Pseudoknot, "aaguuc").unwrap();
        assert_eq!(
            v.witness,
            Some(Witness {
                n: Some(2),
                m: Some(1)
            })
        );
        assert!(!member(Language::Dumbbell, "augcc"));
        assert!(member(Language::Dumbbell, "aauugc"));
        assert!(member(Language::GcCount, "aaguc"));
        assert!(!member(Language::AuCount, "aaguc"));
        assert!(member(Language::AuCount, "au"));
        assert!(member(Language::GcCount, "gc"));
        assert!(!member(Language::Pseudoknot, "augc"));
        assert!(member(Language::Equal, "aabb"));
        assert_eq!(decide(Language::Dumbbell, "ua").unwrap().witness, None);
    }

    #[test]
    fn foreign_symbols_are_errors() {
        assert_eq!(
            decide(Language::Hairpin, "agt"),
            Err(OracleError::Symbol {
                language: Language::Hairpin,
                symbol: 't'
            })
        );
        assert!(decide(Language::Equal, "ag").is_err());
        assert_eq!("pseudoknot".parse::<Language>(), Ok(Language::Pseudoknot));
        assert!("stem".parse::<Language>().is_err());
    }

    #[test]
    fn hairpin_products() {
        assert!(hairpin_reject_prob("agga").is_zero());
        assert!(hairpin_reject_prob("").is_zero());
        assert_eq!(
            hairpin_reject_prob("ag"),
            BigRational::new(11169.into(), 390625.into())
        );
        assert!(paired_hairpin_reject_prob("au").is_zero());
        assert!(!hairpin_reject_prob("au").is_zero());
    }

    #[test]
    fn series() {
        assert_eq!(brute_force_accept_prob(1.0, 0.0), Ok((1.0, 0.0)));
        let (a, r) = brute_force_accept_prob(0.05, 0.36).unwrap();
        assert!((a - 0.0816326530612245).abs() < 1e-12 && (r - 0.9183673469387755).abs() < 1e-12);
        assert_eq!(
            brute_force_accept_prob(0.0, 0.0),
            Err(OracleError::NonHalting)
        );
    }
}
