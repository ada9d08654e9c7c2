//! Named machines with coin counts chosen for a word length and error
//! budget.

use thiserror::Error;

use crate::model::AnyMachine;

use super::dumbbell::build_dumbbell;
use super::hairpin::{build_hairpin, HairpinParams};
use super::intersect::build_pseudoknot;
use super::leq::{build_equal, build_l1, build_l2, RotationParams, DEFAULT_ANGLE};

/// Bumped whenever a catalog machine changes behavior.
pub const CATALOG_VERSION: &str = "1";

/// Smallest coin count any catalog machine uses.
pub const MIN_COINS: u32 = 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub alphabet: &'static [char],
    pub default_epsilon: f64,
}

const RNA: &[char] = &['a', 'u', 'g', 'c'];

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "hairpin",
        description: "palindromes over {a,u,g,c}",
        alphabet: RNA,
        default_epsilon: 0.1,
    },
    CatalogEntry {
        name: "leq",
        description: "a^n b^n, n >= 1",
        alphabet: &['a', 'b'],
        default_epsilon: 0.1,
    },
    CatalogEntry {
        name: "l1",
        description: "a^n g* u^n c*, n >= 1",
        alphabet: RNA,
        default_epsilon: 0.1,
    },
    CatalogEntry {
        name: "l2",
        description: "a* g^m u* c^m, m >= 1",
        alphabet: RNA,
        default_epsilon: 0.1,
    },
    CatalogEntry {
        name: "pseudoknot",
        description: "a^n g^m u^n c^m, n, m >= 1",
        alphabet: RNA,
        default_epsilon: 0.19,
    },
    CatalogEntry {
        name: "dumbbell",
        description: "a^n u^n g^m c^m, n, m >= 1",
        alphabet: RNA,
        default_epsilon: 0.1,
    },
];

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown machine {0:?}; known: hairpin, leq, l1, l2, pseudoknot, dumbbell")]
    Unknown(String),
    #[error("epsilon must lie in (0, 1), got {0}")]
    Epsilon(f64),
}

pub fn entry(name: &str) -> Result<&'static CatalogEntry, CatalogError> {
    CATALOG
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| CatalogError::Unknown(name.to_string()))
}

/// Coins for the palindrome machine on words of length `n`: a non-member
/// rejects with probability at least `1 - epsilon` once
/// `2^-k <= epsilon 25^-n`, given a per-round rejection of at least `25^-n`.
pub fn hairpin_k(n: usize, epsilon: f64) -> u32 {
    let bits = n as f64 * 25f64.log2() + (1.0 / epsilon).log2();
    MIN_COINS.max(bits.ceil() as u32)
}

/// Smallest per-round rejection of a rotation machine on words of length
/// at most `n`: `min sin^2(d angle)` over count differences `1..=n`.
pub fn min_rotation_reject(n: usize, angle: f64) -> f64 {
    (1..=n)
        .map(|d| (d as f64 * angle).sin().powi(2))
        .fold(1.0, f64::min)
}

/// Coins for a rotation machine on words of length `n`, chosen so that
/// `2^-k <= epsilon s / (1 - epsilon)` with `s` the smallest per-round
/// rejection.
pub fn rotation_k(n: usize, epsilon: f64) -> u32 {
    let s = min_rotation_reject(n, DEFAULT_ANGLE);
    let bits = ((1.0 - epsilon) / (epsilon * s)).log2();
    MIN_COINS.max(bits.ceil() as u32)
}

/// Error budget of each half of an intersection whose combined error is
/// `epsilon`: `1 - sqrt(1 - epsilon)`.
pub fn sub_epsilon(epsilon: f64) -> f64 {
    1.0 - (1.0 - epsilon).sqrt()
}

/// Coins per acceptance phase that [`build`] uses for words of length `n`.
pub fn coins(name: &str, n: usize, epsilon: f64) -> Result<u32, CatalogError> {
    entry(name)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(CatalogError::Epsilon(epsilon));
    }
    Ok(match name {
        "hairpin" => hairpin_k(n, epsilon),
        "pseudoknot" => rotation_k(n, sub_epsilon(epsilon)),
        _ => rotation_k(n, epsilon),
    })
}

/// Builds the catalog machine `name` for words of length `n` with error
/// budget `epsilon`.
pub fn build(name: &str, n: usize, epsilon: f64) -> Result<AnyMachine, CatalogError> {
    build_fixed(name, coins(name, n, epsilon)?)
}

/// Builds the catalog machine `name` with `k` coins in every acceptance
/// phase, whatever the word length.
pub fn build_fixed(name: &str, k: u32) -> Result<AnyMachine, CatalogError> {
    entry(name)?;
    let rot = RotationParams::with_k(k);
    Ok(match name {
        "hairpin" => build_hairpin(HairpinParams::with_k(k)).into(),
        "leq" => build_equal(rot).into(),
        "l1" => build_l1(rot).into(),
        "l2" => build_l2(rot).into(),
        "pseudoknot" => build_pseudoknot(rot, rot).into(),
        "dumbbell" => build_dumbbell(rot, rot).into(),
        _ => unreachable!("checked by entry"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_builds() {
        for e in CATALOG {
            let m = build(e.name, 4, e.default_epsilon).unwrap();
            assert_eq!(m.alphabet().len(), e.alphabet.len(), "{}", e.name);
        }
        assert!(matches!(
            build("stem", 4, 0.1),
            Err(CatalogError::Unknown(_))
        ));
        assert!(matches!(
            build("hairpin", 4, 0.0),
            Err(CatalogError::Epsilon(_))
        ));
    }

    #[test]
    fn coin_counts() {
        assert_eq!(hairpin_k(0, 0.1), 5);
        assert_eq!(hairpin_k(2, 0.1), 13);
        assert!(rotation_k(8, 0.1) >= MIN_COINS);
        assert_eq!(min_rotation_reject(0, DEFAULT_ANGLE), 1.0);
        assert!((sub_epsilon(0.19) - 0.1).abs() < 1e-12);
    }
}
