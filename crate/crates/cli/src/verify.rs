//! `qcfa verify`: exhaustive comparison of machine verdicts with the
//! classical oracles.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use num_traits::{ToPrimitive, Zero};
use qcfa::engine::{classify_any, round_stats, EngineConfig, Verdict};
use qcfa::model::AnyMachine;
use qcfa::oracles::{decide, Language};
use qcfa::zoo;
use rayon::prelude::*;

/// Longest words `verify` enumerates for the palindrome machine, whose
/// rejection probabilities shrink like `25^-n`.
pub const HAIRPIN_MAX_LEN: usize = 6;
pub const DEFAULT_MAX_LEN: usize = 8;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LengthRow {
    pub length: usize,
    pub words: usize,
    pub members: usize,
    pub mismatches: usize,
    pub undecided: usize,
    /// Smallest `p_rej 25^n` over non-members (palindrome machine only).
    pub min_margin: Option<f64>,
    pub examples: Vec<String>,
}

pub fn words(alphabet: &[char], n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..n {
        out = out
            .iter()
            .flat_map(|w| alphabet.iter().map(move |c| format!("{w}{c}")))
            .collect();
    }
    out
}

pub fn max_len(language: Language) -> usize {
    if language == Language::Hairpin {
        HAIRPIN_MAX_LEN
    } else {
        DEFAULT_MAX_LEN
    }
}

pub fn verify(
    language: Language,
    max: usize,
    epsilon: Option<f64>,
    config: &EngineConfig,
) -> Result<Vec<LengthRow>> {
    if max > max_len(language) {
        bail!(
            "--max-len {max} exceeds the limit of {} for {language}",
            max_len(language)
        );
    }
    let name = language.name();
    let eps = epsilon.unwrap_or(zoo::entry(name)?.default_epsilon);
    (0..=max)
        .map(|n| {
            let machine = zoo::build(name, n, eps)?;
            let results: Vec<(String, bool, Verdict, Option<f64>)> = words(language.alphabet(), n)
                .into_par_iter()
                .map(|w| {
                    let member = decide(language, &w)?.member;
                    let verdict = classify_any(&machine, &w, eps, config)?.verdict;
                    let margin = match (&machine, member) {
                        (AnyMachine::Rational(m), false) => {
                            let p = round_stats(m, &w, m.s_init())?.p_rej;
                            Some(if p.is_zero() {
                                0.0
                            } else {
                                p.to_f64().unwrap_or(f64::NAN) * 25f64.powi(n as i32)
                            })
                        }
                        _ => None,
                    };
                    Ok((w, member, verdict, margin))
                })
                .collect::<Result<_>>()?;
            let mut row = LengthRow {
                length: n,
                words: results.len(),
                ..Default::default()
            };
            for (w, member, verdict, margin) in results {
                row.members += usize::from(member);
                let agrees = match verdict {
                    Verdict::Member => member,
                    Verdict::NonMember => !member,
                    Verdict::Undecided => false,
                };
                if verdict == Verdict::Undecided {
                    row.undecided += 1;
                }
                if !agrees {
                    row.mismatches += 1;
                    if row.examples.len() < 5 {
                        row.examples
                            .push(format!("{w:?}: {verdict}, oracle says member={member}"));
                    }
                }
                if let Some(m) = margin {
                    row.min_margin = Some(row.min_margin.map_or(m, |x: f64| x.min(m)));
                }
            }
            Ok(row)
        })
        .collect()
}

pub fn render(language: Language, rows: &[LengthRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12}{:>7}{:>8}{:>9}{:>12}{:>11}{:>16}",
        "language", "length", "words", "members", "mismatches", "undecided", "min p_rej*25^n"
    );
    for r in rows {
        let margin = r.min_margin.map_or("-".to_string(), |m| format!("{m:.4}"));
        let _ = writeln!(
            out,
            "{:<12}{:>7}{:>8}{:>9}{:>12}{:>11}{:>16}",
            language.name(),
            r.length,
            r.words,
            r.members,
            r.mismatches,
            r.undecided,
            margin
        );
        for e in &r.examples {
            let _ = writeln!(out, "  mismatch {e}");
        }
    }
    let total: usize = rows.iter().map(|r| r.mismatches).sum();
    let words: usize = rows.iter().map(|r| r.words).sum();
    let _ = writeln!(
        out,
        "{}: {total} mismatches over {words} words",
        language.name()
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_sizes() {
        assert_eq!(
            (0..=3)
                .map(|n| words(&['a', 'u', 'g', 'c'], n).len())
                .sum::<usize>(),
            85
        );
        assert_eq!(words(&['a'], 0), vec![String::new()]);
    }

    #[test]
    fn empty_word_only() {
        let rows = verify(Language::Pseudoknot, 0, None, &EngineConfig::default()).unwrap();
        assert_eq!((rows.len(), rows[0].words, rows[0].mismatches), (1, 1, 0));
    }

    #[test]
    fn hairpin_limit() {
        assert!(verify(Language::Hairpin, 7, None, &EngineConfig::default()).is_err());
    }
}
