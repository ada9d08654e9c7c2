//! `qcfa bench`: expected rounds to halt and solve time per word length.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use qcfa::engine::{closed_form, ClosedForm, EngineConfig};
use qcfa::model::{AnyMachine, Weight};
use qcfa::oracles::{decide, Language};
use qcfa::zoo;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub machine: String,
    pub length: usize,
    pub kind: &'static str,
    pub word: String,
    pub coins: u32,
    pub accept: f64,
    pub reject: f64,
    /// Per-round statistics of the first phase.
    pub p_acc: f64,
    pub p_rej: f64,
    pub expected_rounds: f64,
    pub configurations: usize,
    pub wall_ms: f64,
}

/// Blocks `(letter, count)` of a member of each count language.
fn member_blocks(language: Language, n: usize) -> Option<Vec<(char, usize)>> {
    let two =
        |x: char, y: char| (n >= 2 && n.is_multiple_of(2)).then(|| vec![(x, n / 2), (y, n / 2)]);
    let four = |order: [char; 4], crossed: bool| {
        if n < 4 || !n.is_multiple_of(2) {
            return None;
        }
        let outer = (n / 2) / 2;
        let inner = n / 2 - outer;
        let counts = if crossed {
            [outer, inner, outer, inner]
        } else {
            [outer, outer, inner, inner]
        };
        Some(order.into_iter().zip(counts).collect())
    };
    match language {
        Language::Hairpin => None,
        Language::Pseudoknot => four(['a', 'g', 'u', 'c'], true),
        Language::Dumbbell => four(['a', 'u', 'g', 'c'], false),
        Language::AuCount => two('a', 'u'),
        Language::GcCount => two('g', 'c'),
        Language::Equal => two('a', 'b'),
    }
}

fn spell(blocks: &[(char, usize)]) -> String {
    blocks
        .iter()
        .flat_map(|&(c, k)| std::iter::repeat_n(c, k))
        .collect()
}

/// A member and a non-member of length `n`, when they exist. Non-members
/// keep the block shape where possible so the quantum phase is exercised.
pub fn sample_words(language: Language, n: usize) -> (Option<String>, Option<String>) {
    let (member, near) = match language {
        Language::Hairpin => {
            let half: String = "augc".chars().cycle().take(n / 2).collect();
            let middle = if n % 2 == 1 { "a" } else { "" };
            let m = format!("{half}{middle}{}", half.chars().rev().collect::<String>());
            let mut flipped: Vec<char> = m.chars().collect();
            if let Some(last) = flipped.last_mut() {
                *last = if *last == 'g' { 'c' } else { 'g' };
            }
            (Some(m), Some(flipped.into_iter().collect::<String>()))
        }
        _ => match member_blocks(language, n) {
            Some(mut blocks) => {
                let m = spell(&blocks);
                let len = blocks.len();
                let near = (blocks[len - 1].1 >= 2).then(|| {
                    blocks[len - 1].1 -= 1;
                    blocks[len - 2].1 += 1;
                    spell(&blocks)
                });
                (Some(m), near)
            }
            None => (None, None),
        },
    };
    let fallback = (n > 0).then(|| "a".repeat(n));
    let nonmember = near
        .or(fallback)
        .filter(|w| !decide(language, w).map(|v| v.member).unwrap_or(true));
    let member = member.filter(|w| decide(language, w).map(|v| v.member).unwrap_or(false));
    (member, nonmember)
}

pub fn bench(
    language: Language,
    lengths: &[usize],
    k: Option<u32>,
    epsilon: Option<f64>,
    config: &EngineConfig,
) -> Result<Vec<BenchRow>> {
    let name = language.name();
    let eps = epsilon.unwrap_or(zoo::entry(name)?.default_epsilon);
    let mut rows = Vec::new();
    for &n in lengths {
        let coins = match k {
            Some(k) => k,
            None => zoo::coins(name, n, eps)?,
        };
        let machine = zoo::build_fixed(name, coins)?;
        let (member, nonmember) = sample_words(language, n);
        for (kind, word) in [("member", member), ("nonmember", nonmember)] {
            let Some(word) = word else { continue };
            let t = Instant::now();
            let row = match &machine {
                AnyMachine::Rational(m) => summarize(closed_form(m, &word, config.node_cap)?),
                AnyMachine::Float(m) => summarize(closed_form(m, &word, config.node_cap)?),
            };
            let wall_ms = t.elapsed().as_secs_f64() * 1e3;
            rows.push(BenchRow {
                machine: name.to_string(),
                length: n,
                kind,
                word,
                coins,
                accept: row.0,
                reject: row.1,
                p_acc: row.2,
                p_rej: row.3,
                expected_rounds: row.4,
                configurations: row.5,
                wall_ms,
            });
        }
    }
    Ok(rows)
}

fn summarize<W: Weight>(c: ClosedForm<W>) -> (f64, f64, f64, f64, f64, usize) {
    let (p_acc, p_rej) = c.rounds.first().map_or((f64::NAN, f64::NAN), |(_, _, rs)| {
        (rs.p_acc.to_f64(), rs.p_rej.to_f64())
    });
    (
        c.accept.to_f64(),
        c.reject.to_f64(),
        p_acc,
        p_rej,
        c.expected_rounds(),
        c.explored,
    )
}

pub fn render(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<11}{:>7}  {:<10}{:<14}{:>6}{:>12}{:>12}{:>16}{:>10}",
        "machine", "length", "kind", "word", "coins", "accept", "reject", "expected rounds", "ms"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<11}{:>7}  {:<10}{:<14}{:>6}{:>12.6}{:>12.6}{:>16.4e}{:>10.2}",
            r.machine,
            r.length,
            r.kind,
            r.word,
            r.coins,
            r.accept,
            r.reject,
            r.expected_rounds,
            r.wall_ms
        );
    }
    out
}

pub fn write_csv(rows: &[BenchRow], path: &Path) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn palindrome_rounds_double_per_coin() {
        let rows = bench(
            Language::Hairpin,
            &[4],
            Some(5),
            None,
            &EngineConfig::default(),
        )
        .unwrap();
        let member = rows.iter().find(|r| r.kind == "member").unwrap();
        assert_eq!(member.word, "auua");
        assert!((member.expected_rounds - 32.0 * 5.0).abs() < 1e-9);
        assert_eq!(member.accept, 1.0);
    }

    #[test]
    fn empty_lengths_give_empty_table() {
        assert!(bench(
            Language::Dumbbell,
            &[],
            None,
            None,
            &EngineConfig::default()
        )
        .unwrap()
        .is_empty());
    }

    #[test]
    fn sample_words_respect_the_oracle() {
        for l in Language::ALL {
            for n in 0..9 {
                let (m, x) = sample_words(l, n);
                if let Some(m) = m {
                    assert!(decide(l, &m).unwrap().member, "{l} {m}");
                }
                if let Some(x) = x {
                    assert!(!decide(l, &x).unwrap().member, "{l} {x}");
                }
            }
        }
        assert_eq!(
            sample_words(Language::Pseudoknot, 8).0.as_deref(),
            Some("aagguucc")
        );
    }
}
