//! Reading sequences from plain or FASTA text.

use std::io::BufRead;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// One sequence per line, identified by its line number.
    Plain,
    /// `>id description` headers followed by sequence lines.
    Fasta,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SequenceRecord {
    pub id: String,
    pub raw: String,
    /// Lowercase sequence over `{a, u, g, c}`; absent when mapping failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mapped: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SequenceRecord {
    pub fn new(id: impl Into<String>, raw: impl Into<String>) -> Self {
        let raw = raw.into();
        let mut record = SequenceRecord {
            id: id.into(),
            raw,
            mapped: None,
            warnings: Vec::new(),
            error: None,
        };
        match map_sequence(&record.raw) {
            Ok((mapped, thymine)) => {
                if thymine {
                    record.warnings.push("thymine mapped to uracil".into());
                }
                record.mapped = Some(mapped);
            }
            Err(e) => record.error = Some(e),
        }
        record
    }
}

/// Strips whitespace, lowercases and maps `t` to `u`. Returns the mapped
/// text and whether any `t` was seen.
pub fn map_sequence(raw: &str) -> Result<(String, bool), String> {
    let mut out = String::with_capacity(raw.len());
    let mut thymine = false;
    for (i, c) in raw.chars().filter(|c| !c.is_whitespace()).enumerate() {
        match c.to_ascii_lowercase() {
            x @ ('a' | 'u' | 'g' | 'c') => out.push(x),
            't' => {
                thymine = true;
                out.push('u');
            }
            _ => return Err(format!("invalid symbol {c:?} at position {}", i + 1)),
        }
    }
    Ok((out, thymine))
}

pub fn ingest(input: impl BufRead, format: Format) -> Result<Vec<SequenceRecord>> {
    let lines: Vec<String> = input
        .lines()
        .collect::<Result<_, _>>()
        .context("reading input")?;
    match format {
        Format::Plain => Ok(lines
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| SequenceRecord::new((i + 1).to_string(), l.trim()))
            .collect()),
        Format::Fasta => {
            let mut records = Vec::new();
            let mut current: Option<(String, String)> = None;
            for (i, line) in lines.iter().enumerate() {
                let line = line.trim();
                if let Some(header) = line.strip_prefix('>') {
                    if let Some((id, seq)) = current.take() {
                        records.push(SequenceRecord::new(id, seq));
                    }
                    let id = header.split_whitespace().next().unwrap_or("").to_string();
                    current = Some((id, String::new()));
                } else if line.is_empty() || line.starts_with(';') {
                    continue;
                } else if let Some((_, seq)) = current.as_mut() {
                    seq.push_str(line);
                } else {
                    bail!(
                        "line {}: sequence data before the first FASTA header",
                        i + 1
                    );
                }
            }
            if let Some((id, seq)) = current {
                records.push(SequenceRecord::new(id, seq));
            }
            Ok(records)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fasta_record() {
        let r = ingest(">s1 hairpin\nAG\nGA\n".as_bytes(), Format::Fasta).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(
            (r[0].id.as_str(), r[0].mapped.as_deref()),
            ("s1", Some("agga"))
        );
    }

    #[test]
    fn plain_line_with_thymine_and_spaces() {
        let r = ingest("AGT C\n".as_bytes(), Format::Plain).unwrap();
        assert_eq!(r[0].mapped.as_deref(), Some("aguc"));
        assert_eq!(r[0].warnings, vec!["thymine mapped to uracil".to_string()]);
    }

    #[test]
    fn invalid_symbol_annotates_record_only() {
        let r = ingest("AGXA\nAGGA\n".as_bytes(), Format::Plain).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(
            r[0].error.as_deref(),
            Some("invalid symbol 'X' at position 3")
        );
        assert_eq!(r[1].mapped.as_deref(), Some("agga"));
        assert_eq!(r[1].id, "2");
    }

    #[test]
    fn empty_input() {
        assert!(ingest("".as_bytes(), Format::Fasta).unwrap().is_empty());
        assert!(ingest("ACGU\n".as_bytes(), Format::Fasta).is_err());
    }
}
