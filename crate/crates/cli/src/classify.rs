//! `qcfa classify`: verdicts for each record against each language.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use qcfa::engine::{classify_any, Classification, EngineConfig, Evidence, Verdict};
use qcfa::model::AnyMachine;
use qcfa::zoo::{self, CATALOG_VERSION};
use rayon::prelude::*;
use serde::Serialize;

use crate::ingest::SequenceRecord;

/// Where machines come from: the catalog, sized per word length, or one
/// machine loaded from a file.
pub enum Source {
    Catalog(Vec<String>),
    File {
        name: String,
        path: String,
        machine: Box<AnyMachine>,
    },
}

#[derive(Serialize)]
pub struct Report {
    pub records: Vec<RecordReport>,
    pub metadata: Metadata,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volatile: Option<Volatile>,
}

#[derive(Serialize)]
pub struct RecordReport {
    #[serde(flatten)]
    pub record: SequenceRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    pub verdicts: Vec<VerdictEntry>,
}

#[derive(Serialize)]
pub struct VerdictEntry {
    pub language: String,
    /// Coins per acceptance phase of the catalog machine used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coins: Option<u32>,
    #[serde(flatten)]
    pub result: Option<Classification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Serialize)]
pub struct Metadata {
    pub tool_version: &'static str,
    pub catalog_version: &'static str,
    pub languages: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub machine_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_override: Option<f64>,
    pub config: EngineConfig,
}

/// Wall-clock data, excluded from the determinism guarantee.
#[derive(Serialize)]
pub struct Volatile {
    pub total_ms: f64,
    pub record_ms: Vec<f64>,
}

impl Report {
    pub fn undecided(&self) -> bool {
        self.verdicts().any(|v| {
            v.result
                .as_ref()
                .is_some_and(|c| c.verdict == Verdict::Undecided)
        })
    }

    pub fn failed(&self) -> bool {
        self.verdicts().any(|v| v.error.is_some())
    }

    fn verdicts(&self) -> impl Iterator<Item = &VerdictEntry> {
        self.records.iter().flat_map(|r| &r.verdicts)
    }
}

fn epsilon_for(language: &str, explicit: Option<f64>) -> f64 {
    explicit.unwrap_or_else(|| {
        zoo::entry(language)
            .map(|e| e.default_epsilon)
            .unwrap_or(qcfa::engine::DEFAULT_EPSILON)
    })
}

pub fn run(
    records: Vec<SequenceRecord>,
    source: &Source,
    config: &EngineConfig,
    epsilon: Option<f64>,
    timings: bool,
) -> Result<Report> {
    let start = Instant::now();
    let languages: Vec<String> = match source {
        Source::Catalog(l) => l.clone(),
        Source::File { name, .. } => vec![name.clone()],
    };

    // One catalog machine per (language, length).
    let mut wanted: Vec<(String, usize)> = Vec::new();
    if let Source::Catalog(langs) = source {
        for lang in langs {
            zoo::entry(lang)?;
            for r in &records {
                if let Some(m) = &r.mapped {
                    wanted.push((lang.clone(), m.chars().count()));
                }
            }
        }
    }
    wanted.sort();
    wanted.dedup();
    let machines: BTreeMap<(String, usize), (AnyMachine, u32)> = wanted
        .into_par_iter()
        .map(|(lang, n)| {
            let eps = epsilon_for(&lang, epsilon);
            let k = zoo::coins(&lang, n, eps)?;
            let m = zoo::build_fixed(&lang, k)?;
            Ok(((lang, n), (m, k)))
        })
        .collect::<Result<_, zoo::CatalogError>>()?;

    let timed: Vec<(RecordReport, f64)> = records
        .into_par_iter()
        .map(|record| {
            let t = Instant::now();
            let verdicts = match &record.mapped {
                None => Vec::new(),
                Some(w) => languages
                    .iter()
                    .map(|lang| {
                        let n = w.chars().count();
                        let (machine, coins) = match source {
                            Source::Catalog(_) => {
                                let (m, k) = &machines[&(lang.clone(), n)];
                                (m, Some(*k))
                            }
                            Source::File { machine, .. } => (&**machine, None),
                        };
                        let eps = epsilon_for(lang, epsilon);
                        match classify_any(machine, w, eps, config) {
                            Ok(c) => VerdictEntry {
                                language: lang.clone(),
                                coins,
                                result: Some(c),
                                error: None,
                            },
                            Err(e) => VerdictEntry {
                                language: lang.clone(),
                                coins,
                                result: None,
                                error: Some(e.to_string()),
                            },
                        }
                    })
                    .collect(),
            };
            let length = record.mapped.as_ref().map(|m| m.chars().count());
            (
                RecordReport {
                    record,
                    length,
                    verdicts,
                },
                t.elapsed().as_secs_f64() * 1e3,
            )
        })
        .collect();

    let (records, record_ms): (Vec<_>, Vec<_>) = timed.into_iter().unzip();
    let metadata = Metadata {
        tool_version: env!("CARGO_PKG_VERSION"),
        catalog_version: CATALOG_VERSION,
        languages,
        machine_file: match source {
            Source::File { path, .. } => Some(path.clone()),
            Source::Catalog(_) => None,
        },
        epsilon_override: epsilon,
        config: config.clone(),
    };
    let volatile = timings.then(|| Volatile {
        total_ms: start.elapsed().as_secs_f64() * 1e3,
        record_ms,
    });
    Ok(Report {
        records,
        metadata,
        volatile,
    })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    id: &'a str,
    length: Option<usize>,
    language: &'a str,
    verdict: String,
    mode: String,
    epsilon: Option<f64>,
    accept_lower: Option<f64>,
    reject_lower: Option<f64>,
    residual: Option<f64>,
    runs: Option<u64>,
    accepts: Option<u64>,
    rejects: Option<u64>,
    cutoffs: Option<u64>,
    error: Option<&'a str>,
}

fn blank<'a>(r: &'a RecordReport, language: &'a str, error: Option<&'a str>) -> CsvRow<'a> {
    CsvRow {
        id: &r.record.id,
        length: r.length,
        language,
        verdict: String::new(),
        mode: String::new(),
        epsilon: None,
        accept_lower: None,
        reject_lower: None,
        residual: None,
        runs: None,
        accepts: None,
        rejects: None,
        cutoffs: None,
        error,
    }
}

/// One row per (record, language); records that failed to map get one row
/// carrying the error.
pub fn write_csv(report: &Report, path: &Path) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in &report.records {
        if let Some(e) = &r.record.error {
            w.serialize(blank(r, "", Some(e)))?;
        }
        for v in &r.verdicts {
            let mut row = blank(r, &v.language, v.error.as_deref());
            if let Some(c) = &v.result {
                row.verdict = c.verdict.to_string();
                row.mode = c.mode.to_string();
                row.epsilon = Some(c.epsilon);
                match &c.evidence {
                    Evidence::Bounds {
                        accept_lower,
                        reject_lower,
                        residual,
                        ..
                    } => {
                        row.accept_lower = Some(*accept_lower);
                        row.reject_lower = Some(*reject_lower);
                        row.residual = Some(*residual);
                    }
                    Evidence::Counts {
                        runs,
                        accepts,
                        rejects,
                        cutoffs,
                        ..
                    } => {
                        row.runs = Some(*runs);
                        row.accepts = Some(*accepts);
                        row.rejects = Some(*rejects);
                        row.cutoffs = Some(*cutoffs);
                    }
                }
            }
            w.serialize(row)?;
        }
    }
    w.flush()?;
    Ok(())
}
