//! Engine settings from flags, the environment and an optional TOML file.
//! Flags win over `QCFA_SEED`, which wins over the file.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use qcfa::engine::{EngineConfig, EngineMode};
use qcfa::model::Backend;
use serde::Deserialize;

use crate::ingest::Format;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Exact,
    Closure,
    Montecarlo,
}

impl From<EngineArg> for EngineMode {
    fn from(e: EngineArg) -> Self {
        match e {
            EngineArg::Exact => EngineMode::Exact,
            EngineArg::Closure => EngineMode::Closure,
            EngineArg::Montecarlo => EngineMode::MonteCarlo,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Rational,
    Float,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Rational => Backend::Rational,
            BackendArg::Float => Backend::Float,
        }
    }
}

#[derive(Clone, Debug, Default, Args)]
pub struct EngineArgs {
    /// Error budget; defaults to 0.19 for pseudoknot and 0.1 otherwise.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Master seed for Monte Carlo runs.
    #[arg(long, env = "QCFA_SEED")]
    pub seed: Option<u64>,
    /// Evaluator: stepwise evolution, round closure, or sampling.
    #[arg(long, value_enum)]
    pub engine: Option<EngineArg>,
    /// Evaluate rational machines in floating point.
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
    /// Monte Carlo runs per word.
    #[arg(long)]
    pub runs: Option<u64>,
    /// Steps per evolution or per Monte Carlo run.
    #[arg(long)]
    pub step_cap: Option<u64>,
    /// Live mass at which stepwise evolution stops.
    #[arg(long)]
    pub residual: Option<f64>,
    /// Largest configuration graph to build.
    #[arg(long)]
    pub node_cap: Option<usize>,
    /// Accumulate stepwise evolution in exact rationals (rational machines).
    #[arg(long)]
    pub exact_weights: bool,
    /// TOML file with defaults for any of these settings.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Keys accepted in the `--config` file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub epsilon: Option<f64>,
    pub seed: Option<u64>,
    pub engine: Option<EngineMode>,
    pub backend: Option<Backend>,
    pub runs: Option<u64>,
    pub step_cap: Option<u64>,
    pub residual_bound: Option<f64>,
    pub node_cap: Option<usize>,
    pub exact_weights: Option<bool>,
    pub lang: Option<Vec<String>>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Resolved settings: the engine configuration plus an explicit epsilon,
/// if one was given.
#[derive(Clone, Debug)]
pub struct Settings {
    pub engine: EngineConfig,
    pub epsilon: Option<f64>,
    pub file: FileConfig,
}

impl EngineArgs {
    pub fn resolve(&self) -> Result<Settings> {
        let file = match &self.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let d = EngineConfig::default();
        let engine = EngineConfig {
            residual_bound: self
                .residual
                .or(file.residual_bound)
                .unwrap_or(d.residual_bound),
            step_cap: self.step_cap.or(file.step_cap).unwrap_or(d.step_cap),
            epsilon: self.epsilon.or(file.epsilon).unwrap_or(d.epsilon),
            seed: self.seed.or(file.seed).unwrap_or(d.seed),
            runs: self.runs.or(file.runs).unwrap_or(d.runs),
            mode: self
                .engine
                .map(EngineMode::from)
                .or(file.engine)
                .unwrap_or(d.mode),
            backend: self.backend.map(Backend::from).or(file.backend),
            node_cap: self.node_cap.or(file.node_cap).unwrap_or(d.node_cap),
            exact_weights: self.exact_weights || file.exact_weights.unwrap_or(false),
        };
        Ok(Settings {
            engine,
            epsilon: self.epsilon.or(file.epsilon),
            file,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn flags_override_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "seed = 9\nruns = 50\nengine = \"montecarlo\"").unwrap();
        let args = EngineArgs {
            seed: Some(3),
            config: Some(f.path().into()),
            ..Default::default()
        };
        let s = args.resolve().unwrap();
        assert_eq!(
            (s.engine.seed, s.engine.runs, s.engine.mode),
            (3, 50, EngineMode::MonteCarlo)
        );
        assert_eq!(s.epsilon, None);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "sead = 9").unwrap();
        let args = EngineArgs {
            config: Some(f.path().into()),
            ..Default::default()
        };
        assert!(args.resolve().is_err());
    }
}
