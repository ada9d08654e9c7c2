//! `qcfa`: classify RNA sequences against structure languages recognized by
//! two-way quantum finite automata with classical states.

mod bench;
mod classify;
mod ingest;
mod settings;
mod verify;

use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use qcfa::model::AnyMachine;
use qcfa::oracles::Language;
use qcfa::zoo;

use crate::classify::Source;
use crate::ingest::Format;
use crate::settings::EngineArgs;

const EXIT_UNDECIDED: u8 = 1;
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "qcfa", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify each input sequence against the selected languages and
    /// print a JSON report.
    Classify {
        /// Input file; standard input when absent.
        input: Option<PathBuf>,
        /// Input format; detected from a leading '>' when absent.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Comma-separated catalog languages.
        #[arg(long, value_delimiter = ',')]
        lang: Vec<String>,
        /// Also write a flattened CSV report.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Classify with a serialized machine instead of the catalog.
        #[arg(long, conflicts_with = "lang")]
        machine_file: Option<PathBuf>,
        /// Add wall-clock timings in a `volatile` block.
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Compare machine verdicts with the classical oracles on every word up
    /// to a length.
    Verify {
        /// Comma-separated languages.
        #[arg(long, value_delimiter = ',', required = true)]
        lang: Vec<Language>,
        #[arg(long)]
        max_len: usize,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Expected rounds to halt and solve time per word length.
    Bench {
        #[arg(long)]
        machine: Language,
        /// Comma-separated word lengths.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        lengths: Vec<usize>,
        /// Coins per acceptance phase instead of sizing from epsilon.
        #[arg(long)]
        k: Option<u32>,
        /// Also write the table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Print a catalog machine in the TOML machine format.
    Export {
        #[arg(long)]
        machine: String,
        /// Word length the machine is sized for.
        #[arg(long, default_value_t = 0, conflicts_with = "k")]
        length: usize,
        /// Coins per acceptance phase.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
}

fn check_epsilon(epsilon: Option<f64>) -> Result<()> {
    match epsilon {
        Some(e) if !(e > 0.0 && e < 0.5) => bail!("epsilon must lie in (0, 0.5), got {e}"),
        _ => Ok(()),
    }
}

fn read_input(path: Option<&PathBuf>) -> Result<String> {
    let mut text = String::new();
    match path {
        Some(p) => {
            text =
                std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        }
        None => {
            io::stdin()
                .read_to_string(&mut text)
                .context("reading standard input")?;
        }
    }
    Ok(text)
}

fn detect_format(text: &str) -> Format {
    if text.trim_start().starts_with('>') {
        Format::Fasta
    } else {
        Format::Plain
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Classify {
            input,
            format,
            lang,
            csv,
            machine_file,
            timings,
            engine,
        } => {
            let settings = engine.resolve()?;
            check_epsilon(settings.epsilon)?;
            let text = read_input(input.as_ref())?;
            let format = format
                .or(settings.file.format)
                .unwrap_or_else(|| detect_format(&text));
            let records = ingest::ingest(text.as_bytes(), format)?;
            let source = match machine_file {
                Some(path) => {
                    let toml = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    let machine = AnyMachine::from_toml(&toml)
                        .with_context(|| format!("loading {}", path.display()))?;
                    Source::File {
                        name: machine.name().to_string(),
                        path: path.display().to_string(),
                        machine: Box::new(machine),
                    }
                }
                None => {
                    let langs = if !lang.is_empty() {
                        lang
                    } else if let Some(l) = settings.file.lang.clone() {
                        l
                    } else {
                        ["hairpin", "pseudoknot", "dumbbell"]
                            .map(String::from)
                            .to_vec()
                    };
                    for l in &langs {
                        zoo::entry(l)?;
                    }
                    Source::Catalog(langs)
                }
            };
            let report = classify::run(
                records,
                &source,
                &settings.engine,
                settings.epsilon,
                timings,
            )?;
            if let Some(path) = csv {
                classify::write_csv(&report, &path)?;
            }
            let mut out = io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
            Ok(if report.failed() {
                EXIT_ERROR
            } else if report.undecided() {
                EXIT_UNDECIDED
            } else {
                0
            })
        }
        Command::Verify {
            lang,
            max_len,
            engine,
        } => {
            let settings = engine.resolve()?;
            check_epsilon(settings.epsilon)?;
            let mut mismatches = 0;
            for l in lang {
                let rows = verify::verify(l, max_len, settings.epsilon, &settings.engine)?;
                mismatches += rows.iter().map(|r| r.mismatches).sum::<usize>();
                print!("{}", verify::render(l, &rows));
            }
            Ok(if mismatches == 0 { 0 } else { EXIT_UNDECIDED })
        }
        Command::Bench {
            machine,
            lengths,
            k,
            csv,
            engine,
        } => {
            let settings = engine.resolve()?;
            check_epsilon(settings.epsilon)?;
            let rows = bench::bench(machine, &lengths, k, settings.epsilon, &settings.engine)?;
            if let Some(path) = csv {
                bench::write_csv(&rows, &path)?;
            }
            print!("{}", bench::render(&rows));
            Ok(0)
        }
        Command::Export {
            machine,
            length,
            k,
            epsilon,
        } => {
            check_epsilon(epsilon)?;
            let built = match k {
                Some(k) => zoo::build_fixed(&machine, k)?,
                None => {
                    let eps = epsilon.unwrap_or(zoo::entry(&machine)?.default_epsilon);
                    zoo::build(&machine, length, eps)?
                }
            };
            print!("{}", built.to_toml());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
