//! Command-line front end for `nlqm-core`: JSON run configs, seeded runs,
//! JSON/CSV reports and plot data.

pub mod config;
pub mod plot;
pub mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

pub use config::{bundled_example, parse_config, Command, RunConfig, ScenarioSpec, EXAMPLES};
pub use plot::{emit_plot_data, PlotKind};
pub use report::{execute, Report, ReportBody};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const UNEXPECTED_SIGNAL: i32 = 2;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid config at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] nlqm_core::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "nlqm", version, about = "EPR signaling with nonlinear observables")]
pub struct Cli {
    /// Run config (JSON).
    #[arg(long, value_name = "PATH", conflicts_with = "example", required_unless_present_any = ["example", "list_examples"])]
    pub config: Option<PathBuf>,
    /// Bundled example config.
    #[arg(long, value_name = "NAME")]
    pub example: Option<String>,
    /// Print the bundled example names and exit.
    #[arg(long)]
    pub list_examples: bool,
    /// Print the effective config instead of running it.
    #[arg(long)]
    pub print_config: bool,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Sample count of the command: draws per letter, chord pairs, or
    /// channel trials.
    #[arg(long, value_name = "N")]
    pub samples: Option<usize>,
    #[arg(long, value_name = "X")]
    pub tolerance: Option<f64>,
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub workers: usize,
    /// Report destination; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Also emit plot data.
    #[arg(long, value_enum)]
    pub plot: Option<PlotKind>,
    /// Plot data destination; stdout when absent (the report then needs --out).
    #[arg(long, value_name = "PATH")]
    pub plot_out: Option<PathBuf>,
    /// Write Bob's per-sample values of a `simulate` run as CSV.
    #[arg(long, value_name = "PATH")]
    pub dump_samples: Option<PathBuf>,
}

impl Cli {
    /// Loads the config and applies the command-line overrides.
    pub fn effective_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match (&self.config, &self.example) {
            (Some(path), _) => parse_config(&read(path)?)?,
            (None, Some(name)) => bundled_example(name)?,
            (None, None) => return Err(CliError::Usage("one of --config or --example is required".into())),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(n) = self.samples {
            cfg.set_count(n);
        }
        if let Some(t) = self.tolerance {
            cfg.tolerance = Some(t);
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if let Some(format) = self.format {
            cfg.format = Some(format);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &PathBuf, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Runs the command line and returns the exit code. Output goes to the
/// configured files or `stdout`.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let io = |source| CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    if cli.list_examples {
        for name in EXAMPLES {
            writeln!(stdout, "{name}").map_err(io)?;
        }
        return Ok(exit::SUCCESS);
    }
    let cfg = cli.effective_config()?;
    if cli.print_config {
        write!(stdout, "{}", cfg.to_json()).map_err(io)?;
        return Ok(exit::SUCCESS);
    }
    if cli.workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    if cli.plot.is_some() && cli.plot_out.is_none() && cfg.out.is_none() {
        return Err(CliError::Usage(
            "--plot without --plot-out needs --out for the report".into(),
        ));
    }
    if cli.dump_samples.is_some() && cfg.command != Command::Simulate {
        return Err(CliError::Usage("--dump-samples only applies to simulate".into()));
    }

    let report = execute(&cfg, cli.workers)?;
    let text = match cfg.format.unwrap_or(Format::Json) {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    match &cfg.out {
        Some(path) => write(path, &text)?,
        None => write!(stdout, "{text}").map_err(io)?,
    }
    if let Some(kind) = cli.plot {
        let csv = emit_plot_data(&report, kind)?;
        match &cli.plot_out {
            Some(path) => write(path, &csv)?,
            None => write!(stdout, "{csv}").map_err(io)?,
        }
    }
    if let Some(path) = &cli.dump_samples {
        write(path, &report::dump_samples(&cfg, cli.workers)?)?;
    }
    Ok(if report.unexpected_signal(&cfg) {
        exit::UNEXPECTED_SIGNAL
    } else {
        exit::SUCCESS
    })
}
