use std::path::PathBuf;

use nlqm_core::nosignal::GleasonConfig;
use nlqm_core::observables::ObservableDescriptor;
use nlqm_core::signaling::bell_scenario;
use nlqm_core::{EntangledState, FunctionalObservable, PureState, Scenario};
use serde::{Deserialize, Serialize};

use crate::{CliError, Format};

pub const EXAMPLES: [&str; 4] = ["bell-power", "bell-quadratic", "d3-gleason-pass", "d3-gleason-fail"];

const DEFAULT_SAMPLES: usize = 100_000;
const DEFAULT_CHORDS: usize = 1000;
const DEFAULT_BLOCK: usize = 1000;
const DEFAULT_TRIALS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Exact `f[b] - f[b']`.
    Gap,
    /// Exact gap plus Monte-Carlo detection.
    Simulate,
    /// Bit error rate of the block-coded channel.
    Capacity,
    /// Chord scan of a qubit observable.
    Affinity,
    /// Subspace-measure certifier, dimension 3 and up.
    Gleason,
    /// Whichever certifier fits the dimension.
    Certify,
}

impl Command {
    fn needs_scenario(self) -> bool {
        matches!(self, Self::Gap | Self::Simulate | Self::Capacity)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ScenarioSpec {
    /// Bell pair, computational versus Hadamard basis on Alice's side.
    Bell { observable: ObservableDescriptor },
    Explicit {
        state: EntangledState,
        basis_a: Vec<PureState>,
        basis_a_prime: Vec<PureState>,
        observable: ObservableDescriptor,
    },
}

impl ScenarioSpec {
    pub fn build(&self) -> nlqm_core::Result<Scenario> {
        match self {
            Self::Bell { observable } => bell_scenario(observable.build()?),
            Self::Explicit {
                state,
                basis_a,
                basis_a_prime,
                observable,
            } => Scenario::new(state.clone(), basis_a.clone(), basis_a_prime.clone(), observable.build()?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<ObservableDescriptor>,
    /// Draws per letter for `simulate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Random chord pairs for `affinity` and two-dimensional `certify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chords: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Gap threshold for `gap`/`capacity`, verdict tolerance for certifiers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Detection threshold on the Monte-Carlo z statistic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gleason: Option<GleasonConfig>,
    /// Exit with status 2 if a signal (or a non-quadratic verdict) shows up.
    #[serde(default)]
    pub expect_no_signal: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

/// Parses and validates a config; errors name the offending field path.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| CliError::Config {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn bundled_example(name: &str) -> Result<RunConfig, CliError> {
    let text = match name {
        "bell-power" => include_str!("../configs/bell-power.json"),
        "bell-quadratic" => include_str!("../configs/bell-quadratic.json"),
        "d3-gleason-pass" => include_str!("../configs/d3-gleason-pass.json"),
        "d3-gleason-fail" => include_str!("../configs/d3-gleason-fail.json"),
        _ => {
            return Err(CliError::Usage(format!(
                "unknown example {name:?}; available: {}",
                EXAMPLES.join(", ")
            )))
        }
    };
    parse_config(text)
}

fn invalid(path: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        path: path.into(),
        message: message.into(),
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        for (path, v) in [
            ("samples", self.samples),
            ("chords", self.chords),
            ("block", self.block),
            ("trials", self.trials),
        ] {
            if v == Some(0) {
                return Err(invalid(path, "must be at least 1"));
            }
        }
        if self.samples == Some(1) {
            return Err(invalid("samples", "must be at least 2"));
        }
        for (path, v) in [("tolerance", self.tolerance), ("z_threshold", self.z_threshold)] {
            if v.is_some_and(|t| !(t.is_finite() && t > 0.0)) {
                return Err(invalid(path, "must be finite and positive"));
            }
        }
        if let Some(g) = &self.gleason {
            if !(g.tolerance.is_finite() && g.tolerance > 0.0) {
                return Err(invalid("gleason.tolerance", "must be finite and positive"));
            }
            if g.resamples < 2 {
                return Err(invalid("gleason.resamples", "must be at least 2"));
            }
        }
        let (want, other) = if self.command.needs_scenario() {
            ("scenario", self.observable.is_some())
        } else {
            ("observable", self.scenario.is_some())
        };
        let present = if self.command.needs_scenario() {
            self.scenario.is_some()
        } else {
            self.observable.is_some()
        };
        if !present {
            return Err(invalid(want, format!("required by {:?}", self.command).to_lowercase()));
        }
        if other {
            let extra = if want == "scenario" { "observable" } else { "scenario" };
            return Err(invalid(extra, format!("not used by {:?}", self.command).to_lowercase()));
        }
        match self.command {
            Command::Affinity => {
                if self.observable()?.dim() != 2 {
                    return Err(invalid("observable", "affinity needs a qubit observable"));
                }
            }
            Command::Gleason => {
                if self.observable()?.dim() < 3 {
                    return Err(invalid("observable", "gleason needs dimension 3 or more"));
                }
            }
            Command::Certify => {
                self.observable()?;
            }
            _ => {
                self.scenario()?;
            }
        }
        Ok(())
    }

    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let spec = self.scenario.as_ref().ok_or_else(|| invalid("scenario", "missing"))?;
        spec.build().map_err(|e| invalid("scenario", e.to_string()))
    }

    pub fn observable(&self) -> Result<FunctionalObservable, CliError> {
        let d = self.observable.as_ref().ok_or_else(|| invalid("observable", "missing"))?;
        d.build().map_err(|e| invalid("observable", e.to_string()))
    }

    /// Overrides whichever count the command uses.
    pub fn set_count(&mut self, n: usize) {
        match self.command {
            Command::Gap => {}
            Command::Simulate => self.samples = Some(n),
            Command::Capacity => self.trials = Some(n),
            Command::Affinity | Command::Certify => self.chords = Some(n),
            Command::Gleason => {
                let mut g = self.gleason.clone().unwrap_or_default();
                g.fit_subspaces = n;
                self.gleason = Some(g);
            }
        }
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(DEFAULT_SAMPLES)
    }

    pub fn chords(&self) -> usize {
        self.chords.unwrap_or(DEFAULT_CHORDS)
    }

    pub fn block(&self) -> usize {
        self.block.unwrap_or(DEFAULT_BLOCK)
    }

    pub fn trials(&self) -> usize {
        self.trials.unwrap_or(DEFAULT_TRIALS)
    }

    pub fn gap_tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(nlqm_core::tolerance::DERIVED)
    }

    pub fn z_threshold(&self) -> f64 {
        self.z_threshold.unwrap_or(nlqm_core::tolerance::DETECTION_Z)
    }

    /// Certifier settings with the top-level tolerance applied.
    pub fn gleason_config(&self) -> GleasonConfig {
        let mut g = self.gleason.clone().unwrap_or_default();
        if let Some(t) = self.tolerance {
            g.tolerance = t;
        }
        g
    }

    /// The config with output settings stripped, as embedded in reports.
    pub fn replay_form(&self) -> RunConfig {
        RunConfig {
            out: None,
            format: None,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
