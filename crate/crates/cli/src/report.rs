use std::fmt::Write as _;

use nlqm_core::nosignal::{affinity_scan, certify, gleason_certify};
use nlqm_core::observables::CountingObservable;
use nlqm_core::signaling::{
    channel_capacity, convergence_series, exact_gap, monte_carlo_report, sample_values, ConvergencePoint, Letter,
};
use nlqm_core::{Certificate, ChannelReport, SignalReport};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Command, RunConfig};
use crate::CliError;

/// Primary output of a run: the effective config (minus output settings)
/// and the command's result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub config: RunConfig,
    #[serde(flatten)]
    pub body: ReportBody,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportBody {
    Gap(SignalReport),
    Simulate {
        signal: SignalReport,
        /// Gap estimate at 10, 100, ... draws and at the full count.
        convergence: Vec<ConvergencePoint>,
    },
    Capacity(ChannelReport),
    Certificate(Certificate),
}

/// Sample sizes for the convergence series: powers of ten below `n`, then `n`.
fn convergence_sizes(n: usize) -> Vec<usize> {
    let mut sizes: Vec<usize> = std::iter::successors(Some(10usize), |s| s.checked_mul(10))
        .take_while(|&s| s < n)
        .collect();
    sizes.push(n);
    sizes
}

pub fn execute(cfg: &RunConfig, workers: usize) -> Result<Report, CliError> {
    let body = match cfg.command {
        Command::Gap => ReportBody::Gap(exact_gap(&cfg.scenario()?)?),
        Command::Simulate => {
            let sc = cfg.scenario()?;
            let n = cfg.samples();
            ReportBody::Simulate {
                signal: monte_carlo_report(&sc, n, cfg.seed, workers)?,
                convergence: convergence_series(&sc, &convergence_sizes(n), cfg.seed, workers)?,
            }
        }
        Command::Capacity => {
            let sc = cfg.scenario()?;
            ReportBody::Capacity(channel_capacity(&sc, cfg.block(), cfg.trials(), cfg.seed, workers)?)
        }
        Command::Affinity => ReportBody::Certificate(affinity_scan(
            &cfg.observable()?,
            cfg.chords(),
            cfg.gleason_config().tolerance,
            cfg.seed,
            workers,
        )?),
        Command::Gleason => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let counting = CountingObservable::new(cfg.observable()?, &mut rng)?;
            ReportBody::Certificate(gleason_certify(&counting, &cfg.gleason_config(), cfg.seed, workers)?)
        }
        Command::Certify => ReportBody::Certificate(certify(
            &cfg.observable()?,
            cfg.chords(),
            &cfg.gleason_config(),
            cfg.seed,
            workers,
        )?),
    };
    Ok(Report {
        config: cfg.replay_form(),
        body,
    })
}

/// Bob's values for both letters of a `simulate` run, in draw order.
pub fn dump_samples(cfg: &RunConfig, workers: usize) -> Result<String, CliError> {
    let sc = cfg.scenario()?;
    let mut out = String::from("letter,index,value\n");
    for letter in [Letter::Zero, Letter::One] {
        let values = sample_values(&sc, letter, cfg.samples(), cfg.seed, workers)?;
        for (i, v) in values.iter().enumerate() {
            writeln!(out, "{},{i},{v}", letter.index()).unwrap();
        }
    }
    Ok(out)
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// `field,value` rows of the scalar results.
    pub fn to_csv(&self) -> String {
        let mut rows: Vec<(&str, String)> = vec![("command", format!("{:?}", self.config.command).to_lowercase())];
        rows.push(("seed", self.config.seed.to_string()));
        let signal_rows = |rows: &mut Vec<(&str, String)>, s: &SignalReport| {
            rows.push(("exact_fb", s.exact_fb.to_string()));
            rows.push(("exact_fbprime", s.exact_fbprime.to_string()));
            rows.push(("gap", s.gap.to_string()));
            if let Some(mc) = &s.monte_carlo {
                rows.push(("mc_fb", mc.mc_fb.to_string()));
                rows.push(("mc_fbprime", mc.mc_fbprime.to_string()));
                rows.push(("stderr_b", mc.stderr_b.to_string()));
                rows.push(("stderr_bprime", mc.stderr_bprime.to_string()));
                rows.push(("z", mc.z.to_string()));
                rows.push(("n_samples", mc.n_samples.to_string()));
            }
        };
        match &self.body {
            ReportBody::Gap(s) | ReportBody::Simulate { signal: s, .. } => signal_rows(&mut rows, s),
            ReportBody::Capacity(c) => {
                rows.push(("block_length", c.block_length.to_string()));
                rows.push(("trials", c.trials.to_string()));
                rows.push(("bit_errors", c.bit_errors.to_string()));
                rows.push(("bit_error_rate", c.bit_error_rate.to_string()));
                rows.push((
                    "estimated_capacity_bits_per_block",
                    c.estimated_capacity_bits_per_block.to_string(),
                ));
                rows.push(("decision_threshold", c.decision_threshold.to_string()));
                rows.push(("gap", c.gap.to_string()));
            }
            ReportBody::Certificate(c) => {
                rows.push(("method", plain(&c.method)));
                rows.push(("verdict", plain(&c.verdict)));
                rows.push(("worst_violation", c.worst_violation.to_string()));
                rows.push(("tolerance", c.tolerance.to_string()));
                rows.push(("witnesses", c.witnesses.len().to_string()));
            }
        }
        let mut out = String::from("field,value\n");
        for (k, v) in rows {
            writeln!(out, "{k},{v}").unwrap();
        }
        out
    }

    /// True when the config expects silence and the run saw a signal or a
    /// non-quadratic verdict.
    pub fn unexpected_signal(&self, cfg: &RunConfig) -> bool {
        if !cfg.expect_no_signal {
            return false;
        }
        match &self.body {
            ReportBody::Gap(s) => s.gap.abs() > cfg.gap_tolerance(),
            ReportBody::Simulate { signal, .. } => signal.signal_detected(cfg.z_threshold()),
            ReportBody::Capacity(c) => c.gap.abs() > cfg.gap_tolerance(),
            ReportBody::Certificate(c) => !c.is_quadratic(),
        }
    }
}

/// A unit enum as it appears in JSON, without quotes.
fn plain<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::bundled_example;

    #[test]
    fn convergence_sizes_end_at_n() {
        assert_eq!(convergence_sizes(100_000), vec![10, 100, 1000, 10_000, 100_000]);
        assert_eq!(convergence_sizes(250), vec![10, 100, 250]);
        assert_eq!(convergence_sizes(5), vec![5]);
    }

    #[test]
    fn bell_power_gap_report() {
        let mut cfg = bundled_example("bell-power").unwrap();
        cfg.command = Command::Gap;
        cfg.samples = None;
        let r = execute(&cfg, 1).unwrap();
        match &r.body {
            ReportBody::Gap(s) => assert!((s.gap - 0.25).abs() < 1e-12),
            b => panic!("{b:?}"),
        }
        let csv = r.to_csv();
        assert!(csv.starts_with("field,value\ncommand,gap\nseed,0\n"), "{csv}");
    }

    #[test]
    fn certificate_csv_and_exit_rule() {
        let cfg = bundled_example("d3-gleason-fail").unwrap();
        let r = execute(&cfg, 2).unwrap();
        let csv = r.to_csv();
        assert!(csv.contains("method,gleason\n"), "{csv}");
        assert!(csv.contains("verdict,non-quadratic\n"), "{csv}");
        assert!(!r.unexpected_signal(&cfg));
        let strict = RunConfig {
            expect_no_signal: true,
            ..cfg
        };
        assert!(r.unexpected_signal(&strict));
    }

    #[test]
    fn report_omits_output_settings() {
        let mut cfg = bundled_example("d3-gleason-pass").unwrap();
        cfg.out = Some("x.json".into());
        cfg.format = Some(crate::Format::Csv);
        let json = execute(&cfg, 1).unwrap().to_json();
        assert!(!json.contains("x.json"));
        assert!(!json.contains("\"format\""));
    }
}
