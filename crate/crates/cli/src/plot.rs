//! CSV plot data.
//!
//! | kind                  | source                     | columns                         |
//! |-----------------------|----------------------------|---------------------------------|
//! | `bloch`               | affinity certificate       | `x,y,z,f_value,violation`       |
//! | `convergence`         | `simulate` report          | `n,mc_gap,stderr`               |
//! | `violation-histogram` | any certificate            | `bin_lo,bin_hi,count`           |
//!
//! Bloch rows list the four chord endpoints of each witness in witness order
//! (`x1, x2, x1p, x2p`). The histogram has [`HISTOGRAM_BINS`] equal bins on
//! `[0, worst violation]`; the last bin is closed.

use std::fmt::Write as _;

use clap::ValueEnum;
use nlqm_core::{Certificate, Witness};

use crate::report::{Report, ReportBody};
use crate::CliError;

pub const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Bloch,
    Convergence,
    ViolationHistogram,
}

fn mismatch(kind: &str, need: &str) -> CliError {
    CliError::Usage(format!("{kind} plot data needs {need}"))
}

pub fn emit_plot_data(report: &Report, kind: PlotKind) -> Result<String, CliError> {
    match kind {
        PlotKind::Bloch => match &report.body {
            ReportBody::Certificate(c) if c.witnesses.iter().all(|w| matches!(w, Witness::Chord(_))) => {
                Ok(bloch_rows(c))
            }
            _ => Err(mismatch("bloch", "a chord-scan certificate")),
        },
        PlotKind::Convergence => match &report.body {
            ReportBody::Simulate { convergence, .. } => {
                let mut out = String::from("n,mc_gap,stderr\n");
                for p in convergence {
                    writeln!(out, "{},{},{}", p.n, p.mc_gap, p.stderr).unwrap();
                }
                Ok(out)
            }
            _ => Err(mismatch("convergence", "a simulate report")),
        },
        PlotKind::ViolationHistogram => match &report.body {
            ReportBody::Certificate(c) => Ok(histogram(c)),
            _ => Err(mismatch("violation-histogram", "a certificate")),
        },
    }
}

fn bloch_rows(c: &Certificate) -> String {
    let mut out = String::from("x,y,z,f_value,violation\n");
    for w in &c.witnesses {
        let Witness::Chord(w) = w else { continue };
        for (p, v) in [w.x1, w.x2, w.x1p, w.x2p].into_iter().zip(w.values) {
            writeln!(out, "{},{},{},{},{}", p.x, p.y, p.z, v, w.violation).unwrap();
        }
    }
    out
}

fn histogram(c: &Certificate) -> String {
    let mut out = String::from("bin_lo,bin_hi,count\n");
    if c.witnesses.is_empty() {
        return out;
    }
    let top = c.worst_violation;
    let mut counts = [0usize; HISTOGRAM_BINS];
    for w in &c.witnesses {
        let i = if top > 0.0 {
            ((w.violation() / top * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1)
        } else {
            0
        };
        counts[i] += 1;
    }
    let width = top / HISTOGRAM_BINS as f64;
    for (i, n) in counts.iter().enumerate() {
        writeln!(out, "{},{},{n}", i as f64 * width, (i + 1) as f64 * width).unwrap();
    }
    out
}
