//! Diagnostic tables: adjacent-difference histograms, per-symbol gap
//! thresholds, and per-subcarrier exceedance counts of a TSFR run.

use crate::error::{Error, Result};
use crate::matrix::PhaseMatrix;
use crate::tsfr::{gap_stats, GapThreshold, TsfrReport};

pub const DEFAULT_BINS: usize = 101;

/// Histogram of the signed differences θ̌_{s,k} − θ̌_{s,k−1} with a
/// moment-fitted Gaussian overlay.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `counts.len() + 1` strictly increasing edges (rad).
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Gaussian density of the overlay at `x`.
    pub fn gaussian_pdf(&self, x: f64) -> f64 {
        if self.std == 0.0 {
            return if x == self.mean { f64::INFINITY } else { 0.0 };
        }
        let z = (x - self.mean) / self.std;
        (-0.5 * z * z).exp() / (self.std * (2.0 * std::f64::consts::PI).sqrt())
    }
}

/// Bins span the fitted mean ± 4 std (± 1 rad when the std is zero);
/// differences outside land in the end bins, so every one is counted.
pub fn diff_histogram(phase: &PhaseMatrix, bins: usize) -> Result<Histogram> {
    if bins < 1 {
        return Err(Error::Parameter("histogram needs at least one bin".into()));
    }
    if phase.subcarriers() < 2 {
        return Err(Error::TooShort {
            what: "symbol",
            len: phase.subcarriers(),
            needed: 2,
        });
    }
    let diffs: Vec<f64> = phase
        .grid()
        .iter_rows()
        .flat_map(|row| row.windows(2).map(|w| w[1] - w[0]))
        .collect();
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let std = (diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n).sqrt();

    let half = if std > 0.0 { 4.0 * std } else { 1.0 };
    let (lo, hi) = (mean - half, mean + half);
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + width * i as f64 })
        .collect();
    let mut counts = vec![0u64; bins];
    for d in diffs {
        let idx = ((d - lo) / width).floor();
        let idx = if idx < 0.0 { 0 } else { (idx as usize).min(bins - 1) };
        counts[idx] += 1;
    }
    Ok(Histogram {
        edges,
        counts,
        mean,
        std,
    })
}

/// Mean d_s over the symbols carrying one label.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupMean {
    pub label: String,
    pub symbols: usize,
    pub mean_d: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DsSeries {
    pub thresholds: Vec<GapThreshold>,
    /// Groups in order of first appearance; empty without labels.
    pub groups: Vec<GroupMean>,
}

/// d_s for every symbol, plus per-label means when `labels` is given.
pub fn ds_series<S: AsRef<str>>(phase: &PhaseMatrix, labels: Option<&[S]>) -> Result<DsSeries> {
    if let Some(labels) = labels {
        if labels.len() != phase.symbols() {
            return Err(Error::LengthMismatch {
                what: "labels",
                expected: phase.symbols(),
                found: labels.len(),
            });
        }
    }
    let thresholds = phase
        .grid()
        .iter_rows()
        .map(gap_stats)
        .collect::<Result<Vec<_>>>()?;
    let mut groups: Vec<(String, usize, f64)> = Vec::new();
    if let Some(labels) = labels {
        for (label, t) in labels.iter().zip(&thresholds) {
            let label = label.as_ref();
            match groups.iter_mut().find(|g| g.0 == label) {
                Some(g) => {
                    g.1 += 1;
                    g.2 += t.d;
                }
                None => groups.push((label.to_string(), 1, t.d)),
            }
        }
    }
    Ok(DsSeries {
        thresholds,
        groups: groups
            .into_iter()
            .map(|(label, symbols, sum)| GroupMean {
                label,
                symbols,
                mean_d: sum / symbols as f64,
            })
            .collect(),
    })
}

/// Number of symbols clamped at each subcarrier (0-based; entry 0 is always 0).
pub fn exceedance_profile(report: &TsfrReport) -> Vec<usize> {
    let marks = &report.exceedance;
    (0..marks.cols())
        .map(|k| (0..marks.rows()).filter(|&s| marks.get(s, k)).count())
        .collect()
}
