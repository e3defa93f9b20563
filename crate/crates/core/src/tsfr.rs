//! Time Smoothing and Frequency Rebuild.
//!
//! The calibrated phase is smoothed along time, one subcarrier at a time.
//! Smoothing every column separately opens steps between adjacent
//! subcarriers, so each symbol is then rebuilt from left to right: any step
//! larger than the symbol threshold d_s is clamped to exactly ±d_s, and
//! every later subcarrier is shifted by the accumulated correction.
//!
//! d_s = μ_s + σ_s is taken from the absolute adjacent differences of the
//! calibrated row before smoothing.

use crate::calib::{lrr_calibrate_with, Abscissa};
use crate::error::{Error, Result};
use crate::matrix::{unwrap_slice, Grid, PhaseMatrix, Stage, SubcarrierMap};
use crate::savgol::{sg_time, SgConfig};

/// Per-symbol gap statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapThreshold {
    /// Mean absolute adjacent-subcarrier difference (rad).
    pub mu: f64,
    /// Population standard deviation of the absolute differences (rad).
    pub sigma: f64,
    /// mu + sigma (rad).
    pub d: f64,
}

/// μ, σ and d over the K−1 absolute differences of one row.
pub fn gap_stats(row: &[f64]) -> Result<GapThreshold> {
    if row.len() < 2 {
        return Err(Error::TooShort {
            what: "symbol",
            len: row.len(),
            needed: 2,
        });
    }
    let n = (row.len() - 1) as f64;
    let mu = row.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>() / n;
    let var = row
        .windows(2)
        .map(|w| {
            let e = (w[1] - w[0]).abs() - mu;
            e * e
        })
        .sum::<f64>()
        / n;
    let sigma = var.sqrt();
    Ok(GapThreshold {
        mu,
        sigma,
        d: mu + sigma,
    })
}

/// Outcome of rebuilding one symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct Rebuilt {
    pub values: Vec<f64>,
    /// `flags[k]` is set where |φ̌_k − φ̌_{k−1}| > d; `flags[0]` is always false.
    pub flags: Vec<bool>,
    /// Steps clamped to −d.
    pub negative: usize,
    /// Steps clamped to +d.
    pub positive: usize,
}

impl Rebuilt {
    pub fn flagged(&self) -> usize {
        self.negative + self.positive
    }
}

/// Left-to-right gap clamp of one smoothed, unwrapped symbol.
pub fn rebuild_symbol(smoothed: &[f64], d: f64) -> Result<Vec<f64>> {
    Ok(rebuild_symbol_traced(smoothed, d)?.values)
}

/// [`rebuild_symbol`] plus the branch taken at every subcarrier.
pub fn rebuild_symbol_traced(smoothed: &[f64], d: f64) -> Result<Rebuilt> {
    if smoothed.len() < 2 {
        return Err(Error::TooShort {
            what: "symbol",
            len: smoothed.len(),
            needed: 2,
        });
    }
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::Parameter(format!(
            "gap threshold must be finite and non-negative, got {d}"
        )));
    }
    let k = smoothed.len();
    let mut values = Vec::with_capacity(k);
    let mut flags = vec![false; k];
    let (mut negative, mut positive) = (0, 0);
    values.push(smoothed[0]);
    for i in 1..k {
        let prev = values[i - 1];
        let step = smoothed[i] - smoothed[i - 1];
        let next = if step < -d {
            flags[i] = true;
            negative += 1;
            prev - d
        } else if step > d {
            flags[i] = true;
            positive += 1;
            prev + d
        } else {
            smoothed[i] - (smoothed[i - 1] - prev)
        };
        values.push(next);
    }
    Ok(Rebuilt {
        values,
        flags,
        negative,
        positive,
    })
}

/// Clamp counts for one symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClampCounts {
    pub negative: usize,
    pub positive: usize,
}

impl ClampCounts {
    pub fn total(&self) -> usize {
        self.negative + self.positive
    }
}

/// Diagnostics retained from a TSFR run.
#[derive(Debug, Clone, PartialEq)]
pub struct TsfrReport {
    /// Time-domain window length used by the smoothing stage.
    pub time_window: usize,
    pub sg_order: usize,
    pub thresholds: Vec<GapThreshold>,
    /// S×K marks of the clamped positions; column 0 is never marked.
    pub exceedance: Grid<bool>,
    pub clamps: Vec<ClampCounts>,
    /// Clamped steps over the K−1 steps of each symbol.
    pub modified_fraction: Vec<f64>,
}

impl TsfrReport {
    pub fn symbols(&self) -> usize {
        self.thresholds.len()
    }

    pub fn flagged(&self, symbol: usize) -> usize {
        self.clamps[symbol].total()
    }
}

/// TSFR parameters. The defaults are n = 2 with a window of 0.1·S over the
/// ordinal abscissa.
#[derive(Debug, Clone, Default)]
pub struct TsfrParams {
    pub sg: SgConfig,
    pub abscissa: Abscissa,
    pub map: Option<SubcarrierMap>,
}

/// Full TSFR: LRR, time smoothing, gap statistics and frequency rebuild.
pub fn tsfr(raw: &PhaseMatrix, params: &TsfrParams) -> Result<(PhaseMatrix, TsfrReport)> {
    let calibrated = lrr_calibrate_with(raw, params.abscissa, params.map.as_ref())?;
    tsfr_from_calibrated(&calibrated, &params.sg)
}

/// TSFR stages after LRR, for callers that already hold the calibrated phase.
pub fn tsfr_from_calibrated(
    calibrated: &PhaseMatrix,
    sg: &SgConfig,
) -> Result<(PhaseMatrix, TsfrReport)> {
    let (symbols, subcarriers) = calibrated.dims();
    if subcarriers < 2 {
        return Err(Error::TooShort {
            what: "symbol",
            len: subcarriers,
            needed: 2,
        });
    }
    let time_window = sg.spec_for(symbols)?.window();
    let smoothed = sg_time(&calibrated.unwrap_columns(), sg)?;

    let per_symbol: Vec<(GapThreshold, Rebuilt)> = {
        use rayon::prelude::*;
        (0..symbols)
            .into_par_iter()
            .map(|s| {
                let phi = unwrap_slice(smoothed.row(s));
                let theta = unwrap_slice(calibrated.row(s));
                let threshold = gap_stats(&theta).expect("K >= 2 checked");
                let rebuilt = rebuild_symbol_traced(&phi, threshold.d).expect("d_s >= 0");
                (threshold, rebuilt)
            })
            .collect()
    };

    let mut values = Vec::with_capacity(symbols * subcarriers);
    let mut marks = Vec::with_capacity(symbols * subcarriers);
    let mut thresholds = Vec::with_capacity(symbols);
    let mut clamps = Vec::with_capacity(symbols);
    let mut modified_fraction = Vec::with_capacity(symbols);
    for (threshold, rebuilt) in per_symbol {
        modified_fraction.push(rebuilt.flagged() as f64 / (subcarriers - 1) as f64);
        clamps.push(ClampCounts {
            negative: rebuilt.negative,
            positive: rebuilt.positive,
        });
        thresholds.push(threshold);
        values.extend(rebuilt.values);
        marks.extend(rebuilt.flags);
    }
    let phase = calibrated.derive(Grid::from_vec(symbols, subcarriers, values)?, Stage::Rebuilt);
    let report = TsfrReport {
        time_window,
        sg_order: sg.order,
        thresholds,
        exceedance: Grid::from_vec(symbols, subcarriers, marks)?,
        clamps,
        modified_fraction,
    };
    Ok((phase, report))
}
