//! Per-symbol linear phase calibration.
//!
//! Both methods remove the phase error that grows linearly with the
//! subcarrier index (sampling time and frequency offsets) together with the
//! constant carrier offset:
//!
//! * LT subtracts the endpoint slope ε_s·m_k and the row mean τ_s.
//! * LRR fits an ordinary least-squares line to the row, rotates the
//!   (abscissa, phase) pairs by −α_s = −arctan(a_s) so the fitted line becomes
//!   horizontal, and subtracts the fitted value at the first subcarrier.
//!
//! Every row is unwrapped along frequency before fitting.

use crate::error::{Error, Result};
use crate::matrix::{unwrap_slice, Grid, PhaseMatrix, Stage, SubcarrierMap};

/// Slope and offset estimated by the linear transformation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LtFit {
    /// Phase slope per unit of subcarrier index (rad/index).
    pub epsilon: f64,
    /// Mean phase of the row (rad).
    pub tau: f64,
}

/// Least-squares line r(x) = a·x + b through one symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    /// arctan(slope), in (−π/2, π/2).
    pub angle: f64,
    /// Regression value at the first abscissa (r_s(1) for ordinal abscissas).
    pub first_value: f64,
}

/// Abscissa used by the LRR regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Abscissa {
    /// Column ordinal k = 1..K.
    #[default]
    Ordinal,
    /// Physical subcarrier index m_k from the subcarrier map.
    Physical,
}

/// Endpoint slope and mean of one (unwrapped) row.
pub fn lt_fit(row: &[f64], map: &SubcarrierMap) -> Result<LtFit> {
    check_row(row, map)?;
    let m = map.indices();
    let (first, last) = (m[0], m[m.len() - 1]);
    if first == last {
        return Err(Error::DegenerateMap(first));
    }
    let epsilon = (row[row.len() - 1] - row[0]) / (last - first) as f64;
    let tau = row.iter().sum::<f64>() / row.len() as f64;
    Ok(LtFit { epsilon, tau })
}

/// Linear transformation of every symbol: θ̂ − ε_s·m_k − τ_s.
pub fn lt_calibrate(phase: &PhaseMatrix, map: &SubcarrierMap) -> Result<PhaseMatrix> {
    if phase.subcarriers() < 2 {
        return Err(too_few_subcarriers(phase.subcarriers()));
    }
    check_row(phase.row(0), map)?;
    let m = map.indices();
    if m[0] == m[m.len() - 1] {
        return Err(Error::DegenerateMap(m[0]));
    }
    let values = phase.grid().map_rows(|_, row| {
        let row = unwrap_slice(row);
        let fit = lt_fit(&row, map).expect("map validated above");
        row.iter()
            .zip(m)
            .map(|(&theta, &mk)| theta - fit.epsilon * mk as f64 - fit.tau)
            .collect()
    });
    Ok(phase.derive(values, Stage::Calibrated))
}

/// Centered OLS fit of `row` against `abscissa`.
///
/// A constant row gives slope 0. The abscissas must not all be equal.
pub fn regress(row: &[f64], abscissa: &[f64]) -> Result<RegressionFit> {
    if row.len() < 2 {
        return Err(too_few_subcarriers(row.len()));
    }
    if row.len() != abscissa.len() {
        return Err(Error::LengthMismatch {
            what: "regression abscissa",
            expected: row.len(),
            found: abscissa.len(),
        });
    }
    let n = row.len() as f64;
    let x_mean = abscissa.iter().sum::<f64>() / n;
    let y_mean = row.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&x, &y) in abscissa.iter().zip(row) {
        let dx = x - x_mean;
        sxy += (y - y_mean) * dx;
        sxx += dx * dx;
    }
    if sxx == 0.0 {
        return Err(Error::Parameter("regression abscissas are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = y_mean - x_mean * slope;
    Ok(RegressionFit {
        slope,
        intercept,
        angle: slope.atan(),
        first_value: slope * abscissa[0] + intercept,
    })
}

/// OLS fit of one unwrapped symbol over k = 1..K.
pub fn regress_symbol(row: &[f64]) -> Result<RegressionFit> {
    regress(row, &ordinal_abscissa(row.len()))
}

/// Rotates the (x, θ) pairs of one row by −α and removes the first fitted value.
pub fn rotate_row(row: &[f64], abscissa: &[f64], fit: &RegressionFit) -> Vec<f64> {
    let (sin, cos) = fit.angle.sin_cos();
    row.iter()
        .zip(abscissa)
        .map(|(&theta, &x)| -x * sin + theta * cos - fit.first_value)
        .collect()
}

/// LRR sanitization over the column ordinal k = 1..K.
pub fn lrr_calibrate(phase: &PhaseMatrix) -> Result<PhaseMatrix> {
    lrr_calibrate_with(phase, Abscissa::Ordinal, None)
}

/// LRR sanitization with an explicit abscissa choice. `map` is required for
/// [`Abscissa::Physical`] and ignored otherwise.
pub fn lrr_calibrate_with(
    phase: &PhaseMatrix,
    abscissa: Abscissa,
    map: Option<&SubcarrierMap>,
) -> Result<PhaseMatrix> {
    let k = phase.subcarriers();
    if k < 2 {
        return Err(too_few_subcarriers(k));
    }
    let x: Vec<f64> = match abscissa {
        Abscissa::Ordinal => ordinal_abscissa(k),
        Abscissa::Physical => {
            let map = map.ok_or_else(|| {
                Error::Parameter("physical abscissa needs a subcarrier map".into())
            })?;
            check_row(phase.row(0), map)?;
            map.indices().iter().map(|&m| m as f64).collect()
        }
    };
    let values: Grid<f64> = phase.grid().map_rows(|_, row| {
        let row = unwrap_slice(row);
        let fit = regress(&row, &x).expect("abscissa validated above");
        rotate_row(&row, &x, &fit)
    });
    Ok(phase.derive(values, Stage::Calibrated))
}

fn ordinal_abscissa(k: usize) -> Vec<f64> {
    (1..=k).map(|i| i as f64).collect()
}

fn check_row(row: &[f64], map: &SubcarrierMap) -> Result<()> {
    if row.len() < 2 {
        return Err(too_few_subcarriers(row.len()));
    }
    if row.len() != map.len() {
        return Err(Error::LengthMismatch {
            what: "subcarrier map",
            expected: row.len(),
            found: map.len(),
        });
    }
    Ok(())
}

fn too_few_subcarriers(len: usize) -> Error {
    Error::TooShort {
        what: "symbol",
        len,
        needed: 2,
    }
}
