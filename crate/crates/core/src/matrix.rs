//! Dense S×K matrices of channel state information.
//!
//! Rows are OFDM symbols (time), columns are subcarriers (frequency). Every
//! matrix is stored row-major and is immutable once validated; the processing
//! stages return new matrices rather than editing in place.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Row-major dense storage shared by all matrix types.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy + Send + Sync> Grid<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        let expected = rows.checked_mul(cols).ok_or(Error::Shape {
            rows,
            cols,
            min_rows: 1,
            min_cols: 1,
        })?;
        if data.len() != expected {
            return Err(Error::ValueCount {
                rows,
                cols,
                expected,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a grid from nested rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::LengthMismatch {
                    what: "matrix row",
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, col)).collect()
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        // chunks_exact panics on a zero chunk size
        let width = self.cols.max(1);
        self.data
            .chunks_exact(width)
            .take(if self.cols == 0 { 0 } else { self.rows })
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn map<U: Copy + Send + Sync>(&self, f: impl Fn(T) -> U) -> Grid<U> {
        Grid {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Maps every row independently (in parallel). Output rows are assembled
    /// in index order, so the result does not depend on scheduling.
    pub fn map_rows<U, F>(&self, f: F) -> Grid<U>
    where
        U: Copy + Send + Sync,
        F: Fn(usize, &[T]) -> Vec<U> + Sync + Send,
    {
        let out: Vec<Vec<U>> = (0..self.rows)
            .into_par_iter()
            .map(|r| f(r, self.row(r)))
            .collect();
        let cols = out.first().map_or(self.cols, Vec::len);
        let mut data = Vec::with_capacity(self.rows * cols);
        for row in out {
            assert_eq!(row.len(), cols, "row mapper changed the row length");
            data.extend(row);
        }
        Grid {
            rows: self.rows,
            cols,
            data,
        }
    }

    /// Column-wise counterpart of [`Grid::map_rows`].
    pub fn map_columns<U, F>(&self, f: F) -> Grid<U>
    where
        U: Copy + Send + Sync,
        F: Fn(usize, &[T]) -> Vec<U> + Sync + Send,
    {
        self.transpose().map_rows(f).transpose()
    }
}

/// Processing stage of a phase matrix. Stages only move forward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    /// Measured phase, straight from the complex gains.
    Raw,
    /// After LT or LRR sanitization.
    Calibrated,
    /// After a Savitzky-Golay pass (time, frequency or both).
    Smoothed,
    /// After the TSFR frequency rebuild.
    Rebuilt,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Raw => "raw",
            Stage::Calibrated => "calibrated",
            Stage::Smoothed => "smoothed",
            Stage::Rebuilt => "rebuilt",
        }
    }
}

/// Estimated CSI: S symbols by K subcarriers of complex channel gain.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiMatrix(Grid<Complex64>);

impl CsiMatrix {
    pub fn new(values: Grid<Complex64>) -> Result<Self> {
        check_shape(values.dims(), 1, 2)?;
        if let Some(i) = values
            .as_slice()
            .iter()
            .position(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(non_finite(i, values.cols()));
        }
        Ok(Self(values))
    }

    pub fn from_rows<R: AsRef<[Complex64]>>(rows: &[R]) -> Result<Self> {
        Self::new(Grid::from_rows(rows)?)
    }

    pub fn symbols(&self) -> usize {
        self.0.rows()
    }

    pub fn subcarriers(&self) -> usize {
        self.0.cols()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.0.dims()
    }

    pub fn grid(&self) -> &Grid<Complex64> {
        &self.0
    }

    pub fn get(&self, symbol: usize, subcarrier: usize) -> Complex64 {
        self.0.get(symbol, subcarrier)
    }

    pub fn row(&self, symbol: usize) -> &[Complex64] {
        self.0.row(symbol)
    }
}

/// Linear gain magnitudes |ĥ|, carried unchanged through every method.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMatrix(Grid<f64>);

impl AmplitudeMatrix {
    pub fn new(values: Grid<f64>) -> Result<Self> {
        check_shape(values.dims(), 1, 1)?;
        for (i, &v) in values.as_slice().iter().enumerate() {
            if !v.is_finite() {
                return Err(non_finite(i, values.cols()));
            }
            if v < 0.0 {
                return Err(Error::NegativeAmplitude {
                    symbol: i / values.cols(),
                    subcarrier: i % values.cols(),
                });
            }
        }
        Ok(Self(values))
    }

    pub fn grid(&self) -> &Grid<f64> {
        &self.0
    }

    pub fn dims(&self) -> (usize, usize) {
        self.0.dims()
    }
}

/// Real phases in radians, tagged with the pipeline stage that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMatrix {
    values: Grid<f64>,
    stage: Stage,
}

impl PhaseMatrix {
    pub fn new(values: Grid<f64>, stage: Stage) -> Result<Self> {
        check_shape(values.dims(), 1, 1)?;
        if let Some(i) = values.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(non_finite(i, values.cols()));
        }
        Ok(Self { values, stage })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R], stage: Stage) -> Result<Self> {
        Self::new(Grid::from_rows(rows)?, stage)
    }

    pub fn grid(&self) -> &Grid<f64> {
        &self.values
    }

    pub fn into_grid(self) -> Grid<f64> {
        self.values
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn symbols(&self) -> usize {
        self.values.rows()
    }

    pub fn subcarriers(&self) -> usize {
        self.values.cols()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.values.dims()
    }

    pub fn get(&self, symbol: usize, subcarrier: usize) -> f64 {
        self.values.get(symbol, subcarrier)
    }

    pub fn row(&self, symbol: usize) -> &[f64] {
        self.values.row(symbol)
    }

    pub fn column(&self, subcarrier: usize) -> Vec<f64> {
        self.values.column(subcarrier)
    }

    pub fn transpose(&self) -> Self {
        Self {
            values: self.values.transpose(),
            stage: self.stage,
        }
    }

    /// Replaces the values, moving the stage forward to `stage` unless it is
    /// already further along. Callers guarantee the values are finite.
    pub(crate) fn derive(&self, values: Grid<f64>, stage: Stage) -> Self {
        debug_assert!(values.as_slice().iter().all(|v| v.is_finite()));
        Self {
            values,
            stage: self.stage.max(stage),
        }
    }

    /// Unwraps every symbol (row) along frequency.
    pub fn unwrap_rows(&self) -> Self {
        let values = self.values.map_rows(|_, row| unwrap_slice(row));
        self.derive(values, self.stage)
    }

    /// Unwraps every subcarrier (column) along time.
    pub fn unwrap_columns(&self) -> Self {
        let values = self.values.map_columns(|_, col| unwrap_slice(col));
        self.derive(values, self.stage)
    }
}

/// Physical subcarrier indices m_k and the DFT size N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubcarrierMap {
    indices: Vec<i64>,
    n_fft: usize,
}

impl SubcarrierMap {
    pub fn new(indices: Vec<i64>, n_fft: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::SubcarrierMap("no subcarrier indices".into()));
        }
        if let Some(w) = indices.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::SubcarrierMap(format!(
                "indices must be strictly increasing (position {} has {} after {})",
                w + 1,
                indices[w + 1],
                indices[w]
            )));
        }
        let span = indices[indices.len() - 1] - indices[0] + 1;
        if n_fft == 0 || (n_fft as i64) < span {
            return Err(Error::SubcarrierMap(format!(
                "DFT size {n_fft} is smaller than the index span {span}"
            )));
        }
        Ok(Self { indices, n_fft })
    }

    /// `count` consecutive indices starting at `first`.
    pub fn contiguous(first: i64, count: usize, n_fft: usize) -> Result<Self> {
        Self::new((0..count as i64).map(|i| first + i).collect(), n_fft)
    }

    /// m_k = k for k = 1..=K with N = K.
    pub fn ordinal(count: usize) -> Result<Self> {
        Self::contiguous(1, count, count)
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn n_fft(&self) -> usize {
        self.n_fft
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn mean_index(&self) -> f64 {
        self.indices.iter().map(|&m| m as f64).sum::<f64>() / self.indices.len() as f64
    }
}

/// Non-fatal conditions reported alongside a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Warning {
    /// Phase of a zero gain is undefined; it was set to 0.
    ZeroMagnitude { symbol: usize, subcarrier: usize },
    /// Vector shorter than the smoothing window; returned unchanged.
    ShortVector { len: usize, window: usize },
}

/// Polar form of a [`CsiMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct Polar {
    pub amplitude: AmplitudeMatrix,
    pub phase: PhaseMatrix,
    pub warnings: Vec<Warning>,
}

/// Principal argument in (−π, π].
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a == -PI {
        PI
    } else {
        a
    }
}

/// Maps an angle into (−π, π].
pub fn wrap_to_pi(x: f64) -> f64 {
    x - std::f64::consts::TAU * wrap_turns(x)
}

/// Number of whole turns to subtract from `x` to land in (−π, π].
fn wrap_turns(x: f64) -> f64 {
    let mut n = ((x - PI) / std::f64::consts::TAU).ceil();
    // guard the boundaries against rounding in the division
    let r = x - std::f64::consts::TAU * n;
    if r > PI {
        n += 1.0;
    } else if r <= -PI {
        n -= 1.0;
    }
    n
}

/// Splits CSI into amplitude |ĥ| and principal phase θ̂.
pub fn decompose(csi: &CsiMatrix) -> Polar {
    let grid = csi.grid();
    let amplitude = grid.map(|z| z.norm());
    let phase = grid.map(|z| {
        if z.re == 0.0 && z.im == 0.0 {
            0.0
        } else {
            principal_arg(z)
        }
    });
    let cols = grid.cols();
    let warnings = grid
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.re == 0.0 && z.im == 0.0)
        .map(|(i, _)| Warning::ZeroMagnitude {
            symbol: i / cols,
            subcarrier: i % cols,
        })
        .collect();
    Polar {
        amplitude: AmplitudeMatrix(amplitude),
        phase: PhaseMatrix {
            values: phase,
            stage: Stage::Raw,
        },
        warnings,
    }
}

/// Rebuilds complex gains |ĥ|·e^{jφ} from an amplitude and a phase matrix.
pub fn recompose(amplitude: &AmplitudeMatrix, phase: &PhaseMatrix) -> Result<CsiMatrix> {
    if amplitude.dims() != phase.dims() {
        return Err(Error::DimensionMismatch {
            expected: amplitude.dims(),
            found: phase.dims(),
        });
    }
    let (rows, cols) = amplitude.dims();
    let data = amplitude
        .grid()
        .as_slice()
        .iter()
        .zip(phase.grid().as_slice())
        .map(|(&a, &p)| Complex64::new(a * p.cos(), a * p.sin()))
        .collect();
    CsiMatrix::new(Grid::from_vec(rows, cols, data)?)
}

/// Cumulative-correction unwrap: each step is replaced by its (−π, π]
/// representative while the first sample is kept.
///
/// The correction is accumulated as an integer number of turns and added to
/// the input, so a vector that needs no correction is returned bit-for-bit.
pub fn unwrap(v: &[f64]) -> Result<Vec<f64>> {
    if v.is_empty() {
        return Err(Error::EmptyVector);
    }
    if let Some(index) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteVector { index });
    }
    Ok(unwrap_slice(v))
}

pub(crate) fn unwrap_slice(v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(v.len());
    let mut turns = 0.0_f64;
    for (i, &x) in v.iter().enumerate() {
        if i > 0 {
            turns -= wrap_turns(x - v[i - 1]);
        }
        out.push(if turns == 0.0 {
            x
        } else {
            x + std::f64::consts::TAU * turns
        });
    }
    out
}

fn check_shape((rows, cols): (usize, usize), min_rows: usize, min_cols: usize) -> Result<()> {
    if rows < min_rows || cols < min_cols {
        return Err(Error::Shape {
            rows,
            cols,
            min_rows,
            min_cols,
        });
    }
    Ok(())
}

fn non_finite(flat: usize, cols: usize) -> Error {
    Error::NonFinite {
        symbol: flat / cols,
        subcarrier: flat % cols,
    }
}
