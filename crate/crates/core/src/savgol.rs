//! Savitzky-Golay smoothing along time, frequency, or both.
//!
//! A filter of degree n and odd window w = 2l+1 replaces every sample by the
//! value, at that sample, of the degree-≤n least-squares polynomial fitted to
//! the w samples around it. Interior samples use the central convolution
//! weights. The first and last l samples reuse the nearest full window and
//! evaluate the fit at their own position, so polynomials of degree ≤ n pass
//! through unchanged everywhere, including the edges.
//!
//! The fits are computed from an orthonormal basis of the polynomial space
//! sampled on the window (modified Gram-Schmidt with one reorthogonalization
//! pass on scaled abscissas), which keeps large windows well conditioned.

use crate::error::{Error, Result};
use crate::matrix::{Grid, PhaseMatrix, Stage, Warning};

/// Polynomial degree and odd window length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SgSpec {
    order: usize,
    window: usize,
}

impl SgSpec {
    pub fn new(order: usize, window: usize) -> Result<Self> {
        let reason = if window.is_multiple_of(2) {
            Some("window must be odd")
        } else if window < 3 {
            Some("window must be at least 3")
        } else if window <= order {
            Some("window must exceed the polynomial order")
        } else {
            None
        };
        match reason {
            Some(reason) => Err(Error::SgSpec {
                order,
                window,
                reason,
            }),
            None => Ok(Self { order, window }),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// l in w = 2l + 1.
    pub fn half_width(&self) -> usize {
        self.window / 2
    }
}

/// How the window length is chosen for a given signal length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowRule {
    /// A fraction of the filtered dimension, made odd and clamped.
    Fraction(f64),
    /// A fixed odd length.
    Length(usize),
}

/// Filter order plus window rule; defaults to n = 2 with a 0.1 fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgConfig {
    pub order: usize,
    pub window: WindowRule,
}

impl Default for SgConfig {
    fn default() -> Self {
        Self {
            order: 2,
            window: WindowRule::Fraction(0.1),
        }
    }
}

impl SgConfig {
    pub fn new(order: usize, window: WindowRule) -> Self {
        Self { order, window }
    }

    /// Concrete filter for a dimension of length `len`.
    pub fn spec_for(&self, len: usize) -> Result<SgSpec> {
        let window = match self.window {
            WindowRule::Fraction(f) => fraction_window(f, len, self.order)?,
            WindowRule::Length(w) => {
                if w > len {
                    return Err(Error::TooShort {
                        what: "filtered dimension",
                        len,
                        needed: w,
                    });
                }
                w
            }
        };
        SgSpec::new(self.order, window)
    }
}

/// Odd window for a fraction `frac` of `len` samples.
///
/// w = round(frac·len), bumped to the next odd number when even, then clamped
/// to [max(3, smallest odd > order), largest odd ≤ len].
pub fn fraction_window(frac: f64, len: usize, order: usize) -> Result<usize> {
    if !(frac.is_finite() && frac > 0.0) {
        return Err(Error::Parameter(format!(
            "window fraction must be positive, got {frac}"
        )));
    }
    let lower = 3.max((order + 1) | 1);
    let upper = if len % 2 == 1 { len } else { len.saturating_sub(1) };
    if upper < lower {
        return Err(Error::TooShort {
            what: "filtered dimension",
            len,
            needed: lower,
        });
    }
    let mut w = (frac * len as f64).round() as usize;
    if w.is_multiple_of(2) {
        w += 1;
    }
    Ok(w.clamp(lower, upper))
}

/// Least-squares projection onto degree-≤n polynomials over one window.
#[derive(Debug, Clone)]
pub struct SgKernel {
    spec: SgSpec,
    /// Orthonormal basis sampled on the window, `window × (order + 1)`, row-major.
    basis: Vec<f64>,
    central: Vec<f64>,
}

impl SgKernel {
    pub fn spec(&self) -> SgSpec {
        self.spec
    }

    /// Convolution weights producing the fitted value at the window centre.
    pub fn coefficients(&self) -> &[f64] {
        &self.central
    }

    /// Weights producing the fitted value at `position` (0-based) within the
    /// window.
    pub fn weights_at(&self, position: usize) -> Vec<f64> {
        hat_row(&self.basis, self.spec.order + 1, position)
    }

    fn terms(&self) -> usize {
        self.spec.order + 1
    }
}

/// Designs the projection for `spec`.
pub fn sg_design(spec: SgSpec) -> SgKernel {
    let w = spec.window;
    let l = spec.half_width();
    let m = spec.order + 1;
    let scale = l.max(1) as f64;
    let mut design = Vec::with_capacity(w * m);
    for j in 0..w {
        let x = (j as f64 - l as f64) / scale;
        let mut p = 1.0;
        for _ in 0..m {
            design.push(p);
            p *= x;
        }
    }
    let basis = orthonormalize(design, w, m);
    let central = hat_row(&basis, m, l);
    SgKernel {
        spec,
        basis,
        central,
    }
}

/// Smooths one vector. A vector shorter than the window is returned unchanged
/// with a [`Warning::ShortVector`].
pub fn sg_apply(v: &[f64], spec: SgSpec) -> (Vec<f64>, Option<Warning>) {
    if v.len() < spec.window {
        let warning = Warning::ShortVector {
            len: v.len(),
            window: spec.window,
        };
        return (v.to_vec(), Some(warning));
    }
    (apply_kernel(v, &sg_design(spec)), None)
}

pub(crate) fn apply_kernel(v: &[f64], kernel: &SgKernel) -> Vec<f64> {
    let w = kernel.spec.window;
    let l = kernel.spec.half_width();
    let n = v.len();
    debug_assert!(n >= w);
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate().take(n - l).skip(l) {
        *o = dot(&kernel.central, &v[i - l..i + l + 1]);
    }
    // edges: project the first/last full window once and evaluate inside it
    let m = kernel.terms();
    let head = project(&kernel.basis, m, &v[..w]);
    for (i, o) in out.iter_mut().enumerate().take(l) {
        *o = dot(&kernel.basis[i * m..(i + 1) * m], &head);
    }
    let tail = project(&kernel.basis, m, &v[n - w..]);
    for i in n - l..n {
        let pos = i - (n - w);
        out[i] = dot(&kernel.basis[pos * m..(pos + 1) * m], &tail);
    }
    out
}

/// Smooths every subcarrier (column) along time. Columns should already be
/// unwrapped along time.
pub fn sg_time(phase: &PhaseMatrix, config: &SgConfig) -> Result<PhaseMatrix> {
    let symbols = phase.symbols();
    if symbols < 3 {
        return Err(Error::TooShort {
            what: "symbol count",
            len: symbols,
            needed: 3,
        });
    }
    let kernel = sg_design(config.spec_for(symbols)?);
    let values = phase
        .grid()
        .map_columns(|_, col| apply_kernel(col, &kernel));
    Ok(phase.derive(values, Stage::Smoothed))
}

/// Smooths every symbol (row) along frequency.
pub fn sg_freq(phase: &PhaseMatrix, config: &SgConfig) -> Result<PhaseMatrix> {
    let subcarriers = phase.subcarriers();
    if subcarriers < 3 {
        return Err(Error::TooShort {
            what: "subcarrier count",
            len: subcarriers,
            needed: 3,
        });
    }
    let kernel = sg_design(config.spec_for(subcarriers)?);
    let values = phase.grid().map_rows(|_, row| apply_kernel(row, &kernel));
    Ok(phase.derive(values, Stage::Smoothed))
}

/// Time pass followed by a frequency pass.
pub fn sg_2d_separable(phase: &PhaseMatrix, config: &SgConfig) -> Result<PhaseMatrix> {
    sg_freq(&sg_time(phase, config)?, config)
}

/// Bivariate fit over a rectangular time × frequency window.
#[derive(Debug, Clone)]
pub struct Sg2dKernel {
    order: usize,
    time: usize,
    freq: usize,
    /// Orthonormal basis of the total-degree-≤n monomials over the window
    /// points (time-major), `time·freq × terms`.
    basis: Vec<f64>,
    terms: usize,
}

impl Sg2dKernel {
    pub fn new(order: usize, time_window: usize, freq_window: usize) -> Result<Self> {
        SgSpec::new(order, time_window)?;
        SgSpec::new(order, freq_window)?;
        let lt = time_window / 2;
        let lf = freq_window / 2;
        let exponents: Vec<(i32, i32)> = (0..=order as i32)
            .flat_map(|d| (0..=d).rev().map(move |a| (a, d - a)))
            .collect();
        let terms = exponents.len();
        let mut design = Vec::with_capacity(time_window * freq_window * terms);
        for i in 0..time_window {
            let x = (i as f64 - lt as f64) / lt.max(1) as f64;
            for j in 0..freq_window {
                let y = (j as f64 - lf as f64) / lf.max(1) as f64;
                design.extend(exponents.iter().map(|&(a, b)| x.powi(a) * y.powi(b)));
            }
        }
        let basis = orthonormalize(design, time_window * freq_window, terms);
        Ok(Self {
            order,
            time: time_window,
            freq: freq_window,
            basis,
            terms,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn windows(&self) -> (usize, usize) {
        (self.time, self.freq)
    }

    /// Weights (time-major, `time·freq` long) giving the fitted value at
    /// window position (`t`, `f`).
    pub fn weights_at(&self, t: usize, f: usize) -> Vec<f64> {
        hat_row(&self.basis, self.terms, t * self.freq + f)
    }
}

/// Bivariate Savitzky-Golay smoothing with a total-degree-≤n polynomial.
pub fn sg_2d(phase: &PhaseMatrix, config: &SgConfig) -> Result<PhaseMatrix> {
    let (rows, cols) = phase.dims();
    for (what, len) in [("symbol count", rows), ("subcarrier count", cols)] {
        if len < 3 {
            return Err(Error::TooShort {
                what,
                len,
                needed: 3,
            });
        }
    }
    let time_window = config.spec_for(rows)?.window();
    let freq_window = config.spec_for(cols)?.window();
    let kernel = Sg2dKernel::new(config.order, time_window, freq_window)?;
    Ok(phase.derive(apply_2d(phase.grid(), &kernel), Stage::Smoothed))
}

pub(crate) fn apply_2d(grid: &Grid<f64>, kernel: &Sg2dKernel) -> Grid<f64> {
    let (rows, cols) = grid.dims();
    let (wt, wf) = (kernel.time, kernel.freq);
    let (lt, lf) = (wt / 2, wf / 2);
    let central = kernel.weights_at(lt, lf);
    grid.map_rows(|s, _| {
        let ts = s.saturating_sub(lt).min(rows - wt);
        let to = s - ts;
        let mut window = vec![0.0; wt * wf];
        (0..cols)
            .map(|k| {
                let fs = k.saturating_sub(lf).min(cols - wf);
                let fo = k - fs;
                for i in 0..wt {
                    window[i * wf..(i + 1) * wf].copy_from_slice(&grid.row(ts + i)[fs..fs + wf]);
                }
                if to == lt && fo == lf {
                    dot(&central, &window)
                } else {
                    let coeffs = project(&kernel.basis, kernel.terms, &window);
                    let p = to * wf + fo;
                    dot(&kernel.basis[p * kernel.terms..(p + 1) * kernel.terms], &coeffs)
                }
            })
            .collect()
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Coordinates of `v` in the orthonormal basis (Qᵀv).
fn project(basis: &[f64], terms: usize, v: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![0.0; terms];
    for (row, &x) in basis.chunks_exact(terms).zip(v) {
        for (c, &q) in coeffs.iter_mut().zip(row) {
            *c += q * x;
        }
    }
    coeffs
}

/// Row `position` of the hat matrix Q·Qᵀ.
fn hat_row(basis: &[f64], terms: usize, position: usize) -> Vec<f64> {
    let at = &basis[position * terms..(position + 1) * terms];
    basis.chunks_exact(terms).map(|row| dot(row, at)).collect()
}

/// Orthonormalizes the columns of a row-major `rows × cols` matrix.
fn orthonormalize(mut a: Vec<f64>, rows: usize, cols: usize) -> Vec<f64> {
    for j in 0..cols {
        for _pass in 0..2 {
            for i in 0..j {
                let r: f64 = (0..rows).map(|p| a[p * cols + i] * a[p * cols + j]).sum();
                for p in 0..rows {
                    a[p * cols + j] -= r * a[p * cols + i];
                }
            }
        }
        let norm = (0..rows)
            .map(|p| a[p * cols + j] * a[p * cols + j])
            .sum::<f64>()
            .sqrt();
        assert!(norm > 0.0, "polynomial basis is rank deficient");
        for p in 0..rows {
            a[p * cols + j] /= norm;
        }
    }
    a
}
