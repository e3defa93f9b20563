#![allow(dead_code)]

use std::f64::consts::PI;

use csikit::{Grid, PhaseMatrix, Stage};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Phases uniform in (−π, π].
pub fn random_phase(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> PhaseMatrix {
    let data = (0..rows * cols).map(|_| PI - 2.0 * PI * rng.random::<f64>()).collect();
    PhaseMatrix::new(Grid::from_vec(rows, cols, data).unwrap(), Stage::Raw).unwrap()
}

/// Slope of the centered least-squares line through (k, y_k), k = 1..K.
pub fn ols_slope(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let xm = (n + 1.0) / 2.0;
    let ym = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, &v) in y.iter().enumerate() {
        let dx = i as f64 + 1.0 - xm;
        sxy += dx * (v - ym);
        sxx += dx * dx;
    }
    sxy / sxx
}

/// Literal left-to-right trace of the piecewise rebuild with an explicit
/// offset chain.
pub fn naive_rebuild(phi: &[f64], d: f64) -> Vec<f64> {
    let mut out = vec![phi[0]];
    for k in 1..phi.len() {
        let eps = phi[k] - phi[k - 1];
        let prev = out[k - 1];
        let v = if eps < -d {
            prev - d
        } else if eps > d {
            prev + d
        } else {
            phi[k] - (phi[k - 1] - prev)
        };
        out.push(v);
    }
    out
}

/// Least-squares weights for the fitted value at `pos` of a window of
/// length `w`, from the pseudo-inverse of the raw Vandermonde matrix.
pub fn pinv_weights(order: usize, w: usize, pos: usize) -> Vec<f64> {
    let l = (w / 2) as f64;
    let v = DMatrix::from_fn(w, order + 1, |i, j| (i as f64 - l).powi(j as i32));
    let pinv = (v.transpose() * &v).try_inverse().unwrap() * v.transpose();
    let x = pos as f64 - l;
    (0..w)
        .map(|i| (0..=order).map(|j| x.powi(j as i32) * pinv[(j, i)]).sum())
        .collect()
}

/// Same oracle for the bivariate total-degree fit over a `wt × wf` window,
/// weights listed time-major.
pub fn pinv_weights_2d(order: usize, wt: usize, wf: usize, t: usize, f: usize) -> Vec<f64> {
    let exps: Vec<(i32, i32)> = (0..=order as i32)
        .flat_map(|d| (0..=d).map(move |a| (a, d - a)))
        .collect();
    let (lt, lf) = ((wt / 2) as f64, (wf / 2) as f64);
    let v = DMatrix::from_fn(wt * wf, exps.len(), |r, c| {
        let (i, j) = ((r / wf) as f64 - lt, (r % wf) as f64 - lf);
        i.powi(exps[c].0) * j.powi(exps[c].1)
    });
    let pinv = v.clone().pseudo_inverse(1e-14).unwrap();
    let (x, y) = (t as f64 - lt, f as f64 - lf);
    (0..wt * wf)
        .map(|r| {
            exps.iter()
                .enumerate()
                .map(|(c, &(a, b))| x.powi(a) * y.powi(b) * pinv[(c, r)])
                .sum()
        })
        .collect()
}

/// Random polynomial of total degree ≤ `order` in (s, k), small coefficients.
pub fn poly_grid(rng: &mut ChaCha8Rng, order: usize, rows: usize, cols: usize) -> Grid<f64> {
    let mut terms = Vec::new();
    for d in 0..=order as i32 {
        for a in 0..=d {
            terms.push((a, d - a, rng.random_range(-1.0..1.0)));
        }
    }
    let data = (0..rows * cols)
        .map(|i| {
            let x = (i / cols) as f64 / rows as f64;
            let y = (i % cols) as f64 / cols as f64;
            terms.iter().map(|&(a, b, c)| c * x.powi(a) * y.powi(b)).sum()
        })
        .collect();
    Grid::from_vec(rows, cols, data).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
