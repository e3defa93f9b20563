//! Synthetic CSI with known synchronization impairments.
//!
//! The clean channel is a multipath frequency response
//!
//! ```text
//! H_s(k) = Σ_p g_{p,s} · exp(−j·2π·m_k·τ_p / N)
//! ```
//!
//! with an optional slow sinusoidal modulation of the path gains over the
//! symbols. The measured phase adds a per-symbol slope from the time lag Δt_s,
//! a per-symbol constant γ_s and Gaussian phase noise Z:
//!
//! ```text
//! θ̂_{s,k} = θ_{s,k} + 2π·(m_k/N)·Δt_s + γ_s + Z
//! ```
//!
//! # Random streams
//!
//! All draws come from ChaCha8 seeded with the 64-bit seed via
//! `seed_from_u64`, one stream per quantity so that changing one does not
//! shift the others: stream 1 draws Δt (one per symbol), stream 2 draws γ,
//! stream 3 the phase noise and stream 4 the optional complex gain noise
//! (both in row-major order, real part before imaginary part).

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::{Path as FsPath, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::io::csif;
use crate::matrix::{principal_arg, CsiMatrix, Grid, SubcarrierMap};

const STREAM_DELTA_T: u64 = 1;
const STREAM_GAMMA: u64 = 2;
const STREAM_PHASE_NOISE: u64 = 3;
const STREAM_GAIN_NOISE: u64 = 4;

/// One propagation path: delay in samples and complex gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub delay: f64,
    pub gain: Complex64,
}

/// Slow sinusoidal modulation of the path gains over the symbols.
///
/// Path p of P is scaled by 1 + depth·sin(2π·s/period + 2π·p/P).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drift {
    pub depth: f64,
    /// Period in symbols.
    pub period: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    pub paths: Vec<Path>,
    pub drift: Option<Drift>,
}

impl ChannelSpec {
    pub fn flat() -> Self {
        Self {
            paths: vec![Path {
                delay: 0.0,
                gain: Complex64::new(1.0, 0.0),
            }],
            drift: None,
        }
    }

    /// Three paths with a slow drift. The direct path dominates at every
    /// symbol (|g_0| > |g_1| + |g_2| even at the drift extremes), so the
    /// response has no deep fades.
    pub fn demo() -> Self {
        Self {
            paths: vec![
                Path {
                    delay: 0.0,
                    gain: Complex64::new(1.0, 0.0),
                },
                Path {
                    delay: 3.0,
                    gain: Complex64::from_polar(0.45, 0.8),
                },
                Path {
                    delay: 7.0,
                    gain: Complex64::from_polar(0.2, -2.1),
                },
            ],
            drift: Some(Drift {
                depth: 0.15,
                period: 200.0,
            }),
        }
    }

    fn validate(&self, n_fft: usize) -> Result<()> {
        if self.paths.is_empty() {
            return Err(Error::Channel("at least one path is required".into()));
        }
        for (i, p) in self.paths.iter().enumerate() {
            if !(p.delay.is_finite() && p.delay >= 0.0 && p.delay < n_fft as f64) {
                return Err(Error::Channel(format!(
                    "path {i}: delay {} outside [0, {n_fft})",
                    p.delay
                )));
            }
            if !(p.gain.re.is_finite() && p.gain.im.is_finite()) {
                return Err(Error::Channel(format!("path {i}: non-finite gain")));
            }
        }
        if let Some(d) = self.drift {
            if !(d.depth.is_finite() && (0.0..1.0).contains(&d.depth)) {
                return Err(Error::Channel(format!(
                    "drift depth {} outside [0, 1)",
                    d.depth
                )));
            }
            if !(d.period.is_finite() && d.period > 0.0) {
                return Err(Error::Channel(format!(
                    "drift period {} must be positive",
                    d.period
                )));
            }
        }
        Ok(())
    }
}

/// Per-symbol impairments and noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpairmentSpec {
    /// Time lag Δt_s in samples (fractional values allowed).
    pub delta_t: Vec<f64>,
    /// Constant phase offset γ_s in radians.
    pub gamma: Vec<f64>,
    /// Standard deviation of the additive phase noise Z (rad).
    pub noise_sigma: f64,
    /// Standard deviation of optional additive complex noise on the gain,
    /// per real component. Zero keeps the injection phase-only.
    pub complex_noise_sigma: f64,
    pub seed: u64,
    pub map: SubcarrierMap,
}

impl ImpairmentSpec {
    /// No offsets and no noise.
    pub fn none(symbols: usize, map: SubcarrierMap) -> Self {
        Self {
            delta_t: vec![0.0; symbols],
            gamma: vec![0.0; symbols],
            noise_sigma: 0.0,
            complex_noise_sigma: 0.0,
            seed: 0,
            map,
        }
    }

    pub fn symbols(&self) -> usize {
        self.delta_t.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub true_csi: CsiMatrix,
    pub measured_csi: CsiMatrix,
    pub impairments: ImpairmentSpec,
}

impl SynthOutput {
    /// Writes `<prefix>.true.csif` and `<prefix>.meas.csif`; returns both paths.
    pub fn write_csif(&self, prefix: &FsPath) -> Result<(PathBuf, PathBuf)> {
        let true_path = with_suffix(prefix, ".true.csif");
        let meas_path = with_suffix(prefix, ".meas.csif");
        std::fs::write(&true_path, csif::encode_complex(self.true_csi.grid()))?;
        std::fs::write(&meas_path, csif::encode_complex(self.measured_csi.grid()))?;
        Ok((true_path, meas_path))
    }
}

fn with_suffix(prefix: &FsPath, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Clean multipath frequency response for `symbols` symbols.
pub fn gen_true_csi(channel: &ChannelSpec, symbols: usize, map: &SubcarrierMap) -> Result<CsiMatrix> {
    channel.validate(map.n_fft())?;
    let n = map.n_fft() as f64;
    let count = channel.paths.len() as f64;
    let mut data = Vec::with_capacity(symbols * map.len());
    for s in 0..symbols {
        let gains: Vec<Complex64> = channel
            .paths
            .iter()
            .enumerate()
            .map(|(p, path)| match channel.drift {
                Some(d) => {
                    let arg = TAU * s as f64 / d.period + TAU * p as f64 / count;
                    path.gain * (1.0 + d.depth * arg.sin())
                }
                None => path.gain,
            })
            .collect();
        for &m in map.indices() {
            let h = channel
                .paths
                .iter()
                .zip(&gains)
                .map(|(path, g)| g * Complex64::from_polar(1.0, -TAU * m as f64 * path.delay / n))
                .sum();
            data.push(h);
        }
    }
    CsiMatrix::new(Grid::from_vec(symbols, map.len(), data)?)
}

/// Injects the per-symbol impairments into a clean CSI matrix.
pub fn apply_impairments(true_csi: &CsiMatrix, imp: &ImpairmentSpec) -> Result<SynthOutput> {
    let (symbols, subcarriers) = true_csi.dims();
    for (what, len) in [("delta_t", imp.delta_t.len()), ("gamma", imp.gamma.len())] {
        if len != symbols {
            return Err(Error::LengthMismatch {
                what,
                expected: symbols,
                found: len,
            });
        }
    }
    if imp.map.len() != subcarriers {
        return Err(Error::LengthMismatch {
            what: "subcarrier map",
            expected: subcarriers,
            found: imp.map.len(),
        });
    }
    for (what, sigma) in [
        ("noise_sigma", imp.noise_sigma),
        ("complex_noise_sigma", imp.complex_noise_sigma),
    ] {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::Parameter(format!("{what} must be >= 0, got {sigma}")));
        }
    }
    let mut phase_rng = stream(imp.seed, STREAM_PHASE_NOISE);
    let mut gain_rng = stream(imp.seed, STREAM_GAIN_NOISE);
    let phase_noise = Normal::new(0.0, imp.noise_sigma).expect("sigma validated");
    let gain_noise = Normal::new(0.0, imp.complex_noise_sigma).expect("sigma validated");
    let n = imp.map.n_fft() as f64;

    let mut data = Vec::with_capacity(symbols * subcarriers);
    for s in 0..symbols {
        for (k, &m) in imp.map.indices().iter().enumerate() {
            let h = true_csi.get(s, k);
            let mut offset = TAU * (m as f64 / n) * imp.delta_t[s] + imp.gamma[s];
            if imp.noise_sigma > 0.0 {
                offset += phase_noise.sample(&mut phase_rng);
            }
            let mut z = if offset == 0.0 {
                h
            } else {
                let theta = if h.re == 0.0 && h.im == 0.0 { 0.0 } else { principal_arg(h) };
                Complex64::from_polar(h.norm(), theta + offset)
            };
            if imp.complex_noise_sigma > 0.0 {
                z += Complex64::new(gain_noise.sample(&mut gain_rng), gain_noise.sample(&mut gain_rng));
            }
            data.push(z);
        }
    }
    Ok(SynthOutput {
        true_csi: true_csi.clone(),
        measured_csi: CsiMatrix::new(Grid::from_vec(symbols, subcarriers, data)?)?,
        impairments: imp.clone(),
    })
}

/// Clean channel plus impairments; the symbol count comes from `imp`.
pub fn gen_dataset(channel: &ChannelSpec, imp: &ImpairmentSpec) -> Result<SynthOutput> {
    let true_csi = gen_true_csi(channel, imp.symbols(), &imp.map)?;
    apply_impairments(&true_csi, imp)
}

/// How a per-symbol offset is drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OffsetDraw {
    Constant(f64),
    /// Uniform on [low, high).
    Uniform(f64, f64),
    /// Uniform on (−π, π].
    UniformAngle,
}

impl OffsetDraw {
    fn draw(&self, rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
        (0..count)
            .map(|_| match *self {
                OffsetDraw::Constant(v) => v,
                OffsetDraw::Uniform(lo, hi) => lo + (hi - lo) * rng.random::<f64>(),
                OffsetDraw::UniformAngle => PI - TAU * rng.random::<f64>(),
            })
            .collect()
    }

    fn to_text(self) -> String {
        match self {
            OffsetDraw::Constant(v) => format!("constant {v}"),
            OffsetDraw::Uniform(lo, hi) => format!("uniform {lo} {hi}"),
            OffsetDraw::UniformAngle => "uniform".to_string(),
        }
    }
}

/// Subcarrier layout of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub enum Subcarriers {
    /// `count` consecutive indices starting at `first`.
    Contiguous { first: i64, count: usize },
    Explicit(Vec<i64>),
}

/// Everything needed to regenerate a synthetic dataset; this is what the
/// key/value spec files describe.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSpec {
    pub symbols: usize,
    pub seed: u64,
    pub n_fft: usize,
    pub subcarriers: Subcarriers,
    pub channel: ChannelSpec,
    pub delta_t: OffsetDraw,
    pub gamma: OffsetDraw,
    pub noise_sigma: f64,
    pub complex_noise_sigma: f64,
}

impl DatasetSpec {
    /// Demo fixture: 3-path drifting channel, N = 64, contiguous subcarriers
    /// centred on DC, Δt uniform in [−2, 2), γ uniform, phase noise 0.05 rad.
    pub fn demo(symbols: usize, subcarriers: usize) -> Self {
        Self {
            symbols,
            seed: 0,
            n_fft: 64,
            subcarriers: Subcarriers::Contiguous {
                first: -(subcarriers as i64) / 2,
                count: subcarriers,
            },
            channel: ChannelSpec::demo(),
            delta_t: OffsetDraw::Uniform(-2.0, 2.0),
            gamma: OffsetDraw::UniformAngle,
            noise_sigma: 0.05,
            complex_noise_sigma: 0.0,
        }
    }

    pub fn map(&self) -> Result<SubcarrierMap> {
        match &self.subcarriers {
            Subcarriers::Contiguous { first, count } => {
                SubcarrierMap::contiguous(*first, *count, self.n_fft)
            }
            Subcarriers::Explicit(m) => SubcarrierMap::new(m.clone(), self.n_fft),
        }
    }

    pub fn subcarrier_count(&self) -> usize {
        match &self.subcarriers {
            Subcarriers::Contiguous { count, .. } => *count,
            Subcarriers::Explicit(m) => m.len(),
        }
    }

    /// Changes the subcarrier count. A contiguous layout centred on DC
    /// (first index −count/2) stays centred; any other contiguous layout
    /// keeps its first index. Explicit index lists cannot be resized.
    pub fn set_subcarrier_count(&mut self, count: usize) -> Result<()> {
        match &mut self.subcarriers {
            Subcarriers::Contiguous { first, count: c } => {
                if *first == -(*c as i64) / 2 {
                    *first = -(count as i64) / 2;
                }
                *c = count;
                Ok(())
            }
            Subcarriers::Explicit(m) if m.len() == count => Ok(()),
            Subcarriers::Explicit(m) => Err(Error::Parameter(format!(
                "spec lists {} explicit subcarrier indices, cannot resize to {count}",
                m.len()
            ))),
        }
    }

    /// Draws Δt and γ for every symbol.
    pub fn impairments(&self) -> Result<ImpairmentSpec> {
        Ok(ImpairmentSpec {
            delta_t: self.delta_t.draw(&mut stream(self.seed, STREAM_DELTA_T), self.symbols),
            gamma: self.gamma.draw(&mut stream(self.seed, STREAM_GAMMA), self.symbols),
            noise_sigma: self.noise_sigma,
            complex_noise_sigma: self.complex_noise_sigma,
            seed: self.seed,
            map: self.map()?,
        })
    }

    pub fn generate(&self) -> Result<SynthOutput> {
        if self.symbols == 0 {
            return Err(Error::Parameter("symbol count must be positive".into()));
        }
        gen_dataset(&self.channel, &self.impairments()?)
    }

    /// Parses the key/value spec format. Keys absent from the text keep the
    /// values of `base`; `path` lines, when present, replace all paths.
    pub fn parse_with_base(text: &str, base: DatasetSpec) -> Result<Self> {
        let mut spec = base;
        let mut paths = Vec::new();
        let mut seen: Vec<String> = Vec::new();
        let mut first_index = None;
        let mut count = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if key != "path" && seen.iter().any(|k| k == key) {
                return Err(err(format!("duplicate key {key:?}")));
            }
            match key {
                "symbols" => spec.symbols = parse_num(value).map_err(err)?,
                "seed" => spec.seed = parse_num(value).map_err(err)?,
                "n_fft" => spec.n_fft = parse_num(value).map_err(err)?,
                "subcarriers" => count = Some(parse_num(value).map_err(err)?),
                "first_index" => first_index = Some(parse_num(value).map_err(err)?),
                "indices" => {
                    let m = value
                        .split(',')
                        .map(|v| parse_num::<i64>(v.trim()))
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(err)?;
                    spec.subcarriers = Subcarriers::Explicit(m);
                }
                "path" => {
                    let f: Vec<f64> = value
                        .split_whitespace()
                        .map(parse_num)
                        .collect::<std::result::Result<_, _>>()
                        .map_err(err)?;
                    if f.len() != 3 {
                        return Err(err(format!(
                            "path needs `delay gain_re gain_im`, got {value:?}"
                        )));
                    }
                    paths.push(Path {
                        delay: f[0],
                        gain: Complex64::new(f[1], f[2]),
                    });
                }
                "drift_depth" => {
                    let depth = parse_num(value).map_err(err)?;
                    let period = spec.channel.drift.map_or(200.0, |d| d.period);
                    spec.channel.drift = Some(Drift { depth, period });
                }
                "drift_period" => {
                    let period = parse_num(value).map_err(err)?;
                    let depth = spec.channel.drift.map_or(0.0, |d| d.depth);
                    spec.channel.drift = Some(Drift { depth, period });
                }
                "delta_t" => spec.delta_t = parse_draw(value, false).map_err(err)?,
                "gamma" => spec.gamma = parse_draw(value, true).map_err(err)?,
                "noise_sigma" => spec.noise_sigma = parse_num(value).map_err(err)?,
                "complex_noise_sigma" => spec.complex_noise_sigma = parse_num(value).map_err(err)?,
                other => return Err(err(format!("unknown key {other:?}"))),
            }
            seen.push(key.to_string());
        }
        if !paths.is_empty() {
            spec.channel.paths = paths;
        }
        if seen.iter().any(|k| k == "indices") && (count.is_some() || first_index.is_some()) {
            return Err(Error::Parse {
                line: 0,
                message: "`indices` cannot be combined with `subcarriers` or `first_index`".into(),
            });
        }
        if count.is_some() || first_index.is_some() {
            let (old_first, old_count) = match spec.subcarriers {
                Subcarriers::Contiguous { first, count } => (first, count),
                Subcarriers::Explicit(ref m) => (m[0], m.len()),
            };
            let count = count.unwrap_or(old_count);
            let first = first_index.unwrap_or(if count == old_count {
                old_first
            } else {
                -(count as i64) / 2
            });
            spec.subcarriers = Subcarriers::Contiguous { first, count };
        }
        Ok(spec)
    }

    /// Parses a spec, starting from the demo fixture with S = 1000, K = 52.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_base(text, Self::demo(1000, 52))
    }

    /// Canonical text form; `parse` of the output gives back `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# csikit synth spec v1\n");
        let _ = writeln!(out, "symbols = {}", self.symbols);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "n_fft = {}", self.n_fft);
        match &self.subcarriers {
            Subcarriers::Contiguous { first, count } => {
                let _ = writeln!(out, "subcarriers = {count}");
                let _ = writeln!(out, "first_index = {first}");
            }
            Subcarriers::Explicit(m) => {
                let list: Vec<String> = m.iter().map(i64::to_string).collect();
                let _ = writeln!(out, "indices = {}", list.join(","));
            }
        }
        for p in &self.channel.paths {
            let _ = writeln!(out, "path = {} {} {}", p.delay, p.gain.re, p.gain.im);
        }
        if let Some(d) = self.channel.drift {
            let _ = writeln!(out, "drift_depth = {}", d.depth);
            let _ = writeln!(out, "drift_period = {}", d.period);
        }
        let _ = writeln!(out, "delta_t = {}", self.delta_t.to_text());
        let _ = writeln!(out, "gamma = {}", self.gamma.to_text());
        let _ = writeln!(out, "noise_sigma = {}", self.noise_sigma);
        let _ = writeln!(out, "complex_noise_sigma = {}", self.complex_noise_sigma);
        out
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn parse_num<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse()
        .map_err(|_| format!("cannot parse {s:?} as a number"))
}

fn parse_draw(value: &str, angle: bool) -> std::result::Result<OffsetDraw, String> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    match parts.as_slice() {
        ["constant", v] => Ok(OffsetDraw::Constant(parse_num(v)?)),
        ["uniform"] if angle => Ok(OffsetDraw::UniformAngle),
        ["uniform", lo, hi] => {
            let (lo, hi): (f64, f64) = (parse_num(lo)?, parse_num(hi)?);
            if !(lo < hi) {
                return Err(format!("uniform range needs low < high, got {lo} {hi}"));
            }
            Ok(OffsetDraw::Uniform(lo, hi))
        }
        _ => Err(format!(
            "expected `constant X`, `uniform LOW HIGH`{}, got {value:?}",
            if angle { " or `uniform`" } else { "" }
        )),
    }
}
