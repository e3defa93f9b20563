//! Phase sanitization for WiFi channel state information.
//!
//! A CSI capture is an S×K complex matrix: S OFDM symbols by K subcarriers.
//! Its phase is corrupted per symbol by a timing offset (a slope across
//! subcarriers) and a constant offset, and by noise. This crate removes those
//! corruptions:
//!
//! * [`calib`]: linear transformation (LT) and linear-regression rotation (LRR).
//! * [`savgol`]: Savitzky-Golay smoothing along time, frequency, or both.
//! * [`tsfr`]: time smoothing with frequency rebuild, which bounds the jump
//!   between adjacent subcarriers by a per-symbol threshold.
//! * [`pipeline`]: the seven methods, from `raw` to `tsfr`, applied to a
//!   complex matrix with the amplitude left untouched.
//! * [`synth`]: a multipath channel generator with known impairments, used as
//!   ground truth.
//! * [`stats`]: histogram and threshold tables for diagnostics.
//! * [`io`]: CSIF binary, CSV, feature exports, and processing reports.
//!
//! ```
//! use csikit::pipeline::{process, Method, ProcessParams};
//! use csikit::synth::DatasetSpec;
//!
//! let data = DatasetSpec::demo(200, 30).generate()?;
//! let out = process(&data.measured_csi, Method::Tsfr, &ProcessParams::default())?;
//! assert_eq!(out.phase.dims(), (200, 30));
//! assert_eq!(out.amplitude, csikit::decompose(&data.measured_csi).amplitude);
//! # Ok::<(), csikit::Error>(())
//! ```

pub mod calib;
pub mod error;
pub mod io;
pub mod matrix;
pub mod pipeline;
pub mod savgol;
pub mod stats;
pub mod synth;
pub mod tsfr;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use matrix::{
    decompose, principal_arg, recompose, unwrap, wrap_to_pi, AmplitudeMatrix, CsiMatrix, Grid, PhaseMatrix,
    Polar, Stage, SubcarrierMap, Warning,
};
pub use pipeline::{process, Method, ProcessParams, Processed};
