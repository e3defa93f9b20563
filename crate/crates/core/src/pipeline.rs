//! The seven phase-processing methods, from raw phase to TSFR, applied to a
//! complex CSI matrix.
//!
//! Every method decomposes the CSI, replaces the phase, and recomposes it with
//! the original amplitude matrix.

use std::fmt;
use std::str::FromStr;

use crate::calib::{lrr_calibrate_with, lt_calibrate, Abscissa};
use crate::error::{Error, Result};
use crate::matrix::{decompose, recompose, AmplitudeMatrix, CsiMatrix, PhaseMatrix, SubcarrierMap, Warning};
use crate::savgol::{sg_2d, sg_2d_separable, sg_freq, sg_time, SgConfig};
use crate::tsfr::{tsfr_from_calibrated, TsfrReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Raw,
    Lt,
    Lrr,
    LrrSgFreq,
    LrrSgTime,
    LrrSg2d,
    Tsfr,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Raw,
        Method::Lt,
        Method::Lrr,
        Method::LrrSgFreq,
        Method::LrrSgTime,
        Method::LrrSg2d,
        Method::Tsfr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Raw => "raw",
            Method::Lt => "lt",
            Method::Lrr => "lrr",
            Method::LrrSgFreq => "lrr+sgfreq",
            Method::LrrSgTime => "lrr+sgtime",
            Method::LrrSg2d => "lrr+sg2d",
            Method::Tsfr => "tsfr",
        }
    }

    pub fn valid_names() -> String {
        Self::ALL.map(Method::name).join(", ")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownMethod {
                name: s.to_string(),
                valid: Self::valid_names(),
            })
    }
}

#[derive(Debug, Clone, Default)]
pub struct ProcessParams {
    pub sg: SgConfig,
    /// LRR regression abscissa.
    pub abscissa: Abscissa,
    /// Subcarrier indices for LT (and physical-abscissa LRR); m_k = k when
    /// absent.
    pub map: Option<SubcarrierMap>,
    /// Two sequential 1D passes instead of the bivariate fit for `lrr+sg2d`.
    pub separable_2d: bool,
}

/// Phase after one of the methods, with the TSFR report when applicable.
#[derive(Debug, Clone)]
pub struct PhaseOutcome {
    pub phase: PhaseMatrix,
    pub tsfr: Option<TsfrReport>,
}

/// Runs `method` on a raw phase matrix.
pub fn phase_pipeline(raw: &PhaseMatrix, method: Method, params: &ProcessParams) -> Result<PhaseOutcome> {
    let lrr = || lrr_calibrate_with(raw, params.abscissa, params.map.as_ref());
    let phase = match method {
        Method::Raw => raw.clone(),
        Method::Lt => {
            let map = match &params.map {
                Some(map) => map.clone(),
                None => SubcarrierMap::ordinal(raw.subcarriers())?,
            };
            lt_calibrate(raw, &map)?
        }
        Method::Lrr => lrr()?,
        Method::LrrSgFreq => sg_freq(&lrr()?, &params.sg)?,
        Method::LrrSgTime => sg_time(&lrr()?.unwrap_columns(), &params.sg)?,
        Method::LrrSg2d => {
            let calibrated = lrr()?.unwrap_columns();
            if params.separable_2d {
                sg_2d_separable(&calibrated, &params.sg)?
            } else {
                sg_2d(&calibrated, &params.sg)?
            }
        }
        Method::Tsfr => {
            let (phase, report) = tsfr_from_calibrated(&lrr()?, &params.sg)?;
            return Ok(PhaseOutcome {
                phase,
                tsfr: Some(report),
            });
        }
    };
    Ok(PhaseOutcome { phase, tsfr: None })
}

/// Result of [`process`].
#[derive(Debug, Clone)]
pub struct Processed {
    pub method: Method,
    pub csi: CsiMatrix,
    /// The input amplitude, passed through untouched.
    pub amplitude: AmplitudeMatrix,
    pub phase: PhaseMatrix,
    pub tsfr: Option<TsfrReport>,
    pub warnings: Vec<Warning>,
}

/// Decompose, run `method` on the phase, recompose with the input amplitude.
pub fn process(csi: &CsiMatrix, method: Method, params: &ProcessParams) -> Result<Processed> {
    let polar = decompose(csi);
    let outcome = phase_pipeline(&polar.phase, method, params)?;
    let out = recompose(&polar.amplitude, &outcome.phase)?;
    Ok(Processed {
        method,
        csi: out,
        amplitude: polar.amplitude,
        phase: outcome.phase,
        tsfr: outcome.tsfr,
        warnings: polar.warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        let err = "lrr+sg3d".parse::<Method>().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("lrr+sg3d") && msg.contains("tsfr") && msg.contains("lrr+sgfreq"));
    }
}
