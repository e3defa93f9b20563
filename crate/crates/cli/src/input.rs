use std::path::{Path, PathBuf};

use csikit::io::{csif, csv, Payload};
use csikit::{CsiMatrix, PhaseMatrix, Stage, SubcarrierMap};

use crate::Failure;

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads CSIF, or CSV when the name ends in `.csv`.
pub fn read_payload(path: &Path) -> Result<Payload, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::io(path, e))?;
    let parsed = if is_csv(path) {
        csv::read(bytes.as_slice())
    } else {
        csif::decode(&bytes).map_err(csikit::Error::from)
    };
    parsed.map_err(|e| Failure::from_lib(Some(path), e))
}

pub fn write_payload(path: &Path, payload: &Payload) -> Result<(), Failure> {
    let bytes = if is_csv(path) {
        csv::to_string(payload).into_bytes()
    } else {
        csif::encode(payload)
    };
    write_bytes(path, &bytes)
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::io(path, e))
}

pub fn read_csi(path: &Path) -> Result<CsiMatrix, Failure> {
    match read_payload(path)? {
        Payload::Complex(g) => CsiMatrix::new(g).map_err(|e| Failure::from_lib(Some(path), e)),
        Payload::Real(_) => Err(Failure::data(format!(
            "{}: expected a complex CSI matrix, found a real one",
            path.display()
        ))),
    }
}

/// Phase for the statistics tables: complex input is decomposed and
/// LRR-calibrated, real input is taken as an already calibrated phase.
pub fn read_phase(path: &Path, calibrate: bool) -> Result<PhaseMatrix, Failure> {
    let lib = |e| Failure::from_lib(Some(path), e);
    match read_payload(path)? {
        Payload::Complex(g) => {
            let raw = csikit::decompose(&CsiMatrix::new(g).map_err(lib)?).phase;
            if calibrate {
                csikit::calib::lrr_calibrate(&raw).map_err(lib)
            } else {
                Ok(raw)
            }
        }
        Payload::Real(g) => {
            let stage = if calibrate { Stage::Calibrated } else { Stage::Raw };
            PhaseMatrix::new(g, stage).map_err(lib)
        }
    }
}

pub fn read_map(path: &Path, n_fft: usize) -> Result<SubcarrierMap, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let indices = text
        .split_whitespace()
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| Failure::data(format!("{}: {t:?} is not an integer index", path.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    SubcarrierMap::new(indices, n_fft).map_err(|e| Failure::from_lib(Some(path), e))
}

/// Refuses to overwrite an input file.
pub fn distinct(input: &Path, output: &Path) -> Result<(), Failure> {
    let canon = |p: &Path| -> PathBuf { std::fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf()) };
    if canon(input) == canon(output) {
        return Err(Failure::usage(format!(
            "output {} would overwrite the input",
            output.display()
        )));
    }
    Ok(())
}
