//! Feature export for downstream learners: a raw row-major payload
//! (`f64` or `f32`, little-endian, no header) and a plain-text sidecar.
//!
//! ```text
//! # csikit feature sidecar
//! version = 1
//! rows = 1000
//! cols = 52
//! element = f64
//! byte_order = little
//! param.method = tsfr
//! ```
//!
//! Keys prefixed with `param.` carry the pipeline parameters verbatim.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::FormatError;
use crate::error::{Error, Result};
use crate::matrix::Grid;

pub const SIDECAR_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Element {
    #[default]
    F64,
    F32,
}

impl Element {
    pub fn name(self) -> &'static str {
        match self {
            Element::F64 => "f64",
            Element::F32 => "f32",
        }
    }

    pub fn size(self) -> usize {
        match self {
            Element::F64 => 8,
            Element::F32 => 4,
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "f64" => Some(Element::F64),
            "f32" => Some(Element::F32),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Sidecar {
    pub rows: usize,
    pub cols: usize,
    pub element: Element,
    /// `(key, value)` without the `param.` prefix, in file order.
    pub params: Vec<(String, String)>,
}

impl Sidecar {
    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn payload_len(&self) -> u64 {
        self.rows as u64 * self.cols as u64 * self.element.size() as u64
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# csikit feature sidecar\n");
        let _ = writeln!(out, "version = {SIDECAR_VERSION}");
        let _ = writeln!(out, "rows = {}", self.rows);
        let _ = writeln!(out, "cols = {}", self.cols);
        let _ = writeln!(out, "element = {}", self.element.name());
        out.push_str("byte_order = little\n");
        for (k, v) in &self.params {
            let _ = writeln!(out, "param.{k} = {v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut version = None;
        let mut rows = None;
        let mut cols = None;
        let mut element = None;
        let mut byte_order = None;
        let mut params = Vec::new();
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let line = i as u64 + 1;
            last_line = line;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let bad = |message: String| FormatError::Malformed { line, message };
            let (key, value) = trimmed
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| bad(format!("expected `key = value`, found {trimmed:?}")))?;
            let count = |v: &str| {
                v.parse::<usize>()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| bad(format!("{key} must be a positive integer, found {v:?}")))
            };
            let slot_taken = |taken: bool| {
                if taken {
                    Err(bad(format!("duplicate key {key:?}")))
                } else {
                    Ok(())
                }
            };
            match key {
                "version" => {
                    slot_taken(version.is_some())?;
                    if value != SIDECAR_VERSION.to_string() {
                        return Err(bad(format!("unsupported sidecar version {value:?}")));
                    }
                    version = Some(());
                }
                "rows" => {
                    slot_taken(rows.is_some())?;
                    rows = Some(count(value)?);
                }
                "cols" => {
                    slot_taken(cols.is_some())?;
                    cols = Some(count(value)?);
                }
                "element" => {
                    slot_taken(element.is_some())?;
                    element = Some(
                        Element::parse(value)
                            .ok_or_else(|| bad(format!("element must be f64 or f32, found {value:?}")))?,
                    );
                }
                "byte_order" => {
                    slot_taken(byte_order.is_some())?;
                    if value != "little" {
                        return Err(bad(format!("byte_order must be little, found {value:?}")));
                    }
                    byte_order = Some(());
                }
                _ => match key.strip_prefix("param.") {
                    Some(name) if !name.is_empty() => {
                        slot_taken(params.iter().any(|(k, _): &(String, String)| k == name))?;
                        params.push((name.to_string(), value.to_string()));
                    }
                    _ => return Err(bad(format!("unknown key {key:?}"))),
                },
            }
        }
        let missing = |what: &str| FormatError::Malformed {
            line: last_line,
            message: format!("missing key {what:?}"),
        };
        version.ok_or_else(|| missing("version"))?;
        byte_order.ok_or_else(|| missing("byte_order"))?;
        Ok(Sidecar {
            rows: rows.ok_or_else(|| missing("rows"))?,
            cols: cols.ok_or_else(|| missing("cols"))?,
            element: element.ok_or_else(|| missing("element"))?,
            params,
        })
    }
}

/// `features.bin` → `features.bin.meta`.
pub fn sidecar_path(payload: &Path) -> PathBuf {
    let mut name = payload.as_os_str().to_owned();
    name.push(".meta");
    PathBuf::from(name)
}

pub fn encode(grid: &Grid<f64>, element: Element) -> Vec<u8> {
    let mut out = Vec::with_capacity(grid.as_slice().len() * element.size());
    for &v in grid.as_slice() {
        match element {
            Element::F64 => out.extend_from_slice(&v.to_le_bytes()),
            Element::F32 => out.extend_from_slice(&(v as f32).to_le_bytes()),
        }
    }
    out
}

/// Values are widened to `f64` on the way back in.
pub fn decode(bytes: &[u8], sidecar: &Sidecar) -> Result<Grid<f64>> {
    let expected = sidecar.payload_len();
    let actual = bytes.len() as u64;
    if actual < expected {
        return Err(FormatError::Truncated { expected, actual }.into());
    }
    if actual > expected {
        return Err(FormatError::TrailingBytes { expected, actual }.into());
    }
    let data = match sidecar.element {
        Element::F64 => bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect(),
        Element::F32 => bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect(),
    };
    Grid::from_vec(sidecar.rows, sidecar.cols, data)
}

/// Writes the payload to `path` and the sidecar next to it.
pub fn export(path: &Path, grid: &Grid<f64>, element: Element, params: &[(&str, String)]) -> Result<Sidecar> {
    let sidecar = Sidecar {
        rows: grid.rows(),
        cols: grid.cols(),
        element,
        params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
    };
    if let Some((k, _)) = sidecar.params.iter().find(|(k, v)| k.contains('=') || v.contains('\n')) {
        return Err(Error::Parameter(format!("feature parameter {k:?} cannot be written")));
    }
    std::fs::write(path, encode(grid, element))?;
    std::fs::write(sidecar_path(path), sidecar.to_text())?;
    Ok(sidecar)
}

pub fn import(path: &Path) -> Result<(Grid<f64>, Sidecar)> {
    let text = std::fs::read_to_string(sidecar_path(path))?;
    let sidecar = Sidecar::parse(&text)?;
    let bytes = std::fs::read(path)?;
    Ok((decode(&bytes, &sidecar)?, sidecar))
}
