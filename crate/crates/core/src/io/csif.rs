//! CSIF binary matrices.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "CSIF"
//! 4       2     version, u16 = 1
//! 6       2     flags, u16: bit 0 complex payload, bit 1 real payload
//! 8       4     S (rows), u32
//! 12      4     K (columns), u32
//! 16      ...   row-major f64; complex cells as (re, im) pairs
//! ```
//!
//! All integers and floats are little-endian.

use std::path::Path;

use num_complex::Complex64;

use super::{FormatError, Payload};
use crate::error::Result;
use crate::matrix::Grid;

pub const MAGIC: [u8; 4] = *b"CSIF";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 16;
pub const FLAG_COMPLEX: u16 = 0b01;
pub const FLAG_REAL: u16 = 0b10;

fn header(flags: u16, rows: usize, cols: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&flags.to_le_bytes());
    out.extend_from_slice(&dim(rows).to_le_bytes());
    out.extend_from_slice(&dim(cols).to_le_bytes());
    out
}

fn dim(n: usize) -> u32 {
    u32::try_from(n).expect("matrix dimension exceeds u32")
}

pub fn encode_complex(grid: &Grid<Complex64>) -> Vec<u8> {
    let mut out = header(FLAG_COMPLEX, grid.rows(), grid.cols());
    out.reserve(grid.as_slice().len() * 16);
    for z in grid.as_slice() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn encode_real(grid: &Grid<f64>) -> Vec<u8> {
    let mut out = header(FLAG_REAL, grid.rows(), grid.cols());
    out.reserve(grid.as_slice().len() * 8);
    for v in grid.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn encode(payload: &Payload) -> Vec<u8> {
    match payload {
        Payload::Complex(g) => encode_complex(g),
        Payload::Real(g) => encode_real(g),
    }
}

pub fn decode(bytes: &[u8]) -> Result<Payload, FormatError> {
    if bytes.len() < HEADER_LEN {
        if bytes.len() >= 4 && bytes[..4] != MAGIC {
            return Err(FormatError::BadMagic {
                found: bytes[..4].try_into().unwrap(),
            });
        }
        return Err(FormatError::Truncated {
            expected: HEADER_LEN as u64,
            actual: bytes.len() as u64,
        });
    }
    let magic: [u8; 4] = bytes[..4].try_into().unwrap();
    if magic != MAGIC {
        return Err(FormatError::BadMagic { found: magic });
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion { found: version });
    }
    let flags = u16::from_le_bytes([bytes[6], bytes[7]]);
    let per_cell = match flags {
        FLAG_COMPLEX => 16u64,
        FLAG_REAL => 8u64,
        _ => return Err(FormatError::BadFlags { flags }),
    };
    let rows = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    let cols = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
    if rows == 0 || cols == 0 {
        return Err(FormatError::EmptyShape { rows, cols });
    }
    let expected = HEADER_LEN as u64 + rows as u64 * cols as u64 * per_cell;
    let actual = bytes.len() as u64;
    if actual < expected {
        return Err(FormatError::Truncated { expected, actual });
    }
    if actual > expected {
        return Err(FormatError::TrailingBytes { expected, actual });
    }
    let body = &bytes[HEADER_LEN..];
    let f = |i: usize| f64::from_le_bytes(body[i * 8..i * 8 + 8].try_into().unwrap());
    let (rows, cols) = (rows as usize, cols as usize);
    let cells = rows * cols;
    let grid_err = |_| FormatError::Truncated { expected, actual };
    Ok(if flags == FLAG_COMPLEX {
        let data = (0..cells).map(|i| Complex64::new(f(2 * i), f(2 * i + 1))).collect();
        Payload::Complex(Grid::from_vec(rows, cols, data).map_err(grid_err)?)
    } else {
        let data = (0..cells).map(f).collect();
        Payload::Real(Grid::from_vec(rows, cols, data).map_err(grid_err)?)
    })
}

pub fn read(path: &Path) -> Result<Payload> {
    let bytes = std::fs::read(path)?;
    Ok(decode(&bytes)?)
}

pub fn write(path: &Path, payload: &Payload) -> Result<()> {
    std::fs::write(path, encode(payload))?;
    Ok(())
}
