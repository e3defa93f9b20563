//! Long-form CSV: one line per cell after a header of `s,k,re,im` (complex)
//! or `s,k,value` (real). Indices are 1-based. Lines may come in any order
//! but every cell of the S×K grid must appear exactly once.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{FormatError, Payload};
use crate::error::Result;
use crate::matrix::Grid;

pub const COMPLEX_HEADER: [&str; 4] = ["s", "k", "re", "im"];
pub const REAL_HEADER: [&str; 3] = ["s", "k", "value"];

/// Shortest representation that parses back to the same bits.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn write<W: Write>(writer: W, payload: &Payload) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let map = |e: csv::Error| std::io::Error::other(e);
    match payload {
        Payload::Complex(g) => {
            w.write_record(COMPLEX_HEADER).map_err(map)?;
            for s in 0..g.rows() {
                for k in 0..g.cols() {
                    let z = g.get(s, k);
                    w.write_record([
                        (s + 1).to_string(),
                        (k + 1).to_string(),
                        format_f64(z.re),
                        format_f64(z.im),
                    ])
                    .map_err(map)?;
                }
            }
        }
        Payload::Real(g) => {
            w.write_record(REAL_HEADER).map_err(map)?;
            for s in 0..g.rows() {
                for k in 0..g.cols() {
                    w.write_record([(s + 1).to_string(), (k + 1).to_string(), format_f64(g.get(s, k))])
                        .map_err(map)?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn to_string(payload: &Payload) -> String {
    let mut buf = Vec::new();
    write(&mut buf, payload).expect("writing to memory");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

pub fn read<R: Read>(reader: R) -> Result<Payload> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let malformed = |e: csv::Error| -> crate::error::Error {
        let line = e.position().map_or(0, |p| p.line());
        match e.into_kind() {
            csv::ErrorKind::Io(io) => io.into(),
            other => FormatError::Malformed {
                line,
                message: format!("{other:?}"),
            }
            .into(),
        }
    };

    let header = match records.next() {
        Some(r) => r.map_err(malformed)?,
        None => return Err(FormatError::NoData.into()),
    };
    let fields: Vec<&str> = header.iter().collect();
    let complex = if fields == COMPLEX_HEADER {
        true
    } else if fields == REAL_HEADER {
        false
    } else {
        return Err(FormatError::CsvHeader {
            line: line_of(&header),
            found: fields.join(","),
        }
        .into());
    };
    let width = fields.len();

    // (s, k, re, im, line)
    let mut cells: Vec<(usize, usize, f64, f64, u64)> = Vec::new();
    for record in records {
        let record = record.map_err(malformed)?;
        let line = line_of(&record);
        if record.len() != width {
            return Err(FormatError::Ragged {
                line,
                expected: width,
                found: record.len(),
            }
            .into());
        }
        let index = |i: usize| -> std::result::Result<usize, FormatError> {
            match record[i].parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v),
                _ => Err(FormatError::BadIndex {
                    line,
                    value: record[i].to_string(),
                }),
            }
        };
        let number = |i: usize| -> std::result::Result<f64, FormatError> {
            record[i].parse::<f64>().map_err(|_| FormatError::NonNumeric {
                line,
                column: i + 1,
                value: record[i].to_string(),
            })
        };
        let (s, k) = (index(0)?, index(1)?);
        let re = number(2)?;
        let im = if complex { number(3)? } else { 0.0 };
        cells.push((s, k, re, im, line));
    }
    if cells.is_empty() {
        return Err(FormatError::NoData.into());
    }
    let rows = cells.iter().map(|c| c.0).max().unwrap();
    let cols = cells.iter().map(|c| c.1).max().unwrap();
    let mut seen: Vec<u64> = vec![0; rows * cols];
    let mut re = vec![0.0; rows * cols];
    let mut im = vec![0.0; rows * cols];
    for &(s, k, r, i, line) in &cells {
        let at = (s - 1) * cols + (k - 1);
        if seen[at] != 0 {
            return Err(FormatError::Duplicate {
                line,
                symbol: s,
                subcarrier: k,
                first_line: seen[at],
            }
            .into());
        }
        seen[at] = line;
        re[at] = r;
        im[at] = i;
    }
    if let Some(at) = seen.iter().position(|&l| l == 0) {
        return Err(FormatError::Missing {
            symbol: at / cols + 1,
            subcarrier: at % cols + 1,
        }
        .into());
    }
    Ok(if complex {
        let data = re.into_iter().zip(im).map(|(r, i)| Complex64::new(r, i)).collect();
        Payload::Complex(Grid::from_vec(rows, cols, data)?)
    } else {
        Payload::Real(Grid::from_vec(rows, cols, re)?)
    })
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}
