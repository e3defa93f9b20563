//! Processing report: plain-text `key = value` header followed, for TSFR
//! runs, by a per-symbol CSV table.
//!
//! ```text
//! # csikit process report
//! version = 1
//! method = tsfr
//! symbols = 2
//! subcarriers = 30
//! time_window = 3
//! zero_magnitude_cells = 0
//! clamps_negative = 4
//! clamps_positive = 3
//! modified_fraction_mean = 0.1206896551724138
//! [symbols]
//! s,mu,sigma,d,negative,positive,modified_fraction
//! 1,0.19,0.11,0.30,2,1,0.10344827586206896
//! 2,0.21,0.12,0.33,2,2,0.13793103448275862
//! ```
//!
//! Floats use the same lossless formatting as the CSV writer. Keys appear
//! in the order written; callers add the run parameters (the CLI writes
//! `sg_order`, `sg_frac`, `abscissa` and `separable`) with [`Report::push`].

use std::fmt::Write as _;

use super::csv::format_f64;
use super::FormatError;
use crate::matrix::Warning;
use crate::pipeline::Processed;

pub const REPORT_VERSION: u32 = 1;
pub const TABLE_MARKER: &str = "[symbols]";
pub const TABLE_HEADER: &str = "s,mu,sigma,d,negative,positive,modified_fraction";

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolRow {
    /// 1-based symbol index.
    pub s: usize,
    pub mu: f64,
    pub sigma: f64,
    pub d: f64,
    pub negative: usize,
    pub positive: usize,
    pub modified_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub entries: Vec<(String, String)>,
    pub symbols: Vec<SymbolRow>,
}

impl Report {
    pub fn from_processed(p: &Processed) -> Self {
        let (rows, cols) = p.phase.dims();
        let mut r = Report::default();
        r.push("method", p.method.name());
        r.push("symbols", rows);
        r.push("subcarriers", cols);
        let zeros = p
            .warnings
            .iter()
            .filter(|w| matches!(w, Warning::ZeroMagnitude { .. }))
            .count();
        if let Some(t) = &p.tsfr {
            r.push("time_window", t.time_window);
            r.push("zero_magnitude_cells", zeros);
            let neg: usize = t.clamps.iter().map(|c| c.negative).sum();
            let pos: usize = t.clamps.iter().map(|c| c.positive).sum();
            r.push("clamps_negative", neg);
            r.push("clamps_positive", pos);
            let mean = t.modified_fraction.iter().sum::<f64>() / t.modified_fraction.len() as f64;
            r.push("modified_fraction_mean", format_f64(mean));
            r.symbols = (0..t.symbols())
                .map(|s| SymbolRow {
                    s: s + 1,
                    mu: t.thresholds[s].mu,
                    sigma: t.thresholds[s].sigma,
                    d: t.thresholds[s].d,
                    negative: t.clamps[s].negative,
                    positive: t.clamps[s].positive,
                    modified_fraction: t.modified_fraction[s],
                })
                .collect();
        } else {
            r.push("zero_magnitude_cells", zeros);
        }
        r
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# csikit process report\n");
        let _ = writeln!(out, "version = {REPORT_VERSION}");
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        if !self.symbols.is_empty() {
            out.push_str(TABLE_MARKER);
            out.push('\n');
            out.push_str(TABLE_HEADER);
            out.push('\n');
            for r in &self.symbols {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.s,
                    format_f64(r.mu),
                    format_f64(r.sigma),
                    format_f64(r.d),
                    r.negative,
                    r.positive,
                    format_f64(r.modified_fraction)
                );
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut report = Report::default();
        let mut version_seen = false;
        let mut lines = text.lines().enumerate().map(|(i, l)| (i as u64 + 1, l.trim()));
        let mut in_table = false;
        for (line, l) in lines.by_ref() {
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            if l == TABLE_MARKER {
                in_table = true;
                break;
            }
            let (k, v) = l.split_once('=').ok_or_else(|| FormatError::Malformed {
                line,
                message: format!("expected `key = value`, found {l:?}"),
            })?;
            let (k, v) = (k.trim(), v.trim());
            if k == "version" {
                if v != REPORT_VERSION.to_string() {
                    return Err(FormatError::Malformed {
                        line,
                        message: format!("unsupported report version {v:?}"),
                    });
                }
                version_seen = true;
            } else if report.get(k).is_some() {
                return Err(FormatError::Malformed {
                    line,
                    message: format!("duplicate key {k:?}"),
                });
            } else {
                report.push(k, v);
            }
        }
        if !version_seen {
            return Err(FormatError::Malformed {
                line: 1,
                message: "missing version".into(),
            });
        }
        if in_table {
            match lines.next() {
                Some((_, TABLE_HEADER)) => {}
                Some((line, found)) => {
                    return Err(FormatError::CsvHeader {
                        line,
                        found: found.to_string(),
                    })
                }
                None => return Ok(report),
            }
            for (line, l) in lines {
                if l.is_empty() {
                    continue;
                }
                let fields: Vec<&str> = l.split(',').collect();
                if fields.len() != 7 {
                    return Err(FormatError::Ragged {
                        line,
                        expected: 7,
                        found: fields.len(),
                    });
                }
                let float = |i: usize| {
                    fields[i].parse::<f64>().map_err(|_| FormatError::NonNumeric {
                        line,
                        column: i + 1,
                        value: fields[i].to_string(),
                    })
                };
                let int = |i: usize| {
                    fields[i].parse::<usize>().map_err(|_| FormatError::NonNumeric {
                        line,
                        column: i + 1,
                        value: fields[i].to_string(),
                    })
                };
                report.symbols.push(SymbolRow {
                    s: int(0)?,
                    mu: float(1)?,
                    sigma: float(2)?,
                    d: float(3)?,
                    negative: int(4)?,
                    positive: int(5)?,
                    modified_fraction: float(6)?,
                });
            }
        }
        Ok(report)
    }
}
