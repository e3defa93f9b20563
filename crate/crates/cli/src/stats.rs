use std::path::{Path, PathBuf};

use csikit::io::csv::format_f64;
use csikit::stats::{diff_histogram, ds_series, exceedance_profile};
use csikit::tsfr::{tsfr, TsfrParams};

use crate::input::{distinct, read_phase, write_bytes};
use crate::{CmdResult, Failure, StatsCommand, StatsIo};

pub const DIFFHIST_HEADER: &str = "bin,left,right,count,gaussian_count";
pub const DS_HEADER: &str = "s,mu,sigma,d";
pub const GROUPS_HEADER: &str = "label,symbols,mean_d";
pub const EXCEED_HEADER: &str = "k,count,fraction";

pub fn run(cmd: &StatsCommand) -> CmdResult {
    match cmd {
        StatsCommand::Diffhist { io, bins } => diffhist(io, *bins),
        StatsCommand::Ds { io, labels } => ds(io, labels.as_deref()),
        StatsCommand::Exceed { io, sg } => exceed(io, sg.config()),
    }
}

fn lib(path: &Path) -> impl Fn(csikit::Error) -> Failure + '_ {
    move |e| Failure::from_lib(Some(path), e)
}

fn diffhist(io: &StatsIo, bins: usize) -> CmdResult {
    distinct(&io.input, &io.output)?;
    if bins == 0 {
        return Err(Failure::usage("--bins must be at least 1"));
    }
    let phase = read_phase(&io.input, true)?;
    let h = diff_histogram(&phase, bins).map_err(lib(&io.input))?;
    let total = h.total() as f64;
    let mut out = format!("{DIFFHIST_HEADER}\n");
    for (i, &count) in h.counts.iter().enumerate() {
        let (left, right) = (h.edges[i], h.edges[i + 1]);
        let expected = total * (right - left) * h.gaussian_pdf(0.5 * (left + right));
        out.push_str(&format!(
            "{},{},{},{count},{}\n",
            i + 1,
            format_f64(left),
            format_f64(right),
            format_f64(expected)
        ));
    }
    write_bytes(&io.output, out.as_bytes())?;
    println!(
        "diffhist: {} differences, mean={} std={}",
        h.total(),
        format_f64(h.mean),
        format_f64(h.std)
    );
    Ok(())
}

fn groups_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().unwrap_or_default().to_string_lossy();
    output.with_file_name(format!("{stem}.groups.csv"))
}

fn ds(io: &StatsIo, labels: Option<&Path>) -> CmdResult {
    distinct(&io.input, &io.output)?;
    let phase = read_phase(&io.input, true)?;
    let labels: Option<Vec<String>> = match labels {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
            Some(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
        }
        None => None,
    };
    if let Some(l) = &labels {
        if l.iter().any(|s| s.contains(',') || s.contains('"')) {
            return Err(Failure::data("labels may not contain commas or quotes"));
        }
    }
    let series = ds_series(&phase, labels.as_deref()).map_err(lib(&io.input))?;
    let mut out = format!("{DS_HEADER}{}\n", if labels.is_some() { ",label" } else { "" });
    for (s, t) in series.thresholds.iter().enumerate() {
        out.push_str(&format!("{},{},{},{}", s + 1, format_f64(t.mu), format_f64(t.sigma), format_f64(t.d)));
        if let Some(l) = &labels {
            out.push(',');
            out.push_str(&l[s]);
        }
        out.push('\n');
    }
    write_bytes(&io.output, out.as_bytes())?;
    if labels.is_some() {
        let mut groups = format!("{GROUPS_HEADER}\n");
        for g in &series.groups {
            groups.push_str(&format!("{},{},{}\n", g.label, g.symbols, format_f64(g.mean_d)));
        }
        write_bytes(&groups_path(&io.output), groups.as_bytes())?;
    }
    println!("ds: {} symbols, {} groups", series.thresholds.len(), series.groups.len());
    Ok(())
}

fn exceed(io: &StatsIo, sg: csikit::savgol::SgConfig) -> CmdResult {
    distinct(&io.input, &io.output)?;
    let raw = read_phase(&io.input, false)?;
    let params = TsfrParams {
        sg,
        ..Default::default()
    };
    let (_, report) = tsfr(&raw, &params).map_err(lib(&io.input))?;
    let profile = exceedance_profile(&report);
    let symbols = report.symbols() as f64;
    let mut out = format!("{EXCEED_HEADER}\n");
    for (k, &count) in profile.iter().enumerate() {
        out.push_str(&format!("{},{count},{}\n", k + 1, format_f64(count as f64 / symbols)));
    }
    write_bytes(&io.output, out.as_bytes())?;
    println!(
        "exceed: {} symbols, {} clamps",
        report.symbols(),
        profile.iter().sum::<usize>()
    );
    Ok(())
}
