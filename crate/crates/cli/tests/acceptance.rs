//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use csikit::calib::{lrr_calibrate, lt_calibrate};
use csikit::io::{csif, csv, FormatError, Payload};
use csikit::pipeline::{process, Method, ProcessParams};
use csikit::savgol::{sg_2d, sg_apply, sg_design, sg_freq, sg_time, SgConfig, SgSpec, WindowRule};
use csikit::stats::{diff_histogram, exceedance_profile, DEFAULT_BINS};
use csikit::synth::{ChannelSpec, DatasetSpec, OffsetDraw};
use csikit::tsfr::{
    gap_stats, rebuild_symbol_traced, tsfr, ClampCounts, GapThreshold, TsfrParams, TsfrReport,
};
use csikit::{decompose, Complex64, Grid, PhaseMatrix, Stage, SubcarrierMap};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn centered_slope(y: &[f64]) -> f64 {
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

fn lrr_flatness() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let data = (0..100 * 64).map(|_| PI - TAU * r.random::<f64>()).collect();
        let raw = PhaseMatrix::new(Grid::from_vec(100, 64, data).unwrap(), Stage::Raw).unwrap();
        let out = lrr_calibrate(&raw.unwrap_rows()).map_err(|e| e.to_string())?;
        for row in out.grid().iter_rows() {
            worst = worst.max(centered_slope(row).abs());
        }
    }
    let elapsed = start.elapsed();
    ensure(worst <= 1e-9, || format!("max |slope| {worst:e}"))?;
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!("max |slope| {worst:.1e} over 50000 rows in {elapsed:.2?}"))
}

fn lt_identity() -> Outcome {
    let mut r = rng(2);
    let map = SubcarrierMap::contiguous(-26, 52, 64).unwrap();
    let mean_m = map.mean_index();
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mut acc = 0.0;
        let theta: Vec<f64> = (0..52)
            .map(|_| {
                acc += r.random_range(-1.0..1.0);
                acc
            })
            .collect();
        let c = r.random_range(-0.1..0.1);
        let d = PI - TAU * r.random::<f64>();
        let shifted: Vec<f64> = theta.iter().zip(map.indices()).map(|(&t, &m)| t + c * m as f64 + d).collect();
        let a = lt_calibrate(&PhaseMatrix::from_rows(&[&theta], Stage::Raw).unwrap(), &map).unwrap();
        let b = lt_calibrate(&PhaseMatrix::from_rows(&[&shifted], Stage::Raw).unwrap(), &map).unwrap();
        for (x, y) in b.row(0).iter().zip(a.row(0)) {
            worst = worst.max((x - y + c * mean_m).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e} over 100 draws"))
}

fn sg_reproduction() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for order in 0..=3usize {
        for w in [5usize, 7, 21] {
            let config = SgConfig::new(order, WindowRule::Length(w));
            let c: Vec<f64> = (0..=order).map(|_| r.random_range(-1.0..1.0)).collect();
            let poly = |x: f64| c.iter().rev().fold(0.0, |acc, ci| acc * x + ci);
            let v: Vec<f64> = (0..48).map(|i| poly(i as f64 / 12.0)).collect();
            let (out, _) = sg_apply(&v, SgSpec::new(order, w).unwrap());
            worst = v.iter().zip(&out).map(|(a, b)| (a - b).abs()).fold(worst, f64::max);

            // bivariate total degree ≤ order
            let terms: Vec<(i32, i32, f64)> = (0..=order as i32)
                .flat_map(|d| (0..=d).map(move |a| (a, d - a)))
                .map(|(a, b)| (a, b, r.random_range(-1.0..1.0)))
                .collect();
            let (rows, cols) = (40, 30);
            let data: Vec<f64> = (0..rows * cols)
                .map(|i| {
                    let (x, y) = ((i / cols) as f64 / 10.0, (i % cols) as f64 / 10.0);
                    terms.iter().map(|&(a, b, k)| k * x.powi(a) * y.powi(b)).sum()
                })
                .collect();
            let p = PhaseMatrix::new(Grid::from_vec(rows, cols, data.clone()).unwrap(), Stage::Calibrated).unwrap();
            for out in [
                sg_time(&p, &config).unwrap(),
                sg_freq(&p, &config).unwrap(),
                sg_2d(&p, &config).unwrap(),
            ] {
                worst = data
                    .iter()
                    .zip(out.grid().as_slice())
                    .map(|(a, b)| (a - b).abs())
                    .fold(worst, f64::max);
            }
        }
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e}, orders 0-3, windows 5/7/21, all four filters"))
}

fn sg_kernel() -> Outcome {
    let kernel = sg_design(SgSpec::new(2, 5).unwrap());
    let v = DMatrix::from_fn(5, 3, |i, j| (i as f64 - 2.0).powi(j as i32));
    let svd = v.clone().svd(true, true);
    // fitted value at the centre for a unit impulse at each position
    let oracle: Vec<f64> = (0..5)
        .map(|i| {
            let mut e = nalgebra::DVector::zeros(5);
            e[i] = 1.0;
            svd.solve(&e, 1e-14).unwrap()[0]
        })
        .collect();
    let expect = [-3.0, 12.0, 17.0, 12.0, -3.0].map(|x| x / 35.0);
    let mut worst = 0.0f64;
    for i in 0..5 {
        worst = worst
            .max((kernel.coefficients()[i] - expect[i]).abs())
            .max((oracle[i] - expect[i]).abs());
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("[-3,12,17,12,-3]/35 within {worst:.1e}"))
}

fn random_walk(r: &mut ChaCha8Rng, k: usize, scale: f64) -> Vec<f64> {
    let mut acc = 0.0;
    (0..k)
        .map(|_| {
            let jump = if r.random::<f64>() < 0.1 { 6.0 } else { 1.0 };
            acc += scale * jump * (r.random::<f64>() - 0.5);
            acc
        })
        .collect()
}

fn gap_bound() -> Outcome {
    let mut r = rng(5);
    let (mut flagged, mut compliant) = (0usize, 0usize);
    for _ in 0..1000 {
        let k = r.random_range(2..=128);
        let phi = random_walk(&mut r, k, 0.5);
        let d = gap_stats(&random_walk(&mut r, k, 0.5)).unwrap().d;
        let out = rebuild_symbol_traced(&phi, d).map_err(|e| e.to_string())?;
        for i in 1..k {
            let diff = out.values[i] - out.values[i - 1];
            ensure(diff.abs() <= d + 1e-12, || format!("gap {diff} above d={d}"))?;
            if out.flags[i] {
                ensure((diff.abs() - d).abs() <= 1e-12, || format!("clamped gap {diff} != ±{d}"))?;
                flagged += 1;
            }
        }
        if out.flagged() == 0 {
            compliant += 1;
            ensure(out.values == phi, || "compliant row changed".into())?;
        }
    }
    Ok(format!("{flagged} clamps exact, {compliant} compliant rows unchanged"))
}

fn naive_rebuild(phi: &[f64], d: f64) -> Vec<f64> {
    let mut out = vec![phi[0]];
    for k in 1..phi.len() {
        let eps = phi[k] - phi[k - 1];
        let prev = out[k - 1];
        out.push(if eps < -d {
            prev - d
        } else if eps > d {
            prev + d
        } else {
            phi[k] - (phi[k - 1] - prev)
        });
    }
    out
}

fn rebuild_oracle() -> Outcome {
    let mut r = rng(6);
    for row in 0..1000 {
        let k = r.random_range(2..=256);
        let phi = random_walk(&mut r, k, 1.0);
        let d = r.random_range(0.0..1.0);
        let got = rebuild_symbol_traced(&phi, d).map_err(|e| e.to_string())?.values;
        let want = naive_rebuild(&phi, d);
        ensure(
            got.iter().zip(&want).all(|(a, b)| a.to_bits() == b.to_bits()),
            || format!("row {row} differs"),
        )?;
    }
    Ok("1000 rows bitwise equal".into())
}

fn amplitude() -> Outcome {
    let data = DatasetSpec::demo(1000, 52).generate().map_err(|e| e.to_string())?;
    let input = decompose(&data.measured_csi).amplitude;
    let mut worst_ulps = 0u64;
    for method in Method::ALL {
        let out = process(&data.measured_csi, method, &ProcessParams::default()).map_err(|e| e.to_string())?;
        let same = out
            .amplitude
            .grid()
            .as_slice()
            .iter()
            .zip(input.grid().as_slice())
            .all(|(a, b)| a.to_bits() == b.to_bits());
        ensure(same, || format!("{method}: amplitude changed"))?;
        let again = decompose(&out.csi).amplitude;
        for (a, b) in again.grid().as_slice().iter().zip(input.grid().as_slice()) {
            worst_ulps = worst_ulps.max((a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs());
        }
    }
    ensure(worst_ulps <= 4, || format!("recomposed magnitudes off by {worst_ulps} ulp"))?;
    Ok(format!(
        "7 methods: amplitude bit-identical; re-measured |h| within {worst_ulps} ulp"
    ))
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

fn recovery() -> Outcome {
    let mut spec = DatasetSpec::demo(1000, 52);
    spec.noise_sigma = 0.0;
    spec.seed = 8;
    let data = spec.generate().map_err(|e| e.to_string())?;
    let map = spec.map().unwrap();
    let truth = decompose(&data.true_csi).phase;
    let meas = decompose(&data.measured_csi).phase;
    let (lt_t, lt_m) = (lt_calibrate(&truth, &map).unwrap(), lt_calibrate(&meas, &map).unwrap());
    let mut worst = 0.0f64;
    for s in 0..1000 {
        let c = TAU * data.impairments.delta_t[s] / 64.0;
        for k in 0..52 {
            worst = worst.max((lt_m.get(s, k) - lt_t.get(s, k) + c * map.mean_index()).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("LT identity off by {worst:e}"))?;
    let (lrr_t, lrr_m) = (lrr_calibrate(&truth).unwrap(), lrr_calibrate(&meas).unwrap());
    let min_r = (0..1000)
        .map(|s| pearson(lrr_t.row(s), lrr_m.row(s)))
        .fold(f64::INFINITY, f64::min);
    ensure(min_r >= 0.999, || format!("LRR correlation {min_r}"))?;
    Ok(format!("LT identity within {worst:.1e}; min LRR correlation {min_r:.6}"))
}

fn gaussian_fit() -> Outcome {
    let sigma = 0.1;
    let (s, k) = (2000, 52);
    let mut spec = DatasetSpec::demo(s, k);
    spec.channel = ChannelSpec::flat();
    spec.delta_t = OffsetDraw::Constant(0.0);
    spec.gamma = OffsetDraw::Constant(0.0);
    spec.noise_sigma = sigma;
    spec.seed = 9;
    let raw = decompose(&spec.generate().map_err(|e| e.to_string())?.measured_csi).phase;
    let hist = diff_histogram(&lrr_calibrate(&raw).unwrap(), DEFAULT_BINS).map_err(|e| e.to_string())?;

    let normal = Normal::new(0.0, sigma).unwrap();
    let mut r = rng(90);
    let diffs: Vec<f64> = (0..s)
        .flat_map(|_| {
            let z: Vec<f64> = (0..k).map(|_| normal.sample(&mut r)).collect();
            z.windows(2).map(|w| w[1] - w[0]).collect::<Vec<_>>()
        })
        .collect();
    let m = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let mc = (diffs.iter().map(|d| (d - m).powi(2)).sum::<f64>() / diffs.len() as f64).sqrt();
    let target = 2f64.sqrt() * sigma;
    let rel = (hist.std - target).abs() / target;
    ensure(rel <= 0.05, || format!("fitted std {} vs {target}", hist.std))?;
    Ok(format!(
        "S·K={} fitted std {:.5}, √2σ {target:.5}, Monte Carlo {mc:.5} ({:.2}% off)",
        s * k,
        hist.std,
        rel * 100.0
    ))
}

fn exceedance() -> Outcome {
    let data = DatasetSpec::demo(500, 52).generate().map_err(|e| e.to_string())?;
    let (_, report) = tsfr(&decompose(&data.measured_csi).phase, &TsfrParams::default()).unwrap();
    let profile = exceedance_profile(&report);
    let by_k: usize = profile.iter().sum();
    let by_s: usize = (0..report.symbols()).map(|s| report.flagged(s)).sum();
    ensure(by_k == by_s, || format!("{by_k} by subcarrier vs {by_s} by symbol"))?;

    let fixture = rebuild_symbol_traced(&[0.0, 5.0, 5.5], 2.0).unwrap();
    let single = TsfrReport {
        time_window: 3,
        sg_order: 2,
        thresholds: vec![GapThreshold { mu: 1.0, sigma: 1.0, d: 2.0 }],
        exceedance: Grid::from_vec(1, 3, fixture.flags.clone()).unwrap(),
        clamps: vec![ClampCounts {
            negative: fixture.negative,
            positive: fixture.positive,
        }],
        modified_fraction: vec![0.5],
    };
    let p = exceedance_profile(&single);
    ensure(p == vec![0, 1, 0], || format!("fixture profile {p:?}"))?;
    Ok(format!("{by_k} flags on both axes; [0,5,5.5] flags k=2 only"))
}

fn formats() -> Outcome {
    let data = DatasetSpec::demo(50, 30).generate().map_err(|e| e.to_string())?;
    let payload = Payload::Complex(data.measured_csi.grid().clone());
    let bytes = csif::encode(&payload);
    let back = csif::decode(&bytes).map_err(|e| e.to_string())?;
    ensure(csif::encode(&back) == bytes, || "CSIF not byte-identical".into())?;
    let via_csv = csv::read(csv::to_string(&back).as_bytes()).map_err(|e| e.to_string())?;
    ensure(csif::encode(&via_csv) == bytes, || "CSIF→CSV→CSIF changed a value".into())?;

    let sample = csif::encode_complex(&Grid::from_rows(&[[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]]).unwrap());
    ensure(sample.len() == 48, || format!("1x2 file is {} bytes", sample.len()))?;
    let mut bad_magic = sample.clone();
    bad_magic[0] = b'X';
    let mut bad_version = sample.clone();
    bad_version[4] = 9;
    let checks = [
        matches!(csif::decode(&sample[..47]), Err(FormatError::Truncated { expected: 48, actual: 47 })),
        matches!(csif::decode(&bad_magic), Err(FormatError::BadMagic { .. })),
        matches!(csif::decode(&bad_version), Err(FormatError::UnsupportedVersion { found: 9 })),
        csv_err("s,k,value\n1,1,0\n1,1,1\n", |e| matches!(e, FormatError::Duplicate { line: 3, .. })),
        csv_err("s,k,value\n1,1\n", |e| matches!(e, FormatError::Ragged { line: 2, .. })),
        csv_err("s,k,value\n1,1,x\n", |e| matches!(e, FormatError::NonNumeric { line: 2, .. })),
    ];
    ensure(checks.iter().all(|&c| c), || format!("rejection checks {checks:?}"))?;
    let phase = csv::to_string(&Payload::Real(Grid::from_rows(&[[0.0, 1.5]]).unwrap()));
    ensure(phase == "s,k,value\n1,1,0\n1,2,1.5\n", || format!("CSV layout {phase:?}"))?;
    Ok("CSIF byte-identical, CSV bit-exact, 6 corruption classes rejected".into())
}

fn csv_err(text: &str, pred: impl Fn(&FormatError) -> bool) -> bool {
    match csv::read(text.as_bytes()) {
        Err(csikit::Error::Format(e)) => pred(&e),
        _ => false,
    }
}

fn csikit_cmd(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_csikit"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!("csikit {args:?}: {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn chain(dir: &Path) -> Result<Vec<Vec<u8>>, String> {
    csikit_cmd(dir, &["synth", "--seed", "7", "--symbols", "1000", "--subcarriers", "52", "-o", "demo"])?;
    csikit_cmd(
        dir,
        &["process", "-i", "demo.meas.csif", "-o", "tsfr.csif", "--method", "tsfr", "--report", "tsfr.report"],
    )?;
    csikit_cmd(dir, &["stats", "ds", "-i", "tsfr.csif", "-o", "ds.csv"])?;
    ["demo.true.csif", "demo.meas.csif", "tsfr.csif", "tsfr.report", "ds.csv"]
        .iter()
        .map(|f| std::fs::read(dir.join(f)).map_err(|e| e.to_string()))
        .collect()
}

fn determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let start = Instant::now();
    let first = chain(a.path())?;
    let elapsed = start.elapsed();
    let second = chain(b.path())?;
    ensure(first == second, || "artifacts differ between runs".into())?;
    ensure(elapsed < Duration::from_secs(10), || format!("chain took {elapsed:?}"))?;
    Ok(format!("5 artifacts byte-identical; S=1000 K=52 chain in {elapsed:.2?}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("LRR flatness", lrr_flatness),
        ("LT linear-invariance identity", lt_identity),
        ("SG polynomial reproduction", sg_reproduction),
        ("SG kernel check", sg_kernel),
        ("TSFR gap bound", gap_bound),
        ("rebuild oracle equivalence", rebuild_oracle),
        ("amplitude preservation", amplitude),
        ("offset recovery", recovery),
        ("Gaussian-difference fit", gaussian_fit),
        ("exceedance accounting", exceedance),
        ("format round trips", formats),
        ("end-to-end determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
