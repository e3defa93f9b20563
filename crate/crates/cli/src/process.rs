use csikit::calib::Abscissa;
use csikit::io::{features, report::Report, Payload};
use csikit::pipeline::{process, ProcessParams, Processed};
use csikit::{decompose, AmplitudeMatrix};

use crate::input::{distinct, read_csi, read_map, write_bytes, write_payload};
use crate::{AbscissaArg, CmdResult, ElementArg, Failure, ProcessArgs};

/// Largest distance in ulps tolerated between an input magnitude and the
/// magnitude of the recomposed output.
pub const RECOMPOSE_ULPS: u64 = 4;

pub fn run(args: &ProcessArgs) -> CmdResult {
    distinct(&args.input, &args.output)?;
    for extra in [&args.report, &args.features].into_iter().flatten() {
        distinct(&args.input, extra)?;
    }
    let csi = read_csi(&args.input)?;
    let map = match &args.map {
        Some(path) => Some(read_map(path, args.n_fft)?),
        None => None,
    };
    let abscissa = match args.abscissa {
        AbscissaArg::Ordinal => Abscissa::Ordinal,
        AbscissaArg::Physical if map.is_none() => {
            return Err(Failure::usage("--abscissa physical needs --map"));
        }
        AbscissaArg::Physical => Abscissa::Physical,
    };
    let params = ProcessParams {
        sg: args.sg.config(),
        abscissa,
        map,
        separable_2d: args.separable,
    };
    let out = process(&csi, args.method, &params).map_err(|e| Failure::from_lib(Some(&args.input), e))?;

    if args.verify_amplitude {
        verify_amplitude(&decompose(&csi).amplitude, &out)?;
    }
    write_payload(&args.output, &Payload::Complex(out.csi.grid().clone()))?;

    let param_entries = [
        ("method", args.method.name().to_string()),
        ("sg_order", args.sg.sg_order.to_string()),
        ("sg_frac", args.sg.sg_frac.to_string()),
        ("abscissa", format!("{:?}", args.abscissa).to_lowercase()),
        ("separable", args.separable.to_string()),
    ];
    if let Some(path) = &args.report {
        let mut report = Report::from_processed(&out);
        for (k, v) in &param_entries[1..] {
            report.push(k, v);
        }
        write_bytes(path, report.to_text().as_bytes())?;
    }
    if let Some(path) = &args.features {
        let element = match args.feature_element {
            ElementArg::F64 => features::Element::F64,
            ElementArg::F32 => features::Element::F32,
        };
        let entries: Vec<(&str, String)> = param_entries.iter().map(|(k, v)| (*k, v.clone())).collect();
        features::export(path, out.phase.grid(), element, &entries)
            .map_err(|e| Failure::from_lib(Some(path), e))?;
    }
    let (s, k) = out.phase.dims();
    let mut summary = format!("process: method={} S={s} K={k}", args.method);
    if let Some(t) = &out.tsfr {
        let clamps: usize = t.clamps.iter().map(|c| c.total()).sum();
        summary.push_str(&format!(" clamps={clamps}"));
    }
    if !out.warnings.is_empty() {
        summary.push_str(&format!(" warnings={}", out.warnings.len()));
    }
    println!("{summary}");
    Ok(())
}

fn ulps(a: f64, b: f64) -> u64 {
    (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
}

fn verify_amplitude(input: &AmplitudeMatrix, out: &Processed) -> CmdResult {
    let passthrough = input
        .grid()
        .as_slice()
        .iter()
        .zip(out.amplitude.grid().as_slice())
        .all(|(a, b)| a.to_bits() == b.to_bits());
    if !passthrough {
        return Err(Failure::data("amplitude check failed: amplitude matrix was modified"));
    }
    let worst = decompose(&out.csi)
        .amplitude
        .grid()
        .as_slice()
        .iter()
        .zip(input.grid().as_slice())
        .map(|(a, b)| ulps(*a, *b))
        .max()
        .unwrap_or(0);
    if worst > RECOMPOSE_ULPS {
        return Err(Failure::data(format!(
            "amplitude check failed: recomposed magnitude off by {worst} ulp"
        )));
    }
    println!("amplitude check: passthrough bit-identical, recomposed within {worst} ulp");
    Ok(())
}
