use std::path::PathBuf;

use csikit::synth::DatasetSpec;

use crate::{CmdResult, Failure, SynthArgs};

pub const DEFAULT_SYMBOLS: usize = 1000;
pub const DEFAULT_SUBCARRIERS: usize = 30;

pub fn run(args: &SynthArgs) -> CmdResult {
    let mut spec = match &args.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
            let base = DatasetSpec::demo(DEFAULT_SYMBOLS, DEFAULT_SUBCARRIERS);
            DatasetSpec::parse_with_base(&text, base).map_err(|e| Failure {
                code: crate::EXIT_USAGE,
                message: format!("{}: {e}", path.display()),
            })?
        }
        None => DatasetSpec::demo(DEFAULT_SYMBOLS, DEFAULT_SUBCARRIERS),
    };
    if let Some(s) = args.symbols {
        spec.symbols = s;
    }
    if let Some(k) = args.subcarriers {
        spec.set_subcarrier_count(k).map_err(|e| Failure::from_lib(None, e))?;
    }
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let data = spec.generate().map_err(|e| Failure::from_lib(None, e))?;

    let prefix = strip_csif(&args.output);
    let (t, m) = data.write_csif(&prefix).map_err(|e| Failure::from_lib(Some(&prefix), e))?;
    println!(
        "synth: S={} K={} seed={} -> {} {}",
        spec.symbols,
        spec.subcarrier_count(),
        spec.seed,
        t.display(),
        m.display()
    );
    Ok(())
}

fn strip_csif(path: &std::path::Path) -> PathBuf {
    match path.to_str().and_then(|s| s.strip_suffix(".csif")) {
        Some(stem) if !stem.is_empty() => PathBuf::from(stem),
        _ => path.to_path_buf(),
    }
}
