//! `csikit`: batch CSI phase sanitization.
//!
//! Exit codes: 0 success, 2 usage, 3 I/O, 4 data or dimension error.

mod input;
mod process;
mod stats;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use csikit::pipeline::Method;

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_DATA: u8 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DATA,
            message: message.into(),
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }

    /// Library errors, with the path they concern.
    pub fn from_lib(path: Option<&std::path::Path>, err: csikit::Error) -> Self {
        use csikit::Error as E;
        let code = match &err {
            E::Io(_) => EXIT_IO,
            E::UnknownMethod { .. } | E::Parameter(_) | E::SgSpec { .. } => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        let message = match path {
            Some(p) => format!("{}: {err}", p.display()),
            None => err.to_string(),
        };
        Self { code, message }
    }
}

pub type CmdResult = Result<(), Failure>;

#[derive(Debug, Parser)]
#[command(name = "csikit", version, about = "CSI phase sanitization: LT, LRR, Savitzky-Golay and TSFR")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic dataset: OUT.true.csif and OUT.meas.csif.
    Synth(SynthArgs),
    /// Sanitize the phase of a CSI matrix with one of the seven methods.
    Process(ProcessArgs),
    /// Diagnostic tables as CSV.
    Stats {
        #[command(subcommand)]
        table: StatsCommand,
    },
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Dataset spec file (key = value lines); flags override its values.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Number of OFDM symbols S [default: 1000].
    #[arg(long)]
    pub symbols: Option<usize>,
    /// Number of subcarriers K [default: 30].
    #[arg(long)]
    pub subcarriers: Option<usize>,
    /// Random seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output prefix; a trailing `.csif` is dropped.
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AbscissaArg {
    Ordinal,
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ElementArg {
    F64,
    F32,
}

#[derive(Debug, Args)]
pub struct ProcessArgs {
    /// Input CSI matrix (complex CSIF, or complex CSV with a `.csv` extension).
    #[arg(short, long)]
    pub input: PathBuf,
    /// Output CSI matrix (CSIF, or CSV with a `.csv` extension).
    #[arg(short, long)]
    pub output: PathBuf,
    /// raw, lt, lrr, lrr+sgfreq, lrr+sgtime, lrr+sg2d or tsfr.
    #[arg(long, value_parser = parse_method)]
    pub method: Method,
    #[command(flatten)]
    pub sg: SgArgs,
    /// Regression abscissa for LRR; `physical` needs --map.
    #[arg(long, value_enum, default_value = "ordinal")]
    pub abscissa: AbscissaArg,
    /// Subcarrier index file: whitespace-separated integers m_1 < ... < m_K.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// DFT size N for --map.
    #[arg(long, default_value_t = 64)]
    pub n_fft: usize,
    /// Use two sequential 1D passes for lrr+sg2d.
    #[arg(long)]
    pub separable: bool,
    /// Write the key/value processing report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also export the processed phase matrix as raw features (plus `.meta`).
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "f64")]
    pub feature_element: ElementArg,
    /// Check that the output amplitude equals the input amplitude.
    #[arg(long)]
    pub verify_amplitude: bool,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SgArgs {
    /// Savitzky-Golay polynomial order.
    #[arg(long, default_value_t = 2)]
    pub sg_order: usize,
    /// Savitzky-Golay window as a fraction of the filtered dimension.
    #[arg(long, default_value_t = 0.1)]
    pub sg_frac: f64,
}

impl SgArgs {
    pub fn config(&self) -> csikit::savgol::SgConfig {
        csikit::savgol::SgConfig::new(self.sg_order, csikit::savgol::WindowRule::Fraction(self.sg_frac))
    }
}

#[derive(Debug, Subcommand)]
pub enum StatsCommand {
    /// Histogram of adjacent-subcarrier phase differences with a Gaussian fit.
    Diffhist {
        #[command(flatten)]
        io: StatsIo,
        #[arg(long, default_value_t = csikit::stats::DEFAULT_BINS)]
        bins: usize,
    },
    /// Per-symbol gap thresholds mu, sigma, d = mu + sigma.
    Ds {
        #[command(flatten)]
        io: StatsIo,
        /// One label per symbol, one per line; group means go to OUT.groups.csv.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Per-subcarrier count of symbols clamped by a TSFR run.
    Exceed {
        #[command(flatten)]
        io: StatsIo,
        #[command(flatten)]
        sg: SgArgs,
    },
}

#[derive(Debug, Args)]
pub struct StatsIo {
    /// Complex CSI (phase is LRR-calibrated first) or a real phase matrix.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Output CSV table.
    #[arg(short, long)]
    pub output: PathBuf,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

fn configure_threads() -> CmdResult {
    let Ok(value) = std::env::var("CSIKIT_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| Failure::usage(format!("CSIKIT_THREADS must be a non-negative integer, got {value:?}")))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::usage(format!("cannot configure {threads} threads: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> CmdResult {
    configure_threads()?;
    match cli.command {
        Command::Synth(args) => synth::run(&args),
        Command::Process(args) => process::run(&args),
        Command::Stats { table } => stats::run(&table),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
