//! `jpegcompat`: JPEG block compatibility analysis from the command line.

mod commands;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jpegcompat::{BoundMode, ColorImpl, CostNorm, DctImpl, UnsolvedPolicy};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Format(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Format(_) => 4,
        }
    }
}

impl From<jpegcompat::Error> for CliError {
    fn from(e: jpegcompat::Error) -> Self {
        match e {
            jpegcompat::Error::Io(io) => CliError::Io { path: PathBuf::new(), source: io },
            e if e.is_format_error() => CliError::Format(e.to_string()),
            e => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "jpegcompat", version, about = "Detect JPEG blocks that have no antecedent under a known compression pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze an image block by block and write a report and masks.
    Analyze(AnalyzeArgs),
    /// Forge a region of an image and write the result with its ground truth.
    Forge(ForgeArgs),
    /// Run forge, analyze and evaluate over a grid of quality factors.
    Experiment(ExperimentArgs),
    /// Time the antecedent search on synthetic blocks.
    Bench(BenchArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ObserveArg {
    /// Infer from the file extension: .jpg/.jpeg are coefficients, others pixels.
    Auto,
    Pixels,
    Coefficients,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    L1,
    Linf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Manipulated,
    Authentic,
    Separate,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DctArg {
    IntegerSlow,
    FloatFast,
    ExactOrthonormal,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ColorArg {
    IntegerLibStyle,
    ExactMatrix,
}

impl From<NormArg> for CostNorm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::L1 => CostNorm::L1,
            NormArg::Linf => CostNorm::Linf,
        }
    }
}

impl From<PolicyArg> for UnsolvedPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Manipulated => UnsolvedPolicy::Manipulated,
            PolicyArg::Authentic => UnsolvedPolicy::Authentic,
            PolicyArg::Separate => UnsolvedPolicy::Separate,
        }
    }
}

impl From<DctArg> for DctImpl {
    fn from(d: DctArg) -> Self {
        match d {
            DctArg::IntegerSlow => DctImpl::IntegerSlow,
            DctArg::FloatFast => DctImpl::FloatFast,
            DctArg::ExactOrthonormal => DctImpl::ExactOrthonormal,
        }
    }
}

impl From<ColorArg> for ColorImpl {
    fn from(c: ColorArg) -> Self {
        match c {
            ColorArg::IntegerLibStyle => ColorImpl::IntegerLibStyle,
            ColorArg::ExactMatrix => ColorImpl::ExactMatrix,
        }
    }
}

/// Search options shared by the analysis commands. Unset flags fall back to
/// the config file, then to the defaults shown.
#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// Iteration budget N per block [default: 5000]
    #[arg(short = 'n', long)]
    pub iterations: Option<u32>,
    /// Cost norm between candidate output and observation [default: l1]
    #[arg(long, value_enum)]
    pub norm: Option<NormArg>,
    /// Search without the radius bound (never reports incompatible)
    #[arg(long)]
    pub no_bound: bool,
    /// How unsolved blocks enter the binary mask [default: manipulated]
    #[arg(long, value_enum)]
    pub unsolved: Option<PolicyArg>,
    /// Worker threads [default: 1]
    #[arg(short = 'j', long)]
    pub workers: Option<usize>,
}

impl SearchArgs {
    pub fn apply(&self, cfg: &mut config::RunConfig) {
        if let Some(n) = self.iterations {
            cfg.search.max_iterations = n;
        }
        if let Some(n) = self.norm {
            cfg.search.norm = n.into();
        }
        if self.no_bound {
            cfg.search.bound = BoundMode::Disabled;
        }
        if let Some(p) = self.unsolved {
            cfg.search.unsolved_policy = p.into();
        }
        if let Some(w) = self.workers {
            cfg.workers = w;
        }
    }
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Image to analyze: PNG (pixels) or baseline JPEG (coefficients)
    pub input: PathBuf,
    /// TOML run configuration with the pipeline and search settings
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Quality factor of the first compression; builds the pipeline when
    /// the config has none (pixels: decompress; JPEG: decompress then
    /// compress with the file's tables)
    #[arg(long)]
    pub qf: Option<u32>,
    /// DCT implementation for a --qf pipeline
    #[arg(long, value_enum, default_value = "integer-slow")]
    pub dct: DctArg,
    /// Color transform for a --qf pipeline
    #[arg(long, value_enum, default_value = "integer-lib-style")]
    pub color: ColorArg,
    /// What the input holds
    #[arg(long, value_enum, default_value = "auto")]
    pub observe: ObserveArg,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Output directory [default: next to the input]
    #[arg(short, long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ForgeArgs {
    /// Host image: PNG or baseline JPEG
    pub input: PathBuf,
    /// Forgery spec (TOML or JSON); omit to sample one with --random
    #[arg(short, long)]
    pub spec: Option<PathBuf>,
    /// Sample a random forgery of this kind
    #[arg(long, value_parser = ["blur", "shift"])]
    pub random: Option<String>,
    /// Seed for --random and synthetic splice donors
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Compress a PNG host at this quality first (required for PNG input
    /// unless --decompressed)
    #[arg(long)]
    pub qf1: Option<u32>,
    /// The PNG host is already a decompressed JPEG made at --qf1
    #[arg(long)]
    pub decompressed: bool,
    /// Recompress the forgery at this quality, also writing E and F
    #[arg(long)]
    pub qf2: Option<u32>,
    /// Output directory [default: next to the input]
    #[arg(short, long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    /// TOML experiment configuration
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Directory of PNG originals; synthetic images are used when absent
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Number of synthetic images
    #[arg(long)]
    pub images: Option<usize>,
    /// Synthetic image size, WIDTHxHEIGHT
    #[arg(long)]
    pub size: Option<String>,
    /// Synthetic image channels (1 or 3)
    #[arg(long)]
    pub channels: Option<usize>,
    /// First quality factors, comma separated [default: 60,75,90]
    #[arg(long, value_delimiter = ',')]
    pub qf1: Option<Vec<u32>>,
    /// Second quality factors, comma separated; `none` for single
    /// compression [default: 50,60,75,90,95]
    #[arg(long)]
    pub qf2: Option<String>,
    /// Surrogate manipulation [default: blur]
    #[arg(long, value_parser = ["blur", "shift"])]
    pub forgery: Option<String>,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for experiment.json and tables.txt
    #[arg(short, long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Quality factor of the single compression
    #[arg(long, default_value_t = 75)]
    pub qf: u32,
    /// Channels (1 or 3)
    #[arg(long, default_value_t = 1)]
    pub channels: usize,
    /// Image side in pixels (multiple of 8)
    #[arg(long, default_value_t = 128)]
    pub size: usize,
    /// Iteration budget N per block
    #[arg(short = 'n', long, default_value_t = 1000)]
    pub iterations: u32,
    #[arg(short = 'j', long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::Forge(a) => commands::forge(a),
        Command::Experiment(a) => commands::experiment(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jpegcompat: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
