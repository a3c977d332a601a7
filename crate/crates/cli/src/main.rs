use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qnn_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Parser, Debug)]
#[command(name = "qnn", version, about = "Simulated quantum nearest-neighbor classification and its classical baselines")]
pub struct Cli {
    /// File of `key = value` lines supplying defaults for flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads for trials and test points (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a synthetic dataset as CSV.
    Generate(GenerateArgs),
    /// Classify held-out points and write one row per test point.
    Classify(ClassifyArgs),
    /// Run a parameter sweep.
    #[command(subcommand)]
    Sweep(Sweep),
    /// Tabulate the closed-form query bounds over a parameter grid.
    Bounds(BoundsArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Output file; defaults to `$QNN_OUTPUT_DIR/<command>.csv` when that
    /// variable is set and to stdout otherwise.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// `halfmoon` or the path of a CSV file with a header row.
    #[arg(long, default_value = "halfmoon")]
    pub dataset: String,
    /// Number of generated points.
    #[arg(long, default_value_t = 2000)]
    pub size: usize,
    /// Jitter of the generated crescents.
    #[arg(long, default_value_t = qnn_core::experiments::HALFMOON_NOISE)]
    pub noise: f64,
    /// Label column of a CSV dataset, by name or zero-based index.
    #[arg(long, default_value = "label")]
    pub label_column: String,
    /// Keep CSV features in their original units.
    #[arg(long)]
    pub no_standardize: bool,
    /// Drop CSV feature columns that only hold 0 and 1.
    #[arg(long)]
    pub drop_boolean: bool,
    /// CSV columns to ignore, such as row ids.
    #[arg(long, value_delimiter = ',')]
    pub ignore: Vec<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    Halfmoon,
    Hypersphere,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "halfmoon")]
    pub kind: GenKind,
    #[arg(long, default_value_t = 2000)]
    pub size: usize,
    /// Dimension of hypersphere vectors.
    #[arg(long, default_value_t = 16)]
    pub n: usize,
    #[arg(long, default_value_t = qnn_core::experiments::HALFMOON_NOISE)]
    pub noise: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Exact,
    QuantumSim,
    ClassicalMc,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifyMethod {
    /// Nearest neighbor through the Euclidean circuit.
    Nn,
    /// Nearest neighbor through signed inner products.
    NnInner,
    /// Majority of the `--k` nearest neighbors.
    Knn,
    Centroid,
    /// Centroid distance divided by the cluster's mean squared deviation.
    CentroidNormalized,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "nn")]
    pub method: ClassifyMethod,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    /// Additive distance error; required by the simulated modes, rejected
    /// by exact mode.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Allowed failure probability of one minimum search.
    #[arg(long, default_value_t = 0.5)]
    pub delta0: f64,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 0.5)]
    pub train_fraction: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMethodArg {
    Nn,
    Centroid,
}

#[derive(Subcommand, Debug)]
pub enum Sweep {
    /// Accuracy against the distance noise scale.
    Noise(NoiseArgs),
    /// Accuracy against the training fraction.
    Trainsize(TrainsizeArgs),
    /// Gap between the two nearest random unit vectors against dimension.
    Gap(GapArgs),
    /// Candidate count where the quantum bound meets the classical N·M.
    CostRegion(CostRegionArgs),
}

#[derive(Args, Debug)]
pub struct NoiseArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "nn")]
    pub method: SweepMethodArg,
    /// Noise scales; defaults to 11 log-spaced points over [1e-5, 1e5].
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.5)]
    pub train_fraction: f64,
    /// Add the noise to squared distances.
    #[arg(long)]
    pub squared_noise: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug)]
pub struct TrainsizeArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "nn")]
    pub method: SweepMethodArg,
    /// Training fractions; defaults to 0.1, 0.2, …, 0.9.
    #[arg(long, value_delimiter = ',')]
    pub fractions: Vec<f64>,
    #[arg(long, default_value_t = 1e-5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long)]
    pub squared_noise: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug)]
pub struct GapArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 16, 64, 256, 1024])]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub m: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug)]
pub struct CostRegionArgs {
    #[arg(long, default_value_t = 1e2)]
    pub n_min: f64,
    #[arg(long, default_value_t = 1e6)]
    pub n_max: f64,
    #[arg(long, default_value_t = 9)]
    pub points: usize,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [100usize])]
    pub m: Vec<usize>,
    /// Cluster counts for the k-means column.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize])]
    pub k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize])]
    pub d: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub r_max: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1])]
    pub epsilon: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub delta0: f64,
    #[command(flatten)]
    pub out: Output,
}

fn run(args: Vec<OsString>) -> Result<(), CliError> {
    let args = config::merge(args)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(usage(e.to_string().trim_end().to_string())),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool
        .build()
        .map_err(|e| usage(format!("cannot start worker threads: {e}")))?;
    pool.install(|| commands::dispatch(cli.command))
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qnn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
