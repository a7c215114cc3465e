//! Command-line front end: argument definitions, settings resolution and the
//! five subcommands plus plot export.
//!
//! Every option can also be set as `key = value` in a config file (`--config`)
//! or through a `DTWHAR_<KEY>` environment variable; the key is the long flag
//! name with `-` replaced by `_`. Flags win over the environment, which wins
//! over the file.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::Layers;

/// Failure of a CLI invocation, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad or missing options (exit code 2).
    #[error("{0}")]
    Usage(String),
    /// Data, format or i/o failure (exit code 1).
    #[error(transparent)]
    Run(#[from] crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dtwhar", version, about = "DTW template selection and activity classification")]
pub struct Cli {
    /// Settings file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads for distance computations (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster each activity and write distance matrices and assignments.
    Cluster {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a model bundle.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Output directory for the bundle.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a dataset with a trained bundle.
    Predict {
        /// Bundle directory written by `train`.
        #[arg(long)]
        model: Option<PathBuf>,
        #[command(flatten)]
        data: DataArgs,
        /// Predictions file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic dataset.
    Synth(SynthArgs),
    /// Run the cut × distance × averaging grid.
    Bench(BenchArgs),
    /// Write series as `index value` files for plotting.
    Export {
        /// Templates file (e.g. `templates.txt` from a bundle).
        #[arg(long)]
        templates: Option<PathBuf>,
        #[command(flatten)]
        data: DataArgs,
        /// Maximum number of series to export.
        #[arg(long)]
        limit: Option<usize>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Where to read a dataset from: either `--data DIR` with `<stem>_c<k>.txt`
/// and `<stem>_labels.txt` files, or explicit `--signals`/`--labels` paths.
#[derive(Debug, Args, Default)]
pub struct DataArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// File-name stem inside `--data` (default: `train` for training, `test` for prediction).
    #[arg(long)]
    pub stem: Option<String>,
    /// One signal file per channel, in channel order.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub signals: Vec<PathBuf>,
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub subjects: Option<PathBuf>,
    /// Value subtracted from every label (1 for the original UCI files).
    #[arg(long)]
    pub label_base: Option<u32>,
    /// Drop flat samples below this range quantile before use.
    #[arg(long)]
    pub flat_quantile: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct ModelArgs {
    /// dtw or dtwsubseq.
    #[arg(long)]
    pub distance: Option<String>,
    /// dpa or dba.
    #[arg(long)]
    pub averaging: Option<String>,
    /// Cluster diameter bound as a fraction of the largest distance.
    #[arg(long)]
    pub cut: Option<f64>,
    /// DTW band radius.
    #[arg(long)]
    pub bw: Option<usize>,
    /// Displacement window (required for dtwsubseq).
    #[arg(long)]
    pub dw: Option<usize>,
    #[arg(long)]
    pub pca_variance: Option<f64>,
    #[arg(long)]
    pub svm_c: Option<f64>,
    #[arg(long)]
    pub svm_epochs: Option<usize>,
    #[arg(long)]
    pub svm_tol: Option<f64>,
    #[arg(long)]
    pub dba_max_iters: Option<usize>,
    #[arg(long)]
    pub dba_tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Default)]
pub struct SynthArgs {
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub train_per_activity: Option<usize>,
    #[arg(long)]
    pub test_per_activity: Option<usize>,
    /// Noise variance (default 5).
    #[arg(long, conflicts_with = "noise_std")]
    pub noise_variance: Option<f64>,
    /// Noise standard deviation, instead of a variance.
    #[arg(long)]
    pub noise_std: Option<f64>,
    /// real (noise on real parts) or complex.
    #[arg(long)]
    pub noise_mode: Option<String>,
    #[arg(long)]
    pub noise_len: Option<usize>,
    #[arg(long)]
    pub fft_len: Option<usize>,
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Source variants per bundled pseudo-activity.
    #[arg(long)]
    pub subjects: Option<usize>,
    /// Templates file to draw sources from instead of the bundled generators.
    #[arg(long)]
    pub sources: Option<PathBuf>,
    /// Channel of the source templates to use.
    #[arg(long)]
    pub source_channel: Option<usize>,
}

#[derive(Debug, Args, Default)]
pub struct BenchArgs {
    /// Dataset directory with `train` and `test` stems; synthetic data is generated when absent.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub label_base: Option<u32>,
    #[arg(long)]
    pub flat_quantile: Option<f64>,
    /// Cuts to evaluate.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub cuts: Vec<f64>,
    #[arg(long)]
    pub bw: Option<usize>,
    #[arg(long)]
    pub dw: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Synthetic training samples per activity.
    #[arg(long)]
    pub train_per_activity: Option<usize>,
    /// Synthetic test samples per activity.
    #[arg(long)]
    pub test_per_activity: Option<usize>,
    /// Results table file (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let layers = Layers::load(cli.config.as_deref())?;
    if let Some(n) = layers.get(cli.threads, "threads")? {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure thread pool: {e}")))?;
    }
    match cli.command {
        Command::Cluster { data, model, out } => commands::cluster(&layers, &data, &model, out),
        Command::Train { data, model, out } => commands::train(&layers, &data, &model, out),
        Command::Predict { model, data, out } => commands::predict(&layers, model, &data, out),
        Command::Synth(args) => commands::synth(&layers, &args),
        Command::Bench(args) => commands::bench(&layers, &args),
        Command::Export { templates, data, limit, out } => commands::export(&layers, templates, &data, limit, out),
    }
}
