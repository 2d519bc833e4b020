//! `hpgcn` command-line tool.
//!
//! Exit codes: 0 success, 1 check failed (e.g. gradcheck above tolerance),
//! 2 bad arguments or configuration, 3 ingest or validation failure,
//! 4 numerical divergence.

mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hpgcn::model::{HpGcnConfig, Mode};
use hpgcn::train::{SplitSpec, TrainConfig};
use hpgcn::Error;

// Training allocates and frees large matrices every epoch. The system
// allocator hands those pages back to the kernel each time, which costs
// page faults and makes wall-clock timings noisy.
#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

#[derive(Parser, Debug)]
#[command(name = "hpgcn", version, about = "High-pass graph convolution for node anomaly detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a planted-anomaly dataset (manifest plus files).
    Synth(SynthArgs),
    /// Print and save dataset statistics, validating any expected values.
    Stats(StatsArgs),
    /// Graph Fourier spectrum of a node signal and filter responses.
    Spectrum(SpectrumArgs),
    /// Train a model and save its checkpoint and per-epoch report.
    Train(TrainArgs),
    /// Evaluate a saved model on a dataset.
    Evaluate(EvaluateArgs),
    /// Finite-difference gradient check on the built-in fixtures.
    Gradcheck(GradcheckArgs),
    /// Train once per filter order K and report metrics and wall-clock.
    Ksweep(KsweepArgs),
}

#[derive(Args, Debug)]
struct OutDir {
    /// Directory for all output files (created if missing).
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[command(flatten)]
    out: OutDir,
    /// Number of nodes.
    #[arg(long, default_value_t = 2000)]
    n: usize,
    /// Feature dimension.
    #[arg(long, default_value_t = 16)]
    features: usize,
    /// Fraction of nodes that are anomalies.
    #[arg(long, default_value_t = 0.05)]
    anomaly: f64,
    /// Fraction of nodes with no edges.
    #[arg(long, default_value_t = 0.3)]
    isolated: f64,
    /// Fraction of anomalies placed among the isolated nodes.
    #[arg(long, default_value_t = 0.3)]
    isolated_anomaly: f64,
    /// Edge probability between nodes of the same class.
    #[arg(long, default_value_t = 0.01)]
    p_in: f64,
    /// Edge probability between nodes of different classes.
    #[arg(long, default_value_t = 0.002)]
    p_out: f64,
    /// Mean feature offset of anomalies.
    #[arg(long, default_value_t = 1.5)]
    delta: f64,
    /// Feature noise standard deviation.
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Number of independently drawn relations.
    #[arg(long, default_value_t = 1)]
    relations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct StatsArgs {
    /// Dataset manifest (JSON).
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    out: OutDir,
    /// Node signal: `labels` (anomaly indicator) or `feature:<column>`.
    #[arg(long, default_value = "labels")]
    signal: String,
    /// Frequency above which energy is summed, in [0, 2].
    #[arg(long, default_value_t = 1.0)]
    cutoff: f64,
    /// Order K of the pure high-pass response L^(K-1) written to response.csv.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Centre of the reference band-pass response.
    #[arg(long, default_value_t = 1.0)]
    band_center: f64,
    /// Width of the reference band-pass response.
    #[arg(long, default_value_t = 0.25)]
    band_sigma: f64,
    /// Largest graph accepted by the dense eigensolver.
    #[arg(long, default_value_t = hpgcn::spectral::DEFAULT_DENSE_CAP)]
    cap: usize,
    /// Also write spectrum.svg.
    #[arg(long)]
    svg: bool,
}

/// Model and optimisation settings shared by `train` and `ksweep`.
#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Training epochs.
    #[arg(long, default_value_t = 100)]
    epochs: usize,
    /// Adam learning rate.
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    /// Hidden width h.
    #[arg(long = "hidden", default_value_t = 64)]
    hidden: usize,
    /// `homo` filters the union graph; `hetero` filters each relation and max-pools.
    #[arg(long, default_value_t = Mode::Homo)]
    mode: Mode,
    /// Fraction of labeled nodes used for training.
    #[arg(long, default_value_t = 0.4)]
    train_ratio: f64,
    /// Components of at most this many nodes use the isolated branch.
    #[arg(long, default_value_t = 1)]
    min_component_size: usize,
    /// Route every node through the filter branch.
    #[arg(long)]
    no_isolated_branch: bool,
    /// Disable inverse-frequency class weights in the loss.
    #[arg(long)]
    unweighted_loss: bool,
    /// Linear+ReLU layers after the filter.
    #[arg(long, default_value_t = 2)]
    mlp_layers_connected: usize,
    /// Linear+ReLU layers of the isolated branch.
    #[arg(long, default_value_t = 2)]
    mlp_layers_isolated: usize,
    /// Linear+ReLU layers before the output layer.
    #[arg(long, default_value_t = 1)]
    mlp_layers_head: usize,
    /// Seed for initialisation and the split.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ModelArgs {
    fn model_config(&self, k: usize) -> HpGcnConfig {
        HpGcnConfig {
            k,
            hidden_dim: self.hidden,
            mlp_layers_connected: self.mlp_layers_connected,
            mlp_layers_isolated: self.mlp_layers_isolated,
            mlp_layers_head: self.mlp_layers_head,
            mode: self.mode,
            min_component_size: self.min_component_size,
            separate_isolated: !self.no_isolated_branch,
            weighted_loss: !self.unweighted_loss,
            seed: self.seed,
        }
    }

    fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.epochs,
            lr: self.lr,
            split: SplitSpec {
                train_ratio: self.train_ratio,
                seed: self.seed,
                stratified: true,
            },
        }
    }
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    out: OutDir,
    /// Filter order K (number of Laplacian powers, L^0 … L^(K-1)).
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Output directory of a previous `train` run.
    #[arg(long)]
    model_dir: PathBuf,
    #[command(flatten)]
    out: OutDir,
}

#[derive(Args, Debug)]
struct GradcheckArgs {
    #[command(flatten)]
    out: OutDir,
    /// Which fixture to check: `homo`, `hetero` or `all`.
    #[arg(long, default_value = "all")]
    fixture: String,
    /// Central-difference step.
    #[arg(long, default_value_t = 1e-5)]
    h: f64,
    /// Coordinates sampled per parameter tensor.
    #[arg(long, default_value_t = 32)]
    coords: usize,
    /// Largest accepted relative error.
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct KsweepArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    out: OutDir,
    /// Filter orders to train, comma separated.
    #[arg(long = "k", value_delimiter = ',', default_value = "1,2,3,4,5,6")]
    ks: Vec<usize>,
    /// Timed repetitions per K; the median is reported.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[command(flatten)]
    model: ModelArgs,
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn check(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Diverged { .. } => 4,
            Error::InvalidConfig(_) | Error::InvalidSplit(_) => 2,
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::Validation(_)
            | Error::Checkpoint(_)
            | Error::Json(_)
            | Error::InvalidGraph(_)
            | Error::InvalidWeight { .. }
            | Error::IndexOutOfRange { .. }
            | Error::GraphTooLarge { .. } => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::Stats(a) => commands::stats(a),
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Train(a) => commands::train(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Gradcheck(a) => commands::gradcheck(a),
        Command::Ksweep(a) => commands::ksweep(a),
    };
    match result {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
