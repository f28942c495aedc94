//! `hierosr`: build a class hierarchy from labeled embeddings, classify
//! open-set samples to hierarchy nodes, and evaluate the results.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "hierosr",
    version,
    about = "Hierarchy-based open set recognition: synth, split, build, train, classify, eval, export"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded synthetic embedding CSV with a planted hierarchy
    Synth(SynthArgs),
    /// Reserve unseen classes and hold out known-class test samples
    Split(SplitArgs),
    /// Build the class hierarchy from a training CSV
    Build(BuildArgs),
    /// Fit per-node detectors and classifiers on a built hierarchy
    Train(TrainArgs),
    /// Classify samples to hierarchy nodes
    Classify(ClassifyArgs),
    /// Classify a labeled test set and write the metrics report
    Eval(EvalArgs),
    /// Export the hierarchy as DOT or Newick
    Export(ExportArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Number of known classes
    #[arg(long)]
    classes: Option<usize>,
    /// Number of unseen classes
    #[arg(long)]
    unseen: Option<usize>,
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    samples_per_class: Option<usize>,
    /// Per-coordinate noise standard deviation around class means
    #[arg(long)]
    noise_scale: Option<f64>,
    /// Magnitude of the level-0 diffusion step
    #[arg(long)]
    step_scale: Option<f64>,
    /// Per-level shrink factor of the diffusion step
    #[arg(long)]
    decay: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Embedding CSV to write
    #[arg(long)]
    output: Option<PathBuf>,
    /// Ground-truth JSON (planted tree + unseen classes) to write
    #[arg(long)]
    truth: Option<PathBuf>,
    /// JSON config file; keys mirror flags, flags win
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SplitArgs {
    /// Embedding CSV to split
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated class labels to reserve as unseen
    #[arg(long)]
    unseen: Option<String>,
    /// Reserve this many seeded-random classes as unseen instead
    #[arg(long)]
    unseen_count: Option<usize>,
    /// Held-out fraction of each known class
    #[arg(long)]
    test_fraction: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    train_output: Option<PathBuf>,
    #[arg(long)]
    test_output: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    /// Training CSV (known classes only)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Distance metric: euclidean or cosine
    #[arg(long)]
    metric: Option<String>,
    /// Linkage: single, complete or average
    #[arg(long)]
    linkage: Option<String>,
    /// Constraint JSON file with cannot_link / must_link pairs
    #[arg(long)]
    constraints: Option<PathBuf>,
    /// Fail on constraint deadlock instead of relaxing with a warning
    #[arg(long)]
    no_relax: bool,
    /// Model JSON to write
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// Training CSV (known classes only)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Model JSON produced by build
    #[arg(long)]
    model: Option<PathBuf>,
    /// Outlier threshold percentile in (0, 100]
    #[arg(long)]
    percentile: Option<f64>,
    /// Output model JSON; defaults to updating --model in place
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// CSV of samples to classify
    #[arg(long)]
    input: Option<PathBuf>,
    /// Trained model JSON
    #[arg(long)]
    model: Option<PathBuf>,
    /// Classification mode: score or traversal
    #[arg(long)]
    mode: Option<String>,
    /// Score bonus per depth level (score mode)
    #[arg(long)]
    depth_bonus: Option<f64>,
    /// Predictions CSV to write
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Labeled test CSV (known + unseen classes)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Trained model JSON
    #[arg(long)]
    model: Option<PathBuf>,
    /// Classification mode: score or traversal
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    depth_bonus: Option<f64>,
    /// Report file to write
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report format: json or text
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    /// Model JSON to export
    #[arg(long)]
    model: Option<PathBuf>,
    /// Export format: dot or newick
    #[arg(long)]
    format: Option<String>,
    /// Annotate DOT nodes with per-class CCC centers from a report JSON
    #[arg(long)]
    annotate: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Synth(args) => commands::synth(args),
        Command::Split(args) => commands::split(args),
        Command::Build(args) => commands::build(args),
        Command::Train(args) => commands::train(args),
        Command::Classify(args) => commands::classify(args),
        Command::Eval(args) => commands::eval(args),
        Command::Export(args) => commands::export(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
