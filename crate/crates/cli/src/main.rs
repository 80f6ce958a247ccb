//! `imts`: weight, aggregate, train, classify, and evaluate multivariate
//! site data with grey-weighted Mahalanobis distance models.

mod commands;
mod config;
mod formats;
mod out;

use clap::{Parser, Subcommand};
use imts_core::ErrorFamily;

#[derive(Debug, Parser)]
#[command(
    name = "imts",
    version,
    about = "Grey-weighted Mahalanobis distance classification pipeline",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derive sub-factor weights for each main factor of a dataset.
    Weights(commands::weights::WeightsArgs),
    /// Collapse weighted sub-factors into a labeled ranking matrix.
    Aggregate(commands::aggregate::AggregateArgs),
    /// Fit one distance model per class from a ranking matrix.
    Train(commands::train::TrainArgs),
    /// Score feature rows against trained models.
    Classify(commands::classify::ClassifyArgs),
    /// Evaluate a ranking matrix by cross-validation or imported predictions.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Run the whole chain from a config file, writing every artifact.
    Pipeline(commands::pipeline::PipelineArgs),
    /// Recompute a bundled reference table and report the deviation.
    Reproduce(commands::reproduce::ReproduceArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Weights(args) => commands::weights::run(args),
        Command::Aggregate(args) => commands::aggregate::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Classify(args) => commands::classify::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Pipeline(args) => commands::pipeline::run(args),
        Command::Reproduce(args) => commands::reproduce::run(args),
    };
    let code = match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error[{}]: {err}", err.code());
            match err.family() {
                ErrorFamily::Config => 2,
                ErrorFamily::Data => 3,
                ErrorFamily::Numeric => 4,
                ErrorFamily::Io => 5,
            }
        }
    };
    std::process::exit(code);
}
