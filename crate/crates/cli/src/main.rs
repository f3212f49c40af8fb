//! `factor-bench`: CAPM and Fama-French estimation, ranking, normality and
//! model-comparison reports over monthly return panels.

mod commands;
mod config;
mod data;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{compare, estimate, ingest, normality, rank, simulate};

#[derive(Parser, Debug)]
#[command(name = "factor-bench", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Clean a returns panel and factor file into an aligned, complete panel.
    Ingest(ingest::IngestArgs),
    /// Per-stock coefficients with descriptive statistics and histograms.
    Estimate(estimate::EstimateArgs),
    /// Beta and return rankings, their correlations and extreme slices.
    Rank(rank::RankArgs),
    /// Out-of-sample or leave-one-out prediction errors per model.
    Compare(compare::CompareArgs),
    /// Shapiro-Wilk test of each stock's returns.
    Normality(normality::NormalityArgs),
    /// Generate a synthetic panel with known coefficients.
    Simulate(simulate::SimulateArgs),
}

/// Exit status when `--strict` is set and some stock was excluded.
const EXIT_EXCLUSIONS: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    // Ok(true): strict mode and some stock was excluded
    let outcome = match &cli.command {
        Command::Ingest(a) => ingest::run(a),
        Command::Estimate(a) => estimate::run(a),
        Command::Rank(a) => rank::run(a),
        Command::Compare(a) => compare::run(a),
        Command::Normality(a) => normality::run(a),
        Command::Simulate(a) => simulate::run(a),
    };
    match outcome {
        Ok(true) => {
            eprintln!("factor-bench: stocks were excluded (see the exclusions table)");
            ExitCode::from(EXIT_EXCLUSIONS)
        }
        Ok(false) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("factor-bench: {e:#}");
            ExitCode::FAILURE
        }
    }
}
