//! Pipeline behind the `sbayes` binary: preprocessing, fitting, prediction,
//! evaluation, recommendation and the synthetic benchmark.

pub mod bench;
pub mod commands;
pub mod config;
pub mod model;
pub mod reference;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use sparse_bayes::{ErrorKind, Result};

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "sbayes", version, about = "Sparse Bayesian regression for arousal/valence prediction")]
pub struct Cli {
    /// Flat JSON file with default values for any flag
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Summarize per-song frames into a dataset (CSV plus JSON sidecar)
    Preprocess(RunConfig),
    /// Fit a model on the training rows and write it as JSON
    Fit(RunConfig),
    /// Predictive means, intervals and regions for every input row
    Predict(RunConfig),
    /// R2, RMSE and interval/region containment on the test rows
    Evaluate(RunConfig),
    /// Catalog songs inside a query song's credible rectangle
    Recommend(RunConfig),
    /// ARD against MARD on generated data over several training sizes
    SynthBench(RunConfig),
    /// Gibbs chain trace and autocorrelations as CSV
    ChainExport(RunConfig),
    /// All models on DEAM-layout data next to the reference numbers
    Compare(RunConfig),
}

/// Process exit status for a library error.
pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Config => 2,
        ErrorKind::Data => 3,
        ErrorKind::Numerical => 4,
    }
}

/// Runs one subcommand and returns its stdout text.
pub fn run(cli: &Cli) -> Result<String> {
    let (flags, f): (&RunConfig, fn(&RunConfig) -> Result<String>) = match &cli.command {
        Command::Preprocess(c) => (c, commands::cmd_preprocess),
        Command::Fit(c) => (c, commands::cmd_fit),
        Command::Predict(c) => (c, commands::cmd_predict),
        Command::Evaluate(c) => (c, commands::cmd_evaluate),
        Command::Recommend(c) => (c, commands::cmd_recommend),
        Command::SynthBench(c) => (c, commands::cmd_synth_bench),
        Command::ChainExport(c) => (c, commands::cmd_chain_export),
        Command::Compare(c) => (c, commands::cmd_compare),
    };
    let cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?.overlay(flags)?,
        None => flags.clone(),
    };
    f(&cfg)
}
