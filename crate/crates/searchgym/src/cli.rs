//! Argument parsing and dispatch. Every value can also come from a JSON
//! config file (`--config`); explicit flags always win.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::analyze::{cmd_analyze, AnalyzeArgs};
use crate::build::{cmd_build, BuildArgs};
use crate::config::{self, FileConfig};
use crate::eval::{cmd_eval, EvalArgs};
use crate::report::{cmd_report, ReportArgs};
use crate::serve::{cmd_serve, ServeArgs};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "searchgym",
    version,
    about = "Build, serve, evaluate, and analyze search-based reasoning environments",
    propagate_version = true
)]
pub struct Cli {
    /// JSON config file supplying defaults for any flag; flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a split's database, task/document sidecars, and manifest from
    /// a problems corpus.
    Build(BuildArgs),
    /// Serve a database over the HTTP tool protocol until interrupted.
    Serve(ServeArgs),
    /// Run an agent over every task; write per-episode traces and the
    /// metrics report.
    Eval(EvalArgs),
    /// Cluster document embeddings and grade traces into a graph report.
    Analyze(AnalyzeArgs),
    /// Merge metrics and graph reports into the final CSV tables.
    Report(ReportArgs),
}

/// Runs one parsed command line to completion.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => config::load(path)?,
        None => FileConfig::default(),
    };
    match &cli.command {
        Command::Build(args) => cmd_build(args, &file).map(drop),
        Command::Serve(args) => cmd_serve(args, &file),
        Command::Eval(args) => cmd_eval(args, &file).map(drop),
        Command::Analyze(args) => cmd_analyze(args, &file).map(drop),
        Command::Report(args) => cmd_report(args, &file).map(drop),
    }
}
