//! The `divann` binary: synthetic color generation, index builds, ground
//! truth, search, and benchmark sweeps over one shared file vocabulary.
//!
//! Exit codes are a stable contract: 0 success, 2 usage or configuration
//! error, 3 data or file-format error, 4 infeasible diversity constraint.
//! Every subcommand echoes its fully resolved configuration before doing
//! any work, so logs alone suffice to reproduce a run.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use divann::Error;

use commands::{BenchArgs, BuildArgs, GenColorsArgs, GtArgs, SearchArgs};

#[derive(Parser)]
#[command(
    name = "divann",
    version,
    about = "Graph-based nearest neighbor search with diversity constraints"
)]
struct Cli {
    /// TOML file supplying values for flags left unset (flags win).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic color file.
    GenColors(GenColorsArgs),
    /// Build an index from a vector file and a color file.
    Build(BuildArgs),
    /// Compute greedy diverse ground truth for a query set.
    Gt(GtArgs),
    /// Run queries against a saved index.
    Search(SearchArgs),
    /// Recall/latency sweeps and build-time ablations, written as CSV.
    Bench(BenchArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file_cfg = match config::load(cli.config.as_deref()) {
        Ok(cfg) => cfg,
        Err(e) => return fail(&e),
    };
    let outcome = match cli.command {
        Command::GenColors(a) => commands::gen_colors(a, &file_cfg),
        Command::Build(a) => commands::build(a, &file_cfg),
        Command::Gt(a) => commands::gt(a, &file_cfg),
        Command::Search(a) => commands::search(a, &file_cfg),
        Command::Bench(a) => commands::bench(a, &file_cfg),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(e))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) => 2,
        Error::Infeasible(_) => 4,
        Error::Format { .. } | Error::Degenerate(_) | Error::Io(_) => 3,
    }
}
