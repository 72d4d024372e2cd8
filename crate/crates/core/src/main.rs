use std::path::PathBuf;
use std::process::ExitCode;

use cbmsim::cli::{run, Command, RunManifest};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "cbmsim",
    version,
    about = "Simulate and optimize joint maintenance and spare-parts policies"
)]
struct Args {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simulate the configured policy and write per-replication results.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replications: Option<u64>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Search the configured grid (or random-search box) for the cheapest feasible policy.
    Optimize {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Check a scenario file without simulating.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let manifest = match Args::parse().command {
        Cmd::Simulate {
            config,
            out,
            seed,
            replications,
            workers,
        } => RunManifest {
            output_dir: Some(out),
            seed_override: seed,
            replications_override: replications,
            workers_override: workers,
            ..RunManifest::new(Command::Simulate, config)
        },
        Cmd::Optimize {
            config,
            out,
            seed,
            workers,
        } => RunManifest {
            output_dir: Some(out),
            seed_override: seed,
            workers_override: workers,
            ..RunManifest::new(Command::Optimize, config)
        },
        Cmd::Validate { config } => RunManifest::new(Command::Validate, config),
    };
    let mut stdout = std::io::stdout().lock();
    match run(&manifest, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
