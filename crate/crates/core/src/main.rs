use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vacuum_euler::cli::{exit_code, run_scenario, Scenario};

#[derive(Parser)]
#[command(version, about = "Compressible Euler with a physical vacuum boundary: batch experiments")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a TOML file.
    Run {
        config: PathBuf,
        /// Overrides `experiment.output_dir`.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        /// Reserved; runs are deterministic.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        verbose: bool,
    },
}

fn main() -> ExitCode {
    let Command::Run {
        config,
        output_dir,
        threads,
        seed: _,
        verbose,
    } = Args::parse().command;
    env_logger::Builder::new()
        .filter_level(if verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .init();
    let scenario = match Scenario::load(&config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e) as u8);
        }
    };
    let dir = output_dir.unwrap_or_else(|| scenario.output_dir.clone());
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(3);
        }
    };
    match pool.install(|| run_scenario(&scenario, &dir)) {
        Ok(outcome) => {
            for f in &outcome.files {
                log::info!("wrote {}", f.display());
            }
            print!("{}", outcome.report);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
