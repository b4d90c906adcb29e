use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mixlab::experiment::{self, exit_code, ExperimentConfig, EXPERIMENTS};
use mixlab::MixError;

#[derive(Parser)]
#[command(name = "mixlab", version, about = "Run component-mixer experiments from JSON configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Where to write the JSON report (overrides the config's `output`).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Worker threads for trials. Results do not depend on this.
        #[arg(long)]
        parallel: Option<usize>,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the available experiments and the config fields they read.
    ListExperiments,
}

fn fail(err: &MixError, context: &str) -> ExitCode {
    eprintln!("mixlab: {context}{err}");
    ExitCode::from(exit_code(err) as u8)
}

fn run(config_path: &Path, output: Option<PathBuf>, parallel: Option<usize>, trials: Option<u64>, seed: Option<u64>) -> ExitCode {
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("mixlab: cannot read {}: {e}", config_path.display());
            return ExitCode::from(1);
        }
    };
    let mut config = match ExperimentConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => return fail(&e, &format!("{}: ", config_path.display())),
    };
    if let Some(t) = trials {
        config.trials = t;
    }
    if let Some(s) = seed {
        config.seed = s;
    }
    let output = output.or_else(|| config.output.clone());

    let result = match parallel {
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
            Ok(pool) => pool.install(|| experiment::run(&config)),
            Err(e) => {
                eprintln!("mixlab: cannot start {threads} workers: {e}");
                return ExitCode::from(1);
            }
        },
        None => experiment::run(&config),
    };
    let report = match result {
        Ok(r) => r,
        Err(e) => return fail(&e, &format!("{}: ", config.experiment)),
    };
    let body = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match output {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, body) {
                eprintln!("mixlab: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
            println!(
                "{} on {} instance: {} trials, seed {}, {:.3}s; report written to {}",
                config.experiment,
                config.instance.family(),
                config.trials,
                config.seed,
                report.wall_time_seconds,
                path.display()
            );
        }
        None => print!("{body}"),
    }
    ExitCode::SUCCESS
}

fn list_experiments() -> ExitCode {
    let width = EXPERIMENTS.iter().map(|(name, _)| name.len()).max().unwrap_or(0);
    println!("{:width$}  CONFIG FIELDS", "EXPERIMENT");
    for (name, fields) in EXPERIMENTS {
        println!("{name:width$}  {fields}");
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, output, parallel, trials, seed } => run(&config, output, parallel, trials, seed),
        Command::ListExperiments => list_experiments(),
    }
}
