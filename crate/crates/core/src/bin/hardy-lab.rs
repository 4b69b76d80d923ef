use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hardy_lab::experiment::{load_config, run_experiment, ExperimentError, Task};

/// Run one experiment task from a JSON config and write CSV/JSON reports.
#[derive(Parser)]
#[command(name = "hardy-lab", version)]
struct Cli {
    /// whitney | dimension | porosity | chains | hardy-sweep | extension | multiplier | homogeneity
    task: String,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    let task: Task = cli.task.parse().map_err(ExperimentError::Config)?;
    let mut config = load_config(&cli.config)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(ExperimentError::Config("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
    }
    let summary = run_experiment(task, &config, &cli.out)?;
    println!("{task}: ok ({:.1}s, config {})", summary.wall_clock_seconds, &summary.config_hash[..12]);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", e.to_string().lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_string().replace('\n', " "));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
