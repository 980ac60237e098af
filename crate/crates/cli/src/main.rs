use std::path::PathBuf;
use std::process::ExitCode;

use anderson_mp_cli::config::read_config;
use anderson_mp_cli::{run, Command, RunError, THREADS_ENV};
use clap::Parser;

/// Multi-particle Anderson model experiments.
#[derive(Debug, Parser)]
#[command(name = "anderson-mp", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Experiment config (`key = value` lines).
    #[arg(long)]
    config: PathBuf,
    /// Overrides disorder.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides a config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory; overrides output.dir.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn threads() -> Result<usize, String> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| format!("{THREADS_ENV} must be a non-negative integer, got `{v}`")),
    }
}

fn execute(args: &Args) -> Result<Vec<PathBuf>, RunError> {
    let mut raw = read_config(&args.config)?;
    for pair in &args.overrides {
        raw.set_pair(pair)?;
    }
    if let Some(seed) = args.seed {
        raw.set("disorder.seed", &seed.to_string())?;
    }
    let cfg = raw.validate()?;
    let dir = args.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
    run(args.command, &cfg, &dir)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let workers = match threads() {
        Ok(n) => n,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::FAILURE;
        }
    };
    let result = if workers == 0 {
        execute(&args)
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(|| execute(&args)),
            Err(e) => {
                eprintln!("error: cannot start {workers} workers: {e}");
                return ExitCode::FAILURE;
            }
        }
    };
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
