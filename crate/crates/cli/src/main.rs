mod config;
mod error;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::run::Experiment;

/// Nonlinear Galton board walks, truncated Dirac runs and Gibbs sampling.
#[derive(Debug, Parser)]
#[command(name = "galton-dirac", version)]
struct Cli {
    experiment: Experiment,
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config entry; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory, created if missing.
    #[arg(long, required_unless_present = "check")]
    out: Option<PathBuf>,
    /// Validate the config and exit without running.
    #[arg(long)]
    check: bool,
    /// Use the `long.`-prefixed horizons in the config.
    #[arg(long)]
    long: bool,
    /// Worker threads for `sweep` and `compare` (default: all cores).
    #[arg(long, env = "GALTON_DIRAC_THREADS")]
    threads: Option<usize>,
}

fn load(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
            Config::parse(&text)?
        }
        None => Config::default(),
    };
    for pair in &cli.set {
        cfg.set(pair)?;
    }
    cfg.select_long(cli.long);
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads.filter(|&n| n > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    let outcome = load(&cli).and_then(|cfg| match &cli.out {
        Some(out) if !cli.check => run::execute(cli.experiment, cfg, out),
        _ => run::check(cli.experiment, cfg),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("galton-dirac: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
