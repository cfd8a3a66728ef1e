//! `twc`: generate, transform, compose, classify and verify twisted-convolution
//! elements from the command line.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 usage, I/O or shape error.

mod commands;
mod config;
mod output;
mod tables;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command, RunConfig};

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(raw) = std::env::var("TWC_THREADS") {
        let n: usize = raw
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("TWC_THREADS={raw:?} is not a count"))?;
        anyhow::ensure!(n >= 1, "TWC_THREADS must be at least 1");
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    configure_threads()?;
    let cfg = RunConfig::from_cli(cli)?;
    match &cfg.command {
        Command::Gen => commands::gen(&cfg),
        Command::Compose => commands::compose(&cfg),
        Command::Verify { weyl } => commands::verify(&cfg, *weyl),
        Command::Tables => {
            let dir = cfg.output.clone().expect("validated");
            tables::tables(&cfg, &dir)
        }
        Command::Classify => commands::classify(&cfg),
        Command::Transform { op } => commands::transform(&cfg, *op),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with 2 on usage errors
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("twc: verification failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("twc: error: {e:#}");
            ExitCode::from(2)
        }
    }
}
