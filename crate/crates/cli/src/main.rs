mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use args::Cli;
use commands::{classify, Failure};

/// Worker threads for the parallel sections; the rayon default when unset.
const THREADS_ENV: &str = "JACOBI_TRACE_THREADS";

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let n: usize = value.parse().with_context(|| format!("{THREADS_ENV} must be a positive integer"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    configure_threads()?;
    let artifact = commands::run(&cli.command)?;
    match &cli.command.options().resolved()?.output {
        Some(path) => std::fs::write(path, &artifact.text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(artifact.text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let class = classify(&err);
            eprintln!("{class}: {err:#}");
            ExitCode::from(match class {
                Failure::Usage => 2,
                Failure::Runtime => 1,
            })
        }
    }
}
