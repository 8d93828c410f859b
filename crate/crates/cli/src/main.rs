//! `erm`: command-line front end for erm-core.
//!
//! Exit codes: 0 success, 2 bad configuration, 3 data error, 4 numeric error
//! (singular system, divergence, no convergence).

mod args;
mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};
use output::{CliError, CliResult, Output};

fn run(cli: &Cli) -> CliResult<Output> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let seed = cli.seed;
    match &cli.command {
        Command::Fit(a) => commands::fit(a, seed),
        Command::Select(a) => commands::select(a, seed),
        Command::Biasvar(a) => commands::biasvar(a, seed),
        Command::Cluster(a) => commands::cluster(a, seed),
        Command::Pca(a) => commands::pca(a),
        Command::Normalize(a) => commands::normalize_cmd(a),
        Command::Split(a) => commands::split_cmd(a, seed),
        Command::GenToy(a) => commands::gen_toy(a, seed),
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let result = run(&cli).and_then(|out| output::emit(&out, &output::command_echo(&argv), cli.seed, start.elapsed().as_millis()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
