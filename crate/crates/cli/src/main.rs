//! `pathway`: simulate patient pathways, train the rare-disease alert
//! model, and find the referral threshold with minimal expected cost.

mod cli;
mod commands;
mod error;
mod manifest;

use clap::error::ErrorKind;
use clap::Parser;

use cli::{Cli, Command};
use error::CliError;
use manifest::RunManifest;

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate(args) => commands::cmd_generate(&RunManifest::resolve(args)?),
        Command::Simulate(args) => commands::cmd_simulate(&RunManifest::resolve(args)?),
        Command::Train(args) => commands::cmd_train(&RunManifest::resolve(args)?),
        Command::Sweep(args) => commands::cmd_sweep(&RunManifest::resolve(args)?),
        Command::Trace(args) => {
            commands::cmd_trace(&RunManifest::resolve(&args.stage)?, args.trajectory_id)
        }
        Command::All(args) => commands::cmd_all(&RunManifest::resolve(args)?),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            std::process::exit(0);
        }
        Err(e) => {
            eprint!("{e}");
            std::process::exit(1);
        }
    };

    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot build thread pool: {e}");
            std::process::exit(1);
        }
    };

    match pool.install(|| run(&cli)) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
