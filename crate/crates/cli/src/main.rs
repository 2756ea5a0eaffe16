mod cli;
mod commands;
mod config;
mod error;
mod manifest;
mod scorers;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use cli::{Cli, Command, Opts, Run};
use error::{CliError, CliResult};
use manifest::RunDir;

type Handler<T> = fn(&mut RunDir, &T) -> CliResult<()>;

fn dispatch<T: Opts + clap::Args>(name: &'static str, run: Run<T>, handler: Handler<T>) -> CliResult<()> {
    let Run { common, opts } = run;
    if let Some(w) = common.workers {
        if w == 0 {
            return Err(CliError::usage("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::usage(e.to_string()))?;
    }
    let opts = config::resolve(name, opts, common.config.as_deref())?;
    let resolved = serde_json::to_value(&opts).map_err(|e| CliError::usage(e.to_string()))?;
    let mut dir = RunDir::new(name, &common.out, common.seed, resolved)?;
    if let Some(c) = &common.config {
        dir.input(c)?;
    }
    handler(&mut dir, &opts)?;
    dir.finish()
}

fn execute(command: Command) -> CliResult<()> {
    let name = command.name();
    match command {
        Command::Ingest(r) => dispatch(name, r, commands::ingest),
        Command::BuildDataset(r) => dispatch(name, r, commands::build_dataset_cmd),
        Command::Augment(r) => dispatch(name, r, commands::augment),
        Command::Mask(r) => dispatch(name, r, commands::mask),
        Command::Split(r) => dispatch(name, r, commands::split_cmd),
        Command::Train(r) => dispatch(name, r, commands::train),
        Command::Eval(r) => dispatch(name, r, commands::eval),
        Command::Metrics(r) => dispatch(name, r, commands::metrics_cmd),
        Command::Analyze(r) => dispatch(name, r, commands::analyze),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SCSL_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
