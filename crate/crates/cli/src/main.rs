mod args;
mod config;
mod error;
mod figures;
mod output;
mod run;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::{EXIT_ABORTED, EXIT_INVALID_CONFIG};
use run::Status;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INVALID_CONFIG),
            };
        }
    };
    let result = match &cli.command {
        Command::Traj(c) => run::traj(c),
        Command::Action(c) => run::action(c),
        Command::Field(a) => run::field(a),
        Command::Expect(a) => run::expect(a),
        Command::Figures(a) => figures::figures(a),
    };
    match result {
        Ok(Status::Complete) => ExitCode::SUCCESS,
        Ok(Status::Aborted) => {
            eprintln!("cqtraj: some computations stopped early; see the metadata files");
            ExitCode::from(EXIT_ABORTED)
        }
        Err(e) => {
            eprintln!("cqtraj: {e}");
            e.exit_code()
        }
    }
}
