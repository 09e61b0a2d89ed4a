//! `hahn-paths`: enumerate, sample, evaluate kernels and bulk limits, and
//! draw tilings from the command line.
//!
//! Exit codes: 0 success, 2 bad input or infeasible request, 3 resource
//! limit, 4 boundary or pole in the limit computations.

mod commands;
mod config;
mod error;
mod output;
mod svg;
mod trajfile;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Enumerate(a) => commands::enumerate(a),
        Command::Kernel(a) => commands::kernel(a),
        Command::Sample(a) => commands::sample(a),
        Command::Limit(a) => commands::limit(a),
        Command::Render(a) => commands::render(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hahn-paths: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
