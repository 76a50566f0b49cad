use std::process::ExitCode;

use clap::Parser;
use tsallis_bg::cli::{main_with, Args};

fn main() -> ExitCode {
    match main_with(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::FAILURE
        }
    }
}
