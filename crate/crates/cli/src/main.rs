mod args;
mod cache;
mod commands;
mod config;
mod error;
mod output;

use clap::CommandFactory;
use std::ffi::OsString;

fn main() {
    let argv: Vec<OsString> = std::env::args_os().collect();
    // Help and version go through clap; everything else reports JSON.
    if let Err(e) = args::Cli::command().try_get_matches_from(&argv) {
        if !e.use_stderr() {
            e.exit();
        }
    }
    let code = match config::parse_with_config(argv).and_then(commands::execute) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    };
    std::process::exit(code);
}
