//! Command-line front end: argument parsing, validation and artifact output.

pub mod args;
pub mod config;
pub mod run;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;

use crate::args::Cli;
use crate::config::{build_config, thread_cap, Invalid};
use crate::run::{execute, Failure, EXIT_OK, EXIT_VALIDATION};

pub const THREADS_VAR: &str = "CONE_HANKEL_THREADS";

#[derive(Serialize)]
struct Diagnostic<'a> {
    status: &'a str,
    exit_code: u8,
    field: &'a str,
    message: &'a str,
}

fn report(code: u8, field: &str, message: &str) -> u8 {
    let d = Diagnostic {
        status: "error",
        exit_code: code,
        field,
        message,
    };
    let line = serde_json::to_string(&d).expect("diagnostic serializes");
    let _ = writeln!(std::io::stderr(), "{line}");
    code
}

fn invalid(e: &Invalid) -> u8 {
    report(EXIT_VALIDATION, &e.field, &e.message)
}

fn failure(f: &Failure) -> u8 {
    report(f.code, &f.field, &f.message)
}

/// Runs the tool on `argv` and returns the process exit status.
pub fn run_cli<I, T>(argv: I, threads: Option<&str>) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return EXIT_OK;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return report(EXIT_VALIDATION, "arguments", first.trim_start_matches("error: "));
        }
    };
    let cap = match thread_cap(threads) {
        Ok(c) => c,
        Err(e) => return invalid(&e),
    };
    if let Some(n) = cap {
        // A second initialization in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => return invalid(&e),
    };
    match execute(&config) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            match outcome.late_failure {
                Some(f) => failure(&f),
                None => EXIT_OK,
            }
        }
        Err(f) => failure(&f),
    }
}
