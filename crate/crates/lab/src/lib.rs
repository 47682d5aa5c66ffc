//! Command-line laboratory for `liouville-core`.
//!
//! `liouville-lab <subcommand> [flags]` runs one experiment, writes its
//! artifacts (CSV tables, a JSON summary, binary grids) to the output
//! directory and prints the JSON summary on stdout.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0    | success |
//! | 1    | rejected input: invalid parameters, bad config file, malformed JSON input |
//! | 2    | numerical failure (no convergence, diverged Newton, lost branch, oracle disagreement) or IO failure |
//! | 64   | usage error (unknown subcommand or flag) |
//!
//! Every failure also prints one stderr line
//! `error kind=<Kind> code=<n> msg="<text>"`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod emit;
pub mod error;

use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use crate::cli::Cli;
use crate::commands::Context;
use crate::emit::Emitter;
use crate::error::{record, LabError, LabResult};

fn execute(cli: &Cli) -> LabResult<Vec<u8>> {
    let ctx = Context { emit: Emitter::new(&cli.out)?, unit: cli.units.into(), seed: cli.seed };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.max(1))
        .build()
        .map_err(|e| LabError::Invalid(format!("thread pool: {e}")))?;
    pool.install(|| commands::dispatch(&cli.command, &ctx))
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn run(argv: Vec<String>) -> i32 {
    let argv = match config::expand(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("{}", e.record());
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let _ = e.print();
            let msg = e.kind().as_str().unwrap_or("usage error");
            eprintln!("{}", record("Usage", 64, msg));
            return 64;
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            let _ = std::io::stdout().write_all(&summary);
            0
        }
        Err(e) => {
            eprintln!("{}", e.record());
            e.exit_code()
        }
    }
}
