//! Command-line front end of the `pairgf` library.

// negated comparisons deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod checks;
pub mod commands;
pub mod error;
pub mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};

use args::{Cli, Command};
use error::{CliError, CliResult};

/// Environment variable holding the worker thread count.
pub const THREADS_VAR: &str = "PAIRGF_THREADS";

/// Sizes the global thread pool from `PAIRGF_THREADS`, if set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_VAR} must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the thread pool: {e}")))
}

fn sink(cli: &Cli) -> CliResult<Box<dyn Write>> {
    Ok(match &cli.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::FigR0(a) => {
            let data = commands::cmd_fig_r0(a, cli.format)?;
            let mut out = sink(cli)?;
            output::write_table(&mut out, &data.header, &data.table, cli.format)?;
            out.flush()?;
        }
        Command::Ldos(a) => {
            let data = commands::cmd_ldos(a, cli.format)?;
            let mut out = sink(cli)?;
            output::write_table(&mut out, &data.header, &data.table, cli.format)?;
            out.flush()?;
        }
        Command::Selfcheck(a) => {
            // the report is always JSON
            let (report, doc) = commands::cmd_selfcheck(a)?;
            let mut out = sink(cli)?;
            output::write_json_value(&mut out, &doc)?;
            out.flush()?;
            if !report.passed {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
                return Err(CliError::SelfcheckFailed(failed.join(", ")));
            }
        }
    }
    Ok(())
}
