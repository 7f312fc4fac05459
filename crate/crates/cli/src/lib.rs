//! Command-line front end for `contact-core`.
//!
//! Every run writes one data file and a `<out>.run.json` header holding the
//! program version, the full configuration, the seed and a short summary.

pub mod args;
pub mod commands;
pub mod error;
pub mod inputs;
pub mod output;

use std::path::{Path, PathBuf};

use args::{Cli, Command, Format};
use error::CliError;
use output::{header_path, to_json_bytes, write_atomic, RunHeader};

pub const THREADS_ENV: &str = "CONTACT_SPECTRA_THREADS";

/// Files written by a successful run.
#[derive(Debug, Clone)]
pub struct RunFiles {
    pub data: PathBuf,
    pub header: PathBuf,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::bad_args(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // a second call in the same process finds the pool already built
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn default_format(cmd: &Command) -> Format {
    match cmd {
        Command::Assemble(_) => Format::Json,
        _ => Format::Csv,
    }
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn run(cli: &Cli) -> Result<RunFiles, CliError> {
    configure_threads()?;
    let cmd = &cli.command;
    let out = &cmd.output().out;
    let format = cmd.output().format.unwrap_or_else(|| default_format(cmd));
    let artifact = commands::execute(cmd)?;
    let (data, fmt) = match format {
        Format::Csv => (artifact.table.to_csv()?, "csv"),
        Format::Json => (to_json_bytes(&artifact.json)?, "json"),
    };
    let config = serde_json::to_value(cmd).map_err(|e| CliError::io(e.to_string()))?;
    let header = RunHeader {
        program: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: cmd.name(),
        config,
        seed: cmd.seed(),
        format: fmt,
        data_file: file_name(out),
        summary: artifact.summary,
    };
    let header_file = header_path(out);
    write_atomic(out, &data)?;
    write_atomic(&header_file, &to_json_bytes(&header)?)?;
    Ok(RunFiles {
        data: out.clone(),
        header: header_file,
    })
}
