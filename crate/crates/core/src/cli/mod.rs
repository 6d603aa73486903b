//! Config-driven front end behind the `locpovm` binary.
//!
//! Exit codes: `0` success, `2` configuration or usage error, `3` computation error.

mod commands;
pub mod config;
mod table;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;

pub use commands::{run as run_command, Command};
pub use config::{ConfigError, ExperimentConfig, OutputFormat, Prepared};
pub use table::{format_float, ResultTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "LOCPOVM_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "locpovm",
    version,
    about = "Localization-density experiments for a free scalar field"
)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output file; overrides `output.path`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn thread_cap() -> Result<Option<usize>, ConfigError> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(_) => Err(ConfigError::new(THREADS_ENV, "not valid UTF-8")),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ConfigError::new(
                THREADS_ENV,
                format!("expected a positive integer, got {s:?}"),
            )),
        },
    }
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Loads and validates the config; every failure here maps to exit code 2.
fn load(
    command: Command,
    config_path: &Path,
    out: Option<PathBuf>,
) -> Result<(ExperimentConfig, Prepared, PathBuf, OutputFormat), ConfigError> {
    let text = fs::read_to_string(config_path)
        .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", config_path.display())))?;
    let config = ExperimentConfig::parse(&text)?;
    let prepared = config.prepare()?;
    if command == Command::Scan && config.scan.is_none() {
        return Err(ConfigError::new(
            "scan.family",
            "required by the scan command",
        ));
    }
    let out = out
        .or_else(|| config.output_path.as_ref().map(PathBuf::from))
        .ok_or_else(|| ConfigError::new("output.path", "required when --out is not given"))?;
    let format = config.format.unwrap_or_else(|| {
        if out.extension().is_some_and(|e| e == "json") {
            OutputFormat::Json
        } else {
            OutputFormat::Csv
        }
    });
    Ok((config, prepared, out, format))
}

/// Runs the CLI on explicit arguments and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let threads = match thread_cap() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    let (config, prepared, out, format) = match load(args.command, &args.config, args.out) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_COMPUTATION;
        }
    };
    let table = match pool.install(|| commands::run(args.command, &config, &prepared)) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("computation error: {e}");
            return EXIT_COMPUTATION;
        }
    };
    if let Some((row, column)) = table.first_non_finite() {
        eprintln!("computation error: non-finite value in row {row}, column {column}");
        return EXIT_COMPUTATION;
    }
    let written = match format {
        OutputFormat::Csv => fs::write(&out, table.to_csv())
            .and_then(|_| fs::write(sidecar_path(&out), table.metadata_json())),
        OutputFormat::Json => fs::write(&out, table.to_json()),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: cannot write {}: {e}", out.display());
            EXIT_COMPUTATION
        }
    }
}
