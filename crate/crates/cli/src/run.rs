//! Running an expanded spec and emitting its outputs.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};

use thiserror::Error;

use ncc_core::harness::{snr_sweep, HarnessError};
use ncc_core::SerCurve;

use crate::output::{rows, write_csv, write_json, OutputError};
use crate::preset::list_presets;
use crate::report::summary;
use crate::spec::{parse_args, Command, ExperimentSpec, OutputFormat, UsageError};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "NCC_SIM_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
    #[error(transparent)]
    Serialize(#[from] OutputError),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parses the value of [`THREADS_ENV`]; unset or empty means no cap.
pub fn thread_cap(value: Option<&str>) -> Result<Option<usize>, UsageError> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(UsageError::Invalid {
                flag: THREADS_ENV,
                message: format!("expected a positive integer, got '{v}'"),
            }),
        },
    }
}

/// Sweeps every config of `spec` in order, on a pool of `threads` workers
/// (rayon's default when `None`).
pub fn simulate(spec: &ExperimentSpec, threads: Option<usize>) -> Result<Vec<SerCurve>, RunError> {
    let pool = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build()?,
        None => rayon::ThreadPoolBuilder::new().build()?,
    };
    pool.install(|| {
        spec.configs
            .iter()
            .map(|config| {
                log::info!("{} {} {}-PSK: {} points", config.topology, config.scenario, config.m, config.snr_grid.len());
                Ok(snr_sweep(config)?)
            })
            .collect()
    })
}

pub fn write_rows<W: Write>(w: W, format: OutputFormat, curves: &[SerCurve]) -> Result<(), OutputError> {
    let rows = rows(curves);
    match format {
        OutputFormat::Csv => write_csv(w, &rows),
        OutputFormat::Json => write_json(w, &rows),
    }
}

/// Runs `spec` and writes the data to `--out` (summary to `stdout`) or, with
/// no output path, the data to `stdout` and the summary to `stderr`.
pub fn execute(
    spec: &ExperimentSpec,
    threads: Option<usize>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), RunError> {
    // Opened up front so a bad path fails before any simulation time is spent.
    let file = match &spec.out {
        Some(path) => Some(
            File::create(path).map_err(|source| RunError::Output { path: path.display().to_string(), source })?,
        ),
        None => None,
    };
    let curves = simulate(spec, threads)?;
    let report = summary(spec, &curves);
    match file {
        Some(f) => {
            let mut w = BufWriter::new(f);
            write_rows(&mut w, spec.format, &curves)?;
            w.flush().map_err(|source| RunError::Output {
                path: spec.out.as_ref().unwrap().display().to_string(),
                source,
            })?;
            if spec.verbosity > 0 {
                stdout.write_all(report.as_bytes())?;
            }
        }
        None => {
            write_rows(&mut *stdout, spec.format, &curves)?;
            if spec.verbosity > 0 {
                stderr.write_all(report.as_bytes())?;
            }
        }
    }
    Ok(())
}

/// The whole command line: parse, run, report. Returns the process exit code.
pub fn main_with<I, T>(argv: I, threads_env: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let command = match parse_args(argv) {
        Ok(c) => c,
        Err(UsageError::Clap(e)) => {
            // --help and --version land here too.
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                return EXIT_USAGE;
            }
            let _ = stdout.write_all(text.as_bytes());
            return EXIT_OK;
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let spec = match command {
        Command::ListPresets => {
            let _ = stdout.write_all(list_presets().as_bytes());
            return EXIT_OK;
        }
        Command::Run(spec) => spec,
    };
    let threads = match thread_cap(threads_env) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    match execute(&spec, threads, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_RUNTIME
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_cap_values() {
        assert_eq!(thread_cap(None).unwrap(), None);
        assert_eq!(thread_cap(Some("")).unwrap(), None);
        assert_eq!(thread_cap(Some(" 3 ")).unwrap(), Some(3));
        assert!(thread_cap(Some("0")).is_err());
        assert!(thread_cap(Some("many")).is_err());
    }
}
