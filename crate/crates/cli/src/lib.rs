//! Scenario-driven front end for the `qnoise` simulator.
//!
//! A scenario file (or one of the built-ins `fig1`..`fig6`) is loaded,
//! validated, run in memory and then written out as CSV tables, fit
//! summaries, optional SVG plots and a flat `manifest.txt`.

pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod run;
pub mod scenarios;

use std::path::{Path, PathBuf};

pub use config::{load, LoadedConfig, Scenario};
pub use error::{CliError, ConfigError};
pub use run::{execute, VariantOutcome};

/// Resolves `target` to `(origin, source)`: an existing file wins over a
/// built-in name.
pub fn read_source(target: &str) -> Result<(String, String), CliError> {
    let path = Path::new(target);
    if path.is_file() {
        let src = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        return Ok((target.to_string(), src));
    }
    match scenarios::builtin(target) {
        Some(src) => Ok((format!("{target} (built-in)"), src.to_string())),
        None => Err(CliError::Config(ConfigError {
            origin: target.to_string(),
            line: None,
            message: format!(
                "no such file or built-in scenario (built-ins: {})",
                scenarios::names().join(", ")
            ),
        })),
    }
}

pub fn load_target(target: &str, overrides: &[String]) -> Result<LoadedConfig, CliError> {
    let (origin, src) = read_source(target)?;
    Ok(load(&origin, &src, overrides)?)
}

/// Loads, runs and writes a scenario; returns the files written.
pub fn run_scenario(
    target: &str,
    out_dir: &Path,
    overrides: &[String],
    plot: bool,
) -> Result<Vec<PathBuf>, CliError> {
    let cfg = load_target(target, overrides)?;
    let outcomes = execute(&cfg)?;
    output::write_run(&cfg, &outcomes, out_dir, plot)
}
