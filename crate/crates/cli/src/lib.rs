//! Sweep runner, figure presets and validation front end for `relaycap`.

pub mod config;
pub mod csv;
pub mod error;
pub mod format;
pub mod presets;
pub mod svg;
pub mod sweep;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::SweepConfig;
pub use error::CliError;

/// Files written by [`write_sweep`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepFiles {
    pub csv: PathBuf,
    pub svg: Option<PathBuf>,
    pub effective_config: PathBuf,
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Runs every point of `config` and writes `<name>.csv`, `<name>.svg` and
/// `<name>.effective.toml` into `out_dir`.
pub fn write_sweep(
    config: &SweepConfig,
    out_dir: &Path,
    plot: bool,
    progress: impl FnMut(&sweep::Row),
) -> Result<SweepFiles, CliError> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let effective_config = out_dir.join(format!("{}.effective.toml", config.name));
    write(&effective_config, &config.dump()?)?;
    let rows = sweep::run_sweep(config, progress)?;
    let csv = out_dir.join(format!("{}.csv", config.name));
    write(&csv, &csv::render(config, &rows))?;
    let svg = if plot {
        let path = out_dir.join(format!("{}.svg", config.name));
        write(&path, &svg::render(config, &rows))?;
        Some(path)
    } else {
        None
    };
    Ok(SweepFiles {
        csv,
        svg,
        effective_config,
    })
}

/// Sizes the global thread pool from `RELAYCAP_THREADS` when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("RELAYCAP_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| {
            CliError::config(format!(
                "RELAYCAP_THREADS: expected a positive integer, got '{value}'"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::config(format!("RELAYCAP_THREADS: {e}")))
}
