//! Figure presets shipped inside the binary.

use crate::config::SweepConfig;
use crate::error::CliError;

pub const NAMES: [&str; 4] = ["figure1", "figure2", "figure3", "figure4"];

pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "figure1" => include_str!("../presets/figure1.toml"),
        "figure2" => include_str!("../presets/figure2.toml"),
        "figure3" => include_str!("../presets/figure3.toml"),
        "figure4" => include_str!("../presets/figure4.toml"),
        _ => return None,
    })
}

pub fn load(name: &str) -> Result<SweepConfig, CliError> {
    let text = source(name).ok_or_else(|| {
        CliError::config(format!(
            "unknown preset '{name}', expected one of {}",
            NAMES.join(", ")
        ))
    })?;
    SweepConfig::parse(text).map_err(|e| e.context(format!("preset {name}")))
}
