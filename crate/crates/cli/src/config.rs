//! Sweep configuration files.
//!
//! A sweep is a TOML file with a base experiment (`[network]`, `[csi]`), one
//! swept axis with its grid, the outputs to compute, and optional `[[series]]`
//! tables that override base fields to produce one curve each.
//!
//! ```toml
//! name = "example"
//! axis = "snr_db"              # snr_db | fdT | L
//! grid = [0.0, 10.0, 20.0]
//! outputs = ["mc_capacity", "analytic_bound"]
//! trials = 100000
//! seed = 7
//!
//! [network]
//! relays = 4
//! snr_db = 10.0                # p_s = p_r = 10^(snr_db/10), unit noise
//!
//! [csi]
//! scheme = "outdated"          # optimal | outdated | predicted
//! doppler_delay = 0.1          # scalar, or [[...], [...]] per source and relay
//! estimation_error = "inverse_snr"   # or a variance
//!
//! [[series]]
//! label = "fast fading"
//! doppler_delay = 0.3
//! ```

use relaycap::channel::{CsiConfig, LinkTable, NetworkConfig};
use relaycap::selection::SelectionScheme;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "snr_db")]
    SnrDb,
    #[serde(rename = "fdT")]
    DopplerDelay,
    #[serde(rename = "L")]
    PredictionLength,
}

impl Axis {
    pub fn column(self) -> &'static str {
        match self {
            Self::SnrDb => "snr_db",
            Self::DopplerDelay => "fdT",
            Self::PredictionLength => "L",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::SnrDb => "SNR (dB)",
            Self::DopplerDelay => "fdT",
            Self::PredictionLength => "prediction length L",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    McCapacity,
    AnalyticBound,
    NormalizedDifference,
}

/// A value shared by every link, or a `[source][relay]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerLink<T> {
    Uniform(T),
    Table(Vec<Vec<T>>),
}

impl<T: Clone> PerLink<T> {
    fn to_table(&self, relays: usize, field: &str) -> Result<LinkTable<T>, CliError> {
        match self {
            Self::Uniform(v) => Ok(LinkTable::uniform(relays, v.clone())),
            Self::Table(rows) => {
                if rows.len() != 2 || rows.iter().any(|r| r.len() != relays) {
                    return Err(CliError::config(format!(
                        "{field}: table must have 2 rows of {relays} values"
                    )));
                }
                Ok(LinkTable::from_rows(rows[0].clone(), rows[1].clone()))
            }
        }
    }

    fn uniform(&self) -> Option<&T> {
        match self {
            Self::Uniform(v) => Some(v),
            Self::Table(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorRule {
    /// `sigma_e^2 = sigma_n^2 / p_s`, tracking the SNR.
    #[serde(rename = "inverse_snr")]
    InverseSnr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EstimationError {
    Rule(ErrorRule),
    Variance(PerLink<f64>),
}

impl Default for EstimationError {
    fn default() -> Self {
        Self::Variance(PerLink::Uniform(0.0))
    }
}

fn default_trials() -> u64 {
    1_000_000
}

fn default_link_variance() -> PerLink<f64> {
    PerLink::Uniform(1.0)
}

fn default_noise() -> f64 {
    1.0
}

fn default_lag() -> u32 {
    1
}

fn default_interval() -> u32 {
    2
}

fn default_length() -> PerLink<usize> {
    PerLink::Uniform(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub relays: usize,
    /// Symmetric powers `p_s = p_r = 10^(snr_db / 10)`; ignored when both
    /// explicit powers are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_power: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relay_power: Option<f64>,
    #[serde(default = "default_noise")]
    pub noise_variance: f64,
    #[serde(default = "default_link_variance")]
    pub link_variance: PerLink<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsiSection {
    pub scheme: String,
    pub doppler_delay: PerLink<f64>,
    #[serde(default = "default_lag")]
    pub transmission_lag: u32,
    #[serde(default = "default_interval")]
    pub selection_interval: u32,
    #[serde(default = "default_length")]
    pub prediction_length: PerLink<usize>,
    #[serde(default)]
    pub estimation_error: EstimationError,
}

/// Fields a series may override; unset fields inherit the base experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesOverride {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relays: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doppler_delay: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prediction_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimation_error: Option<EstimationError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub outputs: Vec<Output>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    pub network: NetworkSection,
    pub csi: CsiSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<SeriesOverride>,
}

/// One fully resolved grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub series: String,
    pub axis_value: f64,
    pub snr_db: Option<f64>,
    pub doppler_delay: Option<f64>,
    pub prediction_length: Option<usize>,
    pub scheme: SelectionScheme,
    pub network: NetworkConfig,
    pub csi: CsiConfig,
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// The effective configuration as TOML; parses back to an equal value.
    pub fn dump(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::config(format!("cannot serialize config: {e}")))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(CliError::config(
                "name: must be non-empty and use only letters, digits, '-' and '_'",
            ));
        }
        if self.grid.is_empty() {
            return Err(CliError::config("grid: must not be empty"));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(CliError::config("grid: values must be finite"));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::config("grid: values must be strictly increasing"));
        }
        if self.axis == Axis::PredictionLength
            && self.grid.iter().any(|&v| v < 1.0 || v.fract() != 0.0)
        {
            return Err(CliError::config(
                "grid: prediction lengths must be positive integers",
            ));
        }
        if self.outputs.is_empty() {
            return Err(CliError::config("outputs: must not be empty"));
        }
        if self.trials == 0 {
            return Err(CliError::config("trials: must be at least 1"));
        }
        let mut labels: Vec<&str> = self.series.iter().map(|s| s.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::config("series: labels must be unique"));
        }
        self.points().map(|_| ())
    }

    /// Every (series, grid value) point in output order.
    pub fn points(&self) -> Result<Vec<Point>, CliError> {
        let base = SeriesOverride {
            label: self.name.clone(),
            relays: None,
            snr_db: None,
            scheme: None,
            doppler_delay: None,
            prediction_length: None,
            estimation_error: None,
        };
        let series: Vec<&SeriesOverride> = if self.series.is_empty() {
            vec![&base]
        } else {
            self.series.iter().collect()
        };
        let mut points = Vec::with_capacity(series.len() * self.grid.len());
        for s in series {
            for &value in &self.grid {
                points.push(self.resolve(s, value).map_err(|e| {
                    e.context(format!(
                        "series '{}', {} = {value}",
                        s.label,
                        self.axis.column()
                    ))
                })?);
            }
        }
        Ok(points)
    }

    fn resolve(&self, s: &SeriesOverride, axis_value: f64) -> Result<Point, CliError> {
        let relays = s.relays.unwrap_or(self.network.relays);
        if relays == 0 {
            return Err(CliError::config("relays: must be at least 1"));
        }
        let scheme_name = s.scheme.as_deref().unwrap_or(&self.csi.scheme);
        let scheme: SelectionScheme = scheme_name
            .parse()
            .map_err(|e| CliError::config(format!("scheme: {e}")))?;

        let mut snr_db = s.snr_db.or(self.network.snr_db);
        if self.axis == Axis::SnrDb {
            snr_db = Some(axis_value);
        }
        let noise = self.network.noise_variance;
        let (source_power, relay_power) =
            match (self.network.source_power, self.network.relay_power, snr_db) {
                (Some(ps), Some(pr), _) if self.axis != Axis::SnrDb && s.snr_db.is_none() => {
                    (ps, pr)
                }
                (_, _, Some(db)) => {
                    let p = noise * 10f64.powf(db / 10.0);
                    (p, p)
                }
                _ => {
                    return Err(CliError::config(
                        "network: give snr_db or both source_power and relay_power",
                    ))
                }
            };
        let network = NetworkConfig {
            relays,
            source_power,
            relay_power,
            noise_variance: noise,
            link_variance: self
                .network
                .link_variance
                .to_table(relays, "link_variance")?,
        };

        let mut doppler = match s.doppler_delay {
            Some(v) => PerLink::Uniform(v),
            None => self.csi.doppler_delay.clone(),
        };
        let mut length = match s.prediction_length {
            Some(v) => PerLink::Uniform(v),
            None => self.csi.prediction_length.clone(),
        };
        match self.axis {
            Axis::DopplerDelay => doppler = PerLink::Uniform(axis_value),
            Axis::PredictionLength => length = PerLink::Uniform(axis_value as usize),
            Axis::SnrDb => {}
        }
        let estimation_error = match s
            .estimation_error
            .as_ref()
            .unwrap_or(&self.csi.estimation_error)
        {
            EstimationError::Rule(ErrorRule::InverseSnr) => {
                LinkTable::uniform(relays, noise / source_power)
            }
            EstimationError::Variance(v) => v.to_table(relays, "estimation_error")?,
        };
        let csi = CsiConfig {
            doppler_delay: doppler.to_table(relays, "doppler_delay")?,
            transmission_lag: self.csi.transmission_lag,
            selection_interval: self.csi.selection_interval,
            prediction_length: length.to_table(relays, "prediction_length")?,
            estimation_error_variance: estimation_error,
        };
        csi.validate(&network)
            .map_err(|e| CliError::config(e.to_string()))?;
        Ok(Point {
            series: s.label.clone(),
            axis_value,
            snr_db,
            doppler_delay: doppler.uniform().copied(),
            prediction_length: length.uniform().copied(),
            scheme,
            network,
            csi,
        })
    }
}
