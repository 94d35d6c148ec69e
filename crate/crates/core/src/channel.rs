//! Stochastic channel model.
//!
//! Every source–relay link `(j, i)` carries a true Rayleigh channel `h(t)` whose
//! samples are Jakes-correlated, `E[h(t) h*(t')] = sigma_h^2 J0(2 pi f_dT |t - t'|)`,
//! with time measured in frames. The selector only sees the estimate
//! `h_hat(t) = rho_e h(t) + sqrt(rho_e (1 - rho_e) sigma_h^2) n(t)` with `n` white,
//! which is the MMSE estimate under independent per-frame estimation error:
//! `h = h_hat + e` with `h_hat` and `e` independent, `sigma_hat^2 = sigma_h^2 - sigma_e^2`
//! and `rho_e = sigma_hat^2 / sigma_h^2`.
//!
//! Under this model the normalized correlation between two estimates taken at
//! different instants is `rho_e J0(...)`, and the Wiener predictor of the true
//! transmission-time channel from `L` past estimates has variance
//! `sigma_p^2 = r^H R^-1 r`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use thiserror::Error;

use crate::linalg::{self, HermitianMatrix, LinalgError};
use crate::selection::SelectionScheme;
use crate::specfun::{bessel_j0, SpecFunError};

/// Pivot tolerance of the semidefinite factor used for sampling.
const SAMPLING_PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("relay count must be at least 1")]
    NoRelays,
    #[error("{field} must be positive and finite, got {value}")]
    NotPositive { field: &'static str, value: f64 },
    #[error("{field} must be non-negative and finite, got {value}")]
    Negative { field: &'static str, value: f64 },
    #[error("{field} must be at least 1")]
    ZeroCount { field: &'static str },
    #[error("{field} has {found} relays per source, expected {expected}")]
    Shape {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("estimation error variance {sigma_e2} must be below the link variance {sigma_h2} on link {link}")]
    EstimationError {
        link: LinkId,
        sigma_e2: f64,
        sigma_h2: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("covariance of link {link}: {source}")]
    Linalg { link: LinkId, source: LinalgError },
    #[error(transparent)]
    SpecialFunction(#[from] SpecFunError),
}

/// Source `j` (0 or 1) and relay `i` (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkId {
    pub source: usize,
    pub relay: usize,
}

impl LinkId {
    pub fn new(source: usize, relay: usize) -> Self {
        debug_assert!(source < 2);
        Self { source, relay }
    }

    /// The link from the other source to the same relay.
    pub fn partner(self) -> Self {
        Self {
            source: 1 - self.source,
            relay: self.relay,
        }
    }
}

impl std::fmt::Display for LinkId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "S{}-R{}", self.source + 1, self.relay + 1)
    }
}

/// One value per source–relay link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTable<T> {
    rows: [Vec<T>; 2],
}

impl<T: Clone> LinkTable<T> {
    pub fn uniform(relays: usize, value: T) -> Self {
        Self {
            rows: [vec![value.clone(); relays], vec![value; relays]],
        }
    }

    pub fn from_rows(first: Vec<T>, second: Vec<T>) -> Self {
        Self {
            rows: [first, second],
        }
    }

    pub fn from_fn(relays: usize, mut f: impl FnMut(LinkId) -> T) -> Self {
        let row = |j: usize, f: &mut dyn FnMut(LinkId) -> T| {
            (0..relays).map(|i| f(LinkId::new(j, i))).collect()
        };
        let first = row(0, &mut f);
        let second = row(1, &mut f);
        Self {
            rows: [first, second],
        }
    }

    pub fn relays(&self) -> usize {
        self.rows[0].len()
    }

    pub fn get(&self, link: LinkId) -> &T {
        &self.rows[link.source][link.relay]
    }

    pub fn row(&self, source: usize) -> &[T] {
        &self.rows[source]
    }

    pub fn links(&self) -> impl Iterator<Item = LinkId> + '_ {
        (0..2).flat_map(move |j| (0..self.rows[j].len()).map(move |i| LinkId::new(j, i)))
    }

    pub fn map<U: Clone>(&self, mut f: impl FnMut(LinkId, &T) -> U) -> LinkTable<U> {
        LinkTable::from_fn(self.relays(), |link| f(link, self.get(link)))
    }

    fn check_shape(&self, field: &'static str, relays: usize) -> Result<(), ConfigError> {
        for row in &self.rows {
            if row.len() != relays {
                return Err(ConfigError::Shape {
                    field,
                    expected: relays,
                    found: row.len(),
                });
            }
        }
        Ok(())
    }
}

impl<T: Clone + PartialEq> LinkTable<T> {
    /// True when every relay sees the same value within each source's row.
    pub fn is_relay_uniform(&self) -> bool {
        self.rows
            .iter()
            .all(|row| row.windows(2).all(|w| w[0] == w[1]))
    }
}

/// Node powers, noise level and per-link channel variances.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub relays: usize,
    pub source_power: f64,
    pub relay_power: f64,
    pub noise_variance: f64,
    pub link_variance: LinkTable<f64>,
}

impl NetworkConfig {
    /// Unit link variances, unit noise and `p_s = p_r = 10^(snr_db / 10)`.
    pub fn symmetric(relays: usize, snr_db: f64) -> Self {
        let power = 10f64.powf(snr_db / 10.0);
        Self {
            relays,
            source_power: power,
            relay_power: power,
            noise_variance: 1.0,
            link_variance: LinkTable::uniform(relays, 1.0),
        }
    }

    /// `p_s / sigma_n^2`.
    pub fn psi_s(&self) -> f64 {
        self.source_power / self.noise_variance
    }

    /// `p_r / sigma_n^2`.
    pub fn psi_r(&self) -> f64 {
        self.relay_power / self.noise_variance
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.relays == 0 {
            return Err(ConfigError::NoRelays);
        }
        positive("source_power", self.source_power)?;
        positive("relay_power", self.relay_power)?;
        positive("noise_variance", self.noise_variance)?;
        self.link_variance
            .check_shape("link_variance", self.relays)?;
        for link in self.link_variance.links() {
            positive("link_variance", *self.link_variance.get(link))?;
        }
        Ok(())
    }
}

/// Imperfect-CSI parameters: outdating, selection cadence, prediction length
/// and estimation error.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiConfig {
    /// Doppler spread times frame duration, per link.
    pub doppler_delay: LinkTable<f64>,
    /// Frames between selection and data transmission (`tau'`).
    pub transmission_lag: u32,
    /// Frames between consecutive selection processes (`Delta`).
    pub selection_interval: u32,
    pub prediction_length: LinkTable<usize>,
    pub estimation_error_variance: LinkTable<f64>,
}

impl CsiConfig {
    pub fn uniform(
        relays: usize,
        doppler_delay: f64,
        transmission_lag: u32,
        selection_interval: u32,
        prediction_length: usize,
        estimation_error_variance: f64,
    ) -> Self {
        Self {
            doppler_delay: LinkTable::uniform(relays, doppler_delay),
            transmission_lag,
            selection_interval,
            prediction_length: LinkTable::uniform(relays, prediction_length),
            estimation_error_variance: LinkTable::uniform(relays, estimation_error_variance),
        }
    }

    pub fn validate(&self, network: &NetworkConfig) -> Result<(), ConfigError> {
        network.validate()?;
        if self.transmission_lag == 0 {
            return Err(ConfigError::ZeroCount {
                field: "transmission_lag",
            });
        }
        if self.selection_interval == 0 {
            return Err(ConfigError::ZeroCount {
                field: "selection_interval",
            });
        }
        let n = network.relays;
        self.doppler_delay.check_shape("doppler_delay", n)?;
        self.prediction_length.check_shape("prediction_length", n)?;
        self.estimation_error_variance
            .check_shape("estimation_error_variance", n)?;
        for link in self.doppler_delay.links() {
            non_negative("doppler_delay", *self.doppler_delay.get(link))?;
            if *self.prediction_length.get(link) == 0 {
                return Err(ConfigError::ZeroCount {
                    field: "prediction_length",
                });
            }
            let sigma_e2 = *self.estimation_error_variance.get(link);
            non_negative("estimation_error_variance", sigma_e2)?;
            let sigma_h2 = *network.link_variance.get(link);
            if sigma_e2 >= sigma_h2 {
                return Err(ConfigError::EstimationError {
                    link,
                    sigma_e2,
                    sigma_h2,
                });
            }
        }
        Ok(())
    }
}

fn positive(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::NotPositive { field, value })
    }
}

fn non_negative(field: &'static str, value: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ConfigError::Negative { field, value })
    }
}

/// Linear MMSE predictor of the transmission-time channel from past estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerPredictor {
    /// `w_opt = R^-1 r`; the prediction is `w^H h_tilde`.
    pub coefficients: Vec<Complex64>,
    /// `sigma_p^2 = r^H R^-1 r`.
    pub prediction_variance: f64,
    /// `rho_p = sqrt(sigma_p^2 / sigma_h^2)`.
    pub correlation: f64,
}

/// Selection/transmission statistics of one link as seen by a selection rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeLinkStats {
    /// Variance of the quantity the selector ranks.
    pub sigma_s2: f64,
    /// Variance of the estimated transmission-time channel.
    pub sigma_t2: f64,
    /// Normalized correlation between the two.
    pub rho: f64,
}

/// Derived second-order statistics of one link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkStats {
    pub sigma_h2: f64,
    pub sigma_hat2: f64,
    pub rho_e: f64,
    pub rho_f: f64,
    pub predictor: WienerPredictor,
}

impl LinkStats {
    pub fn compute(
        link: LinkId,
        network: &NetworkConfig,
        csi: &CsiConfig,
    ) -> Result<Self, ChannelError> {
        let sigma_h2 = *network.link_variance.get(link);
        let sigma_hat2 = sigma_h2 - *csi.estimation_error_variance.get(link);
        let fdt = *csi.doppler_delay.get(link);
        Ok(Self {
            sigma_h2,
            sigma_hat2,
            rho_e: sigma_hat2 / sigma_h2,
            rho_f: jakes(fdt, csi.transmission_lag as f64)?,
            predictor: build_predictor(link, network, csi)?,
        })
    }

    /// The `(sigma_s^2, sigma_t^2, rho)` triple of the selected-gain distribution.
    ///
    /// For the predicted scheme the correlation is the exact one between the
    /// prediction and the estimated transmission-time channel,
    /// `rho_e sigma_p / sigma_hat = sqrt(rho_e) rho_p`, which reduces to `rho_p`
    /// without estimation error and to the outdated scheme's `rho_e rho_f` at
    /// `L = 1`.
    pub fn for_scheme(&self, scheme: SelectionScheme) -> SchemeLinkStats {
        match scheme {
            SelectionScheme::Optimal => SchemeLinkStats {
                sigma_s2: self.sigma_hat2,
                sigma_t2: self.sigma_hat2,
                rho: 1.0,
            },
            SelectionScheme::OutdatedCsi => SchemeLinkStats {
                sigma_s2: self.sigma_hat2,
                sigma_t2: self.sigma_hat2,
                rho: self.rho_e * self.rho_f,
            },
            SelectionScheme::Predicted => {
                let sigma_p2 = self.predictor.prediction_variance;
                SchemeLinkStats {
                    sigma_s2: sigma_p2,
                    sigma_t2: self.sigma_hat2,
                    rho: (self.rho_e * (sigma_p2 / self.sigma_hat2).sqrt()).min(1.0),
                }
            }
        }
    }
}

fn jakes(doppler_delay: f64, lag: f64) -> Result<f64, SpecFunError> {
    bessel_j0(2.0 * PI * doppler_delay * lag)
}

/// Sampling instants in frames relative to the selection frame `tau`:
/// `0, -Delta, ..., -(L-1) Delta, tau'`.
fn instants(length: usize, csi: &CsiConfig) -> Vec<f64> {
    (0..length)
        .map(|k| -((k as u64 * csi.selection_interval as u64) as f64))
        .chain(std::iter::once(csi.transmission_lag as f64))
        .collect()
}

/// Covariance `R` of the estimate history and cross-covariance `r` with the
/// true transmission-time channel, for the link's prediction length.
///
/// `R[k][l] = sigma_hat^2 (rho_e J0(2 pi f_dT Delta |k - l|) + (1 - rho_e) delta_kl)`,
/// `r[k] = sigma_hat^2 J0(2 pi f_dT (tau' + k Delta))`.
pub fn build_covariance(
    link: LinkId,
    network: &NetworkConfig,
    csi: &CsiConfig,
) -> Result<(HermitianMatrix, Vec<Complex64>), ChannelError> {
    csi.validate(network)?;
    let sigma_h2 = *network.link_variance.get(link);
    let sigma_hat2 = sigma_h2 - *csi.estimation_error_variance.get(link);
    let rho_e = sigma_hat2 / sigma_h2;
    let fdt = *csi.doppler_delay.get(link);
    let length = *csi.prediction_length.get(link);
    let delta = csi.selection_interval as f64;

    let mut lag_corr = Vec::with_capacity(length);
    for d in 0..length {
        lag_corr.push(jakes(fdt, delta * d as f64)?);
    }
    let matrix = HermitianMatrix::from_real_fn(length, |k, l| {
        if k == l {
            sigma_hat2
        } else {
            sigma_hat2 * rho_e * lag_corr[k.abs_diff(l)]
        }
    })
    .map_err(|source| ChannelError::Linalg { link, source })?;
    let tau = csi.transmission_lag as f64;
    let mut cross = Vec::with_capacity(length);
    for k in 0..length {
        cross.push(Complex64::new(
            sigma_hat2 * jakes(fdt, tau + delta * k as f64)?,
            0.0,
        ));
    }
    Ok((matrix, cross))
}

/// Wiener predictor for one link. `R` is ridge-regularized before solving.
pub fn build_predictor(
    link: LinkId,
    network: &NetworkConfig,
    csi: &CsiConfig,
) -> Result<WienerPredictor, ChannelError> {
    let (matrix, cross) = build_covariance(link, network, csi)?;
    let regular = matrix.regularized();
    let lin = |source| ChannelError::Linalg { link, source };
    let coefficients = linalg::solve_hermitian(&regular, &cross).map_err(lin)?;
    let sigma_h2 = *network.link_variance.get(link);
    let prediction_variance = linalg::quadratic_form(&regular, &cross)
        .map_err(lin)?
        .min(sigma_h2);
    Ok(WienerPredictor {
        coefficients,
        prediction_variance,
        correlation: (prediction_variance / sigma_h2).sqrt().clamp(0.0, 1.0),
    })
}

/// One joint realization of every link at the instants the selection rules need.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    relays: usize,
    history: Vec<Vec<Complex64>>,
    estimated: Vec<Complex64>,
    actual: Vec<Complex64>,
    predicted: Option<Vec<Complex64>>,
    scratch: Vec<Complex64>,
}

impl ChannelDraw {
    /// Assembles a draw from per-link values ordered source-major
    /// (`index = source * relays + relay`).
    pub fn from_parts(
        relays: usize,
        history: Vec<Vec<Complex64>>,
        estimated: Vec<Complex64>,
        actual: Vec<Complex64>,
        predicted: Option<Vec<Complex64>>,
    ) -> Result<Self, ConfigError> {
        let links = 2 * relays;
        let check = |field, len: usize| {
            if len == links {
                Ok(())
            } else {
                Err(ConfigError::Shape {
                    field,
                    expected: links,
                    found: len,
                })
            }
        };
        if relays == 0 {
            return Err(ConfigError::NoRelays);
        }
        check("history", history.len())?;
        check("estimated", estimated.len())?;
        check("actual", actual.len())?;
        if let Some(p) = &predicted {
            check("predicted", p.len())?;
        }
        if history.iter().any(Vec::is_empty) {
            return Err(ConfigError::ZeroCount { field: "history" });
        }
        Ok(Self {
            relays,
            history,
            estimated,
            actual,
            predicted,
            scratch: Vec::new(),
        })
    }

    fn index(&self, link: LinkId) -> usize {
        link.source * self.relays + link.relay
    }

    pub fn relays(&self) -> usize {
        self.relays
    }

    /// Estimates at `tau, tau - Delta, ...`.
    pub fn history(&self, link: LinkId) -> &[Complex64] {
        &self.history[self.index(link)]
    }

    /// The estimate at the selection instant, `h_hat(tau)`.
    pub fn outdated(&self, link: LinkId) -> Complex64 {
        self.history[self.index(link)][0]
    }

    /// The estimate at the transmission instant, `h_hat(tau + tau')`.
    pub fn estimated(&self, link: LinkId) -> Complex64 {
        self.estimated[self.index(link)]
    }

    /// The true channel at the transmission instant.
    pub fn actual(&self, link: LinkId) -> Complex64 {
        self.actual[self.index(link)]
    }

    pub fn predicted(&self, link: LinkId) -> Option<Complex64> {
        self.predicted.as_ref().map(|p| p[self.index(link)])
    }
}

#[derive(Debug, Clone)]
struct LinkSampler {
    dim: usize,
    // row-major lower-triangular factor of sigma_h^2 * Jakes over the instants
    factor: Vec<f64>,
    shrink: f64,
    noise_scale: f64,
    coefficients_conj: Vec<Complex64>,
}

/// Precomputed sampler and statistics for a validated configuration.
///
/// Immutable after construction; share it across threads and give each thread
/// its own random generator and [`ChannelDraw`] buffer.
#[derive(Debug, Clone)]
pub struct ChannelModel {
    network: NetworkConfig,
    csi: CsiConfig,
    stats: LinkTable<LinkStats>,
    samplers: Vec<LinkSampler>,
}

impl ChannelModel {
    pub fn new(network: &NetworkConfig, csi: &CsiConfig) -> Result<Self, ChannelError> {
        csi.validate(network)?;
        let n = network.relays;
        let mut stats = Vec::with_capacity(2 * n);
        let mut samplers = Vec::with_capacity(2 * n);
        for j in 0..2 {
            for i in 0..n {
                let link = LinkId::new(j, i);
                let link_stats = LinkStats::compute(link, network, csi)?;
                samplers.push(Self::sampler(link, network, csi, &link_stats)?);
                stats.push(link_stats);
            }
        }
        let second = stats.split_off(n);
        Ok(Self {
            network: network.clone(),
            csi: csi.clone(),
            stats: LinkTable::from_rows(stats, second),
            samplers,
        })
    }

    fn sampler(
        link: LinkId,
        network: &NetworkConfig,
        csi: &CsiConfig,
        stats: &LinkStats,
    ) -> Result<LinkSampler, ChannelError> {
        let length = *csi.prediction_length.get(link);
        let times = instants(length, csi);
        let fdt = *csi.doppler_delay.get(link);
        let dim = times.len();
        let mut entries = vec![0.0; dim * dim];
        for k in 0..dim {
            for l in 0..dim {
                entries[k * dim + l] = stats.sigma_h2 * jakes(fdt, (times[k] - times[l]).abs())?;
            }
        }
        let cov = HermitianMatrix::from_real_fn(dim, |k, l| entries[k * dim + l])
            .map_err(|source| ChannelError::Linalg { link, source })?;
        let chol = linalg::cholesky_semidefinite(&cov, SAMPLING_PIVOT_TOLERANCE)
            .map_err(|source| ChannelError::Linalg { link, source })?;
        let factor = (0..dim * dim)
            .map(|k| chol.get(k / dim, k % dim).re)
            .collect();
        let _ = network;
        Ok(LinkSampler {
            dim,
            factor,
            shrink: stats.rho_e,
            noise_scale: (stats.rho_e * (1.0 - stats.rho_e) * stats.sigma_h2).sqrt(),
            coefficients_conj: stats
                .predictor
                .coefficients
                .iter()
                .map(|w| w.conj())
                .collect(),
        })
    }

    pub fn network(&self) -> &NetworkConfig {
        &self.network
    }

    pub fn csi(&self) -> &CsiConfig {
        &self.csi
    }

    pub fn relays(&self) -> usize {
        self.network.relays
    }

    pub fn link_stats(&self, link: LinkId) -> &LinkStats {
        self.stats.get(link)
    }

    /// Scheme-facing statistics for every link.
    pub fn scheme_stats(&self, scheme: SelectionScheme) -> LinkTable<SchemeLinkStats> {
        self.stats.map(|_, s| s.for_scheme(scheme))
    }

    /// A zeroed draw with buffers sized for this model.
    pub fn empty_draw(&self) -> ChannelDraw {
        let n = self.relays();
        let zero = Complex64::new(0.0, 0.0);
        ChannelDraw {
            relays: n,
            history: self
                .samplers
                .iter()
                .map(|s| vec![zero; s.dim - 1])
                .collect(),
            estimated: vec![zero; 2 * n],
            actual: vec![zero; 2 * n],
            predicted: Some(vec![zero; 2 * n]),
            scratch: Vec::with_capacity(self.samplers.iter().map(|s| s.dim).max().unwrap_or(1)),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelDraw {
        let mut draw = self.empty_draw();
        self.sample_into(rng, &mut draw);
        draw
    }

    /// Overwrites `draw` with a fresh realization. `draw` must come from
    /// [`ChannelModel::empty_draw`] of this model (or a previous sample).
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, draw: &mut ChannelDraw) {
        let predicted = draw.predicted.get_or_insert_with(Vec::new);
        predicted.resize(self.samplers.len(), Complex64::new(0.0, 0.0));
        for (idx, s) in self.samplers.iter().enumerate() {
            let z = &mut draw.scratch;
            z.clear();
            for _ in 0..s.dim {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                z.push(Complex64::new(re, im) * FRAC_1_SQRT_2);
            }
            // true channel at every instant, in place (row k only reads z[..=k])
            for k in (0..s.dim).rev() {
                let row = &s.factor[k * s.dim..k * s.dim + k + 1];
                let mut acc = Complex64::new(0.0, 0.0);
                for (f, zz) in row.iter().zip(z.iter()) {
                    acc += zz * *f;
                }
                z[k] = acc;
            }
            let last = s.dim - 1;
            draw.actual[idx] = z[last];
            if s.noise_scale > 0.0 {
                for value in z.iter_mut() {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    *value = *value * s.shrink
                        + Complex64::new(re, im) * (FRAC_1_SQRT_2 * s.noise_scale);
                }
            }
            draw.estimated[idx] = z[last];
            let history = &mut draw.history[idx];
            history.copy_from_slice(&z[..last]);
            predicted[idx] = s
                .coefficients_conj
                .iter()
                .zip(history.iter())
                .map(|(w, h)| w * h)
                .sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(fdt: f64, length: usize, sigma_e2: f64) -> (NetworkConfig, CsiConfig) {
        let net = NetworkConfig::symmetric(2, 10.0);
        let csi = CsiConfig::uniform(2, fdt, 1, 2, length, sigma_e2);
        (net, csi)
    }

    #[test]
    fn covariance_without_doppler_is_all_ones() {
        let (net, csi) = setup(0.0, 4, 0.0);
        let (r, cross) = build_covariance(LinkId::new(0, 1), &net, &csi).unwrap();
        for k in 0..4 {
            assert_eq!(cross[k].re, 1.0);
            for l in 0..4 {
                assert_eq!(r.get(k, l).re, 1.0);
            }
        }
    }

    #[test]
    fn scalar_covariance() {
        let (net, csi) = setup(0.3, 1, 0.0);
        let (r, cross) = build_covariance(LinkId::new(1, 0), &net, &csi).unwrap();
        assert_eq!(r.dim(), 1);
        assert_eq!(r.get(0, 0).re, 1.0);
        let rho_f = bessel_j0(2.0 * PI * 0.3).unwrap();
        assert!((cross[0].re - rho_f).abs() < 1e-15);
    }

    #[test]
    fn single_tap_predictor_is_outdated_correlation() {
        let (net, csi) = setup(0.3, 1, 0.0);
        let stats = LinkStats::compute(LinkId::new(0, 0), &net, &csi).unwrap();
        assert!((stats.predictor.correlation - stats.rho_f.abs()).abs() < 1e-9);
    }

    #[test]
    fn static_channel_predictor() {
        let (net, csi) = setup(0.0, 3, 0.0);
        let p = build_predictor(LinkId::new(0, 0), &net, &csi).unwrap();
        assert!((p.correlation - 1.0).abs() < 1e-9);
        let (net, csi) = setup(0.0, 1, 0.2);
        let stats = LinkStats::compute(LinkId::new(0, 0), &net, &csi).unwrap();
        assert!((stats.predictor.correlation - stats.rho_e.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_estimation_error() {
        let (net, csi) = setup(0.1, 1, 1.0);
        assert!(matches!(
            ChannelModel::new(&net, &csi),
            Err(ChannelError::Config(ConfigError::EstimationError { .. }))
        ));
    }

    #[test]
    fn perfect_estimation_makes_true_and_estimated_equal() {
        let (net, csi) = setup(0.2, 3, 0.0);
        let model = ChannelModel::new(&net, &csi).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draw = model.sample(&mut rng);
        for link in net.link_variance.links() {
            assert_eq!(draw.actual(link), draw.estimated(link));
        }
    }

    #[test]
    fn static_channel_draw_is_constant_in_time() {
        let (net, csi) = setup(0.0, 1, 0.0);
        let model = ChannelModel::new(&net, &csi).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let draw = model.sample(&mut rng);
            for link in net.link_variance.links() {
                assert_eq!(draw.outdated(link), draw.estimated(link));
            }
        }
    }

    #[test]
    fn draw_shape_validation() {
        let z = Complex64::new(0.0, 0.0);
        assert!(ChannelDraw::from_parts(1, vec![vec![z]; 2], vec![z; 2], vec![z; 2], None).is_ok());
        assert!(
            ChannelDraw::from_parts(1, vec![vec![z]; 1], vec![z; 2], vec![z; 2], None).is_err()
        );
        assert!(ChannelDraw::from_parts(1, vec![vec![]; 2], vec![z; 2], vec![z; 2], None).is_err());
    }
}
