//! Monte-Carlo estimation of ergodic capacity.
//!
//! Trial `t` draws its randomness from ChaCha8 seeded with `base_seed` on
//! stream `t`, so every trial is reproducible in isolation. Trials are grouped
//! into fixed blocks of [`BLOCK_TRIALS`]; blocks run in parallel and their
//! moment accumulators are merged in block order. Aggregates are therefore
//! bit-identical for any thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{ChannelDraw, ChannelError, ChannelModel, CsiConfig, LinkId, NetworkConfig};
use crate::selection::{select_relay, SelectionError, SelectionScheme};
use crate::sinr::{
    bound_form_terms, instantaneous_capacity, relay_params, sinr_pair, SinrError, SinrParams,
};

pub const BLOCK_TRIALS: u64 = 4096;

/// Default histogram resolution.
pub const DEFAULT_BINS: usize = 200;

/// Upper histogram edge as a sample quantile.
pub const HISTOGRAM_QUANTILE: f64 = 0.999;

// Streams with this bit set never collide with primary trial streams.
const SECONDARY_STREAM: u64 = 1 << 63;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonteCarloError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Sinr(#[from] SinrError),
    #[error(transparent)]
    Selection(#[from] SelectionError),
    #[error("invalid experiment: {0}")]
    InvalidSpec(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Targets {
    /// Average of the instantaneous capacity.
    pub true_capacity: bool,
    /// Average of the lower-bound integrand on the same draw.
    pub bound_form: bool,
    /// Average of the lower-bound integrand with the direction-2 gain taken
    /// from an independent second draw, i.e. under the product of the two
    /// marginal selected-gain laws.
    pub decoupled_bound_form: bool,
    /// Histogram bin count for the selected gains of both directions.
    pub histogram_bins: Option<usize>,
}

impl Default for Targets {
    fn default() -> Self {
        Self {
            true_capacity: true,
            bound_form: false,
            decoupled_bound_form: false,
            histogram_bins: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub network: NetworkConfig,
    pub csi: CsiConfig,
    pub scheme: SelectionScheme,
    pub trials: u64,
    pub base_seed: u64,
    pub targets: Targets,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), MonteCarloError> {
        self.csi
            .validate(&self.network)
            .map_err(ChannelError::from)?;
        if self.trials == 0 {
            return Err(MonteCarloError::InvalidSpec("trials must be at least 1"));
        }
        if matches!(self.targets.histogram_bins, Some(b) if b < 16) {
            return Err(MonteCarloError::InvalidSpec(
                "histograms need at least 16 bins",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityResult {
    /// bits/s/Hz.
    pub mean: f64,
    /// Sample standard deviation over `sqrt(trials)`.
    pub standard_error: f64,
    pub trials: u64,
    /// Mean of each direction's half-rate term.
    pub direction_means: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramResult {
    pub edges: Vec<f64>,
    /// Normalized over the samples that fall inside the edges.
    pub densities: Vec<f64>,
    pub counts: Vec<u64>,
    /// All samples, including those beyond the last edge.
    pub samples: u64,
}

impl HistogramResult {
    fn build(mut values: Vec<f64>, bins: usize) -> Self {
        let samples = values.len() as u64;
        let rank =
            ((HISTOGRAM_QUANTILE * samples as f64).ceil() as usize).clamp(1, values.len()) - 1;
        let (_, upper, _) = values.select_nth_unstable_by(rank, f64::total_cmp);
        let upper = if *upper > 0.0 { *upper } else { 1.0 };
        let width = upper / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|b| b as f64 * width).collect();
        let mut counts = vec![0u64; bins];
        for &v in &values {
            if v <= upper {
                counts[((v / width) as usize).min(bins - 1)] += 1;
            }
        }
        let inside: u64 = counts.iter().sum();
        let densities = counts
            .iter()
            .zip(edges.windows(2))
            .map(|(&c, e)| c as f64 / (inside as f64 * (e[1] - e[0])))
            .collect();
        Self {
            edges,
            densities,
            counts,
            samples,
        }
    }

    /// Integrated absolute difference between this histogram and a reference
    /// law with the given cumulative distribution function, over `[0, inf)`:
    /// per-bin empirical vs exact masses plus the tail beyond the last edge.
    pub fn integrated_abs_error(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let n = self.samples as f64;
        let mut total = 0.0;
        for (b, e) in self.edges.windows(2).enumerate() {
            total += (self.counts[b] as f64 / n - (cdf(e[1]) - cdf(e[0]))).abs();
        }
        let last = *self.edges.last().expect("at least one edge");
        let inside: u64 = self.counts.iter().sum();
        total + ((self.samples - inside) as f64 / n - (1.0 - cdf(last))).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub capacity: Option<CapacityResult>,
    pub bound_form: Option<CapacityResult>,
    pub decoupled_bound_form: Option<CapacityResult>,
    /// Selected transmission-time gain of direction 1 and direction 2.
    pub histograms: Option<[HistogramResult; 2]>,
}

/// Mean vector and co-moment matrix, mergeable in a fixed order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<const K: usize> {
    count: u64,
    mean: [f64; K],
    comoment: [[f64; K]; K],
}

impl<const K: usize> Default for Moments<K> {
    fn default() -> Self {
        Self {
            count: 0,
            mean: [0.0; K],
            comoment: [[0.0; K]; K],
        }
    }
}

impl<const K: usize> Moments<K> {
    pub fn push(&mut self, x: [f64; K]) {
        self.count += 1;
        let n = self.count as f64;
        let mut delta = [0.0; K];
        for k in 0..K {
            delta[k] = x[k] - self.mean[k];
            self.mean[k] += delta[k] / n;
        }
        for a in 0..K {
            for b in 0..K {
                self.comoment[a][b] += delta[a] * (x[b] - self.mean[b]);
            }
        }
    }

    pub fn merge(&mut self, other: &Self) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let mut delta = [0.0; K];
        for k in 0..K {
            delta[k] = other.mean[k] - self.mean[k];
            self.mean[k] += delta[k] * nb / n;
        }
        for a in 0..K {
            for b in 0..K {
                self.comoment[a][b] += other.comoment[a][b] + delta[a] * delta[b] * na * nb / n;
            }
        }
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self, k: usize) -> f64 {
        self.mean[k]
    }

    /// Unbiased sample covariance (zero for a single sample).
    pub fn covariance(&self, a: usize, b: usize) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.comoment[a][b] / (self.count - 1) as f64
        }
    }

    pub fn standard_error(&self, k: usize) -> f64 {
        (self.covariance(k, k).max(0.0) / self.count as f64).sqrt()
    }
}

/// Relay index and the two estimated transmission-time gains of the selection.
pub fn selected_gains(
    draw: &ChannelDraw,
    scheme: SelectionScheme,
) -> Result<(usize, f64, f64), SelectionError> {
    let k = select_relay(draw, scheme)?;
    Ok((
        k,
        draw.estimated(LinkId::new(0, k)).norm_sqr(),
        draw.estimated(LinkId::new(1, k)).norm_sqr(),
    ))
}

/// Random generator of trial `trial` on the primary or secondary stream.
pub fn trial_rng(base_seed: u64, trial: u64, secondary: bool) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base_seed);
    rng.set_stream(if secondary {
        trial | SECONDARY_STREAM
    } else {
        trial
    });
    rng
}

fn blocks(trials: u64) -> Vec<(u64, u64)> {
    (0..trials.div_ceil(BLOCK_TRIALS))
        .map(|b| (b * BLOCK_TRIALS, ((b + 1) * BLOCK_TRIALS).min(trials)))
        .collect()
}

// (total, direction 1, direction 2) for capacity, bound form, decoupled bound form
const SLOTS: usize = 9;

struct BlockOutput {
    moments: Moments<SLOTS>,
    gains: [Vec<f64>; 2],
}

fn capacity_result(m: &Moments<SLOTS>, slot: usize) -> CapacityResult {
    CapacityResult {
        mean: m.mean(slot),
        standard_error: m.standard_error(slot),
        trials: m.count(),
        direction_means: [m.mean(slot + 1), m.mean(slot + 2)],
    }
}

/// Runs the experiment with the current rayon pool.
pub fn run(spec: &ExperimentSpec) -> Result<RunResult, MonteCarloError> {
    spec.validate()?;
    let model = ChannelModel::new(&spec.network, &spec.csi)?;
    let params = relay_params(&spec.network, &spec.csi)?;
    let targets = spec.targets;
    let keep_gains = targets.histogram_bins.is_some();

    let outputs: Vec<Result<BlockOutput, MonteCarloError>> = blocks(spec.trials)
        .into_par_iter()
        .map(|(start, end)| {
            let mut draw = model.empty_draw();
            let mut second = model.empty_draw();
            let mut out = BlockOutput {
                moments: Moments::default(),
                gains: [Vec::new(), Vec::new()],
            };
            for trial in start..end {
                let mut rng = trial_rng(spec.base_seed, trial, false);
                model.sample_into(&mut rng, &mut draw);
                let (k, g1, g2) = selected_gains(&draw, spec.scheme)?;
                let p: &SinrParams = &params[k];
                let mut x = [0.0; SLOTS];
                if targets.true_capacity {
                    let (a, b) = sinr_pair(g1, g2, p)?;
                    x[1] = instantaneous_capacity(a, 0.0);
                    x[2] = instantaneous_capacity(0.0, b);
                    x[0] = x[1] + x[2];
                }
                if targets.bound_form {
                    let [a, b] = bound_form_terms(g1, g2, p)?;
                    x[3..6].copy_from_slice(&[a + b, a, b]);
                }
                if targets.decoupled_bound_form {
                    let mut rng = trial_rng(spec.base_seed, trial, true);
                    model.sample_into(&mut rng, &mut second);
                    let (_, _, other_g2) = selected_gains(&second, spec.scheme)?;
                    let [a, b] = bound_form_terms(g1, other_g2, p)?;
                    x[6..9].copy_from_slice(&[a + b, a, b]);
                }
                out.moments.push(x);
                if keep_gains {
                    out.gains[0].push(g1);
                    out.gains[1].push(g2);
                }
            }
            Ok(out)
        })
        .collect();

    let mut moments = Moments::<SLOTS>::default();
    let mut gains = [Vec::new(), Vec::new()];
    for out in outputs {
        let out = out?;
        moments.merge(&out.moments);
        for (all, part) in gains.iter_mut().zip(out.gains) {
            all.extend(part);
        }
    }
    Ok(RunResult {
        capacity: targets.true_capacity.then(|| capacity_result(&moments, 0)),
        bound_form: targets.bound_form.then(|| capacity_result(&moments, 3)),
        decoupled_bound_form: targets
            .decoupled_bound_form
            .then(|| capacity_result(&moments, 6)),
        histograms: targets.histogram_bins.map(|bins| {
            let [first, second] = gains;
            [
                HistogramResult::build(first, bins),
                HistogramResult::build(second, bins),
            ]
        }),
    })
}

/// How the optimal and predicted runs share randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coupling {
    /// Both rules select on the same draw.
    #[default]
    Common,
    /// The predicted rule runs on the secondary streams.
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferenceResult {
    /// `(C_optimal - C_predicted) / C_optimal`.
    pub value: f64,
    /// Delta-method standard error.
    pub standard_error: f64,
    pub optimal: CapacityResult,
    pub predicted: CapacityResult,
}

/// Normalized capacity loss of the predicted rule against the optimal one.
pub fn normalized_difference(
    network: &NetworkConfig,
    csi: &CsiConfig,
    trials: u64,
    base_seed: u64,
    coupling: Coupling,
) -> Result<DifferenceResult, MonteCarloError> {
    if trials == 0 {
        return Err(MonteCarloError::InvalidSpec("trials must be at least 1"));
    }
    let model = ChannelModel::new(network, csi)?;
    let params = relay_params(network, csi)?;
    let capacity = |draw: &ChannelDraw, scheme| -> Result<[f64; 3], MonteCarloError> {
        let (k, g1, g2) = selected_gains(draw, scheme)?;
        let (a, b) = sinr_pair(g1, g2, &params[k])?;
        let d1 = instantaneous_capacity(a, 0.0);
        let d2 = instantaneous_capacity(0.0, b);
        Ok([d1 + d2, d1, d2])
    };
    let outputs: Vec<Result<Moments<6>, MonteCarloError>> = blocks(trials)
        .into_par_iter()
        .map(|(start, end)| {
            let mut draw = model.empty_draw();
            let mut other = model.empty_draw();
            let mut m = Moments::default();
            for trial in start..end {
                model.sample_into(&mut trial_rng(base_seed, trial, false), &mut draw);
                let opt = capacity(&draw, SelectionScheme::Optimal)?;
                let pred = match coupling {
                    Coupling::Common => capacity(&draw, SelectionScheme::Predicted)?,
                    Coupling::Independent => {
                        model.sample_into(&mut trial_rng(base_seed, trial, true), &mut other);
                        capacity(&other, SelectionScheme::Predicted)?
                    }
                };
                m.push([opt[0], pred[0], opt[1], opt[2], pred[1], pred[2]]);
            }
            Ok(m)
        })
        .collect();
    let mut m = Moments::<6>::default();
    for out in outputs {
        m.merge(&out?);
    }
    let (mo, mp) = (m.mean(0), m.mean(1));
    let n = m.count() as f64;
    let var = (m.covariance(1, 1) / (mo * mo) + mp * mp * m.covariance(0, 0) / mo.powi(4)
        - 2.0 * mp * m.covariance(0, 1) / mo.powi(3))
        / n;
    Ok(DifferenceResult {
        value: (mo - mp) / mo,
        standard_error: var.max(0.0).sqrt(),
        optimal: CapacityResult {
            mean: mo,
            standard_error: m.standard_error(0),
            trials,
            direction_means: [m.mean(2), m.mean(3)],
        },
        predicted: CapacityResult {
            mean: mp,
            standard_error: m.standard_error(1),
            trials,
            direction_means: [m.mean(4), m.mean(5)],
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(trials: u64) -> ExperimentSpec {
        ExperimentSpec {
            network: NetworkConfig::symmetric(2, 10.0),
            csi: CsiConfig::uniform(2, 0.1, 1, 2, 2, 0.0),
            scheme: SelectionScheme::Predicted,
            trials,
            base_seed: 11,
            targets: Targets {
                true_capacity: true,
                bound_form: true,
                decoupled_bound_form: true,
                histogram_bins: Some(32),
            },
        }
    }

    #[test]
    fn moments_merge_matches_single_pass() {
        let xs: Vec<[f64; 2]> = (0..1000)
            .map(|k| [(k as f64).sin(), (k as f64 * 0.3).cos()])
            .collect();
        let mut whole = Moments::<2>::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut left = Moments::<2>::default();
        let mut right = Moments::<2>::default();
        xs[..337].iter().for_each(|&x| left.push(x));
        xs[337..].iter().for_each(|&x| right.push(x));
        left.merge(&right);
        assert_eq!(left.count(), 1000);
        for a in 0..2 {
            assert!((whole.mean(a) - left.mean(a)).abs() < 1e-14);
            for b in 0..2 {
                assert!((whole.covariance(a, b) - left.covariance(a, b)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(matches!(
            run(&spec(0)),
            Err(MonteCarloError::InvalidSpec(_))
        ));
        let mut s = spec(10);
        s.targets.histogram_bins = Some(8);
        assert!(matches!(run(&s), Err(MonteCarloError::InvalidSpec(_))));
    }

    #[test]
    fn single_trial_is_reproducible() {
        let a = run(&spec(1)).unwrap();
        let b = run(&spec(1)).unwrap();
        assert_eq!(a, b);
        let c = a.capacity.unwrap();
        assert_eq!(c.trials, 1);
        assert_eq!(c.standard_error, 0.0);
        assert!((c.mean - c.direction_means[0] - c.direction_means[1]).abs() < 1e-15);
    }

    #[test]
    fn histogram_is_normalized() {
        let r = run(&spec(5000)).unwrap();
        for h in r.histograms.unwrap().iter() {
            let total: f64 = h
                .densities
                .iter()
                .zip(h.edges.windows(2))
                .map(|(d, e)| d * (e[1] - e[0]))
                .sum();
            assert!((total - 1.0).abs() < 1e-9);
            assert_eq!(h.samples, 5000);
            assert_eq!(h.counts.len(), 32);
        }
    }

    #[test]
    fn blocks_cover_trials() {
        assert_eq!(blocks(1), vec![(0, 1)]);
        assert_eq!(
            blocks(BLOCK_TRIALS + 1),
            vec![(0, BLOCK_TRIALS), (BLOCK_TRIALS, BLOCK_TRIALS + 1)]
        );
    }

    #[test]
    fn common_coupling_needs_no_prediction_gain_at_zero_doppler() {
        let net = NetworkConfig::symmetric(3, 10.0);
        let csi = CsiConfig::uniform(3, 0.0, 1, 2, 3, 0.0);
        let d = normalized_difference(&net, &csi, 2000, 5, Coupling::Common).unwrap();
        assert!(d.value.abs() < 1e-12, "{}", d.value);
    }
}
