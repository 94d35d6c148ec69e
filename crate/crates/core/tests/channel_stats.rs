#![allow(clippy::needless_range_loop)]

mod common;

use common::j0_reference;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use relaycap::channel::{
    build_covariance, build_predictor, ChannelModel, CsiConfig, LinkId, LinkStats, NetworkConfig,
};
use std::f64::consts::PI;

const LINK: LinkId = LinkId {
    source: 0,
    relay: 0,
};

fn config(fdt: f64, length: usize, sigma_e2: f64) -> (NetworkConfig, CsiConfig) {
    (
        NetworkConfig::symmetric(1, 10.0),
        CsiConfig::uniform(1, fdt, 1, 2, length, sigma_e2),
    )
}

#[test]
fn static_channel_covariance_is_all_ones() {
    let (network, csi) = config(0.0, 4, 0.0);
    let (r_mat, r) = build_covariance(LINK, &network, &csi).unwrap();
    for k in 0..4 {
        assert_eq!(r[k], Complex64::new(1.0, 0.0));
        for l in 0..4 {
            assert_eq!(r_mat.get(k, l), Complex64::new(1.0, 0.0));
        }
    }
}

#[test]
fn scalar_covariance() {
    let (network, csi) = config(0.3, 1, 0.2);
    let (r_mat, r) = build_covariance(LINK, &network, &csi).unwrap();
    assert_eq!(r_mat.dim(), 1);
    assert!((r_mat.get(0, 0).re - 0.8).abs() < 1e-15);
    assert!((r[0].re - 0.8 * j0_reference(2.0 * PI * 0.3)).abs() < 1e-15);
}

#[test]
fn covariance_entries_match_reference_bessel() {
    let (network, csi) = config(0.3, 3, 0.0);
    let (r_mat, r) = build_covariance(LINK, &network, &csi).unwrap();
    for k in 0..3 {
        let want = j0_reference(2.0 * PI * 0.3 * (1.0 + 2.0 * k as f64));
        assert!((r[k].re - want).abs() < 1e-14 && r[k].im == 0.0);
        for l in 0..3 {
            let want = j0_reference(2.0 * PI * 0.3 * 2.0 * k.abs_diff(l) as f64);
            assert!((r_mat.get(k, l).re - want).abs() < 1e-14);
        }
    }
}

#[test]
fn single_tap_predictor_correlation_is_the_outdating_coefficient() {
    for fdt in [0.0, 0.05, 0.1, 0.2, 0.3, 0.45, 0.5] {
        let (network, csi) = config(fdt, 1, 0.0);
        let p = build_predictor(LINK, &network, &csi).unwrap();
        let rho_f = j0_reference(2.0 * PI * fdt);
        assert!(
            (p.correlation - rho_f.abs()).abs() < 1e-9,
            "{fdt}: {} vs {rho_f}",
            p.correlation
        );
    }
}

#[test]
fn static_channel_predictor() {
    let (network, csi) = config(0.0, 1, 0.2);
    let p = build_predictor(LINK, &network, &csi).unwrap();
    assert!((p.correlation - 0.8f64.sqrt()).abs() < 1e-9);
    for length in [1, 3, 8] {
        let (network, csi) = config(0.0, length, 0.0);
        assert!((build_predictor(LINK, &network, &csi).unwrap().correlation - 1.0).abs() < 1e-6);
    }
}

#[test]
fn predictor_correlation_never_drops_with_more_taps() {
    for step in 0..=25 {
        let fdt = 0.02 * step as f64;
        for sigma_e2 in [0.0, 0.05, 0.3] {
            for delta in [1, 2, 3] {
                let mut previous = 0.0;
                for length in 1..=12 {
                    let network = NetworkConfig::symmetric(1, 10.0);
                    let csi = CsiConfig::uniform(1, fdt, 1, delta, length, sigma_e2);
                    let p = build_predictor(LINK, &network, &csi).unwrap();
                    assert!((0.0..=1.0).contains(&p.correlation));
                    assert!(
                        p.correlation >= previous - 1e-12,
                        "fdT {fdt} e {sigma_e2} delta {delta} L {length}"
                    );
                    previous = p.correlation;
                }
            }
        }
    }
}

/// Running mean and standard error of a real sample stream.
#[derive(Default)]
struct Mean {
    n: f64,
    sum: f64,
    sum_sq: f64,
}

impl Mean {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn mean(&self) -> f64 {
        self.sum / self.n
    }

    fn standard_error(&self) -> f64 {
        let m = self.mean();
        ((self.sum_sq / self.n - m * m) * self.n / (self.n - 1.0) / self.n).sqrt()
    }

    fn within(&self, want: f64, sigmas: f64) -> bool {
        (self.mean() - want).abs() <= sigmas * self.standard_error()
    }
}

struct Moments {
    history_power: Vec<Mean>,
    estimated_power: Mean,
    actual_power: Mean,
    predicted_power: Mean,
    outdated_cross: Mean,
    predicted_cross: Mean,
    predicted_true_cross: Mean,
    error_power: Mean,
    prediction_mse: Mean,
}

fn moments(
    fdt: f64,
    length: usize,
    sigma_e2: f64,
    draws: usize,
    seed: u64,
) -> (LinkStats, Moments) {
    let (network, csi) = config(fdt, length, sigma_e2);
    let model = ChannelModel::new(&network, &csi).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = model.empty_draw();
    let mut m = Moments {
        history_power: (0..length).map(|_| Mean::default()).collect(),
        estimated_power: Mean::default(),
        actual_power: Mean::default(),
        predicted_power: Mean::default(),
        outdated_cross: Mean::default(),
        predicted_cross: Mean::default(),
        predicted_true_cross: Mean::default(),
        error_power: Mean::default(),
        prediction_mse: Mean::default(),
    };
    for _ in 0..draws {
        model.sample_into(&mut rng, &mut draw);
        for (k, h) in draw.history(LINK).iter().enumerate() {
            m.history_power[k].push(h.norm_sqr());
        }
        let est = draw.estimated(LINK);
        let act = draw.actual(LINK);
        let pred = draw.predicted(LINK).unwrap();
        m.estimated_power.push(est.norm_sqr());
        m.actual_power.push(act.norm_sqr());
        m.predicted_power.push(pred.norm_sqr());
        m.outdated_cross.push((draw.outdated(LINK) * est.conj()).re);
        m.predicted_cross.push((pred * est.conj()).re);
        m.predicted_true_cross.push((pred * act.conj()).re);
        m.error_power.push((act - pred).norm_sqr());
        m.prediction_mse.push((est - pred).norm_sqr());
    }
    (model.link_stats(LINK).clone(), m)
}

#[test]
fn sample_moments_match_configured_law() {
    let (stats, m) = moments(0.3, 4, 0.1, 1_000_000, 17);
    let sigma_p2 = stats.predictor.prediction_variance;
    for h in &m.history_power {
        assert!(
            h.within(stats.sigma_hat2, 3.0),
            "{} vs {}",
            h.mean(),
            stats.sigma_hat2
        );
    }
    assert!(m.estimated_power.within(stats.sigma_hat2, 3.0));
    assert!(m.actual_power.within(stats.sigma_h2, 3.0));
    assert!(m.predicted_power.within(sigma_p2, 3.0));
    // selection-to-transmission correlation of the outdated estimate
    assert!(m
        .outdated_cross
        .within(stats.sigma_hat2 * stats.rho_e * stats.rho_f, 3.0));
    // prediction against the true channel: E{h_p h_t*} = sigma_p^2
    assert!(m.predicted_true_cross.within(sigma_p2, 3.0));
    assert!(m.predicted_cross.within(sigma_p2 * stats.rho_e, 3.0));
    assert!(m.error_power.within(stats.sigma_h2 - sigma_p2, 3.0));
}

#[test]
fn perfect_estimation_correlations() {
    let (stats, m) = moments(0.3, 1, 0.0, 1_000_000, 3);
    assert!(
        m.outdated_cross.within(stats.rho_f, 3.0),
        "{} vs {}",
        m.outdated_cross.mean(),
        stats.rho_f
    );
    let rho_p = stats.predictor.correlation;
    // normalized correlation of h_p and h_t is rho_e rho_p = rho_p
    assert!(m.predicted_true_cross.within(rho_p * rho_p, 3.0));
}

#[test]
fn prediction_mse_matches_predictor_variance() {
    let (stats, m) = moments(0.3, 4, 0.0, 1_000_000, 29);
    let want = stats.sigma_hat2 - stats.predictor.prediction_variance;
    assert!(
        m.prediction_mse.within(want, 3.0),
        "{} vs {want}",
        m.prediction_mse.mean()
    );
}

#[test]
fn degenerate_draws_are_exact() {
    let (network, csi) = config(0.0, 1, 0.0);
    let model = ChannelModel::new(&network, &csi).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let d = model.sample(&mut rng);
        for link in [LINK, LinkId::new(1, 0)] {
            assert_eq!(d.actual(link), d.estimated(link));
            assert_eq!(d.outdated(link), d.estimated(link));
        }
    }
    let (network, csi) = config(0.3, 3, 0.0);
    let model = ChannelModel::new(&network, &csi).unwrap();
    let d = model.sample(&mut rng);
    assert_eq!(d.actual(LINK), d.estimated(LINK));
    assert!(d
        .history(LINK)
        .iter()
        .all(|h| h.re.is_finite() && h.im.is_finite()));
}
