mod common;

use common::gauss_legendre;
use relaycap::channel::{CsiConfig, NetworkConfig};
use relaycap::montecarlo::{
    normalized_difference, run, Coupling, ExperimentSpec, RunResult, Targets,
};
use relaycap::selection::SelectionScheme;

fn spec(
    relays: usize,
    snr_db: f64,
    fdt: f64,
    length: usize,
    scheme: SelectionScheme,
    trials: u64,
) -> ExperimentSpec {
    let network = NetworkConfig::symmetric(relays, snr_db);
    ExperimentSpec {
        csi: CsiConfig::uniform(relays, fdt, 1, 2, length, 0.0),
        network,
        scheme,
        trials,
        base_seed: 424_242,
        targets: Targets {
            true_capacity: true,
            bound_form: true,
            decoupled_bound_form: true,
            histogram_bins: Some(64),
        },
    }
}

fn in_pool(threads: usize, spec: &ExperimentSpec) -> RunResult {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| run(spec).unwrap())
}

#[test]
fn results_are_identical_across_thread_counts() {
    let one = spec(4, 15.0, 0.2, 3, SelectionScheme::Predicted, 1);
    let reference = in_pool(1, &one);
    assert_eq!(reference, in_pool(8, &one));
    assert_eq!(reference, run(&one).unwrap());

    let many = spec(4, 15.0, 0.2, 3, SelectionScheme::Predicted, 30_001);
    let reference = in_pool(1, &many);
    for threads in [2, 3, 8] {
        assert_eq!(reference, in_pool(threads, &many), "{threads} threads");
    }
}

#[test]
fn single_relay_static_channel_matches_quadrature() {
    // with one relay and perfect CSI the two gains are independent unit exponentials
    let psi = 10.0;
    let capacity = |g1: f64, g2: f64| {
        let g = |near: f64, far: f64| psi * psi * near * far / (2.0 * psi * near + psi * far + 1.0);
        0.5 * ((1.0 + g(g1, g2)).log2() + (1.0 + g(g2, g1)).log2())
    };
    let inner = |g1: f64| {
        let f = |g2: f64| capacity(g1, g2) * (-g2).exp();
        gauss_legendre(f, 0.0, 1.0, 20) + gauss_legendre(f, 1.0, 45.0, 60)
    };
    let outer = |g1: f64| inner(g1) * (-g1).exp();
    let want = gauss_legendre(outer, 0.0, 1.0, 20) + gauss_legendre(outer, 1.0, 45.0, 60);

    let mut s = spec(1, 10.0, 0.0, 1, SelectionScheme::OutdatedCsi, 1_000_000);
    s.targets = Targets::default();
    let got = run(&s).unwrap().capacity.unwrap();
    assert!(
        (got.mean - want).abs() <= 3.0 * got.standard_error,
        "{} vs {want} (se {})",
        got.mean,
        got.standard_error
    );
}

#[test]
fn standard_error_shrinks_like_root_trials() {
    let mut s = spec(4, 15.0, 0.1, 1, SelectionScheme::OutdatedCsi, 100_000);
    s.targets = Targets::default();
    let a = run(&s).unwrap().capacity.unwrap();
    s.trials = 200_000;
    let b = run(&s).unwrap().capacity.unwrap();
    let ratio = a.standard_error / b.standard_error;
    assert!((ratio / 2f64.sqrt() - 1.0).abs() < 0.1, "ratio {ratio}");
    assert!(a.mean >= 0.0 && b.mean >= 0.0);
}

#[test]
fn common_random_numbers_reduce_variance() {
    let network = NetworkConfig::symmetric(4, 15.0);
    let csi = CsiConfig::uniform(4, 0.2, 1, 2, 2, 0.0);
    let common = normalized_difference(&network, &csi, 100_000, 5, Coupling::Common).unwrap();
    let independent =
        normalized_difference(&network, &csi, 100_000, 5, Coupling::Independent).unwrap();
    assert!(common.standard_error < independent.standard_error);
    assert!((common.value - independent.value).abs() < 3.0 * independent.standard_error);
}

#[test]
fn bound_form_stays_below_capacity() {
    for (relays, snr, fdt, scheme) in [
        (2, 5.0, 0.1, SelectionScheme::OutdatedCsi),
        (4, 15.0, 0.3, SelectionScheme::OutdatedCsi),
        (4, 25.0, 0.1, SelectionScheme::Predicted),
        (3, 10.0, 0.0, SelectionScheme::Optimal),
    ] {
        let r = run(&spec(relays, snr, fdt, 3, scheme, 100_000)).unwrap();
        let (c, b) = (r.capacity.unwrap(), r.bound_form.unwrap());
        assert!(
            b.mean <= c.mean + 3.0 * c.standard_error,
            "{relays} {snr} {fdt} {scheme}"
        );
    }
}

#[test]
fn single_tap_prediction_reproduces_outdated_capacity() {
    let outdated = run(&spec(
        4,
        15.0,
        0.3,
        1,
        SelectionScheme::OutdatedCsi,
        200_000,
    ))
    .unwrap();
    let predicted = run(&spec(4, 15.0, 0.3, 1, SelectionScheme::Predicted, 200_000)).unwrap();
    let (a, b) = (outdated.capacity.unwrap(), predicted.capacity.unwrap());
    assert!((a.mean - b.mean).abs() <= 3.0 * a.standard_error.hypot(b.standard_error));
}

#[test]
fn static_channels_leave_nothing_to_predict() {
    let network = NetworkConfig::symmetric(4, 15.0);
    for length in [1, 2, 5] {
        let csi = CsiConfig::uniform(4, 0.0, 1, 2, length, 0.0);
        let d = normalized_difference(&network, &csi, 50_000, 8, Coupling::Common).unwrap();
        assert!(
            d.value.abs() <= 3.0 * d.standard_error + 1e-12,
            "L {length}: {}",
            d.value
        );
    }
}

#[test]
fn histograms_are_densities() {
    let r = run(&spec(4, 15.0, 0.1, 2, SelectionScheme::Predicted, 50_000)).unwrap();
    for h in r.histograms.unwrap() {
        assert_eq!(h.edges.len(), 65);
        let mass: f64 = h
            .densities
            .iter()
            .zip(h.edges.windows(2))
            .map(|(d, e)| d * (e[1] - e[0]))
            .sum();
        assert!((mass - 1.0).abs() < 1e-9);
        assert_eq!(h.samples, 50_000);
    }
}

#[test]
fn invalid_specs_are_rejected() {
    let mut s = spec(2, 10.0, 0.1, 1, SelectionScheme::Optimal, 0);
    assert!(run(&s).is_err());
    s.trials = 10;
    s.targets.histogram_bins = Some(8);
    assert!(run(&s).is_err());
}
