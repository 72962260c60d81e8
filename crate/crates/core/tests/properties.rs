use proptest::prelude::*;

use seqlepski::kernel::{
    accumulate, decompose_error, filled_mass, point_estimate, stopping_time, KernelWindow,
};
use seqlepski::lepski::{adaptive_estimate, omega_sequence, select_index, BandwidthGrid};
use seqlepski::process::{simulate_path, PathConfig, SignalFunction};

fn benchmark() -> impl Strategy<Value = SignalFunction> {
    (0.3f64..=1.0, 0.1f64..0.9).prop_map(|(b, z)| SignalFunction::benchmark(b, z).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn accumulation_is_monotone_and_matches_direct_sum(
        signal in benchmark(),
        n in 20usize..400,
        seed in any::<u64>(),
        h in 0.01f64..0.6,
    ) {
        let path = simulate_path(&signal, PathConfig::new(n, seed, 0).unwrap());
        let window = KernelWindow::new(n, signal.z0(), h).unwrap();
        let a = accumulate(&path, &window).unwrap();
        prop_assert_eq!(a.len(), n + 1);
        prop_assert!(a.windows(2).all(|w| w[1] >= w[0]));
        let y = path.values();
        let direct: f64 = (1..=n).filter(|&k| window.contains(k)).map(|k| y[k - 1] * y[k - 1]).sum();
        prop_assert!((a[n] - direct).abs() <= 1e-12 * direct.max(1.0));
    }

    #[test]
    fn exact_fill_and_reconstruction(
        signal in benchmark(),
        n in 50usize..600,
        seed in any::<u64>(),
        h in 0.05f64..0.5,
        frac in 0.05f64..1.5,
    ) {
        let path = simulate_path(&signal, PathConfig::new(n, seed, 1).unwrap());
        let window = KernelWindow::new(n, signal.z0(), h).unwrap();
        let threshold = frac * n as f64 * h;
        let est = point_estimate(&path, &window, threshold).unwrap();
        prop_assert_eq!(est.triggered, est.a_n >= threshold);
        if let Some(mass) = filled_mass(&path, &window, &est) {
            prop_assert!((mass - threshold).abs() <= 1e-9 * threshold);
            let alpha = est.alpha.unwrap();
            prop_assert!(alpha > 0.0 && alpha <= 1.0);
            let a = accumulate(&path, &window).unwrap();
            let tau = est.tau.unwrap();
            prop_assert!(a[tau - 1] < threshold && threshold <= a[tau]);
        } else {
            prop_assert_eq!(est.value, 0.0);
        }
        let d = decompose_error(&path, &signal, &window, threshold).unwrap();
        let lhs = est.value - signal.target();
        prop_assert!((lhs - d.reconstruct()).abs() <= 1e-9 * lhs.abs().max(1.0));
        if d.triggered {
            prop_assert!(d.bias_term.abs() <= signal.holder_k() * h.powf(signal.beta()) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn raising_threshold_never_stops_earlier(
        n in 50usize..400,
        seed in any::<u64>(),
        h in 0.05f64..0.5,
        lo in 0.1f64..100.0,
        bump in 0.0f64..100.0,
    ) {
        let signal = SignalFunction::benchmark(0.7, std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let path = simulate_path(&signal, PathConfig::new(n, seed, 0).unwrap());
        let window = KernelWindow::new(n, signal.z0(), h).unwrap();
        let a = stopping_time(&path, &window, lo).unwrap();
        let b = stopping_time(&path, &window, lo + bump).unwrap();
        if b.triggered() {
            prop_assert!(a.triggered());
            prop_assert!(b.stop.unwrap().tau >= a.stop.unwrap().tau);
        }
    }

    #[test]
    fn grid_identities(
        n in 3usize..10_000_000,
        lo in 0.05f64..0.9,
        width in 0.01f64..0.5,
    ) {
        let hi = (lo + width).min(1.0);
        prop_assume!(hi > lo);
        let g = BandwidthGrid::build(n, lo, hi, 1.0, None).unwrap();
        let ln_n = (n as f64).ln();
        for k in 0..g.len() {
            let (h, rate) = (g.bandwidths[k], g.rates[k]);
            prop_assert!((rate * rate / (g.d_n * h) - 1.0).abs() <= 1e-12);
            prop_assert!(((n as f64 * h).sqrt() / rate / ln_n.sqrt() - 1.0).abs() <= 1e-12);
        }
        for w in g.bandwidths.windows(2) { prop_assert!(w[1] > w[0]); }
        for w in g.rates.windows(2) { prop_assert!(w[1] > w[0]); }
        for k in 1..g.len() {
            prop_assert!(g.selection_threshold(k) < g.selection_threshold(k - 1));
        }
    }

    #[test]
    fn selection_stays_in_range(
        estimates in proptest::collection::vec(-5.0f64..5.0, 5),
    ) {
        let g = BandwidthGrid::build(100, 0.6, 0.8, 1.0, Some(0.5)).unwrap();
        let omega = omega_sequence(&estimates, &g);
        prop_assert_eq!(omega[0], -g.lambda / g.rates[1]);
        let k = select_index(&omega, &g);
        prop_assert!(k <= g.m);
    }

    #[test]
    fn adaptive_estimate_is_consistent(seed in any::<u64>(), lambda in 0.05f64..10.0) {
        let signal = SignalFunction::benchmark(0.7, std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let g = BandwidthGrid::build(300, 0.6, 0.8, 1.0, Some(lambda)).unwrap();
        let path = simulate_path(&signal, PathConfig::new(300, seed, 0).unwrap());
        let a = adaptive_estimate(&path, signal.z0(), &g).unwrap();
        let b = adaptive_estimate(&path, signal.z0(), &g).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.k_hat <= g.m);
        prop_assert_eq!(a.h_hat, g.bandwidths[a.k_hat]);
        prop_assert_eq!(a.value, a.grid_estimates[a.k_hat].value);
        for (j, e) in a.grid_estimates.iter().enumerate() {
            prop_assert_eq!(e.threshold, g.threshold(j));
        }
    }
}

#[test]
fn untriggered_grid_gives_zero_estimate() {
    // A path that is zero inside every window never reaches a threshold.
    let mut values = vec![0.0; 101];
    values[1] = 1.0;
    let path = seqlepski::Path::from_observations(values).unwrap();
    let g = BandwidthGrid::build(100, 0.6, 0.8, 1.0, None).unwrap();
    let a = adaptive_estimate(&path, 0.7, &g).unwrap();
    assert!(a.grid_estimates.iter().all(|e| !e.triggered));
    assert_eq!(a.k_hat, g.m);
    assert_eq!(a.value, 0.0);
}

#[test]
fn grid_mismatch_is_rejected() {
    let signal = SignalFunction::benchmark(0.7, 0.5).unwrap();
    let path = simulate_path(&signal, PathConfig::new(50, 0, 0).unwrap());
    let g = BandwidthGrid::build(100, 0.6, 0.8, 1.0, None).unwrap();
    assert!(adaptive_estimate(&path, 0.5, &g).is_err());
}
