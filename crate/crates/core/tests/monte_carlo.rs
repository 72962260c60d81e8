//! Simulation oracles: closed-form moments, unbiasedness for constant
//! signals, and the scaling of the stopping and deviation bounds.

use std::f64::consts::FRAC_1_SQRT_2;

use seqlepski::kernel::{delta_n, point_estimate, KernelWindow};
use seqlepski::lab::{
    monte_carlo_risk, moment_suite, stopping_suite, with_workers, GridConfig, RiskExperiment,
};
use seqlepski::lepski::{adaptive_estimate, BandwidthGrid};
use seqlepski::numeric::mean_and_variance;
use seqlepski::process::{simulate_path, PathConfig, SignalFunction};

#[test]
fn constant_signal_variance_matches_geometric_sum() {
    let c: f64 = 0.5;
    let s = SignalFunction::constant(c, 0.5).unwrap();
    let reps = 20_000;
    let n = 60;
    for k in [1usize, 2, 5, 60] {
        let samples: Vec<f64> = (0..reps)
            .map(|i| simulate_path(&s, PathConfig::new(n, 77, i).unwrap()).values()[k])
            .collect();
        let (_, var) = mean_and_variance(&samples);
        let exact = (1.0 - c.powi(2 * k as i32)) / (1.0 - c * c);
        // Var of the sample variance of a Gaussian is 2 sigma^4 / (M - 1).
        let se = exact * (2.0 / (reps as f64 - 1.0)).sqrt();
        assert!((var - exact).abs() < 4.0 * se, "k={k} var={var} exact={exact}");
    }
}

#[test]
fn second_moment_bound_holds_for_stable_signals() {
    for s in [
        SignalFunction::constant(0.5, 0.5).unwrap(),
        SignalFunction::constant(-0.8, 0.5).unwrap(),
        SignalFunction::benchmark(0.7, FRAC_1_SQRT_2).unwrap(),
    ] {
        let report = moment_suite(&s, 200, 10_000, 5).unwrap();
        assert!(report.passes(), "{s:?}");
    }
    let bench = SignalFunction::benchmark(0.7, FRAC_1_SQRT_2).unwrap();
    let bound = 1.0 / bench.eps().powi(2);
    assert!((bound - 21.549_861_338_677_52).abs() < 1e-9);
}

#[test]
fn sequential_estimate_is_unbiased_for_constant_signal() {
    let c = 0.4;
    let s = SignalFunction::constant(c, 0.5).unwrap();
    let (n, h) = (2_000, 0.2);
    let window = KernelWindow::new(n, 0.5, h).unwrap();
    let values: Vec<f64> = (0..10_000)
        .map(|i| {
            let path = simulate_path(&s, PathConfig::new(n, 3, i).unwrap());
            point_estimate(&path, &window, n as f64 * h).unwrap().value
        })
        .collect();
    let (mean, var) = mean_and_variance(&values);
    let se = (var / values.len() as f64).sqrt();
    assert!((mean - c).abs() < 4.0 * se, "mean={mean} se={se}");
}

#[test]
fn adaptive_estimate_is_unbiased_for_constant_signal() {
    let c = -0.3;
    let s = SignalFunction::constant(c, FRAC_1_SQRT_2).unwrap();
    let n = 10_000;
    let g = BandwidthGrid::build(n, 0.6, 0.8, 1.0, None).unwrap();
    let values: Vec<f64> = (0..1_000)
        .map(|i| {
            let path = simulate_path(&s, PathConfig::new(n, 4, i).unwrap());
            adaptive_estimate(&path, s.z0(), &g).unwrap().value
        })
        .collect();
    let (mean, var) = mean_and_variance(&values);
    let se = (var / values.len() as f64).sqrt();
    assert!((mean - c).abs() < 4.0 * se, "mean={mean} se={se}");
}

#[test]
fn deviation_of_kernel_moment_shrinks_with_bandwidth() {
    // E Delta_n^2 for the indicator kernel is O(h^{2 beta}) plus O(1/(nh));
    // at n = 1e4 both pieces shrink from h = 0.2 to h = 0.05.
    let s = SignalFunction::benchmark(0.7, FRAC_1_SQRT_2).unwrap();
    let q = |u: f64| if u.abs() <= 1.0 { 1.0 } else { 0.0 };
    let n = 10_000;
    let msd = |h: f64| {
        let d: Vec<f64> = (0..1_000)
            .map(|i| {
                let path = simulate_path(&s, PathConfig::new(n, 12, i).unwrap());
                delta_n(&path, q, h, &s).unwrap().powi(2)
            })
            .collect();
        mean_and_variance(&d).0
    };
    let wide = msd(0.2);
    let narrow = msd(0.05);
    assert!(narrow < wide, "narrow={narrow} wide={wide}");
    assert!(wide < 0.5, "wide={wide}");
}

#[test]
fn untriggered_frequency_falls_with_n() {
    let s = SignalFunction::benchmark(0.7, FRAC_1_SQRT_2).unwrap();
    let report = stopping_suite(&s, &[25, 50, 100, 200], &[0.02, 0.05], 4_000, 8).unwrap();
    assert!(report.monotone_in_n());
    let g = BandwidthGrid::build(10_000, 0.6, 0.8, 1.0, None).unwrap();
    let h07 = seqlepski::lepski::bandwidth(g.d_n, 0.7);
    let big = stopping_suite(&s, &[10_000], &[h07], 1_000, 8).unwrap();
    assert!(big.rows[0].untriggered < 0.05);
}

#[test]
fn risk_is_independent_of_worker_count() {
    let exp = RiskExperiment {
        n_list: vec![100, 500],
        replications: 300,
        signal: SignalFunction::benchmark(0.7, FRAC_1_SQRT_2).unwrap(),
        grid: GridConfig {
            beta_lo: 0.6,
            beta_hi: 0.8,
            holder_k: 1.0,
            lambda: Some(1.0),
        },
        master_seed: 2024,
    };
    let one = with_workers(Some(1), || monte_carlo_risk(&exp)).unwrap().unwrap();
    let many = with_workers(Some(7), || monte_carlo_risk(&exp)).unwrap().unwrap();
    assert_eq!(one, many);
}

#[test]
fn noise_only_risk_shrinks() {
    let exp = RiskExperiment {
        n_list: vec![100, 1_000, 10_000],
        replications: 1_000,
        signal: SignalFunction::constant(0.0, 0.5).unwrap(),
        grid: GridConfig {
            beta_lo: 0.6,
            beta_hi: 0.8,
            holder_k: 1.0,
            lambda: None,
        },
        master_seed: 1,
    };
    let report = monte_carlo_risk(&exp).unwrap();
    let g = BandwidthGrid::build(100, 0.6, 0.8, 1.0, None).unwrap();
    // Noise scale of the narrowest grid estimate.
    assert!(report.rows[0].risk < 1.0 / (100.0 * g.bandwidths[0]).sqrt());
    for w in report.rows.windows(2) {
        assert!(w[1].risk < w[0].risk);
    }
}
