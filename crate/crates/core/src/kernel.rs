//! Sequential kernel estimation at a point with the indicator kernel
//! `Q = 1[-1, 1]`.
//!
//! Observations are accumulated in time order until the kernel-weighted
//! mass `A_k = sum_{j <= k} Q(u_j) y_{j-1}^2` reaches the threshold `H`; the
//! observation at the stopping index `tau` enters with the fractional weight
//! `alpha` that makes the accumulated mass exactly `H`. Normalising by the
//! fixed `H` instead of the random `A_n` gives the noise term a Gaussian
//! type tail, which is what the Lepski rule needs.
//!
//! Since `Q` is an indicator, all sums run over the index window
//! `[k_lo, k_hi]` only; skipped terms would be exact zeros and leave the
//! compensated sums unchanged.

use std::ops::RangeInclusive;

use crate::error::{ensure, Error, Result};
use crate::numeric::{integrate, CompensatedSum};
use crate::process::{innovations, Path, SignalFunction};

/// Indices `j` with `|x_j - z0| <= h`, `x_j = j / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelWindow {
    pub z0: f64,
    pub h: f64,
    pub n: usize,
    /// `ceil(n z0 - n h)`, at least 1. Agrees with `floor(n z0 - n h) + 1`
    /// except when `n (z0 - h)` is an integer, where the closed kernel keeps
    /// the boundary point `u = -1`.
    pub k_lo: usize,
    /// `floor(n z0 + n h)`, at most `n`. Zero when the window lies left of
    /// `x_1`.
    pub k_hi: usize,
}

impl KernelWindow {
    pub fn new(n: usize, z0: f64, h: f64) -> Result<Self> {
        ensure(z0 > 0.0 && z0 < 1.0, "z0", z0, "must lie in (0, 1)")?;
        ensure(h > 0.0 && h.is_finite(), "h", h, "bandwidth must be positive")?;
        ensure(n >= 1, "n", n as f64, "sample size must be positive")?;
        let nf = n as f64;
        let lo = (nf * z0 - nf * h).ceil();
        let hi = (nf * z0 + nf * h).floor();
        let k_lo = lo.max(1.0) as usize;
        let k_hi = hi.min(nf).max(0.0) as usize;
        Ok(Self {
            z0,
            h,
            n,
            k_lo,
            k_hi,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.k_lo > self.k_hi
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            self.k_hi - self.k_lo + 1
        }
    }

    pub fn contains(&self, k: usize) -> bool {
        (self.k_lo..=self.k_hi).contains(&k)
    }

    pub fn indices(&self) -> RangeInclusive<usize> {
        self.k_lo..=self.k_hi
    }

    /// Kernel argument `u_k = (x_k - z0) / h`.
    pub fn u(&self, k: usize) -> f64 {
        (k as f64 / self.n as f64 - self.z0) / self.h
    }

    fn check_path(&self, path: &Path) -> Result<()> {
        if path.n() == self.n {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: self.n,
                actual: path.n(),
            })
        }
    }
}

/// Stopping index and the fractional weight on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stop {
    pub tau: usize,
    pub alpha: f64,
}

/// Outcome of the stopping rule on one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingOutcome {
    /// `None` when `A_n < H`.
    pub stop: Option<Stop>,
    pub a_n: f64,
}

impl StoppingOutcome {
    pub fn triggered(&self) -> bool {
        self.stop.is_some()
    }
}

/// The sequential estimate `S*_{H,h}(z0)` and its stopping internals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequentialEstimate {
    pub value: f64,
    pub tau: Option<usize>,
    pub alpha: Option<f64>,
    pub triggered: bool,
    pub a_n: f64,
    pub threshold: f64,
}

/// Split of `S* - S(z0)` into the part driven by the variation of `S`
/// across the window and the martingale noise part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorDecomposition {
    /// `B_H(h)`; zero when not triggered.
    pub bias_term: f64,
    /// `zeta_H(h) = H^{-1/2} (sum_{j<tau} y_{j-1} xi_j + alpha y_{tau-1} xi_tau)`;
    /// zero when not triggered.
    pub noise_term: f64,
    pub triggered: bool,
    pub target: f64,
    pub threshold: f64,
}

impl ErrorDecomposition {
    /// `-S(z0) 1(A_n < H) + (B_H + zeta_H / sqrt H) 1(A_n >= H)`, which
    /// equals `S* - S(z0)` exactly in real arithmetic.
    pub fn reconstruct(&self) -> f64 {
        if self.triggered {
            self.bias_term + self.noise_term / self.threshold.sqrt()
        } else {
            -self.target
        }
    }
}

fn check_threshold(threshold: f64) -> Result<()> {
    ensure(
        threshold > 0.0 && threshold.is_finite(),
        "H",
        threshold,
        "threshold must be positive",
    )
}

/// `A_0..=A_n`, `A_0 = 0`.
pub fn accumulate(path: &Path, window: &KernelWindow) -> Result<Vec<f64>> {
    window.check_path(path)?;
    let y = path.values();
    let mut out = Vec::with_capacity(window.n + 1);
    let mut acc = CompensatedSum::new();
    out.push(0.0);
    for k in 1..=window.n {
        if window.contains(k) {
            acc.add(y[k - 1] * y[k - 1]);
        }
        out.push(acc.value());
    }
    Ok(out)
}

pub(crate) fn stopping_on(y: &[f64], window: &KernelWindow, threshold: f64) -> StoppingOutcome {
    let mut acc = CompensatedSum::new();
    let mut stop = None;
    for k in window.indices() {
        let before = acc.value();
        let w = y[k - 1] * y[k - 1];
        acc.add(w);
        if stop.is_none() && acc.value() >= threshold {
            // A_tau >= H > A_{tau-1} forces w > 0.
            assert!(w > 0.0, "stopping index with zero increment");
            let alpha = ((threshold - before) / w).min(1.0);
            stop = Some(Stop { tau: k, alpha });
        }
    }
    StoppingOutcome {
        stop,
        a_n: acc.value(),
    }
}

/// `tau_H = inf{k : A_k >= H}` and `alpha_H` with
/// `A_{tau-1} + alpha y_{tau-1}^2 = H`.
pub fn stopping_time(path: &Path, window: &KernelWindow, threshold: f64) -> Result<StoppingOutcome> {
    window.check_path(path)?;
    check_threshold(threshold)?;
    Ok(stopping_on(path.values(), window, threshold))
}

/// Sum over `j in [k_lo, tau)` of `term(j)` plus `alpha * term(tau)`.
fn stopped_sum(window: &KernelWindow, stop: Stop, mut term: impl FnMut(usize) -> f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for j in window.k_lo..stop.tau {
        acc.add(term(j));
    }
    acc.add(stop.alpha * term(stop.tau));
    acc.value()
}

pub(crate) fn estimate_on(y: &[f64], window: &KernelWindow, threshold: f64) -> SequentialEstimate {
    let outcome = stopping_on(y, window, threshold);
    let value = match outcome.stop {
        Some(stop) => stopped_sum(window, stop, |j| y[j - 1] * y[j]) / threshold,
        None => 0.0,
    };
    SequentialEstimate {
        value,
        tau: outcome.stop.map(|s| s.tau),
        alpha: outcome.stop.map(|s| s.alpha),
        triggered: outcome.triggered(),
        a_n: outcome.a_n,
        threshold,
    }
}

/// `S*_{H,h}(z0) = H^{-1} (sum_{j<tau} y_{j-1} y_j + alpha y_{tau-1} y_tau)`
/// if `A_n >= H`, else `0`.
pub fn point_estimate(path: &Path, window: &KernelWindow, threshold: f64) -> Result<SequentialEstimate> {
    window.check_path(path)?;
    check_threshold(threshold)?;
    Ok(estimate_on(path.values(), window, threshold))
}

/// `sum_{j<tau} y_{j-1}^2 + alpha y_{tau-1}^2`, which the fractional weight
/// makes equal to `H`. `None` when untriggered.
pub fn filled_mass(path: &Path, window: &KernelWindow, estimate: &SequentialEstimate) -> Option<f64> {
    let y = path.values();
    let stop = Stop {
        tau: estimate.tau?,
        alpha: estimate.alpha?,
    };
    Some(stopped_sum(window, stop, |j| y[j - 1] * y[j - 1]))
}

pub(crate) fn decompose_on(
    y: &[f64],
    signal: &SignalFunction,
    window: &KernelWindow,
    threshold: f64,
) -> ErrorDecomposition {
    let target = signal.target();
    let outcome = stopping_on(y, window, threshold);
    let (bias_term, noise_term) = match outcome.stop {
        Some(stop) => {
            let n = window.n as f64;
            let xi = innovations(&y[..=stop.tau], window.n, signal);
            let bias = stopped_sum(window, stop, |j| {
                (signal.eval(j as f64 / n) - target) * y[j - 1] * y[j - 1]
            }) / threshold;
            let noise = stopped_sum(window, stop, |j| y[j - 1] * xi[j - 1]) / threshold.sqrt();
            (bias, noise)
        }
        None => (0.0, 0.0),
    };
    ErrorDecomposition {
        bias_term,
        noise_term,
        triggered: outcome.triggered(),
        target,
        threshold,
    }
}

/// Decomposes `S* - S(z0)` for a path generated by `signal`. The innovations
/// are recovered as `xi_j = y_j - S(x_j) y_{j-1}`.
pub fn decompose_error(
    path: &Path,
    signal: &SignalFunction,
    window: &KernelWindow,
    threshold: f64,
) -> Result<ErrorDecomposition> {
    window.check_path(path)?;
    check_threshold(threshold)?;
    Ok(decompose_on(path.values(), signal, window, threshold))
}

/// `Delta_n(f, h) = (nh)^{-1} sum_k f(u_k) y_{k-1}^2 - tau(S)^{-1} int_{-1}^{1} f`,
/// the deviation of the kernel-weighted empirical second moment from its
/// stationary limit. `f` must vanish outside `[-1, 1]`.
pub fn delta_n<F: Fn(f64) -> f64>(path: &Path, f: F, h: f64, signal: &SignalFunction) -> Result<f64> {
    let window = KernelWindow::new(path.n(), signal.z0(), h)?;
    let y = path.values();
    let mut acc = CompensatedSum::new();
    for k in window.indices() {
        acc.add(f(window.u(k)) * y[k - 1] * y[k - 1]);
    }
    let empirical = acc.value() / (path.n() as f64 * h);
    let limit = integrate(&f, -1.0, 1.0) / signal.tau();
    Ok(empirical - limit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::{simulate_path, PathConfig};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn toy() -> Path {
        Path::from_observations(vec![0.0, 1.0, 2.0, 1.0]).unwrap()
    }

    fn full(n: usize) -> KernelWindow {
        KernelWindow::new(n, 0.5, 1.0).unwrap()
    }

    #[test]
    fn window_examples() {
        let w = KernelWindow::new(100, FRAC_1_SQRT_2, 0.2469).unwrap();
        assert_eq!((w.k_lo, w.k_hi), (47, 95));
        let w = KernelWindow::new(10, 0.5, 0.05).unwrap();
        assert_eq!((w.k_lo, w.k_hi), (5, 5));
        let w = KernelWindow::new(100, 0.5, 1.0).unwrap();
        assert_eq!((w.k_lo, w.k_hi), (1, 100));
    }

    #[test]
    fn window_membership_matches_definition() {
        for &(n, z0, h) in &[(100, FRAC_1_SQRT_2, 0.2469), (37, 0.31, 0.07), (1000, 0.9, 0.25)] {
            let w = KernelWindow::new(n, z0, h).unwrap();
            for k in 1..=n {
                let u = w.u(k);
                if (u.abs() - 1.0).abs() < 1e-9 {
                    // Exact boundary hits are decided by the index arithmetic.
                    assert!(w.contains(k), "n={n} k={k}");
                    continue;
                }
                let inside = u.abs() <= 1.0;
                assert_eq!(w.contains(k), inside, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn empty_windows() {
        // Between design points.
        let w = KernelWindow::new(10, 0.55, 0.01).unwrap();
        assert!(w.is_empty());
        // Left of x_1.
        let w = KernelWindow::new(10, 0.05, 0.01).unwrap();
        assert!(w.is_empty());
        assert_eq!(w.k_hi, 0);
        assert_eq!(w.len(), 0);
    }

    #[test]
    fn window_rejects_bad_input() {
        assert!(KernelWindow::new(10, 0.0, 0.1).is_err());
        assert!(KernelWindow::new(10, 1.0, 0.1).is_err());
        assert!(KernelWindow::new(10, 0.5, 0.0).is_err());
        assert!(KernelWindow::new(10, 0.5, -1.0).is_err());
    }

    #[test]
    fn accumulate_by_hand() {
        let a = accumulate(&toy(), &full(3)).unwrap();
        assert_eq!(a, vec![0.0, 0.0, 1.0, 5.0]);
        let empty = KernelWindow::new(3, 0.5, 0.01).unwrap();
        assert_eq!(accumulate(&toy(), &empty).unwrap(), vec![0.0; 4]);
        let other = KernelWindow::new(4, 0.5, 1.0).unwrap();
        assert!(matches!(
            accumulate(&toy(), &other),
            Err(Error::LengthMismatch { expected: 4, actual: 3 })
        ));
    }

    #[test]
    fn stopping_by_hand() {
        let out = stopping_time(&toy(), &full(3), 3.0).unwrap();
        assert_eq!(out.stop, Some(Stop { tau: 3, alpha: 0.5 }));
        assert_eq!(out.a_n, 5.0);

        let out = stopping_time(&toy(), &full(3), 1.0).unwrap();
        assert_eq!(out.stop, Some(Stop { tau: 2, alpha: 1.0 }));

        let out = stopping_time(&toy(), &full(3), 5.5).unwrap();
        assert!(!out.triggered());
        assert!(stopping_time(&toy(), &full(3), 0.0).is_err());
    }

    #[test]
    fn estimate_by_hand() {
        let est = point_estimate(&toy(), &full(3), 3.0).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.tau, Some(3));
        assert_eq!(est.alpha, Some(0.5));
        assert!(est.triggered);
        assert_eq!(filled_mass(&toy(), &full(3), &est), Some(3.0));

        let est = point_estimate(&toy(), &full(3), 6.0).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(!est.triggered);
        assert_eq!((est.tau, est.alpha), (None, None));
        assert_eq!(filled_mass(&toy(), &full(3), &est), None);
    }

    #[test]
    fn empty_window_never_triggers() {
        let w = KernelWindow::new(3, 0.5, 0.01).unwrap();
        let est = point_estimate(&toy(), &w, 1e-9).unwrap();
        assert_eq!((est.value, est.a_n, est.triggered), (0.0, 0.0, false));
    }

    #[test]
    fn constant_signal_has_zero_bias() {
        let s = SignalFunction::constant(0.4, 0.5).unwrap();
        let path = simulate_path(&s, PathConfig::new(400, 1, 0).unwrap());
        let w = KernelWindow::new(400, 0.5, 0.2).unwrap();
        let d = decompose_error(&path, &s, &w, 80.0).unwrap();
        assert!(d.triggered);
        assert_eq!(d.bias_term, 0.0);
        let est = point_estimate(&path, &w, 80.0).unwrap();
        assert!((est.value - s.target() - d.reconstruct()).abs() < 1e-12);
    }

    #[test]
    fn untriggered_decomposition() {
        let s = SignalFunction::benchmark(0.7, 0.5).unwrap();
        let path = simulate_path(&s, PathConfig::new(100, 3, 0).unwrap());
        let w = KernelWindow::new(100, 0.5, 0.1).unwrap();
        let d = decompose_error(&path, &s, &w, 1e6).unwrap();
        assert!(!d.triggered);
        assert_eq!(d.reconstruct(), -s.target());
    }

    #[test]
    fn delta_n_cases() {
        let s = SignalFunction::benchmark(0.7, FRAC_1_SQRT_2).unwrap();
        assert_eq!(s.tau(), 1.0);
        let path = simulate_path(&s, PathConfig::new(1000, 8, 0).unwrap());
        assert_eq!(delta_n(&path, |_| 0.0, 0.1, &s).unwrap(), 0.0);
        let d = delta_n(&path, |u: f64| if u.abs() <= 1.0 { 1.0 } else { 0.0 }, 0.1, &s).unwrap();
        assert!(d.is_finite() && d.abs() < 1.0, "{d}");
    }
}
