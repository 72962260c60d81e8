//! Empirical checks of the moment, stopping-time and tail bounds.

use crate::error::{ensure, Result};
use crate::kernel::{decompose_on, stopping_on, KernelWindow};
use crate::numeric::{mean_and_variance, CompensatedSum};
use crate::process::{simulate_prefix, PathConfig, SignalFunction};
use crate::rng::{derive_seed, SeedDomain};

use super::replicate;

/// Replications per block in blockwise reductions. Fixed, so the reduction
/// tree never depends on the worker count.
const BLOCK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailRow {
    pub z: f64,
    /// `2 exp(-z^2 / 8)`.
    pub bound: f64,
    /// Frequency of `|zeta_H| > z` among triggered paths.
    pub empirical: f64,
    /// Three binomial standard errors of `empirical`.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailCheckReport {
    pub n: usize,
    pub h: f64,
    pub threshold: f64,
    pub replications: usize,
    pub triggered: usize,
    pub rows: Vec<TailRow>,
    pub zeta_mean: f64,
    pub zeta_variance: f64,
    /// Fewer than half the paths reached the threshold.
    pub underpowered: bool,
}

impl TailCheckReport {
    /// Pivotality check: `Var(zeta_H)` within `[0.8, 1.2]`.
    pub fn variance_in_band(&self) -> bool {
        (0.8..=1.2).contains(&self.zeta_variance)
    }

    pub fn passes(&self) -> bool {
        self.rows.iter().all(|r| r.pass) && self.variance_in_band()
    }
}

/// Tail frequencies of the normalised noise term `zeta_H(h)` with `H = n h`.
pub fn tail_suite(
    signal: &SignalFunction,
    n: usize,
    h: f64,
    replications: usize,
    z_list: &[f64],
    master_seed: u64,
) -> Result<TailCheckReport> {
    for &z in z_list {
        ensure(z >= 2.0, "z", z, "tail bound holds for z >= 2")?;
    }
    ensure(replications >= 1, "replications", replications as f64, "must be at least 1")?;
    let config = PathConfig::new(n, derive_seed(master_seed, SeedDomain::Tail, n), 0)?;
    let window = KernelWindow::new(n, signal.z0(), h)?;
    let threshold = n as f64 * h;

    let zetas: Vec<Option<f64>> = replicate(replications, |i| {
        let cfg = PathConfig { replication_index: i, ..config };
        let y = simulate_prefix(signal, &cfg, window.k_hi);
        let d = decompose_on(&y, signal, &window, threshold);
        d.triggered.then_some(d.noise_term)
    });
    let zetas: Vec<f64> = zetas.into_iter().flatten().collect();
    let triggered = zetas.len();
    let (zeta_mean, zeta_variance) = mean_and_variance(&zetas);

    let rows = z_list
        .iter()
        .map(|&z| {
            let bound = 2.0 * (-z * z / 8.0).exp();
            let hits = zetas.iter().filter(|v| v.abs() > z).count();
            let (empirical, margin) = if triggered == 0 {
                (f64::NAN, f64::NAN)
            } else {
                let p = hits as f64 / triggered as f64;
                (p, 3.0 * (p * (1.0 - p) / triggered as f64).sqrt())
            };
            TailRow {
                z,
                bound,
                empirical,
                margin,
                pass: empirical <= bound,
            }
        })
        .collect();

    Ok(TailCheckReport {
        n,
        h,
        threshold,
        replications,
        triggered,
        rows,
        zeta_mean,
        zeta_variance,
        underpowered: 2 * triggered < replications,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRow {
    pub k: usize,
    /// Moment order `2t`.
    pub order: u32,
    /// `((2t)! / (2^t t!)) eps^{-2t}`.
    pub bound: f64,
    pub empirical: f64,
    pub stderr: f64,
    /// `empirical - 3 stderr <= bound`.
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub n: usize,
    pub replications: usize,
    pub eps: f64,
    pub rows: Vec<MomentRow>,
}

impl MomentReport {
    pub fn passes(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Average over `k >= from_k` of the empirical moment of the given order.
    pub fn pooled_mean(&self, order: u32, from_k: usize) -> f64 {
        let v: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.order == order && r.k >= from_k)
            .map(|r| r.empirical)
            .collect();
        mean_and_variance(&v).0
    }
}

/// Empirical `E y_k^2` and `E y_k^4` for `k = 1..=n` against the moment
/// bounds for a stable process.
pub fn moment_suite(
    signal: &SignalFunction,
    n: usize,
    replications: usize,
    master_seed: u64,
) -> Result<MomentReport> {
    ensure(replications >= 2, "replications", replications as f64, "need at least 2 for errors")?;
    let config = PathConfig::new(n, derive_seed(master_seed, SeedDomain::Moments, n), 0)?;
    let blocks = replications.div_ceil(BLOCK);

    // Per block and k: sums of y^2, y^4, y^8.
    let partials: Vec<Vec<[f64; 3]>> = replicate(blocks, |b| {
        let start = b as usize * BLOCK;
        let end = (start + BLOCK).min(replications);
        let mut acc = vec![[0.0; 3]; n + 1];
        for i in start..end {
            let cfg = PathConfig { replication_index: i as u64, ..config };
            let y = simulate_prefix(signal, &cfg, n);
            for (a, v) in acc.iter_mut().zip(&y) {
                let y2 = v * v;
                let y4 = y2 * y2;
                a[0] += y2;
                a[1] += y4;
                a[2] += y4 * y4;
            }
        }
        acc
    });

    let m = replications as f64;
    let inv_eps2 = 1.0 / (signal.eps() * signal.eps());
    let mut rows = Vec::with_capacity(2 * n);
    for k in 1..=n {
        let mut sums = [CompensatedSum::new(); 3];
        for block in &partials {
            for (s, v) in sums.iter_mut().zip(block[k]) {
                s.add(v);
            }
        }
        let [s2, s4, s8] = sums.map(|s| s.value() / m);
        for (order, mean, second, bound) in [(2, s2, s4, inv_eps2), (4, s4, s8, 3.0 * inv_eps2 * inv_eps2)] {
            let var = (second - mean * mean).max(0.0) * m / (m - 1.0);
            let stderr = (var / m).sqrt();
            rows.push(MomentRow {
                k,
                order,
                bound,
                empirical: mean,
                stderr,
                pass: mean - 3.0 * stderr <= bound,
            });
        }
    }
    Ok(MomentReport {
        n,
        replications,
        eps: signal.eps(),
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingRow {
    pub n: usize,
    pub h: f64,
    pub threshold: f64,
    pub replications: usize,
    /// Frequency of `A_n < n h`, i.e. `tau_H > n`.
    pub untriggered: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoppingReport {
    pub rows: Vec<StoppingRow>,
}

impl StoppingReport {
    /// For each `h`, the untriggered frequency does not increase with `n`
    /// by more than two combined standard errors.
    pub fn monotone_in_n(&self) -> bool {
        let mut hs: Vec<f64> = self.rows.iter().map(|r| r.h).collect();
        hs.dedup();
        hs.iter().all(|&h| {
            let mut rows: Vec<&StoppingRow> = self.rows.iter().filter(|r| r.h == h).collect();
            rows.sort_by_key(|r| r.n);
            rows.windows(2).all(|w| {
                let slack = 2.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
                w[1].untriggered <= w[0].untriggered + slack
            })
        })
    }
}

/// Empirical `P(tau_H > n)` with `H = n h` for every `(n, h)` pair.
pub fn stopping_suite(
    signal: &SignalFunction,
    n_list: &[usize],
    h_list: &[f64],
    replications: usize,
    master_seed: u64,
) -> Result<StoppingReport> {
    ensure(replications >= 1, "replications", replications as f64, "must be at least 1")?;
    let mut rows = Vec::with_capacity(n_list.len() * h_list.len());
    for &h in h_list {
        for &n in n_list {
            let config = PathConfig::new(n, derive_seed(master_seed, SeedDomain::Stopping, n), 0)?;
            let window = KernelWindow::new(n, signal.z0(), h)?;
            let threshold = n as f64 * h;
            let hits: Vec<bool> = replicate(replications, |i| {
                let cfg = PathConfig { replication_index: i, ..config };
                let y = simulate_prefix(signal, &cfg, window.k_hi);
                !stopping_on(&y, &window, threshold).triggered()
            });
            let m = replications as f64;
            let p = hits.iter().filter(|&&u| u).count() as f64 / m;
            rows.push(StoppingRow {
                n,
                h,
                threshold,
                replications,
                untriggered: p,
                stderr: (p * (1.0 - p) / m).sqrt(),
            });
        }
    }
    Ok(StoppingReport { rows })
}
