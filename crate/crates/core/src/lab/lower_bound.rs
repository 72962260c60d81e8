//! Statistics behind the minimax lower bound: the two-point construction
//! perturbs `S = 0` by a bump of height `1/N_*` and width `h_*`, and the
//! likelihood ratio between the two is driven by `varsigma_n^2` and `eta_n`.

use crate::error::{ensure, Result};
use crate::kernel::KernelWindow;
use crate::lepski::{bandwidth, effective_size, rate};
use crate::numeric::{bump, integrate, mean_and_variance, CompensatedSum};
use crate::process::{innovations, simulate_prefix, PathConfig, SignalFunction};
use crate::rng::{derive_seed, SeedDomain};

use super::replicate;

/// `(beta_hi - beta_lo) / ((2 beta_hi + 1)(2 beta_lo + 1))`.
pub fn beta_bar(beta_lo: f64, beta_hi: f64) -> f64 {
    (beta_hi - beta_lo) / ((2.0 * beta_hi + 1.0) * (2.0 * beta_lo + 1.0))
}

/// Width `a` such that `V(u) = bump(u / a)` has `int V^2 = beta_bar / 2`.
pub fn perturbation_width(beta_bar: f64) -> f64 {
    let energy = integrate(|u| bump(u).powi(2), -1.0, 1.0);
    0.5 * beta_bar / energy
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundDiagnostic {
    pub n: usize,
    pub replications: usize,
    pub beta_lo: f64,
    pub beta_hi: f64,
    pub beta_bar: f64,
    /// `beta_bar / 2`, the limit of `(d_n / n) varsigma_n^2`.
    pub sigma_star_sq: f64,
    /// Support half-width `a` of `V` in kernel units.
    pub v_width: f64,
    /// `(d_n / n) varsigma_n^2` per accepted replication.
    pub varsigma_sq_samples: Vec<f64>,
    pub eta_samples: Vec<f64>,
    /// Replications dropped because `varsigma_n^2 < 1e-12`.
    pub rejected: usize,
}

impl LowerBoundDiagnostic {
    pub fn mean_varsigma(&self) -> f64 {
        mean_and_variance(&self.varsigma_sq_samples).0
    }

    pub fn eta_mean_variance(&self) -> (f64, f64) {
        mean_and_variance(&self.eta_samples)
    }
}

/// Simulates under `S(x) = V((x - z0)/h_*) / N_*` and records
/// `(d_n/n) varsigma_n^2` and `eta_n` for each replication.
pub fn lower_bound_diagnostic(
    beta_lo: f64,
    beta_hi: f64,
    n: usize,
    replications: usize,
    z0: f64,
    master_seed: u64,
) -> Result<LowerBoundDiagnostic> {
    ensure(n >= 3, "n", n as f64, "sample size must be at least 3")?;
    ensure(beta_lo > 0.0, "beta_lo", beta_lo, "must be positive")?;
    ensure(beta_hi <= 1.0, "beta_hi", beta_hi, "must not exceed 1")?;
    ensure(beta_lo < beta_hi, "beta_hi", beta_hi, "must exceed beta_lo")?;
    ensure(replications >= 1, "replications", replications as f64, "must be at least 1")?;

    let d_n = effective_size(n);
    let h_star = bandwidth(d_n, beta_lo);
    let n_star = rate(d_n, beta_lo);
    let bb = beta_bar(beta_lo, beta_hi);
    let width = perturbation_width(bb);
    let support = width * h_star;
    ensure(width <= 1.0, "v_width", width, "perturbation wider than the kernel support")?;
    ensure(
        z0 - support > 0.0 && z0 + support < 1.0,
        "z0",
        z0,
        "perturbation support leaves (0, 1)",
    )?;

    let signal = SignalFunction::bump(1.0 / n_star, z0, support, beta_lo)?;
    let window = KernelWindow::new(n, z0, support)?;
    let config = PathConfig::new(n, derive_seed(master_seed, SeedDomain::LowerBound, n), 0)?;
    let nh = n as f64 * h_star;

    let samples: Vec<Option<(f64, f64)>> = replicate(replications, |i| {
        let cfg = PathConfig { replication_index: i, ..config };
        let y = simulate_prefix(&signal, &cfg, window.k_hi);
        let xi = innovations(&y, n, &signal);
        let mut energy = CompensatedSum::new();
        let mut score = CompensatedSum::new();
        for k in window.indices() {
            // V(u_k) = N_* S(x_k)
            let v = bump((k as f64 / n as f64 - z0) / support);
            energy.add(v * v * y[k - 1] * y[k - 1]);
            score.add(v * y[k - 1] * xi[k - 1]);
        }
        let varsigma_sq = energy.value() / (d_n * h_star);
        if varsigma_sq < 1e-12 {
            return None;
        }
        // eta_n = score / (sqrt(d_n h_*) varsigma_n)
        let eta = score.value() / ((d_n * h_star).sqrt() * varsigma_sq.sqrt());
        Some((energy.value() / nh, eta))
    });

    let rejected = samples.iter().filter(|s| s.is_none()).count();
    let (varsigma_sq_samples, eta_samples) = samples.into_iter().flatten().unzip();
    Ok(LowerBoundDiagnostic {
        n,
        replications,
        beta_lo,
        beta_hi,
        beta_bar: bb,
        sigma_star_sq: bb / 2.0,
        v_width: width,
        varsigma_sq_samples,
        eta_samples,
        rejected,
    })
}
