use crate::error::{ensure, Result};
use crate::kernel::KernelWindow;
use crate::lepski::{adaptive_on, effective_size, rate, BandwidthGrid};
use crate::numeric::mean_and_variance;
use crate::process::{simulate_prefix, PathConfig, SignalFunction};
use crate::rng::{derive_seed, SeedDomain};

use super::replicate;

/// Smoothness range, Hölder constant and optional threshold constant of the
/// Lepski grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub beta_lo: f64,
    pub beta_hi: f64,
    pub holder_k: f64,
    pub lambda: Option<f64>,
}

impl GridConfig {
    pub fn build(&self, n: usize) -> Result<BandwidthGrid> {
        BandwidthGrid::build(n, self.beta_lo, self.beta_hi, self.holder_k, self.lambda)
    }
}

#[derive(Debug, Clone)]
pub struct RiskExperiment {
    pub n_list: Vec<usize>,
    pub replications: usize,
    pub signal: SignalFunction,
    pub grid: GridConfig,
    pub master_seed: u64,
}

impl RiskExperiment {
    /// Checks every precondition without simulating anything.
    pub fn validate(&self) -> Result<()> {
        ensure(self.replications >= 1, "replications", self.replications as f64, "must be at least 1")?;
        for &n in &self.n_list {
            self.grid.build(n)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskRow {
    pub n: usize,
    pub replications: usize,
    pub lambda: f64,
    /// `R_n`, mean absolute error of the adaptive estimate at `z0`.
    pub risk: f64,
    /// Sample standard deviation of the absolute errors over `sqrt(M)`.
    pub stderr: f64,
    /// `N(beta)` for the signal's own smoothness.
    pub rate: f64,
    /// `N(beta) R_n`.
    pub normalized: f64,
    /// `khat_counts[k]` replications selected grid index `k`.
    pub khat_counts: Vec<u64>,
}

impl RiskRow {
    /// Most frequently selected grid index (smallest on ties).
    pub fn khat_mode(&self) -> usize {
        let mut best = 0;
        for (k, &c) in self.khat_counts.iter().enumerate() {
            if c > self.khat_counts[best] {
                best = k;
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskReport {
    pub rows: Vec<RiskRow>,
}

/// Simulates `M` paths per sample size and averages `|S_hat - S(z0)|`.
pub fn monte_carlo_risk(exp: &RiskExperiment) -> Result<RiskReport> {
    exp.validate()?;
    let signal = &exp.signal;
    let z0 = signal.z0();
    let target = signal.target();
    let mut rows = Vec::with_capacity(exp.n_list.len());

    for &n in &exp.n_list {
        let grid = exp.grid.build(n)?;
        let seed = derive_seed(exp.master_seed, SeedDomain::Risk, n);
        // Observations past the widest window never enter any estimate.
        let last = KernelWindow::new(n, z0, grid.bandwidths[grid.m])?.k_hi;

        let outcomes = replicate(exp.replications, |i| {
            let config = PathConfig { n, seed, replication_index: i };
            let y = simulate_prefix(signal, &config, last);
            let est = adaptive_on(&y, z0, &grid).expect("grid validated");
            ((est.value - target).abs(), est.k_hat)
        });

        let errors: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
        let mut khat_counts = vec![0u64; grid.len()];
        for &(_, k) in &outcomes {
            khat_counts[k] += 1;
        }
        let (risk, var) = mean_and_variance(&errors);
        let rate_n = rate(effective_size(n), signal.beta());
        rows.push(RiskRow {
            n,
            replications: exp.replications,
            lambda: grid.lambda,
            risk,
            stderr: (var / exp.replications as f64).sqrt(),
            rate: rate_n,
            normalized: rate_n * risk,
            khat_counts,
        });
    }
    Ok(RiskReport { rows })
}

/// `max / min` of `N(beta) R_n` over the rows; 1 for fewer than two rows.
pub fn rate_stability(report: &RiskReport) -> f64 {
    let values = report.rows.iter().map(|r| r.normalized);
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if report.rows.len() < 2 {
        1.0
    } else {
        hi / lo
    }
}
