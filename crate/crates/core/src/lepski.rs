//! Lepski selection over a grid of smoothness levels.
//!
//! For `d_n = n / ln n`, smoothness `beta` maps to the bandwidth
//! `h(beta) = d_n^{-1/(2 beta + 1)}` and the rate `N(beta) = d_n^{beta/(2 beta + 1)}`.
//! The grid spans `[beta_lo, beta_hi]` in `m = floor(ln d_n) + 1` equal steps.
//! Estimates are computed at every grid bandwidth with threshold `H_j = n h_j`
//! and the rule keeps the largest bandwidth whose estimate is still
//! consistent with all smaller ones.

use std::f64::consts::E;

use crate::error::{ensure, Result};
use crate::kernel::{estimate_on, KernelWindow, SequentialEstimate};
use crate::process::Path;

/// `1.01 (K + e sqrt(4 + 4 / (2 beta_lo + 1)))`, just above the smallest
/// admissible threshold constant.
pub fn default_lambda(holder_k: f64, beta_lo: f64) -> Result<f64> {
    ensure(holder_k > 0.0 && holder_k.is_finite(), "K", holder_k, "must be positive")?;
    ensure(beta_lo > 0.0 && beta_lo <= 1.0, "beta_lo", beta_lo, "must lie in (0, 1]")?;
    Ok(1.01 * lambda_lower_bound(holder_k, beta_lo))
}

/// `K + e sqrt(4 + 4 / (2 beta_lo + 1))`; the threshold constant must exceed it.
pub fn lambda_lower_bound(holder_k: f64, beta_lo: f64) -> f64 {
    holder_k + E * (4.0 + 4.0 / (2.0 * beta_lo + 1.0)).sqrt()
}

/// `d_n = n / ln n`.
pub fn effective_size(n: usize) -> f64 {
    n as f64 / (n as f64).ln()
}

/// `h(beta) = d^{-1/(2 beta + 1)}`.
pub fn bandwidth(d: f64, beta: f64) -> f64 {
    d.powf(-1.0 / (2.0 * beta + 1.0))
}

/// `N(beta) = d^{beta/(2 beta + 1)}`.
pub fn rate(d: f64, beta: f64) -> f64 {
    d.powf(beta / (2.0 * beta + 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthGrid {
    pub n: usize,
    pub d_n: f64,
    pub m: usize,
    pub beta_lo: f64,
    pub beta_hi: f64,
    pub betas: Vec<f64>,
    pub bandwidths: Vec<f64>,
    pub rates: Vec<f64>,
    pub lambda: f64,
    /// `N_{m+1}`, from `beta_{m+1}` capped at 1. Only used by the `k = j = m`
    /// term of the last `omega`, which never decides the max.
    rate_past_end: f64,
}

impl BandwidthGrid {
    /// Builds the grid. `lambda_override` replaces
    /// [`default_lambda`]`(holder_k, beta_lo)`.
    pub fn build(
        n: usize,
        beta_lo: f64,
        beta_hi: f64,
        holder_k: f64,
        lambda_override: Option<f64>,
    ) -> Result<Self> {
        ensure(n >= 3, "n", n as f64, "sample size must be at least 3")?;
        ensure(beta_lo > 0.0, "beta_lo", beta_lo, "must be positive")?;
        ensure(beta_hi <= 1.0, "beta_hi", beta_hi, "must not exceed 1")?;
        ensure(beta_lo < beta_hi, "beta_hi", beta_hi, "must exceed beta_lo")?;
        let lambda = match lambda_override {
            Some(l) => {
                ensure(l > 0.0 && l.is_finite(), "lambda", l, "must be positive")?;
                l
            }
            None => default_lambda(holder_k, beta_lo)?,
        };

        let d_n = effective_size(n);
        let m = d_n.ln().floor() as usize + 1;
        let step = |k: usize| beta_lo + (k as f64 / m as f64) * (beta_hi - beta_lo);
        let betas: Vec<f64> = (0..=m).map(step).collect();
        let bandwidths = betas.iter().map(|&b| bandwidth(d_n, b)).collect();
        let rates = betas.iter().map(|&b| rate(d_n, b)).collect();
        let rate_past_end = rate(d_n, step(m + 1).min(1.0));
        Ok(Self {
            n,
            d_n,
            m,
            beta_lo,
            beta_hi,
            betas,
            bandwidths,
            rates,
            lambda,
            rate_past_end,
        })
    }

    pub fn len(&self) -> usize {
        self.m + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Threshold `H_j = n h_j` used at grid point `j`.
    pub fn threshold(&self, j: usize) -> f64 {
        self.n as f64 * self.bandwidths[j]
    }

    /// `N_{j+1}`, extended past the end of the grid.
    pub fn next_rate(&self, j: usize) -> f64 {
        self.rates.get(j + 1).copied().unwrap_or(self.rate_past_end)
    }

    /// Selection threshold `lambda / N_j`.
    pub fn selection_threshold(&self, j: usize) -> f64 {
        self.lambda / self.rates[j]
    }
}

/// `omega(h_j) = max_{0 <= k <= j} (|S*_j - S*_k| - lambda / N_{k+1})`.
pub fn omega_sequence(estimates: &[f64], grid: &BandwidthGrid) -> Vec<f64> {
    (0..estimates.len())
        .map(|j| {
            (0..=j)
                .map(|k| (estimates[j] - estimates[k]).abs() - grid.lambda / grid.next_rate(k))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// `k_hat = inf{j : omega(h_j) >= lambda / N_j} - 1`, or `m` if no grid
/// point violates its threshold.
pub fn select_index(omega: &[f64], grid: &BandwidthGrid) -> usize {
    omega
        .iter()
        .enumerate()
        .position(|(j, &w)| w >= grid.selection_threshold(j))
        .map_or(grid.m, |j| j.saturating_sub(1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveEstimate {
    pub value: f64,
    pub k_hat: usize,
    pub h_hat: f64,
    pub grid_estimates: Vec<SequentialEstimate>,
    pub omega: Vec<f64>,
}

/// One row of the per-bandwidth trace of an adaptive estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub j: usize,
    pub beta: f64,
    pub h: f64,
    pub rate: f64,
    pub threshold: f64,
    pub estimate: f64,
    pub omega: f64,
    pub selection_threshold: f64,
}

impl AdaptiveEstimate {
    pub fn trace(&self, grid: &BandwidthGrid) -> Vec<TraceRow> {
        (0..grid.len())
            .map(|j| TraceRow {
                j,
                beta: grid.betas[j],
                h: grid.bandwidths[j],
                rate: grid.rates[j],
                threshold: grid.threshold(j),
                estimate: self.grid_estimates[j].value,
                omega: self.omega[j],
                selection_threshold: grid.selection_threshold(j),
            })
            .collect()
    }
}

pub(crate) fn adaptive_on(y: &[f64], z0: f64, grid: &BandwidthGrid) -> Result<AdaptiveEstimate> {
    let grid_estimates = (0..grid.len())
        .map(|j| {
            let window = KernelWindow::new(grid.n, z0, grid.bandwidths[j])?;
            Ok(estimate_on(y, &window, grid.threshold(j)))
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = grid_estimates.iter().map(|e| e.value).collect();
    let omega = omega_sequence(&values, grid);
    let k_hat = select_index(&omega, grid);
    Ok(AdaptiveEstimate {
        value: values[k_hat],
        k_hat,
        h_hat: grid.bandwidths[k_hat],
        grid_estimates,
        omega,
    })
}

/// The adaptive estimate `S*_{h_{k_hat}}(z0)`.
pub fn adaptive_estimate(path: &Path, z0: f64, grid: &BandwidthGrid) -> Result<AdaptiveEstimate> {
    if path.n() != grid.n {
        return Err(crate::Error::LengthMismatch {
            expected: grid.n,
            actual: path.n(),
        });
    }
    adaptive_on(path.values(), z0, grid)
}
