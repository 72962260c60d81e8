//! Monte Carlo laboratory: risk tables and empirical checks of the bounds
//! the estimator relies on.
//!
//! Replication `i` of every experiment draws its noise from the stream
//! keyed by `(derive_seed(master, domain, n), i)`. Results are gathered in
//! replication order and reduced left to right, so reports are identical
//! for any number of worker threads.

mod lower_bound;
mod risk;
mod suites;

pub use lower_bound::{beta_bar, lower_bound_diagnostic, perturbation_width, LowerBoundDiagnostic};
pub use risk::{monte_carlo_risk, rate_stability, GridConfig, RiskExperiment, RiskReport, RiskRow};
pub use suites::{
    moment_suite, stopping_suite, tail_suite, MomentReport, MomentRow, StoppingReport,
    StoppingRow, TailCheckReport, TailRow,
};

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Runs `f` on a pool of `workers` threads, or on rayon's global pool when
/// `workers` is `None`. The worker count never changes results.
pub fn with_workers<T, F>(workers: Option<usize>, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::WorkerPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// `f(0), ..., f(count - 1)` evaluated in parallel, returned in index order.
pub(crate) fn replicate<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..count as u64).into_par_iter().map(f).collect()
}
