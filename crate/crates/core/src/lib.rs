//! Sequential kernel estimation of the autoregression function of
//!
//! ```text
//! y_k = S(k/n) y_{k-1} + xi_k,   xi_k ~ N(0, 1) i.i.d.,   y_0 = 0
//! ```
//!
//! at a fixed point `z0`, with Lepski adaptive bandwidth selection over a
//! geometric grid of smoothness levels, plus a Monte Carlo laboratory for
//! risk tables and empirical checks of the moment, stopping-time and
//! tail bounds the estimator relies on.
//!
//! The crate is organised bottom-up:
//!
//! - [`process`]: signal functions, their class-membership checks and the
//!   seeded path simulator.
//! - [`kernel`]: the indicator-kernel window, the stopping time with its
//!   fractional weight, the sequential estimate and its error decomposition.
//! - [`lepski`]: the bandwidth grid and the adaptive selection rule.
//! - [`lab`]: Monte Carlo risk evaluation and the property suites.
//!
//! Every random quantity is a pure function of a `(seed, replication_index)`
//! pair, so results do not depend on how replications are scheduled across
//! threads.

pub mod error;
pub mod kernel;
pub mod lab;
pub mod lepski;
pub mod numeric;
pub mod process;
pub mod rng;

pub use error::{Error, Result};
pub use kernel::{ErrorDecomposition, KernelWindow, SequentialEstimate};
pub use lepski::{AdaptiveEstimate, BandwidthGrid};
pub use process::{Path, PathConfig, SignalFunction};
