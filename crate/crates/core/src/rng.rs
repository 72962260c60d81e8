//! Counter-based noise streams.
//!
//! A stream is keyed by `(seed, replication_index)`: ChaCha8 keyed from
//! `seed`, with `replication_index` selecting the ChaCha stream. Replication
//! `i` therefore never depends on how many draws replication `i - 1` made,
//! and replications can run in any order on any number of threads.
//!
//! Standard normals come from `rand_distr::StandardNormal` (ziggurat). The
//! method and the generator are pinned by this module; changing either
//! changes every simulated path.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numeric::mix64;

/// Seed domains keep the streams used by different experiments disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum SeedDomain {
    Risk = 1,
    Tail = 2,
    Moments = 3,
    Stopping = 4,
    LowerBound = 5,
    Trace = 6,
}

/// Derives the path seed for one `(domain, n)` cell of an experiment.
pub fn derive_seed(master_seed: u64, domain: SeedDomain, n: usize) -> u64 {
    mix64(master_seed ^ mix64(domain as u64 ^ mix64(n as u64)))
}

/// Standard normal stream for one replication.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
}

impl NoiseStream {
    pub fn new(seed: u64, replication_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(replication_index);
        Self { rng }
    }

    #[inline]
    pub fn next_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

impl Iterator for NoiseStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_normal())
    }
}
