//! The autoregression model `y_k = S(k/n) y_{k-1} + xi_k` and the function
//! classes its coefficient is drawn from.

use std::fmt;
use std::sync::Arc;

use crate::error::{ensure, Error, Result};
use crate::numeric::bump;
use crate::rng::NoiseStream;

/// Default number of points for grid-based class-membership checks.
pub const DEFAULT_CHECK_GRID: usize = 10_000;

#[derive(Clone)]
enum Shape {
    /// `scale * |x - center|^exponent`
    Power {
        scale: f64,
        exponent: f64,
        center: f64,
    },
    Constant(f64),
    /// `amplitude * bump((x - center) / half_width)`
    Bump {
        amplitude: f64,
        center: f64,
        half_width: f64,
    },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// The unknown autoregression function `S` together with the class
/// metadata `(beta, K, z0, eps)` it is claimed to satisfy:
/// `sup |S| <= 1 - eps` on `(0, 1]` and `|S(x) - S(z0)| <= K |x - z0|^beta`.
#[derive(Clone)]
pub struct SignalFunction {
    shape: Shape,
    beta: f64,
    holder_k: f64,
    z0: f64,
    eps: f64,
}

impl fmt::Debug for SignalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shape = match &self.shape {
            Shape::Power { .. } => "power",
            Shape::Constant(_) => "constant",
            Shape::Bump { .. } => "bump",
            Shape::Custom(_) => "custom",
        };
        f.debug_struct("SignalFunction")
            .field("shape", &shape)
            .field("beta", &self.beta)
            .field("holder_k", &self.holder_k)
            .field("z0", &self.z0)
            .field("eps", &self.eps)
            .finish()
    }
}

fn check_z0(z0: f64) -> Result<()> {
    ensure(z0 > 0.0 && z0 < 1.0, "z0", z0, "must lie in (0, 1)")
}

fn check_beta(beta: f64) -> Result<()> {
    ensure(beta > 0.0 && beta <= 1.0, "beta", beta, "must lie in (0, 1]")
}

fn check_eps(eps: f64) -> Result<()> {
    ensure(eps > 0.0 && eps < 1.0, "eps", eps, "sup |S| must be strictly below 1")
}

impl SignalFunction {
    /// `S(x) = |x - z0|^beta`, the simulation benchmark. It lies in the
    /// Hölder class with `K = 1`, and `eps` is the largest value with
    /// `sup |S| <= 1 - eps`, i.e. `1 - max(z0, 1 - z0)^beta`.
    pub fn benchmark(beta: f64, z0: f64) -> Result<Self> {
        Self::scaled_power(1.0, beta, z0)
    }

    /// `S(x) = scale * |x - z0|^beta` with `K = |scale|`.
    pub fn scaled_power(scale: f64, beta: f64, z0: f64) -> Result<Self> {
        check_beta(beta)?;
        check_z0(z0)?;
        ensure(scale.is_finite() && scale != 0.0, "scale", scale, "must be finite and non-zero")?;
        let eps = 1.0 - scale.abs() * z0.max(1.0 - z0).powf(beta);
        check_eps(eps)?;
        Ok(Self {
            shape: Shape::Power {
                scale,
                exponent: beta,
                center: z0,
            },
            beta,
            holder_k: scale.abs(),
            z0,
            eps,
        })
    }

    /// `S(x) = c`. Any `beta` and any `K > 0` admit a constant; the metadata
    /// records `beta = 1`, `K = 1`.
    pub fn constant(c: f64, z0: f64) -> Result<Self> {
        check_z0(z0)?;
        ensure(c.abs() < 1.0, "c", c, "|c| must be below 1 for a stable process")?;
        Ok(Self {
            shape: Shape::Constant(c),
            beta: 1.0,
            holder_k: 1.0,
            z0,
            eps: 1.0 - c.abs(),
        })
    }

    /// `S(x) = amplitude * bump((x - z0) / half_width)` where `bump` is the
    /// standard `exp(1 - 1/(1 - u^2))` bump. `K` is the Hölder ratio for
    /// exponent `beta`, maximised on a fine grid over the support (outside
    /// the support the ratio only decreases) and padded by 1%.
    pub fn bump(amplitude: f64, z0: f64, half_width: f64, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        check_z0(z0)?;
        ensure(
            half_width > 0.0 && half_width.is_finite(),
            "half_width",
            half_width,
            "must be positive",
        )?;
        ensure(
            amplitude.abs() < 1.0 && amplitude != 0.0,
            "amplitude",
            amplitude,
            "must be non-zero with |amplitude| < 1",
        )?;
        let steps = 20_000;
        let mut ratio = 0.0f64;
        for i in 0..=steps {
            let d = half_width * (2.0 * i as f64 / steps as f64 - 1.0);
            if d == 0.0 {
                continue;
            }
            let diff = amplitude * (bump(d / half_width) - 1.0);
            ratio = ratio.max(diff.abs() / d.abs().powf(beta));
        }
        Ok(Self {
            shape: Shape::Bump {
                amplitude,
                center: z0,
                half_width,
            },
            beta,
            holder_k: ratio * 1.01,
            z0,
            eps: 1.0 - amplitude.abs(),
        })
    }

    /// Wraps an arbitrary evaluator. The metadata is taken on trust; use
    /// [`is_stable`](Self::is_stable) and
    /// [`is_holder_member`](Self::is_holder_member) to check it.
    pub fn custom<F>(f: F, beta: f64, holder_k: f64, z0: f64, eps: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_beta(beta)?;
        check_z0(z0)?;
        check_eps(eps)?;
        ensure(holder_k > 0.0 && holder_k.is_finite(), "holder_k", holder_k, "must be positive")?;
        Ok(Self {
            shape: Shape::Custom(Arc::new(f)),
            beta,
            holder_k,
            z0,
            eps,
        })
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match &self.shape {
            Shape::Power {
                scale,
                exponent,
                center,
            } => scale * (x - center).abs().powf(*exponent),
            Shape::Constant(c) => *c,
            Shape::Bump {
                amplitude,
                center,
                half_width,
            } => amplitude * bump((x - center) / half_width),
            Shape::Custom(f) => f(x),
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn holder_k(&self) -> f64 {
        self.holder_k
    }

    pub fn z0(&self) -> f64 {
        self.z0
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `S(z0)`, the estimation target.
    pub fn target(&self) -> f64 {
        self.eval(self.z0)
    }

    /// Stationary variance normaliser `1 - S(z0)^2`.
    pub fn tau(&self) -> f64 {
        let s = self.target();
        1.0 - s * s
    }

    fn check_grid(grid_size: usize) -> impl Iterator<Item = f64> {
        (1..=grid_size).map(move |i| i as f64 / grid_size as f64)
    }

    /// `max |S(x)|` over `x = i / grid_size`, `i = 1..=grid_size`.
    pub fn sup_norm_on_grid(&self, grid_size: usize) -> f64 {
        Self::check_grid(grid_size)
            .map(|x| self.eval(x).abs())
            .fold(0.0, f64::max)
    }

    /// Grid check of `sup |S| <= 1 - eps`, up to 1e-12 for the rounding in
    /// `1 - eps`.
    pub fn is_stable(&self, grid_size: usize) -> bool {
        self.check_stable(grid_size).is_ok()
    }

    /// Fails with [`Error::Unstable`] if the grid sup-norm exceeds `1 - eps`.
    pub fn check_stable(&self, grid_size: usize) -> Result<()> {
        let sup = self.sup_norm_on_grid(grid_size);
        let limit = 1.0 - self.eps;
        if sup <= limit + 1e-12 {
            Ok(())
        } else {
            Err(Error::Unstable { sup, limit })
        }
    }

    /// Grid estimate of `sup_x |S(x) - S(z0)| / |x - z0|^beta`.
    pub fn empirical_holder_constant(&self, grid_size: usize) -> Result<f64> {
        ensure(grid_size >= 10, "grid_size", grid_size as f64, "must be at least 10")?;
        let s0 = self.target();
        Ok(Self::check_grid(grid_size)
            .filter(|&x| x != self.z0)
            .map(|x| (self.eval(x) - s0).abs() / (x - self.z0).abs().powf(self.beta))
            .fold(0.0, f64::max))
    }

    /// Stability plus the Hölder bound, both on the check grid.
    pub fn is_holder_member(&self, grid_size: usize) -> bool {
        self.is_stable(grid_size)
            && self
                .empirical_holder_constant(grid_size)
                .is_ok_and(|k| k <= self.holder_k * (1.0 + 1e-12))
    }
}

/// Sample size and noise-stream key of one simulated path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PathConfig {
    pub n: usize,
    pub seed: u64,
    pub replication_index: u64,
}

impl PathConfig {
    pub fn new(n: usize, seed: u64, replication_index: u64) -> Result<Self> {
        ensure(n >= 2, "n", n as f64, "sample size must be at least 2")?;
        Ok(Self {
            n,
            seed,
            replication_index,
        })
    }

    pub fn noise(&self) -> NoiseStream {
        NoiseStream::new(self.seed, self.replication_index)
    }
}

/// One trajectory `y_0 = 0, y_1, ..., y_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    values: Vec<f64>,
    config: PathConfig,
}

impl Path {
    /// Builds a path from given observations, e.g. for replaying recorded
    /// data. `values[0]` must be `0`.
    pub fn from_observations(values: Vec<f64>) -> Result<Self> {
        ensure(values.len() >= 3, "len", values.len() as f64, "need y_0 plus at least 2 observations")?;
        ensure(values[0] == 0.0, "y_0", values[0], "initial condition must be 0")?;
        let config = PathConfig::new(values.len() - 1, 0, 0)?;
        Ok(Self { values, config })
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn config(&self) -> &PathConfig {
        &self.config
    }

    /// `y_0..=y_n`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Design point `x_k = k / n`.
    pub fn x(&self, k: usize) -> f64 {
        k as f64 / self.config.n as f64
    }

    /// Innovations `xi_k = y_k - S(x_k) y_{k-1}` for `k = 1..=n`, recovered
    /// from the path. Exact in real arithmetic; in floating point the
    /// discrepancy from the generating draws is a few ulps of `y_k`.
    pub fn innovations(&self, signal: &SignalFunction) -> Vec<f64> {
        innovations(&self.values, self.config.n, signal)
    }
}

pub(crate) fn innovations(values: &[f64], n: usize, signal: &SignalFunction) -> Vec<f64> {
    values
        .windows(2)
        .enumerate()
        .map(|(i, w)| w[1] - signal.eval((i + 1) as f64 / n as f64) * w[0])
        .collect()
}

/// Simulates `y_0 = 0`, `y_k = S(k/n) y_{k-1} + xi_k` for `k = 1..=n`.
///
/// The path is a pure function of `(signal, n, seed, replication_index)`.
pub fn simulate_path(signal: &SignalFunction, config: PathConfig) -> Path {
    let values = simulate_prefix(signal, &config, config.n);
    Path { values, config }
}

/// `y_0..=y_last` of the path `config` would generate; a prefix of
/// [`simulate_path`]'s output, bit for bit.
pub(crate) fn simulate_prefix(signal: &SignalFunction, config: &PathConfig, last: usize) -> Vec<f64> {
    let n = config.n;
    let last = last.min(n);
    let mut noise = config.noise();
    let mut values = Vec::with_capacity(last + 1);
    let mut y = 0.0;
    values.push(y);
    for k in 1..=last {
        y = signal.eval(k as f64 / n as f64) * y + noise.next_normal();
        values.push(y);
    }
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn benchmark_values() {
        let s = SignalFunction::benchmark(0.7, FRAC_1_SQRT_2).unwrap();
        assert_eq!(s.target(), 0.0);
        // |0 - 1/sqrt 2|^0.7
        assert!((s.eval(0.0) - 0.784_584_097_896_750_7).abs() < 1e-12);
        assert_eq!(s.holder_k(), 1.0);
        assert!((s.eps() - 0.215_415_902_103_249_35).abs() < 1e-12);
        assert!(s.is_holder_member(DEFAULT_CHECK_GRID));

        let s = SignalFunction::benchmark(1.0, 0.5).unwrap();
        assert_eq!(s.eval(0.0), 0.5);
        assert_eq!(s.eval(1.0), 0.5);
        assert_eq!(s.eval(0.5), 0.0);
        assert_eq!(s.eps(), 0.5);
    }

    #[test]
    fn benchmark_rejects_bad_parameters() {
        assert!(SignalFunction::benchmark(0.0, 0.5).is_err());
        assert!(SignalFunction::benchmark(1.2, 0.5).is_err());
        assert!(SignalFunction::benchmark(0.5, 0.0).is_err());
        assert!(SignalFunction::benchmark(0.5, 1.0).is_err());
        assert!(SignalFunction::benchmark(f64::NAN, 0.5).is_err());
        assert!(SignalFunction::constant(1.0, 0.5).is_err());
    }

    #[test]
    fn holder_constant_examples() {
        let s = SignalFunction::benchmark(0.7, FRAC_1_SQRT_2).unwrap();
        for grid in [10, 137, 10_000] {
            assert_eq!(s.empirical_holder_constant(grid).unwrap(), 1.0);
        }
        let c = SignalFunction::constant(0.4, 0.3).unwrap();
        assert_eq!(c.empirical_holder_constant(100).unwrap(), 0.0);

        let scaled = SignalFunction::scaled_power(0.3, 0.6, FRAC_1_SQRT_2).unwrap();
        let k = scaled.empirical_holder_constant(1000).unwrap();
        assert!((k - 0.3).abs() < 1e-15, "{k}");
        assert!(s.empirical_holder_constant(9).is_err());
    }

    #[test]
    fn unstable_custom_signal_is_detected() {
        let s = SignalFunction::custom(|x| 2.0 * x, 1.0, 2.0, 0.5, 0.1).unwrap();
        assert!(!s.is_stable(100));
        assert!(matches!(s.check_stable(100), Err(Error::Unstable { .. })));
    }

    #[test]
    fn bump_signal_metadata() {
        let s = SignalFunction::bump(0.1, 0.5, 0.01, 0.6).unwrap();
        assert_eq!(s.target(), 0.1);
        assert_eq!(s.eval(0.52), 0.0);
        assert!(s.is_holder_member(DEFAULT_CHECK_GRID));
        assert!((s.tau() - 0.99).abs() < 1e-15);
    }

    #[test]
    fn zero_signal_path_is_the_noise() {
        let s = SignalFunction::constant(0.0, 0.5).unwrap();
        let cfg = PathConfig::new(50, 11, 2).unwrap();
        let path = simulate_path(&s, cfg);
        let noise: Vec<f64> = cfg.noise().take(50).collect();
        assert_eq!(path.values()[0], 0.0);
        assert_eq!(&path.values()[1..], &noise[..]);
        assert_eq!(path.innovations(&s), noise);
    }

    #[test]
    fn paths_are_deterministic() {
        let s = SignalFunction::benchmark(0.7, FRAC_1_SQRT_2).unwrap();
        let cfg = PathConfig::new(100, 42, 0).unwrap();
        let a = simulate_path(&s, cfg);
        let b = simulate_path(&s, cfg);
        assert_eq!(a, b);
        assert_eq!(a.values().len(), 101);
        let other = simulate_path(&s, PathConfig::new(100, 42, 1).unwrap());
        assert_ne!(a.values(), other.values());
        assert_eq!(simulate_prefix(&s, &cfg, 40), a.values()[..41].to_vec());
    }

    #[test]
    fn recovered_innovations_match_draws() {
        let s = SignalFunction::benchmark(0.7, FRAC_1_SQRT_2).unwrap();
        let cfg = PathConfig::new(500, 5, 9).unwrap();
        let path = simulate_path(&s, cfg);
        for (rec, draw) in path.innovations(&s).iter().zip(cfg.noise()) {
            assert!((rec - draw).abs() < 1e-12);
        }
    }

    #[test]
    fn config_validation() {
        assert!(PathConfig::new(1, 0, 0).is_err());
        assert!(Path::from_observations(vec![1.0, 2.0, 3.0]).is_err());
        assert!(Path::from_observations(vec![0.0, 2.0]).is_err());
        assert_eq!(Path::from_observations(vec![0.0, 1.0, 2.0]).unwrap().n(), 2);
    }
}
