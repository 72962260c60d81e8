//! Small numerical helpers shared by the estimator and the lab.

/// Neumaier-compensated running sum.
///
/// Terms are folded in call order, so two sums fed the same sequence agree
/// bit for bit regardless of platform vector width.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        s.extend(iter);
        s
    }
}

/// Compensated sum of `values` in slice order.
pub fn compensated_sum(values: &[f64]) -> f64 {
    values.iter().copied().collect::<CompensatedSum>().value()
}

/// Sample mean and unbiased sample variance, both accumulated in slice order.
///
/// Returns `(mean, 0.0)` for a single value and `(NaN, NaN)` for none.
pub fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let len = values.len();
    if len == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = compensated_sum(values) / len as f64;
    if len == 1 {
        return (mean, 0.0);
    }
    let ss: CompensatedSum = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    (mean, ss.value() / (len - 1) as f64)
}

/// Standard compactly supported bump `exp(1 - 1/(1 - u^2))` on `(-1, 1)`,
/// zero elsewhere. Smooth, with `bump(0) = 1`.
pub fn bump(u: f64) -> f64 {
    let r = 1.0 - u * u;
    if r <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / r).exp()
    }
}

/// Integral of `f` over `[a, b]` by double-exponential quadrature.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    quadrature::double_exponential::integrate(f, a, b, 1e-13).integral
}

/// SplitMix64 finaliser; used to derive independent seeds from tags.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
