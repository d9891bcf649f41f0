//! Scalar primitives shared by the rest of the crate: the Gaussian tail,
//! truncated-distribution moments, log unit-ball volumes and log-domain
//! accumulation.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{domain, Result};
use crate::quad::{integrate, QuadOptions};

/// `ln(sqrt(2 / pi))`, the log of the half-normal density at zero.
pub(crate) const LN_SQRT_2_OVER_PI: f64 = -0.225_791_352_644_727_43;

/// A strictly positive quantity stored by its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogValue(f64);

impl LogValue {
    pub const ONE: LogValue = LogValue(0.0);

    pub fn from_ln(log_magnitude: f64) -> Self {
        debug_assert!(!log_magnitude.is_nan());
        LogValue(log_magnitude)
    }

    /// Panics in debug builds if `value` is not strictly positive.
    pub fn from_value(value: f64) -> Self {
        debug_assert!(value > 0.0, "LogValue requires a positive value");
        LogValue(value.ln())
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    /// Exponentiates; overflows to infinity or underflows to zero outside
    /// the representable range.
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn powf(self, exponent: f64) -> Self {
        LogValue(self.0 * exponent)
    }
}

impl std::ops::Mul for LogValue {
    type Output = LogValue;
    fn mul(self, rhs: LogValue) -> LogValue {
        LogValue(self.0 + rhs.0)
    }
}

impl std::ops::Div for LogValue {
    type Output = LogValue;
    fn div(self, rhs: LogValue) -> LogValue {
        LogValue(self.0 - rhs.0)
    }
}

impl std::ops::Add for LogValue {
    type Output = LogValue;
    fn add(self, rhs: LogValue) -> LogValue {
        LogValue(log_add_exp(self.0, rhs.0))
    }
}

/// `ln(e^a + e^b)` without overflow. Either argument may be `-inf`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(e^a - e^b)` for `a >= b`; returns `None` when the difference is not positive.
pub fn log_sub_exp(a: f64, b: f64) -> Option<f64> {
    if b == f64::NEG_INFINITY {
        return Some(a);
    }
    if b >= a {
        return None;
    }
    Some(a + (-(b - a).exp_m1()).ln())
}

/// `ln(sum_i e^{x_i})` with a max shift; `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_infinite() {
        return max;
    }
    let s: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + s.ln()
}

/// Streaming mean of positive values supplied by their logarithms.
///
/// Tracks `ln sum e^c` and `ln sum e^{2c}` so the mean and the relative
/// variance of the mean are available without leaving the log domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamingLogMean {
    count: u64,
    log_sum: f64,
    log_sum_squares: f64,
}

impl Default for StreamingLogMean {
    fn default() -> Self {
        Self::new()
    }
}

impl StreamingLogMean {
    pub fn new() -> Self {
        Self {
            count: 0,
            log_sum: f64::NEG_INFINITY,
            log_sum_squares: f64::NEG_INFINITY,
        }
    }

    #[inline]
    pub fn push_ln(&mut self, log_value: f64) {
        self.count += 1;
        self.log_sum = log_add_exp(self.log_sum, log_value);
        self.log_sum_squares = log_add_exp(self.log_sum_squares, 2.0 * log_value);
    }

    pub fn push(&mut self, value: LogValue) {
        self.push_ln(value.ln());
    }

    pub fn merge(&mut self, other: &StreamingLogMean) {
        self.count += other.count;
        self.log_sum = log_add_exp(self.log_sum, other.log_sum);
        self.log_sum_squares = log_add_exp(self.log_sum_squares, other.log_sum_squares);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// `ln sum e^c`, `-inf` when empty.
    pub fn log_sum(&self) -> f64 {
        self.log_sum
    }

    pub fn log_sum_squares(&self) -> f64 {
        self.log_sum_squares
    }

    pub fn log_mean(&self) -> Option<LogValue> {
        (self.count > 0).then(|| LogValue(self.log_sum - (self.count as f64).ln()))
    }

    /// Variance of the sample mean divided by the squared mean.
    pub fn relative_variance_of_mean(&self) -> Option<f64> {
        if self.count < 2 {
            return None;
        }
        let n = self.count as f64;
        // E[X^2] / E[X]^2 - 1, unbiased by n / (n - 1).
        let ratio = (self.log_sum_squares + n.ln() - 2.0 * self.log_sum).exp();
        let sample_rel_var = ((ratio - 1.0) * n / (n - 1.0)).max(0.0);
        Some(sample_rel_var / n)
    }
}

/// Upper-tail probability of the standard Gaussian.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// `ln(1 - 2 Q(z))`, the log CDF of `|X|` for standard Gaussian `X`.
pub fn ln_abs_gaussian_cdf(z: f64) -> f64 {
    if z <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let u = z * FRAC_1_SQRT_2;
    if u < 1.0 {
        libm::erf(u).ln()
    } else {
        (-libm::erfc(u)).ln_1p()
    }
}

/// Variance of a standard Gaussian truncated to `[-z, z]`.
pub fn truncated_gaussian_variance(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return domain(format!("truncated_gaussian_variance needs z > 0, got {z}"));
    }
    if z < 1e-6 {
        return Ok(z * z / 3.0);
    }
    let opts = QuadOptions {
        abs_tol: 1e-300,
        rel_tol: 1e-13,
        initial_panels: 1,
        max_panels: 200,
    };
    let num = integrate(|x| x * x * (-0.5 * x * x).exp(), 0.0, z, &opts).value;
    let den = integrate(|x| (-0.5 * x * x).exp(), 0.0, z, &opts).value;
    Ok(num / den)
}

/// Mean of a unit-mean exponential truncated to `[0, w]`, i.e. `1 - w / (e^w - 1)`.
pub fn truncated_exponential_mean(w: f64) -> Result<f64> {
    if !(w > 0.0) || w.is_nan() {
        return domain(format!("truncated_exponential_mean needs w > 0, got {w}"));
    }
    if w < 1e-9 {
        return Ok(0.5 * w);
    }
    if w < 1e-3 {
        // Bernoulli series of 1 - w / (e^w - 1).
        let w2 = w * w;
        return Ok(w * 0.5 - w2 / 12.0 + w2 * w2 / 720.0);
    }
    if w > 745.0 {
        return Ok(1.0);
    }
    Ok(1.0 - w / w.exp_m1())
}

/// `ln` of the volume of the unit ball in `d` dimensions.
pub fn log_unit_ball_volume(d: usize) -> Result<LogValue> {
    if d < 1 {
        return domain("log_unit_ball_volume needs d >= 1");
    }
    let half = 0.5 * d as f64;
    Ok(LogValue(half * PI.ln() - libm::lgamma(half + 1.0)))
}

pub(crate) const LN_PI: f64 = 1.144_729_885_849_400_2;
pub(crate) const LN_2PI_E: f64 = 2.837_877_066_409_345_5;
pub(crate) const LN_PI_E: f64 = 2.144_729_885_849_400_2;

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn constants() {
        assert!((LN_PI - PI.ln()).abs() < 1e-15);
        assert!((LN_2PI_E - (2.0 * PI * std::f64::consts::E).ln()).abs() < 1e-15);
        assert!((LN_PI_E - (PI * std::f64::consts::E).ln()).abs() < 1e-15);
        assert!((LN_SQRT_2_OVER_PI - (2.0 / PI).sqrt().ln()).abs() < 1e-15);
    }

    // Frozen from a 40-digit erfc evaluation.
    const Q_ORACLE: [(f64, f64); 9] = [
        (0.5, 0.308_537_538_725_986_896_4),
        (1.0, 0.158_655_253_931_457_051_4),
        (2.0, 0.022_750_131_948_179_207_2),
        (3.0, 0.001_349_898_031_630_094_527),
        (4.0, 3.167_124_183_311_992_125e-5),
        (6.0, 9.865_876_450_376_981_407e-10),
        (7.0, 1.279_812_543_885_835_004e-12),
        (8.0, 6.220_960_574_271_784_124e-16),
        (10.0, 7.619_853_024_160_526_066e-24),
    ];

    #[test]
    fn q_function_matches_high_precision_oracle() {
        assert_eq!(q_function(0.0), 0.5);
        for (x, q) in Q_ORACLE {
            let tol = if x <= 8.0 { 1e-12 } else { 1e-10 };
            assert!(rel(q_function(x), q) < tol, "Q({x})");
        }
        assert!(q_function(40.0) < 1e-300);
        assert!(rel(q_function(-1.0), 1.0 - 0.158_655_253_931_457_051_4) < 1e-15);
    }

    #[test]
    fn q_function_is_monotone() {
        let mut prev = q_function(-10.0);
        for i in -999..=1000 {
            let q = q_function(i as f64 * 0.01);
            assert!(q <= prev);
            prev = q;
        }
    }

    #[test]
    fn ln_abs_gaussian_cdf_branches_agree() {
        for &z in &[0.01, 0.5, 1.0, 1.414, 1.4143, 2.0, 5.0, 9.0] {
            // Series of ln(1 - 2Q) once 2Q is small enough to lose digits in 1 - 2Q.
            let q = q_function(z);
            let direct = if z < 2.0 {
                (1.0 - 2.0 * q).ln()
            } else {
                -(1..40).map(|k| (2.0 * q).powi(k) / k as f64).sum::<f64>()
            };
            let tol = if z < 0.1 { 1e-10 } else { 1e-13 };
            assert!((ln_abs_gaussian_cdf(z) - direct).abs() <= tol * direct.abs().max(1e-300), "z={z}");
        }
    }

    // Closed-form route, independent of the quadrature in the implementation:
    // Var(z) = 1 - z e^{-z^2/2} / (sqrt(pi/2) erf(z/sqrt 2)).
    fn variance_closed_form(z: f64) -> f64 {
        1.0 - z * (-0.5 * z * z).exp() / ((PI / 2.0).sqrt() * libm::erf(z * FRAC_1_SQRT_2))
    }

    const VAR_ORACLE: [(f64, f64); 9] = [
        (0.1, 0.003_328_891_006_699_802_554),
        (0.5, 0.080_589_154_600_811_698_43),
        (1.0, 0.291_125_094_772_793_211_2),
        (1.5, 0.551_524_415_761_551_314_1),
        (1.7, 0.648_943_111_541_093_666_6),
        (2.0, 0.773_741_303_549_923_247_2),
        (3.0, 0.973_336_924_662_541_476_6),
        (4.0, 0.998_929_290_372_473_824_3),
        (8.0, 0.999_999_999_999_919_163_7),
    ];

    #[test]
    fn truncated_variance_oracles() {
        for (z, v) in VAR_ORACLE {
            let got = truncated_gaussian_variance(z).unwrap();
            assert!(rel(got, v) < 1e-12, "Var({z}) = {got}, want {v}");
        }
        for &z in &[0.3, 1.1, 2.5, 6.0] {
            let got = truncated_gaussian_variance(z).unwrap();
            assert!(rel(got, variance_closed_form(z)) < 1e-11);
        }
    }

    #[test]
    fn truncated_variance_limits() {
        assert!((truncated_gaussian_variance(8.0).unwrap() - 1.0).abs() < 1e-6);
        let small = truncated_gaussian_variance(0.01).unwrap();
        assert!(rel(small, 0.01f64.powi(2) / 3.0) < 0.01);
        let tiny = truncated_gaussian_variance(1e-8).unwrap();
        assert!(rel(tiny, 1e-16 / 3.0) < 1e-12);
        assert!(truncated_gaussian_variance(0.0).is_err());
        assert!(truncated_gaussian_variance(-1.0).is_err());
    }

    #[test]
    fn truncated_variance_is_bounded_and_increasing() {
        let mut prev = 0.0;
        for i in 1..=1000 {
            let z = 8.0 * i as f64 / 1000.0;
            let v = truncated_gaussian_variance(z).unwrap();
            assert!(v > prev, "not increasing at z={z}");
            assert!(v > 0.0 && v < 1.0f64.min(z * z / 3.0 + 1e-12), "bound at z={z}");
            prev = v;
        }
    }

    const MEAN_ORACLE: [(f64, f64); 6] = [
        (0.01, 0.004_991_666_680_555_522_591),
        (0.5, 0.229_252_958_731_600_857_9),
        (1.0, 0.418_023_293_130_673_575_6),
        (2.0, 0.686_964_714_500_668_696_4),
        (5.0, 0.966_081_725_468_478_844_5),
        (10.0, 0.999_545_980_089_903_122_3),
    ];

    #[test]
    fn truncated_exponential_mean_oracles() {
        for (w, m) in MEAN_ORACLE {
            assert!(rel(truncated_exponential_mean(w).unwrap(), m) < 1e-13, "E({w})");
        }
        let closed = (1.0 - 3.0 * (-2.0f64).exp()) / (1.0 - (-2.0f64).exp());
        assert!(rel(truncated_exponential_mean(2.0).unwrap(), closed) < 1e-14);
        assert!((truncated_exponential_mean(50.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(rel(truncated_exponential_mean(0.001).unwrap(), 0.0005) < 1e-3);
        assert!(truncated_exponential_mean(0.0).is_err());
    }

    #[test]
    fn truncated_exponential_mean_is_bounded_and_increasing() {
        let mut prev = 0.0;
        for i in 1..=1000 {
            let w = 50.0 * i as f64 / 1000.0;
            let m = truncated_exponential_mean(w).unwrap();
            assert!(m >= prev, "w={w}");
            assert!(m > 0.0 && m <= 1.0 && m < w);
            prev = m;
        }
        // Series and closed-form branches meet smoothly.
        let a = truncated_exponential_mean(0.000_999_999).unwrap();
        let b = truncated_exponential_mean(0.001_000_001).unwrap();
        assert!((b - a) > 0.0 && (b - a) < 1.1e-9);
    }

    #[test]
    fn unit_ball_small_dimensions() {
        assert!((log_unit_ball_volume(1).unwrap().ln() - 2f64.ln()).abs() < 1e-14);
        assert!((log_unit_ball_volume(2).unwrap().ln() - PI.ln()).abs() < 1e-14);
        assert!((log_unit_ball_volume(3).unwrap().ln() - (4.0 * PI / 3.0).ln()).abs() < 1e-14);
        assert!((log_unit_ball_volume(4).unwrap().ln() - (PI * PI / 2.0).ln()).abs() < 1e-14);
        assert!(log_unit_ball_volume(0).is_err());
    }

    #[test]
    fn unit_ball_recurrence() {
        for d in 3..=10_000usize {
            let lhs = log_unit_ball_volume(d).unwrap().ln();
            let rhs = log_unit_ball_volume(d - 2).unwrap().ln() + (2.0 * PI / d as f64).ln();
            assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "d={d}");
        }
    }

    #[test]
    fn log_add_and_sub() {
        assert!((log_add_exp(1000.0, 1000.0) - (1000.0 + LN_2)).abs() < 1e-12);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 3.0), 3.0);
        let d = log_sub_exp(2f64.ln() + 5.0, 5.0).unwrap();
        assert!((d - 5.0).abs() < 1e-14);
        assert!(log_sub_exp(1.0, 1.0).is_none());
        let xs = [700.0, 701.0, 702.0];
        let direct = 700.0 + (1.0 + 1f64.exp() + 2f64.exp()).ln();
        assert!((log_sum_exp(&xs) - direct).abs() < 1e-12);
    }

    #[test]
    fn streaming_mean_of_constant_has_zero_variance() {
        let mut acc = StreamingLogMean::new();
        for _ in 0..1000 {
            acc.push_ln(70.0);
        }
        assert!((acc.log_mean().unwrap().ln() - 70.0).abs() < 1e-12);
        assert!(acc.relative_variance_of_mean().unwrap() < 1e-15);
    }
}
