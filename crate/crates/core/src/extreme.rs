//! Laws for the maximum of `N` (or, for continuous waveforms, an effective
//! `alpha·N`) Gaussian-derived variables, and simulations to check them.
//!
//! Real cases describe `z = max |x|` in amplitude units with
//! `F(z) = (1 - 2Q(z))^{alpha N}`. Complex cases describe `w = max |x|^2` in
//! power units with `F(w) = (1 - e^{-w})^{alpha N}`. Discrete cases fix
//! `alpha = 1`, which is exact for i.i.d. Nyquist samples.

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::math::{ln_abs_gaussian_cdf, truncated_exponential_mean, truncated_gaussian_variance, LN_SQRT_2_OVER_PI};
use crate::par::map_indexed;
use crate::rng::substream;
use crate::signal::{Interpolator, MAX_WAVEFORM_LEN};
use crate::Domain;

/// Which maxima law applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaximaCase {
    DiscreteReal,
    ContinuousReal,
    DiscreteComplex,
    ContinuousComplex,
}

impl MaximaCase {
    pub fn new(domain: Domain, continuous: bool) -> Self {
        match (domain, continuous) {
            (Domain::Real, false) => MaximaCase::DiscreteReal,
            (Domain::Real, true) => MaximaCase::ContinuousReal,
            (Domain::Complex, false) => MaximaCase::DiscreteComplex,
            (Domain::Complex, true) => MaximaCase::ContinuousComplex,
        }
    }

    pub fn domain(self) -> Domain {
        match self {
            MaximaCase::DiscreteReal | MaximaCase::ContinuousReal => Domain::Real,
            MaximaCase::DiscreteComplex | MaximaCase::ContinuousComplex => Domain::Complex,
        }
    }

    pub fn is_continuous(self) -> bool {
        matches!(self, MaximaCase::ContinuousReal | MaximaCase::ContinuousComplex)
    }
}

/// Tabulated oversampling-equivalence factors `(N, alpha)`.
pub const ALPHA_TABLE: [(usize, f64); 4] = [(101, 2.3), (1001, 2.8), (10_001, 2.9), (100_001, 2.9)];

/// `alpha` of the tabulated `N` nearest to `n_symbols` on a log scale.
///
/// This is a heuristic: only the tabulated points were verified.
pub fn default_alpha(n_symbols: usize) -> f64 {
    let ln_n = (n_symbols.max(1) as f64).ln();
    ALPHA_TABLE
        .iter()
        .min_by(|a, b| {
            let da = ((a.0 as f64).ln() - ln_n).abs();
            let db = ((b.0 as f64).ln() - ln_n).abs();
            da.total_cmp(&db)
        })
        .map(|&(_, a)| a)
        .unwrap_or(2.8)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremeValueModel {
    pub case: MaximaCase,
    pub n_symbols: usize,
    pub alpha: f64,
}

impl ExtremeValueModel {
    pub fn new(case: MaximaCase, n_symbols: usize, alpha: f64) -> Result<Self> {
        if n_symbols < 1 {
            return domain("n_symbols must be >= 1");
        }
        if case.is_continuous() {
            if !(1.0..=4.0).contains(&alpha) {
                return domain(format!("alpha must lie in [1, 4], got {alpha}"));
            }
        } else if alpha != 1.0 {
            return domain("discrete maxima laws require alpha = 1");
        }
        Ok(Self { case, n_symbols, alpha })
    }

    pub fn discrete(domain: Domain, n_symbols: usize) -> Result<Self> {
        Self::new(MaximaCase::new(domain, false), n_symbols, 1.0)
    }

    pub fn continuous(domain: Domain, n_symbols: usize, alpha: f64) -> Result<Self> {
        Self::new(MaximaCase::new(domain, true), n_symbols, alpha)
    }

    /// Continuous law with `alpha` from [`default_alpha`].
    pub fn continuous_default(domain: Domain, n_symbols: usize) -> Result<Self> {
        Self::continuous(domain, n_symbols, default_alpha(n_symbols))
    }

    pub fn domain(&self) -> Domain {
        self.case.domain()
    }

    /// `alpha · N`.
    pub fn effective_count(&self) -> f64 {
        self.alpha * self.n_symbols as f64
    }

    fn ln_single_cdf(&self, v: f64) -> f64 {
        match self.domain() {
            Domain::Real => ln_abs_gaussian_cdf(v),
            Domain::Complex => (-(-v).exp_m1()).ln(),
        }
    }

    /// Log density of the maximum; `v` must be positive.
    pub fn ln_pdf(&self, v: f64) -> f64 {
        let k = self.effective_count();
        let single = match self.domain() {
            Domain::Real => LN_SQRT_2_OVER_PI - 0.5 * v * v,
            Domain::Complex => -v,
        };
        let body = if k == 1.0 { 0.0 } else { (k - 1.0) * self.ln_single_cdf(v) };
        k.ln() + body + single
    }

    /// Log CDF of the maximum; `v` must be positive.
    pub fn ln_cdf(&self, v: f64) -> f64 {
        self.effective_count() * self.ln_single_cdf(v)
    }

    /// The `v` with `ln F(v) = ln_q`, for `ln_q < 0`.
    pub fn quantile_ln(&self, ln_q: f64) -> f64 {
        let target = ln_q / self.effective_count();
        match self.domain() {
            // 1 - e^{-w} = e^t  =>  w = -ln(1 - e^t)
            Domain::Complex => -(-target.exp_m1()).ln(),
            Domain::Real => {
                let (mut lo, mut hi) = (-745.0f64, 40f64.ln());
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if ln_abs_gaussian_cdf(mid.exp()) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo < 1e-15 {
                        break;
                    }
                }
                (0.5 * (lo + hi)).exp()
            }
        }
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return domain(format!("quantile needs q in (0, 1), got {q}"));
        }
        Ok(self.quantile_ln(q.ln()))
    }
}

fn check_positive(v: f64) -> Result<()> {
    if v > 0.0 && !v.is_nan() {
        Ok(())
    } else {
        domain(format!("maxima variable must be positive, got {v}"))
    }
}

/// Density of the maximum (of `z` for real models, of `w = z^2` for complex).
pub fn max_pdf(model: &ExtremeValueModel, v: f64) -> Result<f64> {
    check_positive(v)?;
    Ok(model.ln_pdf(v).exp())
}

/// Distribution function of the maximum.
pub fn max_cdf(model: &ExtremeValueModel, v: f64) -> Result<f64> {
    check_positive(v)?;
    Ok(model.ln_cdf(v).exp())
}

/// Per-trial maxima: `max |x(t)|` (real) or `max |x(t)|^2` (complex) of
/// unit-power Gaussian signals, band-limited when `oversample > 1`.
///
/// Trial `i` uses substream `i` of `seed`.
pub fn simulate_maxima(
    n_symbols: usize,
    oversample: usize,
    domain_kind: Domain,
    n_trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if n_symbols < 2 {
        return domain("simulation needs n_symbols >= 2");
    }
    if oversample < 1 {
        return domain("oversample must be >= 1");
    }
    if n_symbols.saturating_mul(oversample) > MAX_WAVEFORM_LEN {
        return Err(Error::ResourceLimit(format!(
            "waveform length {n_symbols} x {oversample} exceeds {MAX_WAVEFORM_LEN}"
        )));
    }
    // Validate once so the workers can unwrap.
    Interpolator::new(n_symbols, oversample)?;
    let values = match domain_kind {
        Domain::Real => {
            let pairs = n_trials.div_ceil(2);
            let out = map_indexed(
                pairs,
                || {
                    (
                        Interpolator::new(n_symbols, oversample).expect("validated"),
                        vec![0.0; n_symbols],
                        vec![0.0; n_symbols],
                    )
                },
                |(interp, a, b), p| {
                    fill_normal(a, seed, 2 * p as u64);
                    fill_normal(b, seed, 2 * p as u64 + 1);
                    let (pa, pb) = interp.real_pair_peaks(a, b);
                    [pa, pb]
                },
            );
            let mut v: Vec<f64> = out.into_iter().flatten().collect();
            v.truncate(n_trials);
            v
        }
        Domain::Complex => map_indexed(
            n_trials,
            || Interpolator::new(n_symbols, oversample).expect("validated"),
            |interp, i| {
                let mut rng = substream(seed, i as u64);
                let s = crate::signal::draw_gaussian_direction(n_symbols, Domain::Complex, &mut rng);
                let p = interp.peak(&s.samples, Domain::Complex);
                p * p
            },
        ),
    };
    Ok(values)
}

fn fill_normal(buf: &mut [f64], seed: u64, index: u64) {
    let mut rng = substream(seed, index);
    for x in buf.iter_mut() {
        *x = rng.sample(StandardNormal);
    }
}

/// Kolmogorov–Smirnov distance between sorted samples and a CDF.
pub fn sup_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Histogram of simulated maxima.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMaxHistogram {
    pub domain: Domain,
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub n_trials: u64,
    pub n_symbols: usize,
    pub oversample: usize,
}

pub const HISTOGRAM_BINS: usize = 200;

impl EmpiricalMaxHistogram {
    /// Bins `maxima` into [`HISTOGRAM_BINS`] equal bins over the
    /// `[1e-6, 1 - 1e-6]` quantile range of `law`; outliers go to the end bins.
    pub fn from_maxima(maxima: &[f64], law: &ExtremeValueModel, oversample: usize) -> Self {
        let lo = law.quantile_ln(1e-6f64.ln());
        let hi = law.quantile_ln((-1e-6f64).ln_1p());
        let width = (hi - lo) / HISTOGRAM_BINS as f64;
        let bin_edges: Vec<f64> = (0..=HISTOGRAM_BINS).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0u64; HISTOGRAM_BINS];
        for &m in maxima {
            let idx = ((m - lo) / width).floor();
            let idx = if idx < 0.0 { 0 } else { (idx as usize).min(HISTOGRAM_BINS - 1) };
            counts[idx] += 1;
        }
        Self {
            domain: law.domain(),
            bin_edges,
            counts,
            n_trials: maxima.len() as u64,
            n_symbols: law.n_symbols,
            oversample,
        }
    }

    pub fn densities(&self) -> Vec<f64> {
        self.counts
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(&c, e)| c as f64 / (self.n_trials as f64 * (e[1] - e[0])))
            .collect()
    }

    /// Centre of the most populated bin.
    pub fn mode(&self) -> f64 {
        let (i, _) = self
            .counts
            .iter()
            .enumerate()
            .max_by_key(|&(i, &c)| (c, std::cmp::Reverse(i)))
            .expect("histogram has bins");
        0.5 * (self.bin_edges[i] + self.bin_edges[i + 1])
    }

    /// CSV with columns `bin_left, bin_right, count, density`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "bin_left,bin_right,count,density")?;
        for ((e, &c), d) in self.bin_edges.windows(2).zip(&self.counts).zip(self.densities()) {
            writeln!(
                out,
                "{},{},{},{}",
                crate::export::fmt_f64(e[0]),
                crate::export::fmt_f64(e[1]),
                c,
                crate::export::fmt_f64(d)
            )?;
        }
        Ok(())
    }
}

/// Simulates maxima and histograms them against the expected law
/// (`alpha = 1` when `oversample == 1`, otherwise the tabulated default).
pub fn simulate_max_distribution(
    n_symbols: usize,
    oversample: usize,
    domain_kind: Domain,
    n_trials: usize,
    seed: u64,
) -> Result<EmpiricalMaxHistogram> {
    if n_trials < 1000 {
        return domain("simulate_max_distribution needs at least 1000 trials");
    }
    let maxima = simulate_maxima(n_symbols, oversample, domain_kind, n_trials, seed)?;
    let law = if oversample == 1 {
        ExtremeValueModel::discrete(domain_kind, n_symbols)?
    } else {
        ExtremeValueModel::continuous_default(domain_kind, n_symbols)?
    };
    Ok(EmpiricalMaxHistogram::from_maxima(&maxima, &law, oversample))
}

/// Result of fitting the oversampling-equivalence factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaFit {
    pub alpha: f64,
    pub sup_distance: f64,
}

pub const ALPHA_FIT_MAX_RESIDUAL: f64 = 0.05;

/// Golden-section search over `alpha ∈ [1, 4]` minimizing the sup-norm
/// distance between the empirical CDF of `sorted` maxima and the law.
pub fn fit_alpha(sorted: &[f64], n_symbols: usize, domain_kind: Domain) -> Result<AlphaFit> {
    let n = n_symbols as f64;
    let distance = |alpha: f64| {
        let k = alpha * n;
        match domain_kind {
            Domain::Real => sup_distance(sorted, |z| (k * ln_abs_gaussian_cdf(z)).exp()),
            Domain::Complex => sup_distance(sorted, |w| (k * (-(-w).exp_m1()).ln()).exp()),
        }
    };
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (1.0f64, 4.0f64);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (distance(c), distance(d));
    while b - a > 0.01 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = distance(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = distance(d);
        }
    }
    let alpha = 0.5 * (a + b);
    let residual = distance(alpha);
    if residual > ALPHA_FIT_MAX_RESIDUAL {
        return Err(Error::AlphaFit { alpha, residual });
    }
    Ok(AlphaFit {
        alpha,
        sup_distance: residual,
    })
}

/// Simulates maxima and fits `alpha` to them.
pub fn calibrate_alpha(
    n_symbols: usize,
    oversample: usize,
    domain_kind: Domain,
    n_trials: usize,
    seed: u64,
) -> Result<AlphaFit> {
    if n_trials < 1000 {
        return domain("calibrate_alpha needs at least 1000 trials");
    }
    let mut maxima = simulate_maxima(n_symbols, oversample, domain_kind, n_trials, seed)?;
    maxima.sort_by(f64::total_cmp);
    fit_alpha(&maxima, n_symbols, domain_kind)
}

/// One bin of the conditional-moment comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalMomentBin {
    pub lo: f64,
    pub hi: f64,
    pub tuples: u64,
    /// Mean of `x^2` (real) or `|x|^2` (complex) over the non-maximal samples.
    pub empirical: f64,
    /// Truncated-law prediction averaged over the same tuples.
    pub predicted: f64,
}

impl ConditionalMomentBin {
    pub fn rel_error(&self) -> f64 {
        (self.empirical - self.predicted).abs() / self.predicted
    }
}

/// Compares the second moment of the non-maximal samples of i.i.d. tuples,
/// conditioned on the tuple maximum, with the truncated-Gaussian variance
/// (real) or the truncated-exponential mean (complex).
///
/// Maxima are `max |x_i|` for real tuples and `max |x_i|^2` for complex ones.
pub fn conditional_moment_table(
    domain_kind: Domain,
    n_symbols: usize,
    n_tuples: usize,
    seed: u64,
    range: (f64, f64),
    bins: usize,
) -> Result<Vec<ConditionalMomentBin>> {
    if n_symbols < 2 || bins == 0 || !(range.1 > range.0) || !(range.0 > 0.0) {
        return domain("conditional_moment_table needs N >= 2, bins > 0 and 0 < lo < hi");
    }
    const CHUNK: usize = 4096;
    let width = (range.1 - range.0) / bins as f64;
    let chunks = n_tuples.div_ceil(CHUNK);
    let partials = map_indexed(
        chunks,
        || vec![0.0; n_symbols],
        |buf, c| {
            let mut sums = vec![(0u64, 0.0f64, 0.0f64); bins];
            let start = c * CHUNK;
            let end = (start + CHUNK).min(n_tuples);
            for t in start..end {
                let mut rng = substream(seed, t as u64);
                for x in buf.iter_mut() {
                    *x = match domain_kind {
                        Domain::Real => rng.sample(StandardNormal),
                        Domain::Complex => {
                            let re: f64 = rng.sample(StandardNormal);
                            let im: f64 = rng.sample(StandardNormal);
                            0.5 * (re * re + im * im)
                        }
                    };
                }
                let (arg, peak) = buf
                    .iter()
                    .map(|&x| match domain_kind {
                        Domain::Real => x.abs(),
                        Domain::Complex => x,
                    })
                    .enumerate()
                    .fold((0, 0.0), |best, (i, v)| if v > best.1 { (i, v) } else { best });
                if peak < range.0 || peak >= range.1 {
                    continue;
                }
                let second: f64 = buf
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != arg)
                    .map(|(_, &x)| match domain_kind {
                        Domain::Real => x * x,
                        Domain::Complex => x,
                    })
                    .sum::<f64>()
                    / (n_symbols - 1) as f64;
                let predicted = match domain_kind {
                    Domain::Real => truncated_gaussian_variance(peak).unwrap_or(0.0),
                    Domain::Complex => truncated_exponential_mean(peak).unwrap_or(0.0),
                };
                let b = (((peak - range.0) / width) as usize).min(bins - 1);
                sums[b].0 += 1;
                sums[b].1 += second;
                sums[b].2 += predicted;
            }
            sums
        },
    );
    let mut total = vec![(0u64, 0.0f64, 0.0f64); bins];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            t.0 += p.0;
            t.1 += p.1;
            t.2 += p.2;
        }
    }
    Ok(total
        .into_iter()
        .enumerate()
        .map(|(i, (count, s, p))| ConditionalMomentBin {
            lo: range.0 + width * i as f64,
            hi: range.0 + width * (i + 1) as f64,
            tuples: count,
            empirical: if count > 0 { s / count as f64 } else { f64::NAN },
            predicted: if count > 0 { p / count as f64 } else { f64::NAN },
        })
        .collect())
}
