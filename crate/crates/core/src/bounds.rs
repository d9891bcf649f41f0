//! Semianalytic volume lower bound and the capacity curves built on it.
//!
//! Given the peak `v` of a Gaussian direction (`z` for real signals, `w = z^2`
//! for complex ones), the non-maximal samples are modelled as i.i.d. and
//! truncated at the peak. Normalizing to unit peak gives a typical radial
//! length `L(v)`, and the body volume at unit peak power is bounded below by
//! `V_d · ∫ p(v) L(v)^d dv` with `d = N` (real) or `2N` (complex). Replacing
//! the random length by its root-mean-square can only lose volume, so the
//! result is a lower bound.
//!
//! Everything is carried in the log domain: for `N` in the hundreds both
//! `V_d` and `L^d` are far outside `f64` range.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::extreme::ExtremeValueModel;
use crate::math::{log_unit_ball_volume, truncated_exponential_mean, truncated_gaussian_variance, LogValue};
use crate::quad::{integrate, QuadOptions};
use crate::Domain;

/// Peak-limited AWGN channel parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub domain: Domain,
    /// Peak power `P` in watts.
    pub peak_power: f64,
    /// Bandwidth `B` in hertz.
    pub bandwidth: f64,
    /// Noise density `N0` in watts per hertz.
    pub noise_density: f64,
}

impl ChannelModel {
    pub fn new(domain: Domain, peak_power: f64, bandwidth: f64, noise_density: f64) -> Result<Self> {
        if !(peak_power > 0.0 && bandwidth > 0.0 && noise_density > 0.0) {
            return domain_err("peak power, bandwidth and noise density must be positive");
        }
        Ok(Self {
            domain,
            peak_power,
            bandwidth,
            noise_density,
        })
    }

    /// `sigma_n^2 = N0 · B`.
    pub fn noise_power(&self) -> f64 {
        self.noise_density * self.bandwidth
    }

    /// `rho = P / (B · N0)`.
    pub fn snr(&self) -> f64 {
        self.peak_power / self.noise_power()
    }

    /// Nyquist interval: `0.5 / B` (real) or `1 / B` (complex).
    pub fn nyquist_interval(&self) -> f64 {
        match self.domain {
            Domain::Real => 0.5 / self.bandwidth,
            Domain::Complex => 1.0 / self.bandwidth,
        }
    }
}

fn domain_err<T>(msg: &str) -> Result<T> {
    domain(msg.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMethod {
    Analytic,
    MonteCarlo,
}

/// Volume of the peak-limited body and the derived power efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeEstimate {
    pub domain: Domain,
    pub n_symbols: usize,
    pub body_dimension: usize,
    /// `ln V_x` at unit peak power.
    pub log_volume: LogValue,
    pub gamma: f64,
    /// Entropy power at unit peak power (equals `gamma`).
    pub entropy_power: f64,
    pub method: EstimateMethod,
    /// Standard error of `gamma`, when the method provides one.
    pub uncertainty: Option<f64>,
}

impl VolumeEstimate {
    pub fn from_log_volume(
        domain: Domain,
        n_symbols: usize,
        log_volume: LogValue,
        method: EstimateMethod,
        uncertainty: Option<f64>,
    ) -> Self {
        let gamma = domain.gamma_from_log_volume(n_symbols, log_volume.ln());
        Self {
            domain,
            n_symbols,
            body_dimension: domain.body_dimension(n_symbols),
            log_volume,
            gamma,
            entropy_power: gamma,
            method,
            uncertainty,
        }
    }

    /// Log-volume of the same body scaled to peak power `p`
    /// (every axis grows by `sqrt(p)`).
    pub fn log_volume_at_peak_power(&self, p: f64) -> f64 {
        self.log_volume.ln() + 0.5 * self.body_dimension as f64 * p.ln()
    }

    /// Entropy power at peak power `p`.
    pub fn entropy_power_at(&self, p: f64) -> f64 {
        entropy_power(self.domain, self.n_symbols, self.log_volume_at_peak_power(p))
    }

    /// Power efficiency re-derived at peak power `p`; independent of `p`.
    pub fn gamma_at(&self, p: f64) -> f64 {
        self.entropy_power_at(p) / p
    }

    /// `ln V_x / d`.
    pub fn log_volume_per_dim(&self) -> f64 {
        self.log_volume.ln() / self.body_dimension as f64
    }
}

/// Entropy power of a uniform distribution on a body of the given log-volume.
pub fn entropy_power(domain: Domain, n_symbols: usize, log_volume: f64) -> f64 {
    domain.gamma_from_log_volume(n_symbols, log_volume)
}

/// `gamma` for a body with the given log-volume at unit peak power.
pub fn gamma_from_log_volume(domain: Domain, n_symbols: usize, log_volume: f64) -> f64 {
    domain.gamma_from_log_volume(n_symbols, log_volume)
}

/// `gamma` when only the Nyquist samples are peak limited:
/// `2 / (pi e)` (real) or `1 / e` (complex).
pub fn sampled_only_upper_bound(domain: Domain) -> f64 {
    match domain {
        Domain::Real => 2.0 / (std::f64::consts::PI * std::f64::consts::E),
        Domain::Complex => 1.0 / std::f64::consts::E,
    }
}

/// Typical peak-normalized length `L(v)` of a direction with peak `v`.
pub fn radial_length(model: &ExtremeValueModel, v: f64) -> Result<f64> {
    Ok(ln_radial_length_sq(model, v)?.mul_add(0.5, 0.0).exp())
}

fn ln_radial_length_sq(model: &ExtremeValueModel, v: f64) -> Result<f64> {
    if !(v > 0.0) {
        return domain(format!("radial_length needs v > 0, got {v}"));
    }
    let rest = (model.n_symbols - 1) as f64;
    if rest == 0.0 {
        return Ok(0.0);
    }
    let ratio = match model.domain() {
        Domain::Real => truncated_gaussian_variance(v)? / (v * v),
        Domain::Complex => truncated_exponential_mean(v)? / v,
    };
    Ok((ratio * rest).ln_1p())
}

/// `ln p(v) + d · ln L(v)`, the log of the volume integrand.
fn ln_integrand(model: &ExtremeValueModel, v: f64) -> f64 {
    let d = model.domain().body_dimension(model.n_symbols) as f64;
    match ln_radial_length_sq(model, v) {
        Ok(l2) => model.ln_pdf(v) + 0.5 * d * l2,
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Log-integrand drop, relative to its peak, at which the range is cut.
const RANGE_DROP: f64 = 60.0;
/// Required relative accuracy of the integral.
pub const QUADRATURE_TOLERANCE: f64 = 1e-6;

/// Integration range and peak of the log-integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
struct IntegrandShape {
    lo: f64,
    peak_at: f64,
    peak: f64,
    hi: f64,
}

fn scan_limit(domain: Domain) -> f64 {
    match domain {
        Domain::Real => 14.0,
        Domain::Complex => 200.0,
    }
}

fn integrand_shape(model: &ExtremeValueModel) -> IntegrandShape {
    let f = |v: f64| ln_integrand(model, v);
    let top = scan_limit(model.domain());
    let steps = 1400;
    let grid = |i: usize| top * i as f64 / steps as f64;
    let mut best_i = 1;
    let mut best = f(grid(1));
    for i in 2..=steps {
        let val = f(grid(i));
        if val > best {
            best = val;
            best_i = i;
        }
    }
    // Golden-section refinement inside the neighbouring cells.
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (grid(best_i - 1).max(top * 1e-9), grid((best_i + 1).min(steps)));
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let peak_at = 0.5 * (a + b);
    let peak = f(peak_at).max(best);
    let cut = peak - RANGE_DROP;
    // Walk outwards to the first points below the cut, then bisect.
    let edge = |inside: f64, outside: f64| {
        let (mut i, mut o) = (inside, outside);
        for _ in 0..100 {
            let m = 0.5 * (i + o);
            if f(m) > cut {
                i = m;
            } else {
                o = m;
            }
        }
        o
    };
    let mut lo_out = peak_at;
    let mut lo_in = peak_at;
    loop {
        let next = lo_out * 0.5;
        if next < 1e-12 {
            lo_out = 1e-12;
            break;
        }
        lo_in = lo_out;
        lo_out = next;
        if f(lo_out) <= cut {
            break;
        }
    }
    let lo = if f(lo_out) <= cut { edge(lo_in, lo_out) } else { lo_out };
    let step = peak_at.max(0.5);
    let mut hi_in = peak_at;
    let mut hi_out = peak_at + step;
    while f(hi_out) > cut {
        hi_in = hi_out;
        hi_out += step;
    }
    let hi = edge(hi_in, hi_out);
    IntegrandShape { lo, peak_at, peak, hi }
}

/// Options for the volume integral.
#[derive(Debug, Clone, Copy)]
pub struct VolumeQuadrature {
    pub rel_tol: f64,
    /// Equal panels on each side of the peak before adaptive refinement.
    pub initial_panels: usize,
}

impl Default for VolumeQuadrature {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            initial_panels: 4,
        }
    }
}

/// `ln ∫_{from}^{hi} p(v) L(v)^d dv` over the located range.
fn ln_volume_integral(model: &ExtremeValueModel, shape: &IntegrandShape, from: f64, q: &VolumeQuadrature) -> Result<f64> {
    let from = from.max(shape.lo);
    if from >= shape.hi {
        return Ok(f64::NEG_INFINITY);
    }
    let reference = if from > shape.peak_at { ln_integrand(model, from) } else { shape.peak };
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: q.rel_tol,
        initial_panels: q.initial_panels,
        max_panels: 4000,
    };
    let g = |v: f64| (ln_integrand(model, v) - reference).exp();
    let mut value = 0.0;
    let mut err = 0.0;
    let mut pieces = vec![];
    if from < shape.peak_at {
        pieces.push((from, shape.peak_at));
        pieces.push((shape.peak_at, shape.hi));
    } else {
        pieces.push((from, shape.hi));
    }
    for (a, b) in pieces {
        let r = integrate(g, a, b, &opts);
        value += r.value;
        err += r.abs_error;
    }
    if !(value > 0.0) {
        return Err(Error::Quadrature {
            rel_error: f64::INFINITY,
            tolerance: QUADRATURE_TOLERANCE,
        });
    }
    // Error of ln I is the relative error of I.
    let rel = err / value;
    if rel > QUADRATURE_TOLERANCE {
        return Err(Error::Quadrature {
            rel_error: rel,
            tolerance: QUADRATURE_TOLERANCE,
        });
    }
    Ok(reference + value.ln())
}

/// Semianalytic lower bound on the body volume and the resulting `gamma`.
pub fn log_volume_lower_bound(model: &ExtremeValueModel) -> Result<VolumeEstimate> {
    log_volume_lower_bound_with(model, &VolumeQuadrature::default())
}

pub fn log_volume_lower_bound_with(model: &ExtremeValueModel, q: &VolumeQuadrature) -> Result<VolumeEstimate> {
    if model.n_symbols < 2 {
        return domain("log_volume_lower_bound needs N >= 2");
    }
    let shape = integrand_shape(model);
    let ln_int = ln_volume_integral(model, &shape, 0.0, q)?;
    let d = model.domain().body_dimension(model.n_symbols);
    let lv = log_unit_ball_volume(d)?.ln() + ln_int;
    Ok(VolumeEstimate::from_log_volume(
        model.domain(),
        model.n_symbols,
        LogValue::from_ln(lv),
        EstimateMethod::Analytic,
        None,
    ))
}

/// Location of the integrand maximum (`v` with the largest contribution).
pub fn integrand_argmax(model: &ExtremeValueModel) -> f64 {
    integrand_shape(model).peak_at
}

/// The integrand normalized to its maximum over `grid`.
pub fn integrand_profile(model: &ExtremeValueModel, grid: &[f64]) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return domain("integrand_profile needs a non-empty grid");
    }
    if grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return domain("integrand_profile grid must be positive and strictly increasing");
    }
    let logs: Vec<f64> = grid.iter().map(|&v| ln_integrand(model, v)).collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(logs.into_iter().map(|l| (l - max).exp()).collect())
}

/// `gamma` when directions whose peak falls in the lowest `q` of the maxima
/// law are discarded, for each `q` of `quantile_grid`.
///
/// `1 / q` at the point where the curve flattens estimates the number of
/// Monte Carlo vectors needed for convergence.
pub fn truncated_gamma_curve(model: &ExtremeValueModel, quantile_grid: &[f64]) -> Result<Vec<f64>> {
    if model.n_symbols < 2 {
        return domain("truncated_gamma_curve needs N >= 2");
    }
    if quantile_grid.iter().any(|&q| !(q > 0.0 && q < 1.0)) || quantile_grid.windows(2).any(|w| w[1] <= w[0]) {
        return domain("quantiles must be increasing and inside (0, 1)");
    }
    let shape = integrand_shape(model);
    let q = VolumeQuadrature::default();
    let d = model.domain().body_dimension(model.n_symbols);
    let lvu = log_unit_ball_volume(d)?.ln();
    quantile_grid
        .iter()
        .map(|&p| {
            let from = model.quantile_ln(p.ln());
            let mut s = shape;
            if from >= shape.hi {
                // Entire retained range lies above the located window.
                s.hi = extend_upper(model, from);
            }
            let ln_int = ln_volume_integral(model, &s, from, &q)?;
            Ok(model.domain().gamma_from_log_volume(model.n_symbols, lvu + ln_int))
        })
        .collect()
}

fn extend_upper(model: &ExtremeValueModel, from: f64) -> f64 {
    let start = ln_integrand(model, from);
    let step = from.max(0.5);
    let mut hi = from + step;
    while ln_integrand(model, hi) > start - RANGE_DROP {
        hi += step;
    }
    hi
}

/// Smallest discard probability whose truncated `gamma` stays within
/// `rel_drop` of the untruncated value, searched over `10^{-k/4}`.
/// Its reciprocal is the predicted vector budget.
pub fn predicted_sample_budget(model: &ExtremeValueModel, rel_drop: f64) -> Result<f64> {
    let grid: Vec<f64> = (1..=160).rev().map(|k| 10f64.powf(-(k as f64) / 4.0)).collect();
    let full = log_volume_lower_bound(model)?.gamma;
    let curve = truncated_gamma_curve(model, &grid)?;
    let mut best = grid[0];
    for (&q, &g) in grid.iter().zip(&curve) {
        if g >= full * (1.0 - rel_drop) {
            best = q;
        } else {
            break;
        }
    }
    Ok(1.0 / best)
}

/// Average- and peak-limited capacity curves over an SNR grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub domain: Domain,
    pub snr_grid: Vec<f64>,
    /// Average-power-limited capacity, bits per Nyquist interval.
    pub apl_capacity: Vec<f64>,
    /// Entropy-power lower bound for the peak-limited channel.
    pub ppl_lower_bound: Vec<f64>,
    pub gamma_used: f64,
}

/// Capacity curves for `channel.domain` with power efficiency `gamma`.
pub fn capacity_lower_bound(channel: &ChannelModel, gamma: f64, snr_grid: &[f64]) -> Result<BoundCurve> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return domain(format!("gamma must lie in (0, 1], got {gamma}"));
    }
    if snr_grid.iter().any(|&s| !(s > 0.0)) {
        return domain("SNR grid must be positive");
    }
    let scale = match channel.domain {
        Domain::Real => 0.5,
        Domain::Complex => 1.0,
    };
    let cap = |snr: f64| scale * snr.ln_1p() / std::f64::consts::LN_2;
    Ok(BoundCurve {
        domain: channel.domain,
        snr_grid: snr_grid.to_vec(),
        apl_capacity: snr_grid.iter().map(|&s| cap(s)).collect(),
        ppl_lower_bound: snr_grid.iter().map(|&s| cap(gamma * s)).collect(),
        gamma_used: gamma,
    })
}

impl BoundCurve {
    /// `apl - ppl` approaches this as the SNR grows.
    pub fn high_snr_gap(&self) -> f64 {
        let scale = match self.domain {
            Domain::Real => 0.5,
            Domain::Complex => 1.0,
        };
        scale * (1.0 / self.gamma_used).log2()
    }
}
