//! Monte Carlo estimation of the peak-limited body volume.
//!
//! Each vector contributes `c = ln(V_d r^d)` for a Gaussian direction, or the
//! reweighted `N ln 2 + N ln(r / L_c)` (real) and `N ln pi + 2N ln(r / L_c)`
//! (complex) for a draw that is uniform in the cube or polydisc. The volume
//! estimate is the mean of `e^c`, accumulated in the log domain.
//!
//! Vector `i` always uses random substream `i`, and vectors are grouped into
//! fixed blocks whose summaries are folded in index order, so a run is
//! bit-for-bit reproducible whatever the number of workers.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::{predicted_sample_budget, EstimateMethod, VolumeEstimate};
use crate::error::{domain, Result};
use crate::extreme::ExtremeValueModel;
use crate::math::{log_sub_exp, log_sum_exp, log_unit_ball_volume, LogValue, StreamingLogMean, LN_PI};
use crate::rng::{derive_seed, substream};
use crate::signal::{uniform_in_disk, Interpolator};
use crate::{par, Domain};

/// Vectors per accumulation chunk.
pub const CHUNK: usize = 1 << 16;
/// Smallest accepted simulation count.
pub const MIN_SIMS: usize = 1000;
pub const DEFAULT_TOP_K: usize = 1000;
/// Discard levels reported in the robustness curve.
pub const DISCARD_LEVELS: [usize; 11] = [0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000];
/// Relative drop of the truncated analytic `gamma` that defines the
/// predicted vector budget.
pub const BUDGET_REL_DROP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampler {
    GaussianDirection,
    #[default]
    ImportanceUniform,
}

impl std::str::FromStr for Sampler {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" | "gaussian-direction" => Ok(Sampler::GaussianDirection),
            "importance" | "importance-uniform" => Ok(Sampler::ImportanceUniform),
            other => domain(format!("unknown sampler '{other}'")),
        }
    }
}

impl std::fmt::Display for Sampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sampler::GaussianDirection => "gaussian-direction",
            Sampler::ImportanceUniform => "importance-uniform",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub domain: Domain,
    pub n_symbols: usize,
    pub oversample: usize,
    pub n_sim: usize,
    pub sampler: Sampler,
    pub seed: u64,
    pub top_k_tracked: usize,
    pub checkpoint_schedule: Vec<usize>,
    /// Stop after roughly this many seconds and report a partial result.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_clock_budget: Option<f64>,
}

impl McConfig {
    /// Configuration with the default top-k size and power-of-ten checkpoints.
    pub fn new(domain: Domain, n_symbols: usize, oversample: usize, n_sim: usize, sampler: Sampler, seed: u64) -> Self {
        Self {
            domain,
            n_symbols,
            oversample,
            n_sim,
            sampler,
            seed,
            top_k_tracked: DEFAULT_TOP_K.min(n_sim),
            checkpoint_schedule: default_checkpoints(n_sim),
            wall_clock_budget: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_symbols < 1 {
            return domain("N must be at least 1");
        }
        if self.oversample < 1 {
            return domain("oversample must be at least 1");
        }
        if self.n_sim < MIN_SIMS {
            return domain(format!("n_sim must be at least {MIN_SIMS}, got {}", self.n_sim));
        }
        if self.top_k_tracked > self.n_sim {
            return domain("top_k_tracked cannot exceed n_sim");
        }
        let cps = &self.checkpoint_schedule;
        if cps.is_empty() || cps[0] == 0 || cps.windows(2).any(|w| w[1] <= w[0]) || *cps.last().unwrap() != self.n_sim {
            return domain("checkpoint schedule must be positive, increasing and end at n_sim");
        }
        if let Some(b) = self.wall_clock_budget {
            if !(b > 0.0) {
                return domain("wall-clock budget must be positive");
            }
        }
        if self.oversample > 1 && self.n_symbols > 1 {
            // Validates the waveform length.
            Interpolator::new(self.n_symbols, self.oversample)?;
        }
        Ok(())
    }

    fn constrains_samples_only(&self) -> bool {
        self.oversample == 1 || self.n_symbols == 1
    }
}

/// Powers of ten below `n_sim`, then `n_sim`.
pub fn default_checkpoints(n_sim: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 10usize;
    while p < n_sim {
        out.push(p);
        p = match p.checked_mul(10) {
            Some(v) => v,
            None => break,
        };
    }
    out.push(n_sim);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub config: McConfig,
    pub estimate: VolumeEstimate,
    /// `(vectors so far, gamma)` at each reached checkpoint.
    pub convergence_trace: Vec<(usize, f64)>,
    /// Largest per-vector log-contributions, descending.
    pub top_contributions: Vec<f64>,
    /// `(k, gamma)` with the `k` largest contributions removed.
    pub discard_curve: Vec<(usize, f64)>,
    pub completed_sims: usize,
    /// Stopped early by the wall-clock budget.
    pub partial: bool,
    /// All contributions were identical, so the sample variance is exactly 0.
    pub zero_variance: bool,
    /// Predicted vector budget from the truncated analytic curve.
    pub predicted_budget: Option<f64>,
    /// Fewer vectors than the predicted budget were simulated.
    pub likely_underestimate: bool,
    /// Excluded from comparisons of reproducibility.
    pub wall_seconds: f64,
}

impl McResult {
    pub fn gamma(&self) -> f64 {
        self.estimate.gamma
    }

    pub fn gamma_stderr(&self) -> f64 {
        self.estimate.uncertainty.unwrap_or(f64::NAN)
    }

    /// Serialized result with timing removed; identical across worker counts.
    pub fn canonical_json(&self) -> Result<String> {
        let mut copy = self.clone();
        copy.wall_seconds = 0.0;
        copy.config.wall_clock_budget = None;
        Ok(serde_json::to_string(&copy)?)
    }

    /// Export document: echoed configuration, headline numbers and traces.
    pub fn report(&self) -> McReport {
        McReport {
            config: self.config.clone(),
            gamma: self.estimate.gamma,
            gamma_stderr: self.gamma_stderr(),
            log_volume: self.estimate.log_volume.ln(),
            log_volume_per_dim: self.estimate.log_volume_per_dim(),
            convergence_trace: self.convergence_trace.clone(),
            discard_curve: self.discard_curve.clone(),
            wall_seconds: self.wall_seconds,
            completed_sims: self.completed_sims,
            partial: self.partial,
            zero_variance: self.zero_variance,
            predicted_budget: self.predicted_budget,
            likely_underestimate: self.likely_underestimate,
        }
    }

    /// Convergence trace as CSV with header `n_sim,gamma`.
    pub fn convergence_csv(&self) -> crate::export::CsvTable {
        let mut t = crate::export::CsvTable::new(&["n_sim", "gamma"]);
        for &(n, g) in &self.convergence_trace {
            t.push_row(vec![n.to_string(), crate::export::fmt_f64(g)]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub config: McConfig,
    pub gamma: f64,
    pub gamma_stderr: f64,
    pub log_volume: f64,
    pub log_volume_per_dim: f64,
    pub convergence_trace: Vec<(usize, f64)>,
    pub discard_curve: Vec<(usize, f64)>,
    pub wall_seconds: f64,
    pub completed_sims: usize,
    pub partial: bool,
    pub zero_variance: bool,
    pub predicted_budget: Option<f64>,
    pub likely_underestimate: bool,
}

/// Per-worker buffers and transform plans.
struct Worker {
    interp: Option<Interpolator>,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<Complex64>,
}

impl Worker {
    fn new(cfg: &McConfig) -> Self {
        let interp = if cfg.constrains_samples_only() {
            None
        } else {
            Interpolator::new(cfg.n_symbols, cfg.oversample).ok()
        };
        Self {
            interp,
            a: vec![0.0; cfg.n_symbols],
            b: vec![0.0; cfg.n_symbols],
            c: vec![Complex64::default(); cfg.n_symbols],
        }
    }
}

/// Summary of a contiguous range of vectors.
#[derive(Debug, Clone)]
struct BlockSummary {
    acc: StreamingLogMean,
    top: Vec<f64>,
    min: f64,
    max: f64,
}

impl BlockSummary {
    fn empty() -> Self {
        Self {
            acc: StreamingLogMean::new(),
            top: Vec::new(),
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    fn merge(&mut self, other: &BlockSummary, k: usize) {
        self.acc.merge(&other.acc);
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
        let mut all = std::mem::take(&mut self.top);
        all.extend_from_slice(&other.top);
        all.sort_by(|x, y| y.total_cmp(x));
        all.truncate(k);
        self.top = all;
    }
}

/// Bounded min-heap keeping the `k` largest values.
struct TopK {
    k: usize,
    heap: BinaryHeap<Reverse<OrdF64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl TopK {
    fn new(k: usize) -> Self {
        Self {
            k,
            heap: BinaryHeap::with_capacity(k + 1),
        }
    }

    #[inline]
    fn push(&mut self, x: f64) {
        if self.k == 0 {
            return;
        }
        if self.heap.len() < self.k {
            self.heap.push(Reverse(OrdF64(x)));
        } else if let Some(Reverse(OrdF64(smallest))) = self.heap.peek() {
            if x > *smallest {
                self.heap.pop();
                self.heap.push(Reverse(OrdF64(x)));
            }
        }
    }

    fn into_sorted_desc(self) -> Vec<f64> {
        let mut v: Vec<f64> = self.heap.into_iter().map(|Reverse(OrdF64(x))| x).collect();
        v.sort_by(|x, y| y.total_cmp(x));
        v
    }
}

/// Constant part of each contribution.
fn log_offset(cfg: &McConfig) -> f64 {
    let n = cfg.n_symbols as f64;
    match (cfg.sampler, cfg.domain) {
        (Sampler::GaussianDirection, d) => log_unit_ball_volume(d.body_dimension(cfg.n_symbols))
            .map(LogValue::ln)
            .unwrap_or(f64::NAN),
        (Sampler::ImportanceUniform, Domain::Real) => n * std::f64::consts::LN_2,
        (Sampler::ImportanceUniform, Domain::Complex) => n * LN_PI,
    }
}

fn fill_real<R: Rng>(buf: &mut [f64], sampler: Sampler, rng: &mut R) {
    match sampler {
        Sampler::GaussianDirection => buf.iter_mut().for_each(|x| *x = rng.sample(StandardNormal)),
        Sampler::ImportanceUniform => buf.iter_mut().for_each(|x| *x = rng.random_range(-1.0..=1.0)),
    }
}

fn fill_complex<R: Rng>(buf: &mut [Complex64], sampler: Sampler, rng: &mut R) {
    match sampler {
        Sampler::GaussianDirection => buf.iter_mut().for_each(|x| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *x = Complex64::new(re * std::f64::consts::FRAC_1_SQRT_2, im * std::f64::consts::FRAC_1_SQRT_2);
        }),
        Sampler::ImportanceUniform => buf.iter_mut().for_each(|x| *x = uniform_in_disk(rng)),
    }
}

/// Log-contribution from a draw's norm, sample peak and continuous peak.
#[inline]
fn contribution(cfg: &McConfig, offset: f64, norm: f64, sample_peak: f64, peak: f64) -> f64 {
    let n = cfg.n_symbols as f64;
    match (cfg.sampler, cfg.domain) {
        (Sampler::GaussianDirection, d) => offset + d.body_dimension(cfg.n_symbols) as f64 * (norm / peak).ln(),
        (Sampler::ImportanceUniform, Domain::Real) => {
            if peak == sample_peak {
                offset
            } else {
                offset + n * (sample_peak / peak).ln()
            }
        }
        (Sampler::ImportanceUniform, Domain::Complex) => {
            if peak == sample_peak {
                offset
            } else {
                offset + 2.0 * n * (sample_peak / peak).ln()
            }
        }
    }
}

fn norm_real(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn peak_real(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

fn run_block(cfg: &McConfig, offset: f64, w: &mut Worker, start: usize, end: usize) -> BlockSummary {
    let mut acc = StreamingLogMean::new();
    let mut top = TopK::new(cfg.top_k_tracked);
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut record = |c: f64| {
        acc.push_ln(c);
        top.push(c);
        min = min.min(c);
        max = max.max(c);
    };
    match cfg.domain {
        Domain::Real => {
            // Real vectors go through the transform in pairs.
            let mut i = start;
            while i < end {
                fill_real(&mut w.a, cfg.sampler, &mut substream(cfg.seed, i as u64));
                let pair = i + 1 < end;
                if pair {
                    fill_real(&mut w.b, cfg.sampler, &mut substream(cfg.seed, i as u64 + 1));
                }
                let (sa, sb) = (peak_real(&w.a), peak_real(&w.b));
                let (pa, pb) = match w.interp.as_mut() {
                    None => (sa, sb),
                    Some(interp) if pair => interp.real_pair_peaks(&w.a, &w.b),
                    Some(interp) => {
                        for (c, &x) in w.c.iter_mut().zip(&w.a) {
                            *c = Complex64::new(x, 0.0);
                        }
                        (interp.peak(&w.c, Domain::Real), 0.0)
                    }
                };
                record(contribution(cfg, offset, norm_real(&w.a), sa, pa));
                if pair {
                    record(contribution(cfg, offset, norm_real(&w.b), sb, pb));
                }
                i += if pair { 2 } else { 1 };
            }
        }
        Domain::Complex => {
            for i in start..end {
                fill_complex(&mut w.c, cfg.sampler, &mut substream(cfg.seed, i as u64));
                let sp = w.c.iter().map(|c| c.norm()).fold(0.0, f64::max);
                let norm = w.c.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                let p = match w.interp.as_mut() {
                    None => sp,
                    Some(interp) => interp.peak(&w.c, Domain::Complex),
                };
                record(contribution(cfg, offset, norm, sp, p));
            }
        }
    }
    BlockSummary {
        acc,
        top: top.into_sorted_desc(),
        min,
        max,
    }
}

/// Block boundaries: chunk multiples plus checkpoints.
fn block_bounds(cfg: &McConfig) -> Vec<(usize, usize)> {
    let mut cuts: Vec<usize> = (1..)
        .map(|j| j * CHUNK)
        .take_while(|&c| c < cfg.n_sim)
        .chain(cfg.checkpoint_schedule.iter().copied())
        .collect();
    cuts.push(0);
    cuts.sort_unstable();
    cuts.dedup();
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

fn gamma_of(cfg: &McConfig, log_mean: f64) -> f64 {
    cfg.domain.gamma_from_log_volume(cfg.n_symbols, log_mean)
}

/// Runs the simulation on the global worker pool.
pub fn estimate_volume_mc(config: &McConfig) -> Result<McResult> {
    estimate_volume_mc_with_workers(config, None)
}

/// Runs the simulation with at most `workers` threads.
pub fn estimate_volume_mc_with_workers(config: &McConfig, workers: Option<usize>) -> Result<McResult> {
    config.validate()?;
    let clock = Clock::start();
    let cfg = config;
    let offset = log_offset(cfg);
    let blocks = block_bounds(cfg);
    let wave = match cfg.wall_clock_budget {
        Some(_) => 32,
        None => blocks.len(),
    };

    let mut total = BlockSummary::empty();
    let mut trace = Vec::new();
    let mut done = 0usize;
    let mut next_cp = 0usize;
    let mut partial = false;
    for wave_blocks in blocks.chunks(wave) {
        let summaries = par::with_workers(workers, || {
            par::map_indexed(wave_blocks.len(), || Worker::new(cfg), |w, j| {
                let (s, e) = wave_blocks[j];
                run_block(cfg, offset, w, s, e)
            })
        });
        for (summary, &(_, end)) in summaries.iter().zip(wave_blocks) {
            total.merge(summary, cfg.top_k_tracked);
            done = end;
            if next_cp < cfg.checkpoint_schedule.len() && cfg.checkpoint_schedule[next_cp] == end {
                let lm = total.acc.log_mean().map(LogValue::ln).unwrap_or(f64::NEG_INFINITY);
                trace.push((end, gamma_of(cfg, lm)));
                next_cp += 1;
            }
        }
        if done < cfg.n_sim {
            if let (Some(budget), Some(elapsed)) = (cfg.wall_clock_budget, clock.elapsed()) {
                if elapsed >= budget {
                    partial = true;
                    break;
                }
            }
        }
    }

    let log_mean = total.acc.log_mean().map(LogValue::ln).unwrap_or(f64::NEG_INFINITY);
    let gamma = gamma_of(cfg, log_mean);
    if trace.last().map(|t| t.0) != Some(done) {
        trace.push((done, gamma));
    }
    let zero_variance = total.min == total.max;
    let rel_var = if zero_variance {
        0.0
    } else {
        total.acc.relative_variance_of_mean().unwrap_or(f64::NAN)
    };
    let stderr = gamma * cfg.domain.gamma_exponent() / cfg.n_symbols as f64 * rel_var.sqrt();
    let estimate = VolumeEstimate::from_log_volume(
        cfg.domain,
        cfg.n_symbols,
        LogValue::from_ln(log_mean),
        EstimateMethod::MonteCarlo,
        Some(stderr),
    );
    let discard_curve = discard_curve_from(cfg, &total.acc, &total.top, gamma);
    let predicted_budget = if zero_variance && cfg.constrains_samples_only() {
        None
    } else {
        predicted_budget_for(cfg)
    };
    Ok(McResult {
        config: cfg.clone(),
        estimate,
        convergence_trace: trace,
        top_contributions: total.top,
        discard_curve,
        completed_sims: done,
        partial,
        zero_variance,
        predicted_budget,
        likely_underestimate: predicted_budget.is_some_and(|b| (done as f64) < b),
        wall_seconds: clock.elapsed().unwrap_or(0.0),
    })
}

fn predicted_budget_for(cfg: &McConfig) -> Option<f64> {
    if cfg.n_symbols < 2 {
        return None;
    }
    let model = if cfg.constrains_samples_only() {
        ExtremeValueModel::discrete(cfg.domain, cfg.n_symbols)
    } else {
        ExtremeValueModel::continuous_default(cfg.domain, cfg.n_symbols)
    };
    model.and_then(|m| predicted_sample_budget(&m, BUDGET_REL_DROP)).ok()
}

fn discard_gamma(cfg: &McConfig, acc: &StreamingLogMean, top: &[f64], k: usize) -> f64 {
    let n = acc.count() as usize;
    if k == 0 {
        let lm = acc.log_mean().map(LogValue::ln).unwrap_or(f64::NEG_INFINITY);
        return gamma_of(cfg, lm);
    }
    if k >= n {
        return 0.0;
    }
    let removed = log_sum_exp(&top[..k]);
    match log_sub_exp(acc.log_sum(), removed) {
        Some(rest) => gamma_of(cfg, rest - ((n - k) as f64).ln()),
        None => 0.0,
    }
}

fn discard_curve_from(cfg: &McConfig, acc: &StreamingLogMean, top: &[f64], gamma: f64) -> Vec<(usize, f64)> {
    let mut out = vec![(0, gamma)];
    let mut running = gamma;
    for &k in DISCARD_LEVELS.iter().skip(1).filter(|&&k| k <= top.len()) {
        // Removing the largest terms cannot raise the mean; clamp rounding.
        running = running.min(discard_gamma(cfg, acc, top, k));
        out.push((k, running));
    }
    out
}

/// `gamma` with the `k` largest contributions removed.
pub fn discard_topk(result: &McResult, k: usize) -> Result<f64> {
    if k > result.config.top_k_tracked || k > result.top_contributions.len() {
        return domain(format!(
            "cannot discard {k} contributions; only {} are tracked",
            result.top_contributions.len()
        ));
    }
    if k == 0 {
        return Ok(result.estimate.gamma);
    }
    let n = result.completed_sims;
    if k >= n {
        return Ok(0.0);
    }
    // Reconstruct the log-sum from the stored mean.
    let log_sum = result.estimate.log_volume.ln() + (n as f64).ln();
    let removed = log_sum_exp(&result.top_contributions[..k]);
    Ok(match log_sub_exp(log_sum, removed) {
        Some(rest) => gamma_of(&result.config, rest - ((n - k) as f64).ln()).min(result.estimate.gamma),
        None => 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n_symbols: usize,
    pub gamma: f64,
    pub stderr: f64,
    pub likely_underestimate: bool,
}

/// Runs `base` for each `N` with a seed derived from the base seed and `N`.
pub fn gamma_vs_n_sweep(base: &McConfig, n_values: &[usize], workers: Option<usize>) -> Result<Vec<SweepPoint>> {
    n_values
        .iter()
        .map(|&n| {
            let mut cfg = base.clone();
            cfg.n_symbols = n;
            cfg.seed = derive_seed(base.seed, n as u64);
            let r = estimate_volume_mc_with_workers(&cfg, workers)?;
            Ok(SweepPoint {
                n_symbols: n,
                gamma: r.gamma(),
                stderr: r.gamma_stderr(),
                likely_underestimate: r.likely_underestimate,
            })
        })
        .collect()
}

/// Wall clock; unavailable on targets without a system clock.
struct Clock {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Clock {
    fn start() -> Self {
        Self {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    fn elapsed(&self) -> Option<f64> {
        #[cfg(not(target_arch = "wasm32"))]
        {
            Some(self.start.elapsed().as_secs_f64())
        }
        #[cfg(target_arch = "wasm32")]
        {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::sampled_only_upper_bound;

    #[test]
    fn checkpoints_default_to_powers_of_ten() {
        assert_eq!(default_checkpoints(1000), vec![10, 100, 1000]);
        assert_eq!(default_checkpoints(2500), vec![10, 100, 1000, 2500]);
    }

    #[test]
    fn config_validation() {
        let ok = McConfig::new(Domain::Real, 11, 4, 1000, Sampler::ImportanceUniform, 1);
        assert!(ok.validate().is_ok());
        let mut c = ok.clone();
        c.n_sim = 0;
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.checkpoint_schedule = vec![100, 50, 1000];
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.checkpoint_schedule = vec![100];
        assert!(c.validate().is_err());
        let mut c = ok.clone();
        c.top_k_tracked = 2000;
        assert!(c.validate().is_err());
        let mut c = ok;
        c.oversample = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn blocks_cover_range_and_hit_checkpoints() {
        let mut c = McConfig::new(Domain::Real, 5, 1, 200_000, Sampler::ImportanceUniform, 1);
        c.checkpoint_schedule = vec![1000, 70_000, 200_000];
        let b = block_bounds(&c);
        assert_eq!(b.first().unwrap().0, 0);
        assert_eq!(b.last().unwrap().1, 200_000);
        assert!(b.windows(2).all(|w| w[0].1 == w[1].0));
        for cp in [1000, 70_000, CHUNK, 2 * CHUNK] {
            assert!(b.iter().any(|&(_, e)| e == cp));
        }
    }

    #[test]
    fn sample_only_anchors_are_exact() {
        for (d, n) in [(Domain::Real, 11usize), (Domain::Complex, 51)] {
            let r = estimate_volume_mc(&McConfig::new(d, n, 1, 2000, Sampler::ImportanceUniform, 9)).unwrap();
            let target = sampled_only_upper_bound(d);
            assert!((r.gamma() / target - 1.0).abs() < 1e-12);
            assert!(r.zero_variance);
            assert_eq!(r.gamma_stderr(), 0.0);
            assert!(!r.likely_underestimate);
        }
    }

    #[test]
    fn topk_keeps_largest() {
        let mut t = TopK::new(3);
        for x in [5.0, 1.0, 9.0, -2.0, 7.0, 3.0] {
            t.push(x);
        }
        assert_eq!(t.into_sorted_desc(), vec![9.0, 7.0, 5.0]);
    }

    #[test]
    fn discard_curve_properties() {
        let mut cfg = McConfig::new(Domain::Real, 21, 8, 4000, Sampler::ImportanceUniform, 4);
        cfg.top_k_tracked = 100;
        let r = estimate_volume_mc(&cfg).unwrap();
        assert_eq!(r.discard_curve[0], (0, r.gamma()));
        assert!(r.discard_curve.windows(2).all(|w| w[1].1 <= w[0].1));
        assert_eq!(r.convergence_trace.last().unwrap().1, r.gamma());
        assert_eq!(discard_topk(&r, 0).unwrap(), r.gamma());
        let g10 = discard_topk(&r, 10).unwrap();
        let from_curve = r.discard_curve.iter().find(|p| p.0 == 10).unwrap().1;
        assert!((g10 - from_curve).abs() < 1e-9 * from_curve);
        assert!(discard_topk(&r, 101).is_err());
        assert!(r.top_contributions.windows(2).all(|w| w[0] >= w[1]));
        assert_eq!(r.top_contributions.len(), 100);
    }

    #[test]
    fn odd_counts_and_single_symbol() {
        let mut cfg = McConfig::new(Domain::Real, 7, 4, 1001, Sampler::GaussianDirection, 2);
        cfg.checkpoint_schedule = vec![333, 1001];
        let r = estimate_volume_mc(&cfg).unwrap();
        assert_eq!(r.completed_sims, 1001);
        assert_eq!(r.convergence_trace.len(), 2);
        let r = estimate_volume_mc(&McConfig::new(Domain::Real, 1, 30, 1000, Sampler::ImportanceUniform, 2)).unwrap();
        assert!((r.gamma() / sampled_only_upper_bound(Domain::Real) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pairing_matches_single_transforms() {
        // A pair and the same two vectors processed one at a time.
        let cfg = McConfig::new(Domain::Real, 13, 6, 1000, Sampler::ImportanceUniform, 5);
        let offset = log_offset(&cfg);
        let mut w = Worker::new(&cfg);
        let both = run_block(&cfg, offset, &mut w, 10, 12);
        let one = run_block(&cfg, offset, &mut w, 10, 11);
        let two = run_block(&cfg, offset, &mut w, 11, 12);
        let mut singles = [one.max, two.max];
        singles.sort_by(|a, b| b.total_cmp(a));
        for (x, y) in both.top.iter().zip(&singles) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}
