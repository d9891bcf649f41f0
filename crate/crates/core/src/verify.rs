//! Self-check suites: exact anchors, statistical model checks and
//! structural invariants. Each check records the measured value next to its
//! tolerance.

use rand::Rng;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::bounds::{capacity_lower_bound, log_volume_lower_bound, sampled_only_upper_bound, ChannelModel};
use crate::error::Result;
use crate::extreme::{
    calibrate_alpha, conditional_moment_table, simulate_maxima, sup_distance, ExtremeValueModel,
};
use crate::mc::{estimate_volume_mc, estimate_volume_mc_with_workers, McConfig, Sampler};
use crate::rng::substream;
use crate::signal::{bandlimit_interpolate, draw_gaussian_direction, Interpolator, SignalVector};
use crate::Domain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Anchors,
    Stats,
    Invariants,
}

impl std::str::FromStr for Suite {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "anchors" => Ok(Suite::Anchors),
            "stats" => Ok(Suite::Stats),
            "invariants" => Ok(Suite::Invariants),
            other => crate::error::domain(format!("unknown suite '{other}'")),
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Suite::Anchors => "anchors",
            Suite::Stats => "stats",
            Suite::Invariants => "invariants",
        })
    }
}

/// Simulation sizes for the statistical suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Budget {
    #[default]
    Desk,
    Full,
}

impl std::str::FromStr for Budget {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Budget::Desk),
            "full" => Ok(Budget::Full),
            other => crate::error::domain(format!("unknown budget '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    pub budget: Budget,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    /// Passes when `measured <= tolerance`.
    fn at_most(name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
            detail: detail.into(),
        }
    }

    fn boolean(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            measured: if ok { 1.0 } else { 0.0 },
            tolerance: 1.0,
            passed: ok,
            detail: detail.into(),
        }
    }

    fn failed(name: &str, err: &crate::Error) -> Self {
        Self {
            name: name.into(),
            measured: f64::NAN,
            tolerance: f64::NAN,
            passed: false,
            detail: format!("error: {err}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("suite {}\n", self.suite);
        for c in &self.checks {
            out.push_str(&format!(
                "{} {} measured={} tolerance={} {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                crate::export::fmt_f64(c.measured),
                crate::export::fmt_f64(c.tolerance),
                c.detail
            ));
        }
        out.push_str(if self.passed() { "result PASS\n" } else { "result FAIL\n" });
        out
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> VerifyReport {
    let checks = match suite {
        Suite::Anchors => anchors(opts),
        Suite::Stats => stats(opts),
        Suite::Invariants => invariants(opts),
    };
    VerifyReport { suite, checks }
}

fn push(checks: &mut Vec<Check>, name: &str, r: Result<Check>) {
    checks.push(r.unwrap_or_else(|e| Check::failed(name, &e)));
}

fn anchors(opts: &VerifyOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    for d in [Domain::Real, Domain::Complex] {
        for n in [11usize, 51, 101] {
            let name = format!("sample-only-{d}-n{n}");
            push(&mut checks, &name, (|| {
                let r = estimate_volume_mc(&McConfig::new(d, n, 1, 1000, Sampler::ImportanceUniform, opts.seed))?;
                let rel = (r.gamma() / sampled_only_upper_bound(d) - 1.0).abs();
                let mut c = Check::at_most(&name, rel, 1e-9, format!("gamma={}", r.gamma()));
                if !r.zero_variance {
                    c.passed = false;
                    c.detail.push_str(" nonzero variance");
                }
                Ok(c)
            })());
        }
    }
    let real = sampled_only_upper_bound(Domain::Real);
    checks.push(Check::at_most(
        "constant-2-over-pi-e",
        (real - 2.0 / (std::f64::consts::PI * std::f64::consts::E)).abs(),
        1e-15,
        "",
    ));
    let cplx = sampled_only_upper_bound(Domain::Complex);
    checks.push(Check::at_most("constant-1-over-e", (cplx - (-1.0f64).exp()).abs(), 1e-15, ""));
    let draws = match opts.budget {
        Budget::Desk => 100_000,
        Budget::Full => 1_000_000,
    };
    push(&mut checks, "cube-volume-gaussian-n8", (|| {
        let r = estimate_volume_mc(&McConfig::new(Domain::Real, 8, 1, draws, Sampler::GaussianDirection, opts.seed))?;
        let z = (r.gamma() - real).abs() / r.gamma_stderr();
        Ok(Check::at_most(
            "cube-volume-gaussian-n8",
            z,
            3.0,
            format!("gamma={} stderr={}", r.gamma(), r.gamma_stderr()),
        ))
    })());
    checks
}

/// Smallest tuple count for a conditional-moment bin to be compared.
pub const MIN_BIN_TUPLES: u64 = 1000;

fn stats(opts: &VerifyOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    let (tuples, maxima_trials, alpha_trials) = match opts.budget {
        Budget::Desk => (1_000_000, 20_000, 20_000),
        Budget::Full => (1_000_000, 100_000, 100_000),
    };
    for (d, range, bins) in [(Domain::Real, (1.5, 4.0), 25usize), (Domain::Complex, (2.0, 12.0), 40)] {
        let name = format!("truncated-moment-{d}");
        push(&mut checks, &name, (|| {
            let table = conditional_moment_table(d, 100, tuples, opts.seed, range, bins)?;
            let used: Vec<_> = table.iter().filter(|b| b.tuples >= MIN_BIN_TUPLES).collect();
            let worst = used.iter().map(|b| b.rel_error()).fold(0.0, f64::max);
            let mut c = Check::at_most(&name, worst, 0.02, format!("{} populated bins", used.len()));
            if used.len() < 10 {
                c.passed = false;
            }
            Ok(c)
        })());
    }
    for d in [Domain::Real, Domain::Complex] {
        let name = format!("discrete-maxima-{d}");
        push(&mut checks, &name, (|| {
            let mut m = simulate_maxima(101, 1, d, maxima_trials, opts.seed)?;
            m.sort_by(f64::total_cmp);
            let law = ExtremeValueModel::discrete(d, 101)?;
            let dist = sup_distance(&m, |v| law.ln_cdf(v).exp());
            Ok(Check::at_most(&name, dist, 0.02, ""))
        })());
    }
    push(&mut checks, "alpha-fit-real-n1001", (|| {
        let fit = calibrate_alpha(1001, 30, Domain::Real, alpha_trials, opts.seed)?;
        let mut c = Check::at_most("alpha-fit-real-n1001", fit.sup_distance, 0.02, format!("alpha={}", fit.alpha));
        if !(2.6..=3.0).contains(&fit.alpha) {
            c.passed = false;
        }
        Ok(c)
    })());
    checks
}

fn invariants(opts: &VerifyOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    for d in [Domain::Real, Domain::Complex] {
        let name = format!("convexity-{d}");
        push(&mut checks, &name, convexity(d, 21, 30, 1000, opts.seed).map(|w| {
            Check::at_most(&name, w, 1.0 + 1e-12, "largest peak of 1000 combinations of surface points")
        }));
    }
    push(&mut checks, "interpolation-exactness", interpolation_exactness(opts.seed).map(|e| {
        Check::at_most("interpolation-exactness", e, 1e-12, "max decimation error")
    }));
    push(&mut checks, "spectral-confinement", spectral_confinement(opts.seed).map(|e| {
        Check::at_most("spectral-confinement", e, 1e-10, "out-of-band energy fraction")
    }));
    push(&mut checks, "scale-invariance", scale_invariance(opts.seed).map(|e| {
        Check::at_most("scale-invariance", e, 1e-12, "relative gamma change under peak power")
    }));
    push(&mut checks, "bound-curve-ordering", bound_curve_ordering().map(|(ok, msg)| {
        Check::boolean("bound-curve-ordering", ok, msg)
    }));
    push(&mut checks, "worker-determinism", worker_determinism(opts.seed).map(|ok| {
        Check::boolean("worker-determinism", ok, "byte-identical results for 1, 4 and 16 workers")
    }));
    checks
}

/// A random point on the body surface: a direction scaled to unit peak.
fn boundary_point<R: Rng>(d: Domain, n: usize, interp: &mut Interpolator, rng: &mut R) -> SignalVector {
    let s = draw_gaussian_direction(n, d, rng);
    let peak = interp.peak(&s.samples, d);
    s.scaled(1.0 / peak)
}

/// Largest continuous peak over random convex combinations of surface points.
pub fn convexity(d: Domain, n: usize, m: usize, pairs: usize, seed: u64) -> Result<f64> {
    let mut interp = Interpolator::new(n, m)?;
    let mut worst: f64 = 0.0;
    for p in 0..pairs {
        let mut rng = substream(seed, p as u64);
        let x = boundary_point(d, n, &mut interp, &mut rng);
        let y = boundary_point(d, n, &mut interp, &mut rng);
        let lambda: f64 = rng.random();
        let mid: Vec<Complex64> = x
            .samples
            .iter()
            .zip(&y.samples)
            .map(|(a, b)| a * lambda + b * (1.0 - lambda))
            .collect();
        worst = worst.max(interp.peak(&mid, d));
    }
    Ok(worst)
}

const TEST_SIZES: [usize; 5] = [2, 8, 21, 64, 101];

/// Largest difference between the input samples and every `M`-th output.
pub fn interpolation_exactness(seed: u64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, &n) in TEST_SIZES.iter().enumerate() {
        for d in [Domain::Real, Domain::Complex] {
            let mut rng = substream(seed, i as u64);
            let s = draw_gaussian_direction(n, d, &mut rng);
            let m = 7;
            let out = bandlimit_interpolate(&s, m)?;
            for (k, x) in s.samples.iter().enumerate() {
                worst = worst.max((out[k * m] - x).norm());
            }
        }
    }
    Ok(worst)
}

/// Largest fraction of waveform energy outside the band.
pub fn spectral_confinement(seed: u64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut planner = FftPlanner::<f64>::new();
    for (i, &n) in TEST_SIZES.iter().enumerate() {
        for d in [Domain::Real, Domain::Complex] {
            let mut rng = substream(seed ^ 0x5eed, i as u64);
            let s = draw_gaussian_direction(n, d, &mut rng);
            let m = 6;
            let mut wave = bandlimit_interpolate(&s, m)?;
            let len = wave.len();
            planner.plan_fft_forward(len).process(&mut wave);
            let half = n / 2;
            let in_band = |k: usize| k <= half || k >= len - half;
            let total: f64 = wave.iter().map(|c| c.norm_sqr()).sum();
            let outside: f64 = (0..len).filter(|&k| !in_band(k)).map(|k| wave[k].norm_sqr()).sum();
            worst = worst.max(outside / total);
        }
    }
    Ok(worst)
}

/// Relative change of `gamma` when re-derived at other peak powers.
pub fn scale_invariance(seed: u64) -> Result<f64> {
    let mut estimates = vec![
        log_volume_lower_bound(&ExtremeValueModel::continuous_default(Domain::Real, 101)?)?,
        log_volume_lower_bound(&ExtremeValueModel::discrete(Domain::Complex, 51)?)?,
    ];
    let r = estimate_volume_mc(&McConfig::new(Domain::Real, 21, 8, 2000, Sampler::ImportanceUniform, seed))?;
    estimates.push(r.estimate);
    let mut worst: f64 = 0.0;
    for e in &estimates {
        for p in [1e-3, 0.5, 7.0, 1e4] {
            worst = worst.max((e.gamma_at(p) / e.gamma - 1.0).abs());
        }
    }
    Ok(worst)
}

/// Capacity curves increase with SNR, the peak-limited bound stays below
/// the average-limited capacity with the predicted high-SNR gap, and the
/// analytic bounds are ordered continuous <= discrete <= sample-only.
pub fn bound_curve_ordering() -> Result<(bool, String)> {
    let grid: Vec<f64> = (0..=60).map(|i| 10f64.powf(-2.0 + 0.2 * i as f64)).collect();
    for d in [Domain::Real, Domain::Complex] {
        let disc = log_volume_lower_bound(&ExtremeValueModel::discrete(d, 101)?)?.gamma;
        let cont = log_volume_lower_bound(&ExtremeValueModel::continuous_default(d, 101)?)?.gamma;
        if !(cont <= disc && disc <= sampled_only_upper_bound(d)) {
            return Ok((false, format!("{d}: analytic ordering violated")));
        }
        let ch = ChannelModel::new(d, 1.0, 1.0, 1.0)?;
        for g in [cont, disc, sampled_only_upper_bound(d)] {
            let c = capacity_lower_bound(&ch, g, &grid)?;
            let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
            if !increasing(&c.apl_capacity) || !increasing(&c.ppl_lower_bound) {
                return Ok((false, format!("{d}: curve not increasing")));
            }
            if c.apl_capacity.iter().zip(&c.ppl_lower_bound).any(|(a, p)| p > a) {
                return Ok((false, format!("{d}: lower bound above capacity")));
            }
            let far = capacity_lower_bound(&ch, g, &[1e12])?;
            let gap = far.apl_capacity[0] - far.ppl_lower_bound[0];
            if (gap - c.high_snr_gap()).abs() > 1e-6 {
                return Ok((false, format!("{d}: high-SNR gap {gap}")));
            }
        }
    }
    Ok((true, "all orderings hold".into()))
}

/// Same seed and configuration on 1, 4 and 16 workers.
pub fn worker_determinism(seed: u64) -> Result<bool> {
    for (d, n) in [(Domain::Real, 11usize), (Domain::Complex, 7)] {
        let cfg = McConfig::new(d, n, 4, 150_000, Sampler::ImportanceUniform, seed);
        let reference = estimate_volume_mc_with_workers(&cfg, Some(1))?.canonical_json()?;
        for w in [4, 16] {
            if estimate_volume_mc_with_workers(&cfg, Some(w))?.canonical_json()? != reference {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        assert_eq!("stats".parse::<Suite>().unwrap(), Suite::Stats);
        assert!("bogus".parse::<Suite>().is_err());
        assert_eq!("full".parse::<Budget>().unwrap(), Budget::Full);
    }

    #[test]
    fn report_text() {
        let r = VerifyReport {
            suite: Suite::Anchors,
            checks: vec![Check::at_most("a", 0.5, 1.0, ""), Check::at_most("b", 2.0, 1.0, "x")],
        };
        assert!(!r.passed());
        let t = r.to_text();
        assert!(t.contains("PASS a") && t.contains("FAIL b") && t.ends_with("result FAIL\n"));
    }

    #[test]
    fn structural_checks_pass() {
        assert!(convexity(Domain::Real, 9, 8, 200, 1).unwrap() <= 1.0 + 1e-12);
        assert!(interpolation_exactness(2).unwrap() <= 1e-12);
        assert!(spectral_confinement(3).unwrap() <= 1e-10);
        assert!(bound_curve_ordering().unwrap().0);
    }
}
