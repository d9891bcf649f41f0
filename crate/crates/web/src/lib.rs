//! Browser bindings: maxima law, analytic bound with its integrand, and a
//! small Monte Carlo run. Every function returns a JSON string.

use pplcap::bounds::{integrand_argmax, integrand_profile, log_volume_lower_bound, sampled_only_upper_bound};
use pplcap::extreme::{max_pdf, ExtremeValueModel, MaximaCase};
use pplcap::mc::{estimate_volume_mc, McConfig, Sampler};
use pplcap::Domain;
use serde_json::json;
use wasm_bindgen::prelude::*;

const MAX_POINTS: usize = 2000;
const MAX_SIMS: usize = 200_000;

fn parse_domain(s: &str) -> Result<Domain, JsValue> {
    s.parse().map_err(|e: pplcap::Error| JsValue::from_str(&e.to_string()))
}

fn err(e: pplcap::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn model(domain: &str, continuous: bool, n: usize, alpha: f64) -> Result<ExtremeValueModel, JsValue> {
    let alpha = if continuous { alpha } else { 1.0 };
    ExtremeValueModel::new(MaximaCase::new(parse_domain(domain)?, continuous), n, alpha).map_err(err)
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let points = points.clamp(2, MAX_POINTS);
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

/// Density of the peak statistic (|x| for real, |x|^2 for complex) over its
/// bulk, from the lower 1e-9 to the upper 1e-9 quantile. `alpha` is ignored
/// for discrete peaks.
#[wasm_bindgen]
pub fn maxima_density(domain: &str, continuous: bool, n: usize, alpha: f64, points: usize) -> Result<String, JsValue> {
    let m = model(domain, continuous, n, alpha)?;
    let lo = m.quantile(1e-9).map_err(err)?;
    let hi = m.quantile(1.0 - 1e-9).map_err(err)?;
    let v = grid(lo, hi, points);
    let pdf = v.iter().map(|&x| max_pdf(&m, x)).collect::<pplcap::Result<Vec<_>>>().map_err(err)?;
    Ok(json!({ "v": v, "pdf": pdf }).to_string())
}

/// Analytic lower bound on gamma together with the normalized integrand.
#[wasm_bindgen]
pub fn analytic_bound(domain: &str, continuous: bool, n: usize, alpha: f64, points: usize) -> Result<String, JsValue> {
    let m = model(domain, continuous, n, alpha)?;
    let est = log_volume_lower_bound(&m).map_err(err)?;
    let peak = integrand_argmax(&m);
    let lo = m.quantile_ln(-200.0).max(peak * 0.25);
    let hi = m.quantile(1.0 - 1e-9).map_err(err)?.max(peak * 1.5);
    let v = grid(lo, hi, points);
    let profile = integrand_profile(&m, &v).map_err(err)?;
    Ok(json!({
        "gamma": est.gamma,
        "gamma_upper": sampled_only_upper_bound(m.domain()),
        "log_volume_per_dim": est.log_volume_per_dim(),
        "argmax": peak,
        "v": v,
        "profile": profile,
    })
    .to_string())
}

/// Monte Carlo estimate of gamma with its convergence trace.
#[wasm_bindgen]
pub fn monte_carlo(domain: &str, n: usize, oversample: usize, n_sim: usize, seed: u32) -> Result<String, JsValue> {
    if n_sim > MAX_SIMS {
        return Err(JsValue::from_str(&format!("n_sim is limited to {MAX_SIMS} in the browser")));
    }
    let cfg = McConfig::new(parse_domain(domain)?, n, oversample, n_sim, Sampler::ImportanceUniform, seed as u64);
    let r = estimate_volume_mc(&cfg).map_err(err)?;
    Ok(json!({
        "gamma": r.gamma(),
        "stderr": r.gamma_stderr(),
        "trace": r.convergence_trace,
        "discard": r.discard_curve,
        "zero_variance": r.zero_variance,
    })
    .to_string())
}
