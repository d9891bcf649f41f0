//! Random directions and CP-FDE style band-limited waveforms.
//!
//! A block of `N` Nyquist samples is treated as one period of a band-limited
//! signal. Interpolation to `M` points per Nyquist interval is done by
//! zero-padding the length-`N` spectrum to length `M·N` (brick-wall filter)
//! and transforming back, so every `M`-th output point reproduces an input
//! sample.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::math::{log_unit_ball_volume, LogValue, LN_PI};
use crate::Domain;

/// Largest `M·N` accepted by the interpolator.
pub const MAX_WAVEFORM_LEN: usize = 1 << 24;

/// `N` Nyquist-rate samples of a real or complex signal.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalVector {
    pub domain: Domain,
    pub samples: Vec<Complex64>,
}

impl SignalVector {
    pub fn real(samples: &[f64]) -> Self {
        Self {
            domain: Domain::Real,
            samples: samples.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn complex(samples: Vec<Complex64>) -> Self {
        Self {
            domain: Domain::Complex,
            samples,
        }
    }

    pub fn n_symbols(&self) -> usize {
        self.samples.len()
    }

    pub fn norm(&self) -> f64 {
        self.samples.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max_i |x_i|`.
    pub fn sample_peak(&self) -> f64 {
        self.samples.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            domain: self.domain,
            samples: self.samples.iter().map(|c| c * factor).collect(),
        }
    }
}

/// A peak-normalized direction together with its distance from the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionDraw {
    /// Samples rescaled so that the continuous waveform peaks at 1.
    pub signal: SignalVector,
    /// Euclidean length of the normalized sample vector.
    pub radial_distance: f64,
    /// Distance to the cube (polydisc) surface along the same direction.
    pub cube_dfo: Option<f64>,
    /// Change-of-measure weight for a draw that was uniform in the cube.
    pub importance_weight_log: Option<LogValue>,
}

impl DirectionDraw {
    /// Attaches the cube-to-sphere weight `2^N / (L_c^N V_N)` (real) or
    /// `pi^N / (L_c^{2N} V_{2N})` (complex).
    pub fn with_importance_weight(mut self) -> Result<Self> {
        let lc = match self.cube_dfo {
            Some(lc) => lc,
            None => cube_dfo(&self.signal)?,
        };
        self.cube_dfo = Some(lc);
        self.importance_weight_log = Some(importance_log_weight(self.signal.domain, self.signal.n_symbols(), lc)?);
        Ok(self)
    }
}

pub(crate) fn importance_log_weight(domain: Domain, n: usize, lc: f64) -> Result<LogValue> {
    let nf = n as f64;
    let d = domain.body_dimension(n);
    let log_box = match domain {
        Domain::Real => nf * std::f64::consts::LN_2,
        Domain::Complex => nf * LN_PI,
    };
    let lv = log_unit_ball_volume(d)?;
    Ok(LogValue::from_ln(log_box - d as f64 * lc.ln() - lv.ln()))
}

/// I.i.d. standard Gaussian samples; complex samples are circular with unit power.
pub fn draw_gaussian_direction<R: Rng + ?Sized>(n_symbols: usize, domain: Domain, rng: &mut R) -> SignalVector {
    let mut samples = Vec::with_capacity(n_symbols);
    match domain {
        Domain::Real => {
            for _ in 0..n_symbols {
                samples.push(Complex64::new(rng.sample(StandardNormal), 0.0));
            }
        }
        Domain::Complex => {
            for _ in 0..n_symbols {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                samples.push(Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2));
            }
        }
    }
    SignalVector { domain, samples }
}

/// Uniform in `[-1, 1]^N` (real) or in the product of unit disks (complex).
pub fn draw_importance_uniform<R: Rng + ?Sized>(n_symbols: usize, domain: Domain, rng: &mut R) -> SignalVector {
    let mut samples = Vec::with_capacity(n_symbols);
    match domain {
        Domain::Real => {
            for _ in 0..n_symbols {
                samples.push(Complex64::new(rng.random_range(-1.0..=1.0), 0.0));
            }
        }
        Domain::Complex => {
            for _ in 0..n_symbols {
                samples.push(uniform_in_disk(rng));
            }
        }
    }
    SignalVector { domain, samples }
}

#[inline]
pub(crate) fn uniform_in_disk<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let radius = rng.random::<f64>().sqrt();
    let (s, c) = (2.0 * PI * rng.random::<f64>()).sin_cos();
    Complex64::new(radius * c, radius * s)
}

/// How the continuous peak is located on the oversampled grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PeakSearch {
    /// Largest magnitude among the `M·N` grid points.
    #[default]
    Grid,
    /// Grid maximum refined by a parabola through it and its two neighbours.
    Parabolic,
}

/// Zero-padding interpolator with cached transform plans and buffers.
///
/// One instance per worker; not shared across threads.
pub struct Interpolator {
    n: usize,
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    spectrum: Vec<Complex64>,
    padded: Vec<Complex64>,
    scratch: Vec<Complex64>,
    peak_search: PeakSearch,
}

impl std::fmt::Debug for Interpolator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Interpolator")
            .field("n", &self.n)
            .field("m", &self.m)
            .field("peak_search", &self.peak_search)
            .finish()
    }
}

impl Interpolator {
    pub fn new(n_symbols: usize, oversample: usize) -> Result<Self> {
        if oversample < 1 {
            return domain("oversample must be >= 1");
        }
        if n_symbols < 2 {
            return domain("band-limited interpolation needs N >= 2");
        }
        let len = n_symbols
            .checked_mul(oversample)
            .filter(|&l| l <= MAX_WAVEFORM_LEN)
            .ok_or_else(|| Error::ResourceLimit(format!("waveform length {n_symbols} x {oversample} too large")))?;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n_symbols);
        let inverse = planner.plan_fft_inverse(len);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Ok(Self {
            n: n_symbols,
            m: oversample,
            forward,
            inverse,
            spectrum: vec![Complex64::default(); n_symbols],
            padded: vec![Complex64::default(); len],
            scratch: vec![Complex64::default(); scratch_len],
            peak_search: PeakSearch::Grid,
        })
    }

    pub fn with_peak_search(mut self, peak_search: PeakSearch) -> Self {
        self.peak_search = peak_search;
        self
    }

    pub fn n_symbols(&self) -> usize {
        self.n
    }

    pub fn oversample(&self) -> usize {
        self.m
    }

    /// Interpolates one period; the returned slice has `M·N` points.
    pub fn interpolate(&mut self, samples: &[Complex64]) -> &[Complex64] {
        assert_eq!(samples.len(), self.n, "sample count does not match the interpolator");
        if self.m == 1 {
            self.padded.copy_from_slice(samples);
            return &self.padded;
        }
        self.spectrum.copy_from_slice(samples);
        self.pad_and_invert();
        &self.padded
    }

    fn pad_and_invert(&mut self) {
        self.forward
            .process_with_scratch(&mut self.spectrum, &mut self.scratch);
        let n = self.n;
        let len = self.padded.len();
        let scale = 1.0 / n as f64;
        self.padded.iter_mut().for_each(|c| *c = Complex64::default());
        let half = (n - 1) / 2;
        self.padded[0] = self.spectrum[0] * scale;
        for k in 1..=half {
            self.padded[k] = self.spectrum[k] * scale;
            self.padded[len - k] = self.spectrum[n - k] * scale;
        }
        if n % 2 == 0 {
            // Split the Nyquist bin evenly between +N/2 and -N/2.
            let nyq = self.spectrum[n / 2] * (0.5 * scale);
            self.padded[n / 2] += nyq;
            self.padded[len - n / 2] += nyq;
        }
        self.inverse
            .process_with_scratch(&mut self.padded, &mut self.scratch);
    }

    /// Peak magnitude of the interpolated waveform.
    pub fn peak(&mut self, samples: &[Complex64], domain: Domain) -> f64 {
        if self.m == 1 {
            return samples.iter().map(|c| magnitude(*c, domain)).fold(0.0, f64::max);
        }
        let search = self.peak_search;
        let wave = self.interpolate(samples);
        match domain {
            Domain::Real => grid_peak(wave.len(), |i| wave[i].re.abs(), search),
            Domain::Complex => grid_peak(wave.len(), |i| wave[i].norm(), search),
        }
    }

    /// Peaks of two real signals interpolated with one complex transform.
    ///
    /// The zero-padding operator maps real inputs to real outputs, so the
    /// real and imaginary parts of the packed result are the two waveforms.
    pub fn real_pair_peaks(&mut self, a: &[f64], b: &[f64]) -> (f64, f64) {
        if self.m == 1 {
            let pa = a.iter().map(|x| x.abs()).fold(0.0, f64::max);
            let pb = b.iter().map(|x| x.abs()).fold(0.0, f64::max);
            return (pa, pb);
        }
        assert!(a.len() == self.n && b.len() == self.n, "sample count does not match the interpolator");
        for (slot, (&x, &y)) in self.spectrum.iter_mut().zip(a.iter().zip(b)) {
            *slot = Complex64::new(x, y);
        }
        self.pad_and_invert();
        let search = self.peak_search;
        let wave = &self.padded;
        let pa = grid_peak(wave.len(), |i| wave[i].re.abs(), search);
        let pb = grid_peak(wave.len(), |i| wave[i].im.abs(), search);
        (pa, pb)
    }

    /// Normalizes `signal` to a continuous peak of 1 and measures its length.
    pub fn peak_and_radius(&mut self, signal: &SignalVector) -> Result<DirectionDraw> {
        let sample_peak = signal.sample_peak();
        if !(sample_peak > 0.0) {
            return domain("peak_and_radius needs a nonzero signal");
        }
        let peak = self.peak(&signal.samples, signal.domain);
        let norm = signal.norm();
        let normalized = signal.scaled(1.0 / peak);
        Ok(DirectionDraw {
            signal: normalized,
            radial_distance: norm / peak,
            cube_dfo: Some(norm / sample_peak),
            importance_weight_log: None,
        })
    }
}

#[inline]
fn magnitude(c: Complex64, domain: Domain) -> f64 {
    match domain {
        Domain::Real => c.re.abs(),
        Domain::Complex => c.norm(),
    }
}

#[inline]
fn grid_peak<F: Fn(usize) -> f64>(len: usize, value: F, search: PeakSearch) -> f64 {
    let mut best = 0.0;
    let mut at = 0;
    for i in 0..len {
        let v = value(i);
        if v > best {
            best = v;
            at = i;
        }
    }
    match search {
        PeakSearch::Grid => best,
        PeakSearch::Parabolic => {
            let prev = value((at + len - 1) % len);
            let next = value((at + 1) % len);
            let curvature = 2.0 * best - prev - next;
            if curvature > 0.0 {
                best + (next - prev).powi(2) / (8.0 * curvature)
            } else {
                best
            }
        }
    }
}

/// Band-limited periodic interpolation of `signal` to `M·N` points.
///
/// Real inputs give outputs with zero imaginary part.
pub fn bandlimit_interpolate(signal: &SignalVector, oversample: usize) -> Result<Vec<Complex64>> {
    let mut interp = Interpolator::new(signal.n_symbols(), oversample)?;
    let mut out = interp.interpolate(&signal.samples).to_vec();
    if signal.domain == Domain::Real {
        out.iter_mut().for_each(|c| c.im = 0.0);
    }
    Ok(out)
}

/// Peak-normalizes `signal` on an `oversample`-times finer grid.
///
/// With `oversample == 1` only the Nyquist samples are constrained; a single
/// sample (`N == 1`) is always handled that way.
pub fn peak_and_radius(signal: &SignalVector, oversample: usize) -> Result<DirectionDraw> {
    if oversample < 1 {
        return domain("oversample must be >= 1");
    }
    if oversample == 1 || signal.n_symbols() == 1 {
        let sample_peak = signal.sample_peak();
        if !(sample_peak > 0.0) {
            return domain("peak_and_radius needs a nonzero signal");
        }
        let norm = signal.norm();
        return Ok(DirectionDraw {
            signal: signal.scaled(1.0 / sample_peak),
            radial_distance: norm / sample_peak,
            cube_dfo: Some(norm / sample_peak),
            importance_weight_log: None,
        });
    }
    Interpolator::new(signal.n_symbols(), oversample)?.peak_and_radius(signal)
}

/// Distance from the origin to the unit cube (real) or unit polydisc
/// (complex) along the direction of `signal`: `‖x‖ / max_i |x_i|`.
pub fn cube_dfo(signal: &SignalVector) -> Result<f64> {
    let peak = signal.sample_peak();
    if !(peak > 0.0) {
        return domain("cube_dfo needs a nonzero signal");
    }
    Ok(signal.norm() / peak)
}

/// Mean and maximum relative increase of the grid peak when the
/// oversampling factor is doubled, over `draws` Gaussian directions.
pub fn oversample_sensitivity(
    domain_kind: Domain,
    n_symbols: usize,
    oversample: usize,
    draws: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let mut coarse = Interpolator::new(n_symbols, oversample)?;
    let mut fine = Interpolator::new(n_symbols, 2 * oversample)?;
    let mut sum = 0.0;
    let mut worst: f64 = 0.0;
    for i in 0..draws {
        let mut rng = crate::rng::substream(seed, i as u64);
        let s = draw_gaussian_direction(n_symbols, domain_kind, &mut rng);
        let pc = coarse.peak(&s.samples, domain_kind);
        let pf = fine.peak(&s.samples, domain_kind);
        let d = pf / pc - 1.0;
        sum += d;
        worst = worst.max(d);
    }
    Ok((sum / draws.max(1) as f64, worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    // Periodic Dirichlet-kernel interpolation evaluated directly (odd N):
    // x(t) = sum_n x_n D_N(t - n), D_N(u) = sin(pi u) / (N sin(pi u / N)).
    fn dirichlet_eval(samples: &[Complex64], t: f64) -> Complex64 {
        let n = samples.len() as f64;
        samples
            .iter()
            .enumerate()
            .map(|(k, &x)| {
                let u = t - k as f64;
                let s = (PI * u / n).sin();
                let d = if s.abs() < 1e-14 { 1.0 } else { (PI * u).sin() / (n * s) };
                x * d
            })
            .sum()
    }

    #[test]
    fn identity_at_unit_oversampling() {
        let mut rng = substream(1, 0);
        let s = draw_gaussian_direction(16, Domain::Real, &mut rng);
        let out = bandlimit_interpolate(&s, 1).unwrap();
        assert_eq!(out, s.samples);
    }

    #[test]
    fn constant_stays_constant() {
        let s = SignalVector::real(&[0.7; 9]);
        let out = bandlimit_interpolate(&s, 7).unwrap();
        assert_eq!(out.len(), 63);
        for c in out {
            assert!((c.re - 0.7).abs() < 1e-14 && c.im == 0.0);
        }
    }

    #[test]
    fn matches_dirichlet_kernel_oracle() {
        let mut rng = substream(2, 0);
        for domain in [Domain::Real, Domain::Complex] {
            let s = draw_gaussian_direction(101, domain, &mut rng);
            let out = bandlimit_interpolate(&s, 30).unwrap();
            for &idx in &[0usize, 1, 17, 29, 31, 1500, 3029] {
                let t = idx as f64 / 30.0;
                let want = dirichlet_eval(&s.samples, t);
                assert!((out[idx] - want).norm() < 1e-11, "{domain:?} idx {idx}");
            }
            for (k, x) in s.samples.iter().enumerate() {
                assert!((out[30 * k] - x).norm() <= 1e-12 * x.norm().max(1.0));
            }
        }
    }

    #[test]
    fn even_length_decimation_still_exact() {
        let mut rng = substream(3, 0);
        let s = draw_gaussian_direction(16, Domain::Real, &mut rng);
        let out = bandlimit_interpolate(&s, 8).unwrap();
        for (k, x) in s.samples.iter().enumerate() {
            assert!((out[8 * k].re - x.re).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let s = SignalVector::real(&[1.0]);
        assert!(bandlimit_interpolate(&s, 4).is_err());
        let s = SignalVector::real(&[1.0, 2.0]);
        assert!(bandlimit_interpolate(&s, 0).is_err());
        assert!(peak_and_radius(&SignalVector::real(&[0.0; 4]), 1).is_err());
        assert!(cube_dfo(&SignalVector::real(&[0.0; 4])).is_err());
    }

    #[test]
    fn radius_examples() {
        let mut e = vec![0.0; 10];
        e[0] = 1.0;
        let d = peak_and_radius(&SignalVector::real(&e), 1).unwrap();
        assert_eq!(d.radial_distance, 1.0);
        let signs: Vec<f64> = (0..16).map(|i| if i % 3 == 0 { -1.0 } else { 1.0 }).collect();
        let d = peak_and_radius(&SignalVector::real(&signs), 1).unwrap();
        assert_eq!(d.radial_distance, 4.0);
        assert_eq!(d.cube_dfo, Some(4.0));
    }

    #[test]
    fn cube_dfo_examples() {
        assert_eq!(cube_dfo(&SignalVector::real(&[1.0, 0.0, 0.0, 0.0])).unwrap(), 1.0);
        assert_eq!(cube_dfo(&SignalVector::real(&[1.0, 1.0, 1.0, 1.0])).unwrap(), 2.0);
        let eq: Vec<Complex64> = (0..9).map(|k| Complex64::from_polar(0.3, k as f64)).collect();
        assert!((cube_dfo(&SignalVector::complex(eq)).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn interpolated_peak_dominates_sample_peak() {
        for domain in [Domain::Real, Domain::Complex] {
            for i in 0..50 {
                let mut rng = substream(4, i);
                let s = draw_gaussian_direction(21, domain, &mut rng);
                let d = peak_and_radius(&s, 30).unwrap();
                assert!(d.radial_distance <= d.cube_dfo.unwrap() * (1.0 + 1e-12));
                let p = d.signal.sample_peak();
                assert!(p <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn real_pair_matches_separate_peaks() {
        let mut interp = Interpolator::new(31, 10).unwrap();
        let mut rng = substream(5, 0);
        let a = draw_importance_uniform(31, Domain::Real, &mut rng);
        let b = draw_importance_uniform(31, Domain::Real, &mut rng);
        let ra: Vec<f64> = a.samples.iter().map(|c| c.re).collect();
        let rb: Vec<f64> = b.samples.iter().map(|c| c.re).collect();
        let (pa, pb) = interp.real_pair_peaks(&ra, &rb);
        let sa = interp.peak(&a.samples, Domain::Real);
        let sb = interp.peak(&b.samples, Domain::Real);
        assert!((pa - sa).abs() < 1e-13 && (pb - sb).abs() < 1e-13);
    }

    #[test]
    fn parabolic_refinement_never_lowers_peak() {
        let mut grid = Interpolator::new(21, 4).unwrap();
        let mut para = Interpolator::new(21, 4).unwrap().with_peak_search(PeakSearch::Parabolic);
        for i in 0..20 {
            let mut rng = substream(6, i);
            let s = draw_gaussian_direction(21, Domain::Real, &mut rng);
            assert!(para.peak(&s.samples, Domain::Real) >= grid.peak(&s.samples, Domain::Real));
        }
    }

    #[test]
    fn importance_weight_of_cube_corner() {
        // Along a corner direction L_c = sqrt(N); weight is 2^N / (N^{N/2} V_N).
        let s = SignalVector::real(&[1.0; 4]);
        let d = peak_and_radius(&s, 1).unwrap().with_importance_weight().unwrap();
        let want = 16.0 / (16.0 * PI * PI / 2.0);
        assert!((d.importance_weight_log.unwrap().value() - want).abs() < 1e-14);
    }
}
