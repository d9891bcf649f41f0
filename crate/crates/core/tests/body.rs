use pplcap::rng::substream;
use pplcap::signal::{bandlimit_interpolate, draw_gaussian_direction, peak_and_radius, Interpolator};
use pplcap::Domain;
use proptest::prelude::*;
use rand::Rng;

fn domain_strategy() -> impl Strategy<Value = Domain> {
    prop_oneof![Just(Domain::Real), Just(Domain::Complex)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn body_is_convex(d in domain_strategy(), n in 2usize..40, m in 2usize..16, seed in any::<u64>()) {
        let mut interp = Interpolator::new(n, m).unwrap();
        let mut rng = substream(seed, 0);
        let mut point = |rng: &mut pplcap::rng::Stream| {
            let s = draw_gaussian_direction(n, d, rng);
            let p = interp.peak(&s.samples, d);
            s.scaled(1.0 / p)
        };
        let x = point(&mut rng);
        let y = point(&mut rng);
        let lambda: f64 = rng.random();
        let mid: Vec<_> = x.samples.iter().zip(&y.samples).map(|(a, b)| a * lambda + b * (1.0 - lambda)).collect();
        prop_assert!(interp.peak(&mid, d) <= 1.0 + 1e-12);
    }

    #[test]
    fn parseval_for_odd_lengths(d in domain_strategy(), half in 1usize..40, m in 1usize..12, seed in any::<u64>()) {
        // Odd N has no split Nyquist bin, so energy scales exactly by M.
        let n = 2 * half + 1;
        let s = draw_gaussian_direction(n, d, &mut substream(seed, 1));
        let out = bandlimit_interpolate(&s, m).unwrap();
        let e_in: f64 = s.samples.iter().map(|c| c.norm_sqr()).sum();
        let e_out: f64 = out.iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((e_out / (m as f64 * e_in) - 1.0).abs() < 1e-11);
    }

    #[test]
    fn split_nyquist_never_adds_energy(d in domain_strategy(), half in 1usize..40, m in 1usize..12, seed in any::<u64>()) {
        let n = 2 * half;
        let s = draw_gaussian_direction(n, d, &mut substream(seed, 2));
        let out = bandlimit_interpolate(&s, m).unwrap();
        let e_in: f64 = s.samples.iter().map(|c| c.norm_sqr()).sum();
        let e_out: f64 = out.iter().map(|c| c.norm_sqr()).sum();
        prop_assert!(e_out <= m as f64 * e_in * (1.0 + 1e-12));
    }

    #[test]
    fn normalized_direction_touches_the_peak(d in domain_strategy(), n in 2usize..60, m in 1usize..20, seed in any::<u64>()) {
        let s = draw_gaussian_direction(n, d, &mut substream(seed, 3));
        let draw = peak_and_radius(&s, m).unwrap();
        let wave = bandlimit_interpolate(&draw.signal, m).unwrap();
        let peak = wave.iter().map(|c| match d { Domain::Real => c.re.abs(), Domain::Complex => c.norm() }).fold(0.0, f64::max);
        prop_assert!((peak - 1.0).abs() < 1e-12);
        // The continuous peak is at least the sample peak.
        prop_assert!(draw.radial_distance <= draw.cube_dfo.unwrap() * (1.0 + 1e-12));
    }
}
