use pplcap::bounds::{
    capacity_lower_bound, integrand_argmax, log_volume_lower_bound, sampled_only_upper_bound, truncated_gamma_curve,
    ChannelModel,
};
use pplcap::extreme::ExtremeValueModel;
use pplcap::Domain;
use proptest::prelude::*;

fn domain_strategy() -> impl Strategy<Value = Domain> {
    prop_oneof![Just(Domain::Real), Just(Domain::Complex)]
}

// Reference values from an independent implementation of the same integral
// (double-precision adaptive quadrature over the full positive axis).
const DISCRETE_REAL: [(usize, f64); 6] = [
    (5, 0.22322),
    (10, 0.21066),
    (51, 0.19238),
    (101, 0.18955),
    (1001, 0.18684),
    (10_000, 0.18656),
];
const DISCRETE_COMPLEX: [(usize, f64); 5] = [(2, 0.3611), (5, 0.3379), (51, 0.3035), (101, 0.3010), (1001, 0.2987)];
const CONTINUOUS: [(Domain, usize, f64, f64); 6] = [
    (Domain::Real, 101, 2.3, 0.16010),
    (Domain::Real, 1001, 2.8, 0.150022),
    (Domain::Real, 10_000, 2.9, 0.148500),
    (Domain::Complex, 101, 2.3, 0.2585),
    (Domain::Complex, 1001, 2.8, 0.24589),
    (Domain::Complex, 10_000, 2.9, 0.24389),
];

fn rounded_match(got: f64, reference: f64) -> bool {
    // Reference digits are rounded; allow half a unit in the last place shown.
    let digits = format!("{reference}").split('.').nth(1).map_or(0, str::len);
    (got - reference).abs() <= 0.5 * 10f64.powi(-(digits as i32)) + 1e-12
}

#[test]
fn discrete_gamma_reference_values() {
    for (n, g) in DISCRETE_REAL {
        let got = log_volume_lower_bound(&ExtremeValueModel::discrete(Domain::Real, n).unwrap()).unwrap().gamma;
        assert!(rounded_match(got, g), "real N={n}: {got} vs {g}");
    }
    for (n, g) in DISCRETE_COMPLEX {
        let got = log_volume_lower_bound(&ExtremeValueModel::discrete(Domain::Complex, n).unwrap()).unwrap().gamma;
        assert!(rounded_match(got, g), "complex N={n}: {got} vs {g}");
    }
}

#[test]
fn continuous_gamma_reference_values() {
    for (d, n, alpha, g) in CONTINUOUS {
        let got = log_volume_lower_bound(&ExtremeValueModel::continuous(d, n, alpha).unwrap()).unwrap().gamma;
        assert!(rounded_match(got, g), "{d} N={n}: {got} vs {g}");
    }
}

#[test]
fn integrand_peaks_near_one_point_seven() {
    for n in [51usize, 101] {
        let z = integrand_argmax(&ExtremeValueModel::discrete(Domain::Real, n).unwrap());
        assert!((1.6..=1.8).contains(&z), "N={n}: {z}");
    }
}

#[test]
fn discrete_gamma_decreases_with_n() {
    for d in [Domain::Real, Domain::Complex] {
        let gs: Vec<f64> = [2usize, 3, 5, 11, 31, 101, 301, 1001]
            .iter()
            .map(|&n| log_volume_lower_bound(&ExtremeValueModel::discrete(d, n).unwrap()).unwrap().gamma)
            .collect();
        assert!(gs.windows(2).all(|w| w[1] < w[0]), "{d}: {gs:?}");
    }
}

#[test]
fn truncated_curve_at_tiny_quantile_is_untruncated() {
    for n in [51usize, 101, 1001] {
        let m = ExtremeValueModel::continuous_default(Domain::Real, n).unwrap();
        let full = log_volume_lower_bound(&m).unwrap().gamma;
        let c = truncated_gamma_curve(&m, &[1e-300]).unwrap()[0];
        assert!((c / full - 1.0).abs() <= 1e-9, "N={n}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn analytic_bound_orderings(d in domain_strategy(), n in 2usize..3000, alpha in 1.0f64..4.0) {
        let disc = log_volume_lower_bound(&ExtremeValueModel::discrete(d, n).unwrap()).unwrap();
        let cont = log_volume_lower_bound(&ExtremeValueModel::continuous(d, n, alpha).unwrap()).unwrap();
        prop_assert!(disc.gamma <= sampled_only_upper_bound(d) * (1.0 + 1e-9));
        prop_assert!(cont.gamma <= disc.gamma * (1.0 + 1e-9));
        prop_assert!(cont.gamma > 0.0);
    }

    #[test]
    fn gamma_is_scale_invariant(d in domain_strategy(), n in 2usize..500, p in 1e-6f64..1e6) {
        let e = log_volume_lower_bound(&ExtremeValueModel::continuous_default(d, n).unwrap()).unwrap();
        prop_assert!((e.gamma_at(p) / e.gamma - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn bound_curve_orderings(d in domain_strategy(), gamma in 0.01f64..1.0, lo in -3.0f64..2.0) {
        let grid: Vec<f64> = (0..50).map(|i| 10f64.powf(lo + 0.25 * i as f64)).collect();
        let ch = ChannelModel::new(d, 1.0, 1.0, 1.0).unwrap();
        let c = capacity_lower_bound(&ch, gamma, &grid).unwrap();
        prop_assert!(c.apl_capacity.windows(2).all(|w| w[1] > w[0]));
        prop_assert!(c.ppl_lower_bound.windows(2).all(|w| w[1] > w[0]));
        for (a, p) in c.apl_capacity.iter().zip(&c.ppl_lower_bound) {
            prop_assert!(p <= a);
        }
        let gaps: Vec<f64> = c.apl_capacity.iter().zip(&c.ppl_lower_bound).map(|(a, p)| a - p).collect();
        prop_assert!(gaps.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        prop_assert!(gaps.iter().all(|&g| g <= c.high_snr_gap() + 1e-12));
    }
}

#[test]
fn doubling_quadrature_density_is_stable() {
    use pplcap::bounds::{log_volume_lower_bound_with, VolumeQuadrature};
    for (d, n) in [(Domain::Real, 101usize), (Domain::Real, 10_000), (Domain::Complex, 1001)] {
        let m = ExtremeValueModel::continuous_default(d, n).unwrap();
        let coarse = VolumeQuadrature { rel_tol: 1e-10, initial_panels: 4 };
        let fine = VolumeQuadrature { rel_tol: 1e-10, initial_panels: 8 };
        let a = log_volume_lower_bound_with(&m, &coarse).unwrap().log_volume.ln();
        let b = log_volume_lower_bound_with(&m, &fine).unwrap().log_volume.ln();
        assert!(((a - b) / a).abs() < 1e-8, "{d} N={n}: {a} vs {b}");
    }
}

#[test]
fn long_signals_need_more_than_1e8_vectors() {
    let m = ExtremeValueModel::continuous_default(Domain::Real, 200).unwrap();
    let full = log_volume_lower_bound(&m).unwrap().gamma;
    let cut = truncated_gamma_curve(&m, &[1e-8]).unwrap()[0];
    assert!(cut < 0.99 * full, "{cut} vs {full}");
}
