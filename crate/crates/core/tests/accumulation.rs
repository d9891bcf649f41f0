use pplcap::math::StreamingLogMean;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Neumaier-compensated sum, used as the reference for the log-domain mean.
fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn log_values(seed: u64, n: usize, spread: f64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-spread..spread)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn log_mean_matches_compensated_sum(seed in any::<u64>(), spread in 0.1f64..30.0, shift in -700.0f64..700.0) {
        let logs = log_values(seed, 100_000, spread);
        let mut acc = StreamingLogMean::new();
        for &c in &logs {
            acc.push_ln(c + shift);
        }
        let reference = compensated_sum(logs.iter().map(|c| c.exp())) / logs.len() as f64;
        let got = acc.log_mean().unwrap().ln() - shift;
        prop_assert!((got - reference.ln()).abs() <= 1e-10, "{} vs {}", got, reference.ln());
    }

    #[test]
    fn merge_order_does_not_matter(seed in any::<u64>(), cut_a in 1usize..99_999, cut_b in 1usize..99_999) {
        let logs = log_values(seed, 100_000, 20.0);
        let split = |cut: usize, reverse: bool| {
            let mut left = StreamingLogMean::new();
            let mut right = StreamingLogMean::new();
            logs[..cut].iter().for_each(|&c| left.push_ln(c));
            logs[cut..].iter().for_each(|&c| right.push_ln(c));
            if reverse {
                right.merge(&left);
                right
            } else {
                left.merge(&right);
                left
            }
        };
        let a = split(cut_a, false);
        let b = split(cut_b, true);
        prop_assert_eq!(a.count(), b.count());
        let (ma, mb) = (a.log_mean().unwrap().ln(), b.log_mean().unwrap().ln());
        prop_assert!((ma - mb).abs() <= 1e-12);
        // Same split merged either way is exactly symmetric.
        let c = split(cut_a, true);
        prop_assert_eq!(a.log_sum(), c.log_sum());
    }
}

#[test]
fn far_out_of_range_values_stay_finite() {
    let mut acc = StreamingLogMean::new();
    for i in 0..1000 {
        acc.push_ln(1.0e5 + (i % 7) as f64);
    }
    let m = acc.log_mean().unwrap().ln();
    assert!(m.is_finite() && m > 1.0e5 && m < 1.0e5 + 7.0);
    assert!(acc.relative_variance_of_mean().unwrap().is_finite());
}
