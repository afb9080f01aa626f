mod common;

use cvqkd::channel::{generate_linear_block, Detector, LinearChannel};
use cvqkd::estimation::{
    bound_widths, ml_estimate, mutation_check, sample_sufficient, z_quantile, ChannelEstimate, Moments, Stability,
};
use proptest::prelude::*;

/// Fraction of trials where the true `t` falls below `t_min`.
fn coverage_miss(n: usize, trials: usize, eps_pe: f64, seed: u64) -> f64 {
    let ch = LinearChannel::new(4.0, 0.3, 1.2).unwrap();
    let mut misses = 0;
    for k in 0..trials {
        let b = generate_linear_block(&ch, Detector::Homodyne, n, 0, seed + k as u64).unwrap();
        let est = ChannelEstimate::from_samples(&b.x, &b.y, ch.v_a, eps_pe).unwrap();
        misses += usize::from(ch.t < est.t_min);
    }
    misses as f64 / trials as f64
}

#[test]
fn lower_bound_misses_at_the_one_sided_rate() {
    let f = coverage_miss(10_000, 1000, 0.1, 1_000);
    assert!((0.025..=0.1).contains(&f), "miss fraction {f}");
}

#[test]
fn widths_halve_when_samples_quadruple() {
    let z = z_quantile(1e-10).unwrap();
    for n in [1_000usize, 10_000, 123_457] {
        let (dt1, ds1) = bound_widths(0.9, n, 3.0, z);
        let (dt4, ds4) = bound_widths(0.9, 4 * n, 3.0, z);
        assert_eq!(dt1, 2.0 * dt4);
        assert_eq!(ds1, 2.0 * ds4);
    }
}

#[test]
fn residual_variance_is_scaled_chi_square() {
    // n·σ̂²/σ² has mean n−1 and variance 2(n−1).
    let ch = LinearChannel::new(2.0, 0.7, 0.5).unwrap();
    let (n, trials) = (200usize, 4000);
    let mut rng = common::rng(3);
    let stats: Vec<f64> = (0..trials)
        .map(|k| {
            let b = generate_linear_block(&ch, Detector::Homodyne, n, 0, 10_000 + k).unwrap();
            let (_, s2) = ml_estimate(&b.x, &b.y).unwrap();
            n as f64 * s2 / ch.sigma2
        })
        .collect();
    let mean = stats.iter().sum::<f64>() / trials as f64;
    let se = (2.0 * (n - 1) as f64 / trials as f64).sqrt();
    assert!((mean - (n - 1) as f64).abs() < 4.0 * se, "mean {mean}");

    // The sufficient-statistics sampler follows the same law.
    let draws: Vec<f64> = (0..trials)
        .map(|_| n as f64 * sample_sufficient(&ch, n, &mut rng).unwrap().1 / ch.sigma2)
        .collect();
    let mean = draws.iter().sum::<f64>() / trials as f64;
    assert!((mean - (n - 1) as f64).abs() < 4.0 * se, "sampled mean {mean}");
}

#[test]
fn sampler_matches_full_simulation_in_spread() {
    let ch = LinearChannel::new(4.0, 0.25, 1.15).unwrap();
    let (n, trials) = (2_000usize, 1500);
    let mut rng = common::rng(4);
    let full: Vec<f64> = (0..trials)
        .map(|k| {
            let b = generate_linear_block(&ch, Detector::Homodyne, n, 0, 50_000 + k).unwrap();
            ml_estimate(&b.x, &b.y).unwrap().0
        })
        .collect();
    let fast: Vec<f64> = (0..trials).map(|_| sample_sufficient(&ch, n, &mut rng).unwrap().0).collect();
    let sd = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    let want = (ch.sigma2 / (n as f64 * ch.v_a)).sqrt();
    for s in [sd(&full), sd(&fast)] {
        assert!((s / want - 1.0).abs() < 0.08, "{s} vs {want}");
    }
}

#[test]
fn mutation_threshold_contract() {
    assert_eq!(mutation_check(0.03, 0.03, 0.05), Stability::Stable);
    assert_eq!(mutation_check(0.0300, 0.0330, 0.05), Stability::Mutated);
    assert_eq!(mutation_check(0.0300, 0.0314, 0.05), Stability::Stable);
    assert_eq!(mutation_check(0.0300, 0.0284, 0.05), Stability::Mutated);
}

fn samples() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (8usize..200).prop_flat_map(|n| {
        (
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(-5.0f64..5.0, n),
        )
    })
}

proptest! {
    #[test]
    fn estimator_is_scale_equivariant((x, y) in samples(), c in 0.1f64..10.0) {
        let (t, s2) = ml_estimate(&x, &y).unwrap();
        let yc: Vec<f64> = y.iter().map(|v| c * v).collect();
        let (tc, s2c) = ml_estimate(&x, &yc).unwrap();
        prop_assert!((tc - c * t).abs() <= 1e-9 * (1.0 + (c * t).abs()));
        prop_assert!((s2c - c * c * s2).abs() <= 1e-9 * (1.0 + c * c * s2));
    }

    #[test]
    fn chunked_moments_agree_with_two_pass((x, y) in samples(), split in 0.0f64..1.0) {
        let k = (split * x.len() as f64) as usize;
        let mut m = Moments::from_samples(&x[..k], &y[..k]);
        m.merge(&Moments::from_samples(&x[k..], &y[k..]));
        let (t, s2) = ml_estimate(&x, &y).unwrap();
        prop_assert_eq!(m.n, x.len());
        prop_assert!((m.t_hat().unwrap() - t).abs() < 1e-10 * (1.0 + t.abs()));
        prop_assert!((m.sigma2_hat().unwrap() - s2).abs() < 1e-9 * (1.0 + s2));
    }
}
