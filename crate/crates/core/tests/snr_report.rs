mod common;

use cvqkd::estimation::snr_estimator_std;
use cvqkd::pipeline::{snr_deviation_report, Sampling, SnrReport, SnrReportConfig};

fn report(block_size: u64, n_pilots: u64, sampling: Sampling) -> SnrReport {
    let mut cfg = common::config("snr_report.json");
    cfg.snr_report = Some(SnrReportConfig { n_blocks: 51, block_size, n_pilots, sampling });
    snr_deviation_report(&cfg).unwrap()
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = v.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

/// Least-squares slope of `ln y` on `ln x`.
fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (mean(lx.iter().copied()), mean(ly.iter().copied()));
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

#[test]
fn adjacent_deviation_bound_at_derived_block_size() {
    let cfg = common::config("snr_report.json");
    let rc = cfg.snr_report.unwrap();
    let r = snr_deviation_report(&cfg).unwrap();
    assert_eq!(r.rows.len(), 51);
    // Four analytic standard deviations of a difference of two independent
    // estimates fit under 1.5e-4 at this block size.
    let snr = r.rows[0].snr_true;
    let sd_diff = 2f64.sqrt() * snr_estimator_std(snr, rc.block_size as usize);
    assert!(4.0 * sd_diff <= 1.5e-4, "{sd_diff}");
    assert!(r.max_adjacent_deviation() <= 1.5e-4, "{}", r.max_adjacent_deviation());
    assert!(r.max_adjacent_deviation() / snr <= 0.005);
}

#[test]
fn deviations_shrink_as_inverse_root_of_samples() {
    let sizes = [1e5, 1e6, 1e7, 1e8, 1e9];
    let mut prev = Vec::new();
    let mut pilot = Vec::new();
    for &n in &sizes {
        let r = report(n as u64, n as u64 / 10, Sampling::SufficientStatistics);
        prev.push(mean(r.rows.iter().filter_map(|row| row.previous_deviation())));
        pilot.push(mean(r.rows.iter().filter_map(|row| row.pilot_deviation())));
    }
    for devs in [&prev, &pilot] {
        let s = log_slope(&sizes, devs);
        assert!((s + 0.5).abs() < 0.1, "slope {s} for {devs:?}");
    }
}

#[test]
fn full_sampling_matches_sufficient_statistics_in_scale() {
    let a = report(20_000, 2_000, Sampling::Full);
    let b = report(20_000, 2_000, Sampling::SufficientStatistics);
    let da = mean(a.rows.iter().filter_map(|r| r.previous_deviation()));
    let db = mean(b.rows.iter().filter_map(|r| r.previous_deviation()));
    assert!((da / db - 1.0).abs() < 0.3, "{da} {db}");
    let csv = a.to_csv();
    assert_eq!(csv.lines().count(), 52);
    assert_eq!(csv.lines().next().unwrap().split(',').count(), csv.lines().nth(2).unwrap().split(',').count());
}
