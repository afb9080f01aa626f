mod common;

use cvqkd::channel::ChannelParams;
use cvqkd::keyrate::{analytic_rate, key_rate_asymptotic, key_rate_asymptotic_legacy, DetectorModel, RateMethod, SecurityParams};
use cvqkd::pipeline::{curve, CurveConfig, DistanceGrid};

const TRUSTED: DetectorModel = DetectorModel::Trusted;

fn fiber(d: f64, v_a: f64) -> ChannelParams {
    ChannelParams::from_distance(d, 0.2, 0.612, 0.04, 0.15, v_a).unwrap()
}

#[test]
fn asymptotic_legacy_is_exactly_half() {
    for d in 1..=120 {
        let p = fiber(d as f64, 4.0);
        let a = key_rate_asymptotic(&p, 0.95, TRUSTED).unwrap().rate_raw;
        let l = key_rate_asymptotic_legacy(&p, 0.95, TRUSTED).unwrap().rate_raw;
        assert!((l - 0.5 * a).abs() <= 1e-12, "{d} km: {l} vs {a}");
    }
}

#[test]
fn rates_are_monotone_on_a_grid() {
    let sec = SecurityParams::default();
    let sizes = [1e7 as u64, 1e8 as u64, 1e10 as u64, 1e12 as u64];
    for method in [RateMethod::Legacy, RateMethod::Proposed] {
        for &n in &sizes {
            let mut last = f64::INFINITY;
            for d in (0..=150).step_by(5) {
                let r = analytic_rate(method, &fiber(d as f64, 4.0), n, 0.95, &sec, TRUSTED).unwrap().rate_raw;
                assert!(r <= last + 1e-15, "{method:?} N={n} {d} km");
                last = r;
            }
        }
        for d in [5.0, 40.0, 70.0] {
            let p = fiber(d, 4.0);
            let by_n: Vec<f64> = sizes.iter().map(|&n| analytic_rate(method, &p, n, 0.95, &sec, TRUSTED).unwrap().rate_raw).collect();
            assert!(by_n.windows(2).all(|w| w[0] <= w[1]), "{by_n:?}");
            let by_beta: Vec<f64> = [0.9, 0.93, 0.95, 0.98]
                .iter()
                .map(|&b| analytic_rate(method, &p, 1e10 as u64, b, &sec, TRUSTED).unwrap().rate_raw)
                .collect();
            assert!(by_beta.windows(2).all(|w| w[0] <= w[1]), "{by_beta:?}");
        }
    }
}

#[test]
fn proposed_approaches_asymptotic() {
    let sec = SecurityParams::default();
    let p = fiber(30.0, 4.0);
    let a = key_rate_asymptotic(&p, 0.95, TRUSTED).unwrap().rate_raw;
    let gaps: Vec<f64> = [1e8, 1e10, 1e12, 1e15]
        .iter()
        .map(|&n| a - analytic_rate(RateMethod::Proposed, &p, n as u64, 0.95, &sec, TRUSTED).unwrap().rate_raw)
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0] && w[1] >= 0.0), "{gaps:?}");
    assert!(gaps[3] < 1e-3 * a, "{gaps:?}");
}

/// Cutoffs with the configured per-distance V_A optimization.
const CUTOFFS: [(&str, f64, f64, f64); 3] = [("1e8", 1e8, 53.37, 59.01), ("1e10", 1e10, 91.82, 97.67), ("1e12", 1e12, 130.09, 135.65)];
const ASYMPTOTIC_CUTOFF_KM: f64 = 210.25;

#[test]
fn curves_order_and_cutoffs() {
    let cfg = common::config("curve.json");
    let report = curve(&cfg).unwrap();
    for (_, n, legacy_km, proposed_km) in CUTOFFS {
        let l = report.curve(RateMethod::Legacy, Some(n));
        let p = report.curve(RateMethod::Proposed, Some(n));
        assert_eq!(l.len(), p.len());
        for (a, b) in l.iter().zip(&p) {
            assert_eq!(a.distance_km, b.distance_km);
            assert!(b.rate.rate >= a.rate.rate, "N={n} at {} km", a.distance_km);
            assert!(b.rate.rate >= 0.0 && a.rate.rate >= 0.0);
        }
        let cl = report.cutoff(RateMethod::Legacy, Some(n)).unwrap();
        let cp = report.cutoff(RateMethod::Proposed, Some(n)).unwrap();
        assert!(cp > cl);
        assert!((cl - legacy_km).abs() < 0.01 && (cp - proposed_km).abs() < 0.01, "N={n}: {cl} {cp}");
    }
    let al = report.cutoff(RateMethod::AsymptoticLegacy, None).unwrap();
    let ap = report.cutoff(RateMethod::AsymptoticProposed, None).unwrap();
    assert!((al - ap).abs() < 0.1 && (ap - ASYMPTOTIC_CUTOFF_KM).abs() < 0.01, "{al} {ap}");
    for (l, p) in report
        .curve(RateMethod::AsymptoticLegacy, None)
        .iter()
        .zip(report.curve(RateMethod::AsymptoticProposed, None))
    {
        assert!((l.rate.rate_raw - 0.5 * p.rate.rate_raw).abs() <= 1e-12);
    }
    let csv = report.to_csv();
    assert!(csv.starts_with("distance_km,N,method,V_A,beta,i_ab,s_be,delta_n,rate_raw,rate\n"));
    assert_eq!(csv.lines().count(), 1 + report.rows.len());
}

#[test]
fn pinned_modulation_shifts_cutoffs_only_slightly() {
    let mut cfg = common::config("curve.json");
    cfg.curve = Some(CurveConfig {
        distances_km: DistanceGrid::List(vec![10.0, 50.0]),
        block_sizes: vec![1e8],
        v_a: Some(4.0),
        cutoff_step_km: 0.1,
    });
    let report = curve(&cfg).unwrap();
    assert!(report.rows.iter().all(|r| r.v_a == 4.0));
    let cl = report.cutoff(RateMethod::Legacy, Some(1e8)).unwrap();
    let cp = report.cutoff(RateMethod::Proposed, Some(1e8)).unwrap();
    assert!((cl - 53.28).abs() < 0.01 && (cp - 58.98).abs() < 0.01, "{cl} {cp}");
}
