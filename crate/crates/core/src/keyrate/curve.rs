use super::{key_rate_asymptotic, DetectorModel};
use crate::channel::ChannelParams;
use crate::error::Result;

/// Search interval for the modulation variance, in SNU.
pub const V_A_RANGE: (f64, f64) = (0.1, 50.0);

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes a unimodal `f` on `[lo, hi]`; returns `(argmax, max)`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .max_by(|p, q| p.1.total_cmp(&q.1))
        .unwrap()
}

/// Modulation variance maximizing the asymptotic rate at `params`.
pub fn optimize_v_a(params: &ChannelParams, beta: f64, model: DetectorModel) -> Result<f64> {
    params.validate()?;
    let rate = |v: f64| {
        key_rate_asymptotic(&params.with_v_a(v), beta, model).map_or(f64::NEG_INFINITY, |r| r.rate_raw)
    };
    Ok(golden_section_max(rate, V_A_RANGE.0, V_A_RANGE.1, 1e-6).0)
}

/// First distance in `[start, end]` where `rate(d)` stops being positive,
/// located by a grid scan with spacing `step` and refined by bisection.
///
/// `None` if the rate is not positive at `start` or stays positive up to
/// `end`.
pub fn cutoff_distance<F>(mut rate: F, start: f64, end: f64, step: f64) -> Result<Option<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    if rate(start)? <= 0.0 {
        return Ok(None);
    }
    let mut lo = start;
    loop {
        let hi = (lo + step).min(end);
        if rate(hi)? <= 0.0 {
            let (mut a, mut b) = (lo, hi);
            while b - a > 1e-9 {
                let mid = 0.5 * (a + b);
                if rate(mid)? > 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Ok(Some(0.5 * (a + b)));
        }
        if hi >= end {
            return Ok(None);
        }
        lo = hi;
    }
}
