//! Holevo bound for Gaussian collective attacks, reverse reconciliation and
//! homodyne detection with trusted detector noise.
//!
//! Eve purifies the two-mode state of Alice and Bob, so `S(E) = S(AB)` is
//! read off the symplectic spectrum `λ₁, λ₂` of the covariance matrix before
//! the detector. `S(E|y)` comes from the state of Alice and the detector's
//! noise modes conditioned on Bob's homodyne outcome, with spectrum
//! `λ₃, λ₄, 1`.

use crate::error::{invalid, Error, Result};

const PHYSICAL_TOL: f64 = 1e-6;

/// `g(x) = (x+1)·log₂(x+1) − x·log₂(x)`, the entropy of a thermal state with
/// mean photon number `x`.
pub fn entropy_g(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (x + 1.0) * (x + 1.0).log2() - x * x.log2()
}

/// Von Neumann entropy contribution of one symplectic eigenvalue.
fn g_of_lambda(lambda: f64) -> f64 {
    entropy_g((lambda - 1.0) / 2.0)
}

fn quadratic_pair(sum: f64, prod: f64, what: &str) -> Result<(f64, f64)> {
    let disc = sum * sum - 4.0 * prod;
    if disc < -PHYSICAL_TOL * sum * sum.max(1.0) || prod < 0.0 {
        return Err(Error::NonPhysical(format!(
            "{what}: symplectic invariants have no real spectrum (A={sum}, B={prod})"
        )));
    }
    let big = 0.5 * (sum + disc.max(0.0).sqrt());
    Ok((big.sqrt(), (prod / big).sqrt()))
}

/// `[λ₁, λ₂, λ₃, λ₄]` with `λ₁ ≥ λ₂` and `λ₃ ≥ λ₄`.
pub fn symplectic_eigenvalues(
    v_a: f64,
    eta: f64,
    transmittance: f64,
    xi: f64,
    v_el: f64,
) -> Result<[f64; 4]> {
    if !(v_a >= 0.0) || !v_a.is_finite() {
        return Err(invalid("v_a", format!("must be finite and ≥ 0, got {v_a}")));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid("eta", format!("must lie in (0, 1], got {eta}")));
    }
    if !(transmittance > 0.0) || !transmittance.is_finite() {
        return Err(invalid("transmittance", format!("must be > 0, got {transmittance}")));
    }
    if !(v_el >= 0.0) || !xi.is_finite() {
        return Err(invalid("v_el", "noise terms must be finite, v_el ≥ 0"));
    }
    let t = transmittance;
    let v = v_a + 1.0;
    let chi_line = 1.0 / t - 1.0 + xi;
    let chi_hom = (1.0 + v_el) / eta - 1.0;
    let chi_tot = chi_line + chi_hom / t;

    let a = v * v * (1.0 - 2.0 * t) + 2.0 * t + t * t * (v + chi_line).powi(2);
    let b = t * t * (v * chi_line + 1.0).powi(2);
    let (l1, l2) = quadratic_pair(a, b, "channel state")?;

    let sb = b.sqrt();
    let den = t * (v + chi_tot);
    let c = (a * chi_hom + v * sb + t * (v + chi_line)) / den;
    let d = sb * (v + sb * chi_hom) / den;
    let (l3, l4) = quadratic_pair(c, d, "conditional state")?;

    let lambdas = [l1, l2, l3, l4];
    if let Some(bad) = lambdas.iter().find(|&&l| l < 1.0 - PHYSICAL_TOL) {
        return Err(Error::NonPhysical(format!(
            "symplectic eigenvalue {bad} below the vacuum level"
        )));
    }
    Ok(lambdas.map(|l| l.max(1.0)))
}

/// `S(y:E)` in bits per symbol.
pub fn holevo_bound(v_a: f64, eta: f64, transmittance: f64, xi: f64, v_el: f64) -> Result<f64> {
    let [l1, l2, l3, l4] = symplectic_eigenvalues(v_a, eta, transmittance, xi, v_el)?;
    Ok(g_of_lambda(l1) + g_of_lambda(l2) - g_of_lambda(l3) - g_of_lambda(l4))
}

/// The 4×4 covariance matrix of Alice's and Bob's modes in `(x_A, p_A, x_B,
/// p_B)` order.
pub fn covariance_matrix(v_a: f64, eta: f64, transmittance: f64, xi: f64, v_el: f64) -> [[f64; 4]; 4] {
    let et = eta * transmittance;
    let z = (v_a * v_a + 2.0 * v_a).sqrt();
    let c = et.sqrt() * z;
    let va = v_a + 1.0;
    let vb = et * v_a + 1.0 + et * xi + v_el;
    [
        [va, 0.0, c, 0.0],
        [0.0, va, 0.0, -c],
        [c, 0.0, vb, 0.0],
        [0.0, -c, 0.0, vb],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_values() {
        assert_eq!(entropy_g(0.0), 0.0);
        assert!((entropy_g(1.0) - 2.0).abs() < 1e-15);
        assert!(entropy_g(-1e-17) == 0.0);
    }

    #[test]
    fn lossless_noiseless_channel_leaks_nothing() {
        for v_a in [0.5, 4.0, 30.0] {
            let s = holevo_bound(v_a, 1.0, 1.0, 0.0, 0.0).unwrap();
            assert!(s.abs() <= 1e-9, "{v_a}: {s}");
        }
    }

    #[test]
    fn vanishing_modulation_over_pure_loss_leaks_nothing() {
        let mut prev = f64::INFINITY;
        for v_a in [1e-2, 1e-3, 1e-4, 1e-6] {
            let s = holevo_bound(v_a, 0.612, 0.3, 0.0, 0.15).unwrap();
            assert!(s > -1e-8 && s < prev, "{v_a}: {s}");
            prev = s;
        }
        assert!(prev.abs() < 1e-4, "{prev}");
    }

    #[test]
    fn secret_fraction_shrinks_with_loss() {
        let fraction = |t: f64| {
            let snr = 0.612 * t * 4.0 / (1.0 + 0.612 * t * 0.04 + 0.15);
            let s = holevo_bound(4.0, 0.612, t, 0.04, 0.15).unwrap();
            assert!(s > 0.0);
            0.5 * (1.0 + snr).log2() - s
        };
        let ts = [0.9, 0.8, 0.5, 0.3, 0.1, 0.01];
        assert!(ts.windows(2).all(|w| fraction(w[0]) > fraction(w[1])));
    }

    #[test]
    fn untrusted_limit_has_unit_fourth_eigenvalue() {
        let [_, _, _, l4] = symplectic_eigenvalues(4.0, 1.0, 0.3, 0.05, 0.0).unwrap();
        assert!((l4 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_excess_noise_is_rejected() {
        assert!(matches!(
            holevo_bound(4.0, 1.0, 0.5, -0.5, 0.0),
            Err(Error::NonPhysical(_))
        ));
    }

    #[test]
    fn covariance_vacuum_limit_and_symmetry() {
        let g = covariance_matrix(0.0, 0.612, 0.1, 0.04, 0.15);
        assert_eq!(g[0][2], 0.0);
        assert_eq!([g[0][0], g[1][1], g[2][2], g[3][3]], [1.0, 1.0, 1.0 + 0.612 * 0.1 * 0.04 + 0.15, g[2][2]]);
        let g = covariance_matrix(4.0, 1.0, 1.0, 0.0, 0.0);
        assert!((g[0][2] - 24f64.sqrt()).abs() < 1e-15);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g[i][j], g[j][i]);
            }
        }
    }
}
