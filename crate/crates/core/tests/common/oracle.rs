use nalgebra::{DMatrix, DVector};

/// `⊕ [[0, 1], [−1, 0]]` over `modes` modes.
pub fn omega(modes: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        w[(2 * k, 2 * k + 1)] = 1.0;
        w[(2 * k + 1, 2 * k)] = -1.0;
    }
    w
}

/// Symplectic eigenvalues, descending, from the moduli of the eigenvalues of
/// `Ω·Γ` (which come in `±iλ` pairs).
pub fn symplectic_spectrum(gamma: &DMatrix<f64>) -> Vec<f64> {
    let modes = gamma.nrows() / 2;
    let m = omega(modes) * gamma;
    let mut moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    moduli.into_iter().step_by(2).collect()
}

/// Smallest eigenvalue of the real form of `Γ + iΩ`; non-negative iff the
/// matrix is a valid quantum covariance matrix.
pub fn uncertainty_margin(gamma: &DMatrix<f64>) -> f64 {
    let n = gamma.nrows();
    let w = omega(n / 2);
    let mut big = DMatrix::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(gamma);
    big.view_mut((n, n), (n, n)).copy_from(gamma);
    big.view_mut((0, n), (n, n)).copy_from(&(-&w));
    big.view_mut((n, 0), (n, n)).copy_from(&w);
    big.symmetric_eigenvalues().min()
}

fn two_mode(a: f64, b: f64, c: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            a, 0.0, c, 0.0, //
            0.0, a, 0.0, -c, //
            c, 0.0, b, 0.0, //
            0.0, -c, 0.0, b,
        ],
    )
}

/// Alice and Bob's modes after the channel, before Bob's detector.
pub fn channel_state(v_a: f64, t: f64, xi: f64) -> DMatrix<f64> {
    let v = v_a + 1.0;
    let chi_line = 1.0 / t - 1.0 + xi;
    two_mode(v, t * (v + chi_line), (t * (v * v - 1.0)).sqrt())
}

/// Holevo spectra assembled mode by mode: `(spec(AB), spec(AFG | x_B))`.
///
/// The detector is a beam splitter of transmittance `η` mixing Bob's mode
/// with one arm `F₀` of an EPR pair `(F₀, G)` of variance
/// `1 + v_el/(1−η)`; Bob homodynes the `x` quadrature of the transmitted
/// output.
pub fn trusted_detector_spectra(v_a: f64, eta: f64, t: f64, xi: f64, v_el: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(eta < 1.0);
    let ab = channel_state(v_a, t, xi);
    let nu = 1.0 + v_el / (1.0 - eta);
    let epr = two_mode(nu, nu, (nu * nu - 1.0).sqrt());

    // modes: A, B', F0, G
    let mut g = DMatrix::zeros(8, 8);
    g.view_mut((0, 0), (4, 4)).copy_from(&ab);
    g.view_mut((4, 4), (4, 4)).copy_from(&epr);

    let (s, c) = (eta.sqrt(), (1.0 - eta).sqrt());
    let mut bs = DMatrix::<f64>::identity(8, 8);
    for q in 0..2 {
        let (b, f) = (2 + q, 4 + q);
        bs[(b, b)] = s;
        bs[(b, f)] = c;
        bs[(f, b)] = -c;
        bs[(f, f)] = s;
    }
    let g = &bs * g * bs.transpose();

    // reorder to A, F, G | B1
    let order = [0, 1, 4, 5, 6, 7, 2, 3];
    let g = DMatrix::from_fn(8, 8, |i, j| g[(order[i], order[j])]);
    let rest = g.view((0, 0), (6, 6)).into_owned();
    let sigma: DVector<f64> = g.view((0, 6), (6, 1)).column(0).into_owned();
    let conditional = rest - &sigma * sigma.transpose() / g[(6, 6)];

    (symplectic_spectrum(&ab), symplectic_spectrum(&conditional))
}

/// `S(y:E)` from the oracle spectra.
pub fn holevo_from_spectra(ab: &[f64], cond: &[f64]) -> f64 {
    let g = |l: f64| {
        let x = ((l - 1.0) / 2.0).max(0.0);
        if x == 0.0 {
            0.0
        } else {
            (x + 1.0) * (x + 1.0).log2() - x * x.log2()
        }
    };
    ab.iter().map(|&l| g(l)).sum::<f64>() - cond.iter().map(|&l| g(l)).sum::<f64>()
}
