//! Left-multiplication matrices of the octonion units.
//!
//! The Cayley table follows the cyclic Fano-plane rule `e_i·e_{i+1} = e_{i+3}`
//! (indices 1..7, mod 7). For every unit `e_i` the map `x ↦ e_i·x` is a signed
//! permutation of the 8 coordinates, and because octonions form a
//! composition algebra these maps satisfy `A_iᵀA_j + A_jᵀA_i = 2δ_ij·I`.

use std::sync::OnceLock;

pub const DIM: usize = 8;

/// The 8 orthogonal matrices `A_1..A_8`, stored as signed permutations:
/// `(A_i·x)[perm[i][j]] = sign[i][j]·x[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationBasis {
    perm: [[usize; DIM]; DIM],
    sign: [[f64; DIM]; DIM],
}

// (a, b, c) means e_a·e_b = e_c, and cyclic rotations of it.
const FANO_TRIPLES: [(usize, usize, usize); 7] = [
    (1, 2, 4),
    (2, 3, 5),
    (3, 4, 6),
    (4, 5, 7),
    (5, 6, 1),
    (6, 7, 2),
    (7, 1, 3),
];

fn unit_product(i: usize, j: usize) -> (f64, usize) {
    if i == 0 {
        return (1.0, j);
    }
    if j == 0 {
        return (1.0, i);
    }
    if i == j {
        return (-1.0, 0);
    }
    for &(a, b, c) in &FANO_TRIPLES {
        for (p, q, r) in [(a, b, c), (b, c, a), (c, a, b)] {
            if (i, j) == (p, q) {
                return (1.0, r);
            }
            if (i, j) == (q, p) {
                return (-1.0, r);
            }
        }
    }
    unreachable!("every pair of distinct imaginary units lies on one Fano line")
}

impl RotationBasis {
    fn construct() -> Self {
        let mut perm = [[0; DIM]; DIM];
        let mut sign = [[0.0; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                let (s, k) = unit_product(i, j);
                perm[i][j] = k;
                sign[i][j] = s;
            }
        }
        RotationBasis { perm, sign }
    }

    /// Dense `A_i` (0-based `i`), row-major.
    pub fn matrix(&self, i: usize) -> [[f64; DIM]; DIM] {
        let mut m = [[0.0; DIM]; DIM];
        for j in 0..DIM {
            m[self.perm[i][j]][j] = self.sign[i][j];
        }
        m
    }

    /// `A_i·x`.
    pub fn apply_unit(&self, i: usize, x: &[f64; DIM]) -> [f64; DIM] {
        let mut out = [0.0; DIM];
        for j in 0..DIM {
            out[self.perm[i][j]] = self.sign[i][j] * x[j];
        }
        out
    }

    /// `A_iᵀ·u`.
    pub fn apply_unit_transposed(&self, i: usize, u: &[f64; DIM]) -> [f64; DIM] {
        let mut out = [0.0; DIM];
        for j in 0..DIM {
            out[j] = self.sign[i][j] * u[self.perm[i][j]];
        }
        out
    }

    /// `(Σ α_i A_i)·x`.
    pub fn combine(&self, alpha: &[f64; DIM], x: &[f64; DIM]) -> [f64; DIM] {
        let mut out = [0.0; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                out[self.perm[i][j]] += alpha[i] * self.sign[i][j] * x[j];
            }
        }
        out
    }

    /// `(Σ α_i A_i)ᵀ·u`.
    pub fn combine_transposed(&self, alpha: &[f64; DIM], u: &[f64; DIM]) -> [f64; DIM] {
        let mut out = [0.0; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                out[j] += alpha[i] * self.sign[i][j] * u[self.perm[i][j]];
            }
        }
        out
    }

    /// Checks `A_1 = I`, every row of `perm` is a permutation, and the
    /// anticommutation relation on the dense matrices.
    pub fn self_test(&self) -> Result<(), String> {
        if (0..DIM).any(|j| self.perm[0][j] != j || self.sign[0][j] != 1.0) {
            return Err("A_1 is not the identity".into());
        }
        for i in 0..DIM {
            let mut seen = [false; DIM];
            for &k in &self.perm[i] {
                if std::mem::replace(&mut seen[k], true) {
                    return Err(format!("A_{} is not a permutation", i + 1));
                }
            }
        }
        let mats: Vec<_> = (0..DIM).map(|i| self.matrix(i)).collect();
        for i in 0..DIM {
            for j in i..DIM {
                for r in 0..DIM {
                    for c in 0..DIM {
                        let mut s = 0.0;
                        for k in 0..DIM {
                            s += mats[i][k][r] * mats[j][k][c] + mats[j][k][r] * mats[i][k][c];
                        }
                        let want = if i == j && r == c { 2.0 } else { 0.0 };
                        if (s - want).abs() > 1e-12 {
                            return Err(format!(
                                "A_{}ᵀA_{} + A_{}ᵀA_{} differs from 2δI at ({r},{c})",
                                i + 1,
                                j + 1,
                                j + 1,
                                i + 1
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// The shared, validated basis.
pub fn build_basis() -> &'static RotationBasis {
    static BASIS: OnceLock<RotationBasis> = OnceLock::new();
    BASIS.get_or_init(|| {
        let b = RotationBasis::construct();
        if let Err(e) = b.self_test() {
            panic!("octonion basis self-test failed: {e}");
        }
        b
    })
}
