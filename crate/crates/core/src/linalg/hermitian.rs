//! Cyclic Jacobi eigensolver for Hermitian matrices.

use crate::linalg::{Matrix, C64};

const MAX_SWEEPS: usize = 60;

/// Eigen-decomposition `h = v diag(w) v*` of a Hermitian matrix, `w` ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl HermitianEigen {
    /// Only the Hermitian part `(h + h*)/2` of the input is used.
    pub fn new(h: &Matrix) -> Self {
        let n = h.dim();
        let mut a = Matrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
        let mut v = Matrix::identity(n);

        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)].norm_sqr())
                .sum();
            let diag: f64 = (0..n).map(|i| a[(i, i)].norm_sqr()).sum();
            if off <= f64::EPSILON * f64::EPSILON * diag.max(f64::MIN_POSITIVE) || off == 0.0 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let g = apq.norm();
                    if g == 0.0 {
                        continue;
                    }
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    if g <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                        a[(p, q)] = C64::new(0.0, 0.0);
                        a[(q, p)] = C64::new(0.0, 0.0);
                        continue;
                    }
                    let phase = apq / g; // e^{i phi}
                    let tau = (aqq - app) / (2.0 * g);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let em = phase.conj(); // e^{-i phi}
                    let ep = phase;
                    // Columns: A <- A W, W = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                    for k in 0..n {
                        let hp = a[(k, p)];
                        let hq = a[(k, q)];
                        a[(k, p)] = hp * c - hq * em * s;
                        a[(k, q)] = hp * s + hq * em * c;
                    }
                    // Rows: A <- W* A
                    for k in 0..n {
                        let hp = a[(p, k)];
                        let hq = a[(q, k)];
                        a[(p, k)] = hp * c - hq * ep * s;
                        a[(q, k)] = hp * s + hq * ep * c;
                    }
                    a[(p, q)] = C64::new(0.0, 0.0);
                    a[(q, p)] = C64::new(0.0, 0.0);
                    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                    for k in 0..n {
                        let vp = v[(k, p)];
                        let vq = v[(k, q)];
                        v[(k, p)] = vp * c - vq * em * s;
                        v[(k, q)] = vp * s + vq * em * c;
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
        let values = order.iter().map(|&i| a[(i, i)].re).collect();
        let vectors = Matrix::from_fn(n, n, |i, k| v[(i, order[k])]);
        Self { values, vectors }
    }

    /// `v diag(g(w)) v*`.
    pub fn map(&self, g: impl Fn(f64) -> f64) -> Matrix {
        let n = self.values.len();
        let gw: Vec<f64> = self.values.iter().map(|&w| g(w)).collect();
        let mut out = Matrix::zeros(n, n);
        for k in 0..n {
            if gw[k] == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * gw[k];
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonalizes_complex_hermitian() {
        let h = Matrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.5)],
            vec![c(1.0, 1.0), c(-1.0, 0.0), c(0.3, 0.0)],
            vec![c(0.0, -0.5), c(0.3, 0.0), c(0.5, 0.0)],
        ]);
        let e = HermitianEigen::new(&h);
        let rec = e.map(|w| w);
        assert!((&rec - &h).max_abs() < 1e-13);
        let vtv = e.vectors.adjoint_mul(&e.vectors);
        assert!((&vtv - &Matrix::identity(3)).max_abs() < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn pauli_y() {
        let h = Matrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]);
        let e = HermitianEigen::new(&h);
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }
}
