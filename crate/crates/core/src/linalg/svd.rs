//! One-sided (Hestenes) Jacobi SVD for dense complex matrices.
//!
//! Column pairs are rotated until mutually orthogonal; the singular values are
//! then the column norms. The method computes small singular values to high
//! relative accuracy, which the trace norm relies on.

use crate::linalg::{vector, Matrix, C64};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `a = u diag(s) v*` with `s` sorted descending.
///
/// `u` is `m x k`, `v` is `n x k` with `k = min(m, n)`. Columns of `u`
/// belonging to zero singular values are completed to an orthonormal set.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    pub fn new(a: &Matrix) -> Self {
        if a.rows() >= a.cols() {
            jacobi_tall(a)
        } else {
            let t = jacobi_tall(&a.adjoint());
            Svd { u: t.v, s: t.s, v: t.u }
        }
    }

    /// Largest singular value with its left and right singular vectors.
    pub fn top(&self) -> (f64, Vec<C64>, Vec<C64>) {
        (self.s[0], self.u.column(0), self.v.column(0))
    }

    /// Unitary polar factor `u v*` (square inputs only).
    pub fn polar(&self) -> Matrix {
        self.u.matmul(&self.v.adjoint())
    }
}

fn jacobi_tall(a: &Matrix) -> Svd {
    let (m, n) = (a.rows(), a.cols());
    // Work on columns stored contiguously.
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut vcols: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();

    let eps = f64::EPSILON;
    // Couplings below this are rounding noise; rotating on them (often
    // subnormal) would spoil the unitarity of the accumulated `v`.
    let scale: f64 = cols.iter().map(|c| vector::norm_sqr(c)).sum();
    let negligible = eps * eps * scale;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = vector::norm_sqr(&cols[p]);
                let beta = vector::norm_sqr(&cols[q]);
                // gamma = a_p* a_q
                let gamma: C64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= negligible || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let phase = phase / phase.norm();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let conj_phase = phase.conj();
                let (lo, hi) = cols.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s, conj_phase);
                let (lo, hi) = vcols.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s, conj_phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols.iter().map(|c| vector::norm(c)).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));

    let smax = norms.iter().copied().fold(0.0, f64::max);
    let mut u = Matrix::zeros(m, n);
    let mut v = Matrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    let mut filled: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut pending = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        s.push(norms[j]);
        v.set_column(k, &vcols[j]);
        if norms[j] > smax * 1e-13 && norms[j] > 0.0 {
            let col: Vec<C64> = cols[j].iter().map(|z| z / norms[j]).collect();
            u.set_column(k, &col);
            filled.push(col);
        } else {
            pending.push(k);
        }
    }
    // Complete the left basis for (numerically) zero singular values.
    let mut e = 0;
    for k in pending {
        loop {
            let mut cand = vec![C64::new(0.0, 0.0); m];
            cand[e % m] = C64::new(1.0, 0.0);
            e += 1;
            for _ in 0..2 {
                for f in &filled {
                    let proj = vector::dot(&cand, f);
                    vector::axpy(&mut cand, -proj, f);
                }
            }
            if let Some(col) = vector::normalized(&cand) {
                if vector::norm(&cand) > 1e-8 {
                    u.set_column(k, &col);
                    filled.push(col);
                    break;
                }
            }
            if e > 4 * m + n {
                break;
            }
        }
    }
    Svd { u, s, v }
}

#[inline]
fn rotate(xp: &mut [C64], xq: &mut [C64], c: f64, s: f64, conj_phase: C64) {
    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
        let bq = *b * conj_phase;
        let ap = *a;
        *a = ap * c - bq * s;
        *b = ap * s + bq * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn reconstruct(svd: &Svd) -> Matrix {
        let k = svd.s.len();
        let sd = Matrix::from_fn(k, k, |i, j| if i == j { c(svd.s[i], 0.0) } else { c(0.0, 0.0) });
        svd.u.matmul(&sd).matmul(&svd.v.adjoint())
    }

    #[test]
    fn reconstructs_square_complex() {
        let a = Matrix::from_rows(&[
            vec![c(1.0, 2.0), c(0.5, -1.0), c(0.0, 0.3)],
            vec![c(-1.0, 0.0), c(2.0, 1.0), c(1.0, 1.0)],
            vec![c(0.2, 0.2), c(0.0, -3.0), c(1.5, 0.0)],
        ]);
        let svd = Svd::new(&a);
        assert!((&reconstruct(&svd) - &a).max_abs() < 1e-13);
        let utu = svd.u.adjoint_mul(&svd.u);
        assert!((&utu - &Matrix::identity(3)).max_abs() < 1e-13);
        assert!(svd.s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn wide_and_rank_deficient() {
        let a = Matrix::outer(&[c(1.0, 0.0), c(0.0, 1.0)], &[c(1.0, 0.0), c(2.0, 0.0), c(0.0, -1.0)]);
        let svd = Svd::new(&a);
        assert!((svd.s[0] - (2.0f64).sqrt() * 6.0f64.sqrt()).abs() < 1e-13);
        assert!(svd.s[1].abs() < 1e-13);
        assert!((&reconstruct(&svd) - &a).max_abs() < 1e-13);
        let utu = svd.u.adjoint_mul(&svd.u);
        assert!((&utu - &Matrix::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_has_unitary_factors() {
        let svd = Svd::new(&Matrix::zeros(3, 3));
        assert!(svd.s.iter().all(|&x| x == 0.0));
        let p = svd.polar();
        assert!((&p.adjoint_mul(&p) - &Matrix::identity(3)).max_abs() < 1e-12);
    }
}
