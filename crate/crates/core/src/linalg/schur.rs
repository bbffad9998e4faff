//! Complex Schur triangularization `a = q t q*` by Hessenberg reduction
//! followed by Wilkinson-shifted QR sweeps built from Givens rotations.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, C64};

const MAX_ITERS_PER_EIGENVALUE: usize = 100;

#[derive(Debug, Clone)]
pub struct Schur {
    /// Upper triangular factor.
    pub t: Matrix,
    /// Unitary factor.
    pub q: Matrix,
}

impl Schur {
    pub fn new(a: &Matrix) -> Result<Self> {
        let n = a.require_square()?;
        a.require_finite()?;
        let mut h = a.clone();
        let mut q = Matrix::identity(n);
        hessenberg(&mut h, &mut q);
        qr_iterate(&mut h, &mut q)?;
        // Clean the strictly lower part.
        for i in 0..n {
            for j in 0..i {
                h[(i, j)] = C64::new(0.0, 0.0);
            }
        }
        Ok(Self { t: h, q })
    }

    pub fn eigenvalues(&self) -> Vec<C64> {
        self.t.diag()
    }
}

/// Eigenvalues of a general square matrix (unordered).
pub fn eigenvalues(a: &Matrix) -> Result<Vec<C64>> {
    Ok(Schur::new(a)?.eigenvalues())
}

fn hessenberg(h: &mut Matrix, q: &mut Matrix) {
    let n = h.dim();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { C64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let alpha = -phase * xnorm;
        let mut v = x.clone();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // h <- (I - 2 v v*) h on rows k+1..n
        for j in 0..n {
            let s: C64 = (0..v.len()).map(|r| v[r].conj() * h[(k + 1 + r, j)]).sum();
            for r in 0..v.len() {
                h[(k + 1 + r, j)] -= v[r] * s * 2.0;
            }
        }
        // h <- h (I - 2 v v*) on columns k+1..n, same for q
        for mat in [&mut *h, &mut *q] {
            for i in 0..n {
                let s: C64 = (0..v.len()).map(|r| mat[(i, k + 1 + r)] * v[r]).sum();
                for r in 0..v.len() {
                    mat[(i, k + 1 + r)] -= s * v[r].conj() * 2.0;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::new(0.0, 0.0);
        }
    }
}

/// Givens pair `(c, s)` with `[[c, s], [-conj(s), c]] (a, b)^T = (r, 0)^T`.
#[inline]
fn givens(a: C64, b: C64) -> (f64, C64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

fn qr_iterate(h: &mut Matrix, q: &mut Matrix) -> Result<()> {
    let n = h.dim();
    if n == 1 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let norm_scale = h.max_abs().max(f64::MIN_POSITIVE);

    while hi > 0 {
        // Locate the start of the unreduced active block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let reference = if diag == 0.0 { norm_scale } else { diag };
            if sub <= eps * reference {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }

        iter += 1;
        total += 1;
        if iter > MAX_ITERS_PER_EIGENVALUE || total > MAX_ITERS_PER_EIGENVALUE * n * 4 {
            return Err(Error::Convergence("Schur QR iteration did not converge".into()));
        }

        let mu = if iter % 11 == 0 {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + C64::new(h[(hi, hi - 1)].norm() * 0.75, 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = C64::new(0.0, 0.0);
            rots.push((k, c, s));
        }
        for &(k, c, s) in &rots {
            let top = (k + 2).min(hi);
            for i in 0..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
            for i in 0..n {
                let x = q[(i, k)];
                let y = q[(i, k + 1)];
                q[(i, k)] = x * c + y * s.conj();
                q[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok(())
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (tr_half * tr_half - det).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn check(a: &Matrix) {
        let s = Schur::new(a).unwrap();
        let rec = s.q.matmul(&s.t).matmul(&s.q.adjoint());
        let scale = a.max_abs().max(1.0);
        assert!((&rec - a).max_abs() < 1e-12 * scale, "reconstruction");
        let qtq = s.q.adjoint_mul(&s.q);
        assert!((&qtq - &Matrix::identity(a.dim())).max_abs() < 1e-12);
    }

    #[test]
    fn triangularizes_general() {
        let a = Matrix::from_rows(&[
            vec![c(1.0, 2.0), c(0.5, -1.0), c(0.0, 0.3), c(2.0, 0.0)],
            vec![c(-1.0, 0.0), c(2.0, 1.0), c(1.0, 1.0), c(0.0, -1.0)],
            vec![c(0.2, 0.2), c(0.0, -3.0), c(1.5, 0.0), c(0.7, 0.7)],
            vec![c(0.0, 1.0), c(1.0, 0.0), c(-2.0, 0.5), c(0.1, 0.0)],
        ]);
        check(&a);
    }

    #[test]
    fn real_rotation_has_complex_eigenvalues() {
        let a = Matrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let mut ev = eigenvalues(&a).unwrap();
        ev.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-14);
        check(&a);
    }

    #[test]
    fn nilpotent_and_jordan() {
        let a = Matrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]]);
        check(&a);
        let ev = eigenvalues(&a).unwrap();
        assert!(ev.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn cyclic_permutation() {
        let a = Matrix::from_real_rows(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        check(&a);
        let ev = eigenvalues(&a).unwrap();
        for z in ev {
            assert!(((z * z * z) - c(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
