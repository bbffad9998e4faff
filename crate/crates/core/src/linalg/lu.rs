use crate::error::{Error, Result};
use crate::linalg::{Matrix, C64};

/// LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    min_pivot: f64,
}

impl Lu {
    pub fn new(a: &Matrix) -> Result<Self> {
        let n = a.require_square()?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            min_pivot = min_pivot.min(pmax);
            if pmax == 0.0 {
                return Err(Error::Resolvent { distance: 0.0 });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / piv;
                lu[(i, k)] = f;
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        Ok(Self { lu, perm, min_pivot })
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn solve_vec(&self, b: &[C64]) -> Vec<C64> {
        let n = self.perm.len();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                let xk = x[k];
                x[i] -= l * xk;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let u = self.lu[(i, k)];
                let xk = x[k];
                x[i] -= u * xk;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> Matrix {
        let n = self.perm.len();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            e[j] = C64::new(1.0, 0.0);
            inv.set_column(j, &self.solve_vec(&e));
        }
        inv
    }
}

/// `(zeta I - a)^{-1}` without conditioning checks; used inside quadrature
/// loops where the grid already keeps `zeta` away from the spectrum.
pub fn resolvent_unchecked(a: &Matrix, zeta: C64) -> Matrix {
    let n = a.dim();
    if n == 1 {
        return Matrix::from_diag(&[C64::new(1.0, 0.0) / (zeta - a[(0, 0)])]);
    }
    if n == 2 {
        let (p, q, r, s) = (zeta - a[(0, 0)], -a[(0, 1)], -a[(1, 0)], zeta - a[(1, 1)]);
        let det = p * s - q * r;
        return Matrix::from_rows(&[vec![s / det, -q / det], vec![-r / det, p / det]]);
    }
    let m = &a.scale_real(-1.0).shift(zeta);
    match Lu::new(m) {
        Ok(lu) => lu.inverse(),
        Err(_) => Matrix::from_fn(n, n, |_, _| C64::new(f64::NAN, f64::NAN)),
    }
}
