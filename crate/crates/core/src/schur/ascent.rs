//! Ascent routines shared by the multiplier and commutator estimators.

use crate::linalg::{opnorm, Matrix, Svd, C64};

/// Schatten `p`-norm and its conjugate gradient direction
/// `sum_k (s_k / ||y||_p)^{p-1} u_k v_k*`.
pub(crate) fn schatten_grad(y: &Matrix, p: f64) -> (f64, Matrix) {
    let svd = Svd::new(y);
    let m = svd.s[0];
    if m == 0.0 {
        return (0.0, Matrix::zeros(y.rows(), y.cols()));
    }
    let q = svd.s.iter().map(|s| (s / m).powf(p)).sum::<f64>().powf(1.0 / p);
    let w: Vec<f64> = svd.s.iter().map(|s| (s / m / q).powf(p - 1.0)).collect();
    let k = svd.s.len();
    let g = Matrix::from_fn(y.rows(), y.cols(), |i, j| {
        (0..k).filter(|&t| w[t] > 1e-300).map(|t| svd.u[(i, t)] * w[t] * svd.v[(j, t)].conj()).sum()
    });
    (m * q, g)
}

pub(crate) const P_SCHEDULE: [f64; 9] = [4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0, 1024.0];

/// Linear map on matrices with its adjoint.
pub(crate) struct LinearMap<'a> {
    pub apply: Box<dyn Fn(&Matrix) -> Matrix + 'a>,
    pub adjoint: Box<dyn Fn(&Matrix) -> Matrix + 'a>,
}

impl<'a> LinearMap<'a> {
    pub fn identity() -> Self {
        Self { apply: Box::new(|x| x.clone()), adjoint: Box::new(|x| x.clone()) }
    }

    pub fn hadamard(m: &'a Matrix) -> Self {
        Self { apply: Box::new(move |x| m.hadamard(x)), adjoint: Box::new(move |g| m.conj().hadamard(g)) }
    }

    /// `x -> a x - x a`.
    pub fn derivation(a: &'a Matrix) -> Self {
        let astar = a.adjoint();
        Self {
            apply: Box::new(move |x| &a.matmul(x) - &x.matmul(a)),
            adjoint: Box::new(move |g| &astar.matmul(g) - &g.matmul(&astar)),
        }
    }
}

pub(crate) struct RatioProblem<'a> {
    /// Denominator map.
    pub den: LinearMap<'a>,
    /// Numerator map.
    pub num: LinearMap<'a>,
    /// Orthogonal projection onto the admissible subspace.
    pub proj: Box<dyn Fn(&Matrix) -> Matrix + 'a>,
    /// Ratios are only scored when `||den(x)|| >= floor * ||x||_F`.
    pub floor: f64,
}

impl RatioProblem<'_> {
    /// `||num(x)|| / ||den(x)||` in operator norm, or `None` below the floor.
    pub fn exact(&self, x: &Matrix) -> Option<f64> {
        let d = opnorm(&(self.den.apply)(x));
        if d <= self.floor * x.frobenius_norm() || d == 0.0 {
            return None;
        }
        Some(opnorm(&(self.num.apply)(x)) / d)
    }

    fn smooth(&self, x: &Matrix, p: f64) -> Option<(f64, Matrix)> {
        let (nd, gd) = schatten_grad(&(self.den.apply)(x), p);
        if nd <= self.floor * x.frobenius_norm() || nd == 0.0 {
            return None;
        }
        let (nn, gn) = schatten_grad(&(self.num.apply)(x), p);
        let r = nn / nd;
        let g = &(self.num.adjoint)(&gn) - &(self.den.adjoint)(&gd).scale_real(r);
        Some((r, (self.proj)(&g).scale_real(1.0 / nd)))
    }

    /// Maximizes the ratio from `x0` by projected ascent on Schatten-`p`
    /// surrogates with increasing `p`. Returns the best exact ratio seen and
    /// the matrix attaining it, normalized to unit Frobenius norm.
    pub fn ascend(&self, x0: &Matrix, iters: usize) -> (f64, Matrix) {
        let mut x = (self.proj)(x0);
        let nf = x.frobenius_norm();
        if nf == 0.0 {
            return (0.0, x);
        }
        x = x.scale_real(1.0 / nf);
        let mut best = (self.exact(&x).unwrap_or(0.0), x.clone());
        for &p in &P_SCHEDULE {
            let Some((mut r, mut g)) = self.smooth(&x, p) else { continue };
            let mut step = 0.5;
            for _ in 0..iters {
                let mut moved = false;
                for _ in 0..40 {
                    let y = &x + &g.scale_real(step);
                    let ny = y.frobenius_norm();
                    if ny == 0.0 {
                        step *= 0.5;
                        continue;
                    }
                    let y = y.scale_real(1.0 / ny);
                    if let Some((ry, gy)) = self.smooth(&y, p) {
                        if ry > r {
                            x = y;
                            r = ry;
                            g = gy;
                            moved = true;
                            break;
                        }
                    }
                    step *= 0.5;
                }
                if !moved {
                    break;
                }
                step *= 1.5;
                if let Some(t) = self.exact(&x) {
                    if t > best.0 {
                        best = (t, x.clone());
                    }
                }
            }
        }
        best
    }
}

/// Mask projection: zeroes entries where `free` is set.
pub(crate) fn zero_on(free: &[bool], n: usize) -> impl Fn(&Matrix) -> Matrix + '_ {
    move |x: &Matrix| Matrix::from_fn(n, n, |i, j| if free[i * n + j] { C64::new(0.0, 0.0) } else { x[(i, j)] })
}
