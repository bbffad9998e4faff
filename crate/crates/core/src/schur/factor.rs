//! Upper bounds for Schur multiplier norms through explicit factorizations
//! `m_ij = <u_i, v_j>`, which give `||m||_S <= max ||u_i|| max ||v_j||`.
//!
//! For a positive definite `P = R R*` put `u_i` = row `i` of `R` and
//! `v_j = conj(R^{-1} m_j)`. Then `max ||u_i||^2 = max P_ii` and
//! `||v_j||^2 = m_j* P^{-1} m_j`, and the optimum over `P` equals the norm.
//! Entries marked free may be changed before factoring; for a fixed `P`
//! the best choice per column is a small least-squares solve.
//! `R` is optimized by gradient descent on a log-sum-exp smoothing of the
//! product of the two maxima, with the smoothing sharpened in stages.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{vector, Lu, Matrix, C64};

/// Vectors `u_i`, `v_j` with `<u_i, v_j>` reproducing `target`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Factorization {
    #[serde(with = "vec_of_vecs")]
    pub u: Vec<Vec<C64>>,
    #[serde(with = "vec_of_vecs")]
    pub v: Vec<Vec<C64>>,
    /// The multiplier being factored; equals the input on fixed entries.
    pub target: Matrix,
    /// `max |<u_i, v_j> - target_ij|`.
    pub max_deviation: f64,
}

impl Factorization {
    /// Certified bound on `||target||_S`: the factorization product plus a
    /// Frobenius allowance for the deviation.
    pub fn bound(&self) -> f64 {
        let mu = self.u.iter().map(|x| vector::norm(x)).fold(0.0, f64::max);
        let mv = self.v.iter().map(|x| vector::norm(x)).fold(0.0, f64::max);
        let n = self.u.len() as f64;
        mu * mv + n.sqrt() * self.max_deviation
    }

    /// Recomputes the deviation from the stored vectors.
    pub fn deviation(&self) -> f64 {
        let n = self.u.len();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in 0..self.v.len() {
                d = d.max((vector::dot(&self.u[i], &self.v[j]) - self.target[(i, j)]).norm());
            }
        }
        d
    }

    /// Independent check: the vectors reproduce `target` to the recorded
    /// deviation, and `target` agrees with `m` off the free entries.
    pub fn verify(&self, m: &Matrix, free: Option<&[bool]>) -> bool {
        let n = m.rows();
        if self.target.rows() != n || self.u.len() != n || self.v.len() != n {
            return false;
        }
        let fixed_ok = (0..n).all(|i| {
            (0..n).all(|j| free.is_some_and(|f| f[i * n + j]) || self.target[(i, j)] == m[(i, j)])
        });
        fixed_ok && self.deviation() <= self.max_deviation * (1.0 + 1e-9) + 1e-15
    }
}

mod vec_of_vecs {
    use crate::linalg::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec<C64>], s: S) -> Result<S::Ok, S::Error> {
        let raw: Vec<Vec<[f64; 2]>> = v.iter().map(|x| x.iter().map(|z| [z.re, z.im]).collect()).collect();
        raw.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<C64>>, D::Error> {
        let raw = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        Ok(raw.into_iter().map(|x| x.into_iter().map(|[a, b]| C64::new(a, b)).collect()).collect())
    }
}

struct Eval {
    f: f64,
    grad: Matrix,
    bound: f64,
}

struct Problem<'a> {
    m: &'a Matrix,
    free: Option<&'a [bool]>,
}

const BETAS: [f64; 9] = [10.0, 30.0, 100.0, 300.0, 1e3, 3e3, 1e4, 3e4, 1e5];

fn smax(v: &[f64], beta: f64) -> (f64, Vec<f64>) {
    let m = v.iter().copied().fold(0.0, f64::max);
    if m == 0.0 {
        return (0.0, vec![1.0 / v.len() as f64; v.len()]);
    }
    let e: Vec<f64> = v.iter().map(|x| (beta * (x - m) / m).exp()).collect();
    let s: f64 = e.iter().sum();
    (m + m / beta * s.ln(), e.iter().map(|x| x / s).collect())
}

impl Problem<'_> {
    /// Columns of the target with free entries chosen to minimize `x* P^{-1} x`.
    fn fill(&self, pinv: &Matrix) -> Matrix {
        let n = self.m.rows();
        let mut x = self.m.clone();
        let Some(free) = self.free else { return x };
        for j in 0..n {
            let f: Vec<usize> = (0..n).filter(|&i| free[i * n + j]).collect();
            if f.is_empty() {
                continue;
            }
            let a = Matrix::from_fn(f.len(), f.len(), |r, c| pinv[(f[r], f[c])]);
            let col = x.column(j);
            let b: Vec<C64> = f.iter().map(|&r| (0..n).map(|k| pinv[(r, k)] * col[k]).sum::<C64>()).collect();
            if let Ok(lu) = Lu::new(&a) {
                let d = lu.solve_vec(&b);
                for (t, &r) in f.iter().enumerate() {
                    x[(r, j)] -= d[t];
                }
            }
        }
        x
    }

    fn eval(&self, r: &Matrix, beta: f64) -> Option<Eval> {
        let ri = Lu::new(r).ok()?.inverse();
        if !ri.is_finite() {
            return None;
        }
        let pinv = ri.adjoint_mul(&ri);
        let x = self.fill(&pinv);
        let z = ri.matmul(&x);
        let n = r.rows();
        let rows: Vec<f64> = (0..n).map(|i| vector::norm_sqr(r.row(i))).collect();
        let cols: Vec<f64> = (0..n).map(|j| vector::norm_sqr(&z.column(j))).collect();
        let rmax = rows.iter().copied().fold(0.0, f64::max);
        let cmax = cols.iter().copied().fold(0.0, f64::max);
        let bound = (rmax * cmax).sqrt();
        let (sr, wr) = smax(&rows, beta);
        let (sc, wc) = smax(&cols, beta);
        if sr <= 0.0 || sc <= 0.0 {
            return Some(Eval { f: f64::NEG_INFINITY, grad: Matrix::zeros(n, n), bound });
        }
        let gr = Matrix::from_fn(n, n, |i, j| r[(i, j)] * wr[i]);
        let zw = Matrix::from_fn(n, n, |i, j| z[(i, j)] * wc[j]);
        let gc = ri.adjoint().matmul(&zw.matmul(&z.adjoint()));
        let grad = &gr.scale_real(1.0 / sr) - &gc.scale_real(1.0 / sc);
        Some(Eval { f: sr.ln() + sc.ln(), grad, bound })
    }

    fn certificate(&self, r: &Matrix) -> Option<Factorization> {
        let ri = Lu::new(r).ok()?.inverse();
        let pinv = ri.adjoint_mul(&ri);
        let target = self.fill(&pinv);
        let z = ri.matmul(&target);
        let n = r.rows();
        let u: Vec<Vec<C64>> = (0..n).map(|i| r.row(i).to_vec()).collect();
        let v: Vec<Vec<C64>> = (0..n).map(|j| z.column(j).iter().map(|w| w.conj()).collect()).collect();
        let mut f = Factorization { u, v, target, max_deviation: 0.0 };
        f.max_deviation = f.deviation();
        // Balance so that max ||u_i|| = max ||v_j||; the product is unchanged.
        let mu = f.u.iter().map(|x| vector::norm(x)).fold(0.0, f64::max);
        let mv = f.v.iter().map(|x| vector::norm(x)).fold(0.0, f64::max);
        if mu > 0.0 && mv > 0.0 {
            let c = (mv / mu).sqrt();
            f.u.iter_mut().for_each(|x| x.iter_mut().for_each(|z| *z *= c));
            f.v.iter_mut().for_each(|x| x.iter_mut().for_each(|z| *z /= c));
            f.max_deviation = f.deviation();
        }
        f.bound().is_finite().then_some(f)
    }
}

/// Result of the factorization search.
pub(crate) struct UpperSearch {
    pub certificate: Factorization,
    pub upper: f64,
}

/// Minimizes the factorization bound. Stops early once `upper <= stop_at`.
pub(crate) fn factorization_upper(
    m: &Matrix,
    free: Option<&[bool]>,
    stop_at: f64,
    iters: usize,
) -> Result<UpperSearch> {
    let n = m.require_square()?;
    m.require_finite()?;
    let prob = Problem { m, free };
    let mut r = Matrix::identity(n);
    let mut best_r = r.clone();
    let mut best = prob.eval(&r, BETAS[0]).map(|e| e.bound).unwrap_or(f64::INFINITY);
    'outer: for &beta in &BETAS {
        let Some(mut cur) = prob.eval(&r, beta) else { break };
        let mut step = 0.1;
        for _ in 0..iters {
            if best <= stop_at {
                break 'outer;
            }
            let g2 = cur.grad.frobenius_norm().powi(2);
            if g2 == 0.0 {
                break;
            }
            let mut accepted = None;
            while step > 1e-14 {
                let cand = &r - &cur.grad.scale_real(step);
                if let Some(e) = prob.eval(&cand, beta) {
                    if e.f < cur.f - 1e-4 * step * g2 {
                        accepted = Some((cand, e));
                        break;
                    }
                }
                step *= 0.5;
            }
            let Some((cand, e)) = accepted else { break };
            // The bound is invariant under scaling of R; keep rows near unit size.
            let rms = (cand.frobenius_norm().powi(2) / n as f64).sqrt();
            r = cand.scale_real(1.0 / rms);
            cur = prob.eval(&r, beta).unwrap_or(e);
            if cur.bound < best {
                best = cur.bound;
                best_r = r.clone();
            }
            step *= 1.5;
        }
    }
    let certificate = prob
        .certificate(&best_r)
        .or_else(|| prob.certificate(&Matrix::identity(n)))
        .expect("identity factorization always exists");
    let upper = certificate.bound();
    Ok(UpperSearch { certificate, upper })
}
