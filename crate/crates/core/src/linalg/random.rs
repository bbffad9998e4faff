use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::linalg::{vector, Matrix, C64};

/// Seeded generator used throughout the crate.
pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for restart `k` of a seeded search.
pub fn sub_rng(seed: u64, k: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(k.wrapping_add(1));
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    General,
    Normal,
    Hermitian,
    Unitary,
}

impl std::str::FromStr for MatrixKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "general" => Ok(Self::General),
            "normal" => Ok(Self::Normal),
            "hermitian" => Ok(Self::Hermitian),
            "unitary" => Ok(Self::Unitary),
            other => Err(format!("unknown matrix kind '{other}'")),
        }
    }
}

/// Standard complex Gaussian: real and imaginary parts N(0, 1/2).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    (0..n).map(|_| complex_normal(rng)).collect()
}

/// Uniformly distributed unit vector in `C^n`.
pub fn unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    loop {
        if let Some(v) = vector::normalized(&gaussian_vector(n, rng)) {
            return v;
        }
    }
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary via Gram-Schmidt on a Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let g = gaussian_matrix(n, n, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for c in &cols {
                let p = vector::dot(&v, c);
                vector::axpy(&mut v, -p, c);
            }
        }
        cols.push(vector::normalized(&v).expect("Gaussian columns are independent"));
    }
    let mut u = Matrix::zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        u.set_column(j, c);
    }
    u
}

pub fn hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let g = gaussian_matrix(n, n, rng);
    let mut h = Matrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = C64::new(g[(i, i)].re, 0.0);
        for j in i + 1..n {
            let z = (g[(i, j)] + g[(j, i)].conj()) * 0.5;
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

/// `u diag(values) u*` for a random unitary `u`.
pub fn with_spectrum<R: Rng + ?Sized>(values: &[C64], rng: &mut R) -> Matrix {
    let u = unitary(values.len(), rng);
    u.matmul(&Matrix::from_diag(values)).matmul(&u.adjoint())
}

pub fn normal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    let values = gaussian_vector(n, rng);
    with_spectrum(&values, rng)
}

/// Deterministic random matrix of the requested kind.
pub fn random_matrix(n: usize, kind: MatrixKind, seed: u64) -> Matrix {
    assert!(n >= 1, "dimension must be positive");
    let mut r = rng(seed);
    match kind {
        MatrixKind::General => gaussian_matrix(n, n, &mut r),
        MatrixKind::Normal => normal(n, &mut r),
        MatrixKind::Hermitian => hermitian(n, &mut r),
        MatrixKind::Unitary => unitary(n, &mut r),
    }
}
