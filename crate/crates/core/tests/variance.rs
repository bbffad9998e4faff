use oplab::linalg::{c64, random, random_matrix, MatrixKind};
use oplab::variance::{
    max_variance_gap, perturbation_gap, two_by_two_decide, variance, variance_state, Decision, StateSpec,
};
use oplab::{Matrix, C64};
use proptest::prelude::*;

fn cplx() -> impl Strategy<Value = C64> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(r, i)| C64::new(r, i))
}

fn square(n: usize) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(cplx(), n * n).prop_map(move |v| Matrix::new(n, n, v).unwrap())
}

fn matrix_and_vector() -> impl Strategy<Value = (Matrix, Vec<C64>)> {
    (2usize..=6).prop_flat_map(|n| (square(n), proptest::collection::vec(cplx(), n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn affine_transform_scales_variance((a, xi) in matrix_and_vector(), alpha in cplx(), beta in cplx()) {
        prop_assume!(xi.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-6);
        let d = variance(&a, &xi).unwrap().variance;
        let t = a.scale(alpha).shift(beta);
        let dt = variance(&t, &xi).unwrap().variance;
        let scale = (alpha.norm_sqr() * d).max(1.0);
        prop_assert!((dt - alpha.norm_sqr() * d).abs() <= 1e-10 * scale);
    }

    #[test]
    fn variance_matches_moment_formula((a, xi) in matrix_and_vector()) {
        prop_assume!(xi.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-6);
        let r = variance(&a, &xi).unwrap();
        prop_assert!(r.variance >= 0.0);
        prop_assert!((r.variance - (r.second_moment - r.mean.norm_sqr())).abs() <= 1e-10 * r.second_moment.max(1.0));
    }

    #[test]
    fn perturbation_bound_holds((a, xi) in matrix_and_vector(), seed in 0u64..1000) {
        let n = a.rows();
        let b = &a + &random::gaussian_matrix(n, n, &mut random::rng(seed)).scale_real(0.3);
        let mut r = random::rng(seed + 1);
        let x = random::unit_vector(n, &mut r);
        let rho = {
            let y = random::unit_vector(n, &mut r);
            &Matrix::outer(&x, &x).scale_real(0.3) + &Matrix::outer(&y, &y).scale_real(0.7)
        };
        for omega in [StateSpec::vector(&x).unwrap(), StateSpec::Density(rho)] {
            let p = perturbation_gap(&a, &b, &omega).unwrap();
            prop_assert!(p.gap <= p.bound * (1.0 + 1e-12));
        }
        let _ = xi;
    }
}

#[test]
fn eigenvectors_have_zero_variance_and_only_they() {
    for seed in 0..20 {
        let a = random_matrix(4, MatrixKind::General, seed);
        let schur = oplab::linalg::Schur::new(&a).unwrap();
        let e = schur.q.column(0);
        assert!(variance(&a, &e).unwrap().variance < 1e-20);
        let x = random::unit_vector(4, &mut random::rng(seed + 100));
        assert!(variance(&a, &x).unwrap().variance > 1e-6);
    }
}

#[test]
fn adjoint_variance_for_normal_and_nilpotent() {
    for seed in 0..10 {
        let a = random_matrix(4, MatrixKind::Normal, seed);
        let (_, gap) = max_variance_gap(&a, &a.adjoint(), seed, 10).unwrap();
        let (_, back) = max_variance_gap(&a.adjoint(), &a, seed, 10).unwrap();
        assert!(gap.abs() <= 1e-9 && back.abs() <= 1e-9);
    }
    let n = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let (w, gap) = max_variance_gap(&n, &n.adjoint(), 0, 10).unwrap();
    assert!(gap >= 0.1);
    let direct = variance(&n.adjoint(), w.as_slice()).unwrap().variance - variance(&n, w.as_slice()).unwrap().variance;
    assert!((direct - gap).abs() < 1e-12);
}

#[test]
fn decide_random_affine_contractions() {
    let mut r = random::rng(42);
    for k in 0..50 {
        let a = random::gaussian_matrix(2, 2, &mut r);
        let theta = random::complex_normal(&mut r);
        let theta = theta / theta.norm() * (k as f64 / 50.0);
        let tau = random::complex_normal(&mut r);
        let b = a.scale(theta).shift(tau);
        match two_by_two_decide(&a, &b, 1e-9).unwrap() {
            Decision::Affine { theta: t, tau: s, residual } => {
                assert!(residual <= 1e-9 && t.norm() <= 1.0 + 1e-9);
                assert!((t - theta).norm() < 1e-8 && (s - tau).norm() < 1e-8);
            }
            d => panic!("case {k}: {d:?}"),
        }
    }
}

#[test]
fn decide_expansions_are_violations() {
    let a = random_matrix(2, MatrixKind::General, 7);
    let b = a.scale(c64(0.0, 1.5));
    match two_by_two_decide(&a, &b, 1e-9).unwrap() {
        Decision::Violation { witness, gap } => {
            let d = variance(&b, witness.as_slice()).unwrap().variance - variance(&a, witness.as_slice()).unwrap().variance;
            assert!(gap >= 1e-6 && (d - gap).abs() < 1e-12);
        }
        d => panic!("{d:?}"),
    }
}

#[test]
fn scalar_a_only_dominates_scalars() {
    let a = Matrix::identity(2).scale(c64(2.0, -1.0));
    let b = Matrix::identity(2).scale(c64(0.5, 0.0));
    assert!(matches!(two_by_two_decide(&a, &b, 1e-9).unwrap(), Decision::Affine { .. }));
    let b = random_matrix(2, MatrixKind::General, 1);
    assert!(matches!(two_by_two_decide(&a, &b, 1e-9).unwrap(), Decision::Violation { .. }));
}

#[test]
fn density_variance_is_convex_combination_bound() {
    // For a mixed state the variance dominates the average of the pure variances.
    let a = random_matrix(3, MatrixKind::General, 5);
    let mut r = random::rng(6);
    let x = random::unit_vector(3, &mut r);
    let y = random::unit_vector(3, &mut r);
    let rho = &Matrix::outer(&x, &x).scale_real(0.5) + &Matrix::outer(&y, &y).scale_real(0.5);
    let mixed = variance_state(&a, &StateSpec::Density(rho)).unwrap().variance;
    let avg = 0.5 * (variance(&a, &x).unwrap().variance + variance(&a, &y).unwrap().variance);
    assert!(mixed >= avg - 1e-12);
}
