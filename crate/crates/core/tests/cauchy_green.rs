use std::f64::consts::PI;

use oplab::cauchy_green::{
    besov_criterion, cg_quadrature, class_membership, contour_residuals, disc_contour_t, holder_envelope,
    kappa_integral_density, power_series_at, verify_intertwine, CompactRealFunction, ExtensionFunction, KSet,
    MollifierConfig, PlanarGrid,
};
use oplab::linalg::{c64, operator_norm, random};
use oplab::{Error, Matrix, C64};
use proptest::prelude::*;

fn opnorm(m: &Matrix) -> f64 {
    operator_norm(m).unwrap()
}

fn square() -> ExtensionFunction {
    ExtensionFunction::new(CompactRealFunction::truncated_square(1e-4).unwrap(), MollifierConfig::default()).unwrap()
}

fn half_spectrum() -> Matrix {
    Matrix::from_real_diag(&[-0.5, 0.5])
}

/// `T(x) = Lambda o x` with `f'` on the diagonal, for diagonal `a`.
fn divided_difference_map(l: &[f64], f: impl Fn(f64) -> f64, fp: impl Fn(f64) -> f64, x: &Matrix) -> Matrix {
    Matrix::from_fn(l.len(), l.len(), |i, j| {
        let d = if i == j { fp(l[i]) } else { (f(l[i]) - f(l[j])) / (l[i] - l[j]) };
        x[(i, j)] * d
    })
}

#[test]
fn square_calculus_converges_at_second_order() {
    let e = square();
    let a = half_spectrum();
    let oracle = Matrix::identity(2).scale_real(0.25);
    let errs: Vec<f64> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&h| opnorm(&(&cg_quadrature(&a, &e, &e.grid(h).unwrap()).unwrap().value - &oracle)))
        .collect();
    assert!(errs[2] < errs[1] && errs[1] < errs[0], "{errs:?}");
    let order = (errs[1] / errs[2]).log2();
    assert!(order > 1.5, "order {order}, errors {errs:?}");
}

#[test]
fn intertwining_map_is_the_divided_difference_multiplier() {
    let e = square();
    let a = half_spectrum();
    let q = cg_quadrature(&a, &e, &e.grid(0.01).unwrap()).unwrap();
    let x = random::gaussian_matrix(2, 2, &mut random::rng(1));
    let expect = divided_difference_map(&[-0.5, 0.5], |t| t * t, |t| 2.0 * t, &x);
    let err = opnorm(&(&q.map.apply(&x).unwrap() - &expect)) / opnorm(&x);
    assert!(err < 1e-2, "{err}");
    let fa = Matrix::identity(2).scale_real(0.25);
    let res = verify_intertwine(&a, &fa, &q.map, 6, 3).unwrap();
    assert!(res.res1 < 1e-3 && res.res2 < 1e-3, "{res:?}");
}

#[test]
fn t_obeys_the_sesquilinear_bound() {
    let e = square();
    let a = half_spectrum();
    let grid = e.grid(0.02).unwrap();
    let q = cg_quadrature(&a, &e, &grid).unwrap();
    let k = KSet::Points(vec![c64(-0.5, 0.0), c64(0.5, 0.0)]);
    let kappa = kappa_integral_density(|z| e.dbar(z).norm(), &k, &grid, 4, 2).unwrap();
    let mut r = random::rng(4);
    for _ in 0..10 {
        let x = random::gaussian_matrix(2, 2, &mut r);
        let tx = opnorm(&q.map.apply(&x).unwrap());
        assert!(tx <= 2.0 / PI * (kappa.value + kappa.refinement_error) * opnorm(&x) + 1e-3);
    }
}

#[test]
fn spectrum_outside_k_is_rejected() {
    let e = square();
    let a = Matrix::from_real_diag(&[0.0, 3.0]);
    assert!(matches!(cg_quadrature(&a, &e, &e.grid(0.05).unwrap()), Err(Error::Spectrum(_))));
    let a = Matrix::from_diag(&[c64(0.0, 0.0), c64(0.0, 0.5)]);
    assert!(matches!(cg_quadrature(&a, &e, &e.grid(0.05).unwrap()), Err(Error::Spectrum(_))));
}

#[test]
fn synthetic_kappa_integral_matches_closed_form() {
    // density dist(z, 0)^alpha on the unit disc: 2 pi / alpha
    let k = KSet::Points(vec![c64(0.0, 0.0)]);
    let grid = PlanarGrid::new((-1.0, 1.0), (-1.0, 1.0), 0.02).unwrap();
    let disc = |z: C64| if z.norm() <= 1.0 { z.norm() } else { 0.0 };
    let ki = kappa_integral_density(disc, &k, &grid, 4, 1).unwrap();
    assert!((ki.value - 2.0 * PI).abs() < 0.02 * 2.0 * PI, "{}", ki.value);
    let env = holder_envelope(disc, &k, [-1.0, 1.0, -1.0, 1.0], &grid, 1.0).unwrap();
    assert!(ki.value <= env.bound + ki.refinement_error);
    // a non-integrable density is flagged
    let bad = |z: C64| if z.norm() <= 1.0 { 1.0 / z.norm() } else { 0.0 };
    assert!(matches!(kappa_integral_density(bad, &k, &grid, 4, 1), Err(Error::Divergence(_))));
}

#[test]
fn contour_residual_decays_geometrically() {
    let a = Matrix::from_real_diag(&[0.0, 0.5]);
    let coeffs = [c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)];
    let r = 0.9;
    let reference = power_series_at(&coeffs, &a.scale_real(r)).unwrap();
    let mut prev = f64::INFINITY;
    for nodes in [4, 8, 16, 32, 64, 128] {
        let dc = disc_contour_t(&a, &coeffs, r, nodes).unwrap();
        let res = contour_residuals(&dc, &a, &reference, 4, 2).unwrap().reference;
        if prev > 1e-12 {
            assert!(res < 0.5 * prev || res < 1e-12, "{nodes}: {res} after {prev}");
        }
        prev = res;
    }
    assert!(prev < 1e-12);
}

#[test]
fn besov_diagnostic_for_smooth_and_cusp_derivatives() {
    let sq = besov_criterion(&CompactRealFunction::truncated_square(1e-3).unwrap());
    assert!(sq.convergent() && (sq.tail_slope - 1.0).abs() < 0.1, "{}", sq.tail_slope);
    let cusp = besov_criterion(&CompactRealFunction::truncated_cusp(1.5, 1e-4).unwrap());
    assert!(cusp.convergent() && (cusp.tail_slope - 0.5).abs() < 0.1, "{}", cusp.tail_slope);
    assert!(cusp.integral.is_finite() && sq.integral.is_finite());
}

#[test]
fn class_constants_for_powers() {
    let x: Vec<f64> = (0..=400).map(|i| -1.0 + i as f64 / 200.0).collect();
    let y: Vec<f64> = x.iter().map(|t| t * t).collect();
    let spec = class_membership(&x, &y, 1.0, 5000, 0).unwrap();
    // t^2: Taylor constant 1, derivative constant 2
    assert!((spec.kappa_const - 2.0).abs() < 1e-6 && !spec.diverging, "{spec:?}");
    let y: Vec<f64> = x.iter().map(|t| t.abs().powf(1.5)).collect();
    let half = class_membership(&x, &y, 0.5, 5000, 0).unwrap();
    assert!(!half.diverging);
    let too_much = class_membership(&x, &y, 1.0, 5000, 0).unwrap();
    assert!(too_much.kappa_const > half.kappa_const);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn refinement_never_changes_area(px in -1.0f64..1.0, py in -1.0f64..1.0, levels in 0usize..5) {
        let g = PlanarGrid::new((-1.0, 1.0), (-1.0, 1.0), 0.25).unwrap().with_refinement(vec![c64(px, py)], levels);
        prop_assert!((g.retained_area() - 4.0).abs() < 1e-12);
        let v = g.integrate_by_depth(|z| z.re * z.re, &[c64(px, py)], levels);
        // the midpoint rule misses x^2 by h^2/12 per unit area, less on refined cells
        for s in v {
            prop_assert!((s - 4.0 / 3.0).abs() <= 0.25 * 0.25 / 12.0 * 4.0 + 1e-12);
        }
    }

    #[test]
    fn distance_to_k_is_one_lipschitz(x1 in -3.0f64..3.0, y1 in -2.0f64..2.0, x2 in -3.0f64..3.0, y2 in -2.0f64..2.0) {
        let k = KSet::Interval { lo: -1.0, hi: 1.0 };
        let (z, w) = (c64(x1, y1), c64(x2, y2));
        prop_assert!((k.distance(z) - k.distance(w)).abs() <= (z - w).norm() + 1e-15);
    }

    #[test]
    fn extension_agrees_with_f_on_the_axis(x in -3.0f64..3.0) {
        let e = square();
        prop_assert_eq!(e.dbar(c64(x, 0.0)), c64(0.0, 0.0));
        let f = e.function().eval(x);
        prop_assert!((e.g(c64(x, 0.0)) - f).norm() == 0.0);
        // dbar g = O(|y|) next to the axis
        prop_assert!(e.dbar(c64(x, 1e-3)).norm() <= 1e-2);
    }
}
