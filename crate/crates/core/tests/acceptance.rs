//! Acceptance run: one PASS/FAIL line per criterion with its measured runtime.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DMatrix;
use oplab::cauchy_green::{
    cg_quadrature, contour_residuals, disc_contour_t, holder_envelope, kappa_integral, kappa_integral_density,
    power_series_at, verify_intertwine, CompactRealFunction, ExtensionFunction, KSet, MollifierConfig, PlanarGrid,
};
use oplab::commutator::{
    equality_structure_recover, kappa_estimate, kappa_exact_normal, schur_function_from_commutator, EqualityStructure,
};
use oplab::linalg::{c64, random, UnitVector};
use oplab::schur::{schur_norm_bracket, transpose_duality_check, DEFAULT_RESTARTS};
use oplab::variance::{
    extract_on_spectrum, perturbation_gap, rank_one_commutator_check, two_by_two_decide, variance,
    variance_equal_recover, Decision, StateSpec, StructureCase,
};
use oplab::{Error, Matrix, C64};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
    /// Set when the criterion is known to be unattainable as stated and the
    /// corrected statement was checked instead; holds that check's verdict.
    known_false: Option<bool>,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail, known_false: None }
}

// Independent oracles -----------------------------------------------------

fn na_opnorm(m: &Matrix) -> f64 {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)]).singular_values().max()
}

/// `||a xi||^2 - |<a xi, xi>|^2` for a unit vector.
fn raw_variance(a: &Matrix, xi: &[C64]) -> f64 {
    let ax = a.mul_vec(xi);
    let m: C64 = ax.iter().zip(xi).map(|(p, q)| p * q.conj()).sum();
    ax.iter().map(|z| z.norm_sqr()).sum::<f64>() - m.norm_sqr()
}

fn unit_disc<R: Rng>(r: &mut R) -> C64 {
    let rad: f64 = r.random::<f64>().sqrt();
    C64::from_polar(rad, r.random_range(0.0..2.0 * PI))
}

fn unimodular<R: Rng>(r: &mut R) -> C64 {
    C64::from_polar(1.0, r.random_range(0.0..2.0 * PI))
}

fn conj_diag(u: &Matrix, d: &[C64]) -> Matrix {
    u.matmul(&Matrix::from_diag(d)).matmul(&u.adjoint())
}

fn cyclic(n: usize) -> Matrix {
    Matrix::from_fn(n, n, |i, j| if (i + 1) % n == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) })
}

// Criteria ----------------------------------------------------------------

fn rank_one_identity() -> Outcome {
    let mut r = random::rng(1);
    let (mut worst, mut violations, mut corrected, mut normal): (f64, usize, f64, f64) = (0.0, 0, 0.0, 0.0);
    for k in 0..500 {
        let n = 2 + k % 7;
        let a = random::gaussian_matrix(n, n, &mut r);
        let xi = UnitVector::from_nonzero(&random::gaussian_vector(n, &mut r)).unwrap();
        let (lhs, d) = rank_one_commutator_check(&a, &xi).unwrap();
        let p = Matrix::outer(xi.as_slice(), xi.as_slice());
        let oracle = na_opnorm(&(&a.matmul(&p) - &p.matmul(&a))).powi(2);
        let scale = na_opnorm(&a).powi(2);
        let dev = (lhs - d).abs().max((oracle - raw_variance(&a, xi.as_slice())).abs()) / scale;
        worst = worst.max(dev);
        if dev > 1e-9 {
            violations += 1;
        }
        // the adjoint enters as well: ||[a, P]||^2 = max(D(a), D(a*))
        let both = raw_variance(&a, xi.as_slice()).max(raw_variance(&a.adjoint(), xi.as_slice()));
        corrected = corrected.max((oracle - both).abs() / scale);
        // normal a: D(a) = D(a*), so the stated form holds
        let u = random::unitary(n, &mut r);
        let diag: Vec<C64> = (0..n).map(|_| random::complex_normal(&mut r)).collect();
        let a = u.matmul(&Matrix::from_diag(&diag)).matmul(&u.adjoint());
        let (lhs, d) = rank_one_commutator_check(&a, &xi).unwrap();
        normal = normal.max((lhs - d).abs() / na_opnorm(&a).powi(2));
    }
    let holds = corrected <= 1e-9 && normal <= 1e-9;
    Outcome {
        pass: worst <= 1e-9,
        detail: format!(
            "max |‖[a,ξξ*]‖² − D_ξ(a)| / ‖a‖² = {worst:.2e}, {violations}/500 violate; \
             with max(D_ξ(a), D_ξ(a*)): {corrected:.2e}; normal a: {normal:.2e}"
        ),
        known_false: Some(holds),
    }
}

fn affine_scaling() -> Outcome {
    let mut r = random::rng(2);
    let mut worst: f64 = 0.0;
    for k in 0..500 {
        let n = 2 + k % 7;
        let a = random::gaussian_matrix(n, n, &mut r);
        let xi = random::gaussian_vector(n, &mut r);
        let (alpha, beta) = (random::complex_normal(&mut r), random::complex_normal(&mut r));
        let d = variance(&a, &xi).unwrap().variance;
        let dm = variance(&a.scale(alpha).shift(beta), &xi).unwrap().variance;
        worst = worst.max((dm - alpha.norm_sqr() * d).abs());
    }
    outcome(worst <= 1e-10, format!("max |D(αa+β) − |α|²D(a)| = {worst:.2e} over 500 samples"))
}

fn perturbation_bound() -> Outcome {
    let mut r = random::rng(3);
    let mut violations = 0;
    let mut tightest: f64 = 0.0;
    for k in 0..500 {
        let n = 2 + k % 7;
        let a = random::gaussian_matrix(n, n, &mut r);
        let eps = 10f64.powf(r.random_range(-4.0..0.5));
        let b = &a + &random::gaussian_matrix(n, n, &mut r).scale_real(eps);
        let omega = if k % 2 == 0 {
            StateSpec::vector(&random::gaussian_vector(n, &mut r)).unwrap()
        } else {
            let g = random::gaussian_matrix(n, n, &mut r);
            let rho = g.matmul(&g.adjoint());
            let tr = rho.trace().re;
            let mut rho = rho.scale_real(1.0 / tr);
            // exact Hermitian symmetry for validation
            rho = (&rho + &rho.adjoint()).scale_real(0.5);
            StateSpec::Density(rho)
        };
        let g = perturbation_gap(&a, &b, &omega).unwrap();
        let bound = 2.0 * na_opnorm(&(&b - &a)) * (na_opnorm(&a) + na_opnorm(&b));
        if g.gap > bound * (1.0 + 1e-12) {
            violations += 1;
        }
        tightest = tightest.max(g.gap / bound);
    }
    outcome(violations == 0, format!("{violations} violations in 500 samples, largest gap/bound = {tightest:.3}"))
}

fn two_by_two() -> Outcome {
    let mut r = random::rng(4);
    let mut affine_bad = 0;
    let mut worst_res: f64 = 0.0;
    for _ in 0..200 {
        let a = random::gaussian_matrix(2, 2, &mut r);
        let theta = unit_disc(&mut r);
        let tau = random::complex_normal(&mut r);
        let b = a.scale(theta).shift(tau);
        match two_by_two_decide(&a, &b, 1e-10).unwrap() {
            Decision::Affine { theta: t, tau: s, .. } => {
                let res = na_opnorm(&(&b - &a.scale(t).shift(s)));
                worst_res = worst_res.max(res);
                if res > 1e-9 || t.norm() > 1.0 + 1e-9 {
                    affine_bad += 1;
                }
            }
            Decision::Violation { .. } => affine_bad += 1,
        }
    }
    let (mut random_bad, mut affine_verdicts, mut min_gap) = (0, 0, f64::INFINITY);
    for _ in 0..200 {
        let a = random::gaussian_matrix(2, 2, &mut r);
        let b = random::gaussian_matrix(2, 2, &mut r);
        match two_by_two_decide(&a, &b, 1e-10).unwrap() {
            Decision::Affine { theta, tau, .. } => {
                affine_verdicts += 1;
                if na_opnorm(&(&b - &a.scale(theta).shift(tau))) > 1e-9 || theta.norm() > 1.0 + 1e-9 {
                    random_bad += 1;
                }
            }
            Decision::Violation { witness, .. } => {
                let w = witness.as_slice();
                let gap = raw_variance(&b, w) - raw_variance(&a, w);
                min_gap = min_gap.min(gap);
                if gap < 1e-6 {
                    random_bad += 1;
                }
            }
        }
    }
    outcome(
        affine_bad == 0 && random_bad == 0,
        format!(
            "affine: {affine_bad}/200 failed (max residual {worst_res:.1e}); random: {random_bad}/200 failed, \
             {affine_verdicts} affine verdicts, min witness gap {min_gap:.2e}"
        ),
    )
}

fn variance_equality_recovery() -> Outcome {
    let mut r = random::rng(5);
    let (mut bad_rot, mut bad_adj, mut worst): (usize, usize, f64) = (0, 0, 0.0);
    for k in 0..100 {
        let n = 2 + k % 5;
        let a = random::gaussian_matrix(n, n, &mut r);
        let (sigma, lambda) = (unimodular(&mut r), random::complex_normal(&mut r));
        let b = a.scale(sigma).shift(lambda);
        let v = variance_equal_recover(&a, &b, 200, k as u64, 1e-9).unwrap();
        let err = (v.alpha - sigma).norm().max((v.beta - lambda).norm());
        worst = worst.max(err);
        if v.case != StructureCase::AffineOfA || err > 1e-6 {
            bad_rot += 1;
        }
    }
    for k in 0..100 {
        // two eigenvalues are always collinear, so a* is also affine in a at n = 2
        let n = 3 + k % 4;
        let a = random::normal(n, &mut r);
        let v = variance_equal_recover(&a, &a.adjoint(), 200, k as u64, 1e-9).unwrap();
        let err = (v.alpha - 1.0).norm().max(v.beta.norm());
        worst = worst.max(err);
        if v.case != StructureCase::AffineOfAStar || err > 1e-6 {
            bad_adj += 1;
        }
    }
    outcome(
        bad_rot == 0 && bad_adj == 0,
        format!("b = σa+λ: {bad_rot}/100 wrong; b = a*: {bad_adj}/100 wrong; max parameter error {worst:.1e}"),
    )
}

fn spectral_lipschitz() -> Outcome {
    let mut r = random::rng(6);
    type F = fn(C64) -> C64;
    let cases: [(&str, F, f64, bool); 3] = [
        ("id", |z| z, 1.0, false),
        ("square/4", |z| z * z / 4.0, 0.5, true),
        ("abs", |z| c64(z.norm(), 0.0), 1.0, false),
    ];
    let (mut bad, mut worst_excess, mut worst_value) = (0, f64::NEG_INFINITY, 0.0f64);
    for (_, f, lip, real) in cases {
        for k in 0..40 {
            let n = 2 + k % 7;
            let l: Vec<C64> = (0..n)
                .map(|_| if real { c64(r.random_range(-1.0..1.0), 0.0) } else { random::complex_normal(&mut r) })
                .collect();
            let u = random::unitary(n, &mut r);
            let a = conj_diag(&u, &l);
            let b = conj_diag(&u, &l.iter().map(|&z| f(z)).collect::<Vec<_>>());
            let pts = extract_on_spectrum(&a, &b, 1e-9).unwrap();
            for (i, (x, fx)) in pts.iter().enumerate() {
                worst_value = worst_value.max((fx - f(*x)).norm());
                for (y, fy) in &pts[..i] {
                    let excess = (fx - fy).norm() - lip * (x - y).norm();
                    worst_excess = worst_excess.max(excess);
                    if excess > 1e-8 {
                        bad += 1;
                    }
                }
            }
        }
    }
    outcome(
        bad == 0,
        format!("{bad} pair violations over 120 operators; max excess {worst_excess:.1e}, max |f̂ − f| {worst_value:.1e}"),
    )
}

fn schur_brackets() -> Outcome {
    let n = 4;
    let mut suite: Vec<(String, Matrix)> = vec![
        ("all-ones".into(), Matrix::from_fn(n, n, |_, _| c64(1.0, 0.0))),
        ("ones-minus-diagonal".into(), Matrix::from_fn(n, n, |i, j| c64(if i == j { 0.0 } else { 1.0 }, 0.0))),
    ];
    let l = [0.0, 1.0, 2.0];
    let sums = Matrix::from_fn(3, 3, |i, j| c64(l[i] + l[j], 0.0));
    suite.push(("sums".into(), sums));
    for k in 0..20 {
        suite.push((format!("random-{k}"), random::gaussian_matrix(4, 4, &mut random::rng(700 + k))));
    }
    let (mut bad, mut sums_note) = (Vec::new(), String::new());
    for (k, (name, m)) in suite.iter().enumerate() {
        let b = schur_norm_bracket(m, k as u64, DEFAULT_RESTARTS, 1e-3).unwrap();
        let ok = b.lower <= b.upper + 1e-6 && b.certificate.verify(m, None) && b.verify(m, None);
        if name == "sums" {
            sums_note = format!("[λi+λj] bracket [{:.6}, {:.6}]", b.lower, b.upper);
            if !(b.contains(4.0, 1e-9) && b.width() <= 1e-2) {
                bad.push(name.clone());
            }
        }
        if !ok {
            bad.push(name.clone());
        }
    }
    outcome(bad.is_empty(), format!("{} matrices, failures {:?}; {sums_note}", suite.len(), bad))
}

fn kappa_consistency() -> Outcome {
    let a = Matrix::from_real_diag(&[0.0, 1.0, 2.0]);
    let b = a.matmul(&a);
    let exact = kappa_exact_normal(&a, &b, 1e-6).unwrap();
    let est = kappa_estimate(&a, &b, 7, 50).unwrap();
    let br = &exact.bracket;
    let agree = est.lower >= br.lower - 1e-3 && est.lower <= br.upper + 1e-3 && br.width() <= 1e-3;
    let rep = schur_function_from_commutator(&a, &b, 1e-6).unwrap();
    let factor_ok = rep.full.upper <= 2.0 * rep.kappa.lower;
    outcome(
        agree && factor_ok && est.verify(&a, &b),
        format!(
            "exact [{:.6}, {:.6}], estimate {:.6}; full Λ norm ≤ {:.6} vs 2κ ≥ {:.6}",
            br.lower,
            br.upper,
            est.lower,
            rep.full.upper,
            2.0 * rep.kappa.lower
        ),
    )
}

fn equality_structure() -> Outcome {
    let mut r = random::rng(9);
    let mut notes = Vec::new();
    let mut ok = true;
    for k in 0..10u64 {
        let n = 3 + (k as usize % 2);
        let a = random::gaussian_matrix(n, n, &mut r);
        let (sigma, lambda) = (unimodular(&mut r), random::complex_normal(&mut r));
        let b = a.scale(sigma).shift(lambda);
        match equality_structure_recover(&a, &b, k, 1e-6).map(|v| v.structure) {
            Ok(EqualityStructure::Rotation { sigma: s, lambda: t, residual }) => {
                if residual > 1e-6 || (s - sigma).norm() > 1e-6 || (t - lambda).norm() > 1e-6 {
                    ok = false;
                    notes.push(format!("rotation {k}: residual {residual:.1e}"));
                }
            }
            other => {
                ok = false;
                notes.push(format!("rotation {k}: {other:?}"));
            }
        }
    }
    for n in [3, 4] {
        let u = cyclic(n);
        match equality_structure_recover(&u.adjoint(), &u, n as u64, 1e-6).map(|v| v.structure) {
            Ok(EqualityStructure::Unitary { residual, .. }) if residual <= 1e-6 => {}
            other => {
                ok = false;
                notes.push(format!("cyclic {n}: {other:?}"));
            }
        }
    }
    let (a, b) = (Matrix::from_real_diag(&[0.0, 1.0, 2.0]), Matrix::from_real_diag(&[0.0, 1.0, 4.0]));
    match equality_structure_recover(&a, &b, 0, 1e-6) {
        Err(Error::Precondition { kappa_ab, kappa_ba }) => {
            notes.push(format!("diagonal pair rejected with κ(a,b) = {kappa_ab:.4}, κ(b,a) = {kappa_ba:.4}"))
        }
        other => {
            ok = false;
            notes.push(format!("diagonal pair: {other:?}"));
        }
    }
    outcome(ok, format!("10 rotations, cyclic n = 3, 4; {}", notes.join("; ")))
}

struct CgRun {
    h: f64,
    error: f64,
    res1: f64,
    res2: f64,
    seconds: f64,
}

fn cg_runs() -> Vec<CgRun> {
    let e = ExtensionFunction::new(CompactRealFunction::truncated_square(1e-4).unwrap(), MollifierConfig::default())
        .unwrap();
    let a = Matrix::from_real_diag(&[-0.5, 0.5]);
    let oracle = Matrix::identity(2).scale_real(0.25);
    [1e-2, 5e-3, 2.5e-3, 1.25e-3]
        .iter()
        .map(|&h| {
            let t0 = Instant::now();
            let q = cg_quadrature(&a, &e, &e.grid(h).unwrap()).unwrap();
            let res = verify_intertwine(&a, &oracle, &q.map, 8, 11).unwrap();
            CgRun { h, error: na_opnorm(&(&q.value - &oracle)), res1: res.res1, res2: res.res2, seconds: t0.elapsed().as_secs_f64() }
        })
        .collect()
}

fn cg_calculus(runs: &[CgRun]) -> Outcome {
    let orders: Vec<f64> = runs.windows(2).map(|w| (w[0].error / w[1].error).log2()).collect();
    let ok = runs[0].error <= 5e-3 && orders.iter().all(|&p| p >= 0.9);
    let errs: Vec<String> = runs.iter().map(|c| format!("h={:.2e}: {:.2e}", c.h, c.error)).collect();
    let ords: Vec<String> = orders.iter().map(|p| format!("{p:.2}")).collect();
    outcome(ok, format!("errors {}; orders {}", errs.join(", "), ords.join(", ")))
}

/// Residuals below this are rounding noise and count as converged.
const RESIDUAL_FLOOR: f64 = 1e-12;

fn cg_intertwining(runs: &[CgRun]) -> Outcome {
    let bounded = runs.iter().all(|c| c.res1 <= 2.0 * c.error && c.res2 <= 2.0 * c.error);
    let decreasing = |f: fn(&CgRun) -> f64| runs.windows(2).all(|w| f(&w[1]) < f(&w[0]) || f(&w[1]) <= RESIDUAL_FLOOR);
    let ok = bounded && decreasing(|c| c.res1) && decreasing(|c| c.res2);
    let cells: Vec<String> = runs.iter().map(|c| format!("h={:.2e}: {:.1e}/{:.1e}", c.h, c.res1, c.res2)).collect();
    outcome(ok, format!("res1/res2 {}", cells.join(", ")))
}

fn kappa_integral_bound() -> Outcome {
    // extension of the truncated square against the Hölder envelope with alpha = 1
    let e = ExtensionFunction::new(CompactRealFunction::truncated_square(1e-4).unwrap(), MollifierConfig::default())
        .unwrap();
    let grid = e.grid(0.02).unwrap();
    let k = e.k();
    let kap = kappa_integral(&e, &grid, 4, 9).unwrap();
    let env = holder_envelope(|z| e.dbar(z).norm(), &k, e.support_box(), &grid, 1.0).unwrap();
    let bound_ok = kap.total.value <= env.bound + kap.total.refinement_error;
    // synthetic density dist(z, 0) on the unit disc: 2 pi beta R^alpha / alpha = 2 pi
    let k0 = KSet::Points(vec![c64(0.0, 0.0)]);
    let disc = |z: C64| if z.norm() <= 1.0 { z.norm() } else { 0.0 };
    let g0 = PlanarGrid::new((-1.0, 1.0), (-1.0, 1.0), 0.02).unwrap();
    let syn = kappa_integral_density(disc, &k0, &g0, 4, 1).unwrap();
    let rel = (syn.value - 2.0 * PI).abs() / (2.0 * PI);
    outcome(
        bound_ok && rel <= 0.02,
        format!(
            "extension κ = {:.4} (±{:.1e}) ≤ 2πβR/α = {:.1} with β = {:.3}, R = {:.3}; synthetic κ = {:.5} vs 2π, rel. error {:.2e}",
            kap.total.value,
            kap.total.refinement_error,
            env.bound,
            env.beta,
            env.radius,
            syn.value,
            rel
        ),
    )
}

fn disc_contour() -> Outcome {
    let a = Matrix::from_real_diag(&[0.0, 0.5]);
    let coeffs = [c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)];
    let r = 0.9;
    let reference = power_series_at(&coeffs, &a.scale_real(r)).unwrap();
    let nodes = [8usize, 16, 32, 64, 128, 256];
    let res: Vec<f64> = nodes
        .iter()
        .map(|&m| contour_residuals(&disc_contour_t(&a, &coeffs, r, m).unwrap(), &a, &reference, 8, 13).unwrap().reference)
        .collect();
    let at128 = res[4];
    let geometric = res.windows(2).all(|w| w[0] <= 1e-12 || w[1] <= 0.5 * w[0] || w[1] <= 1e-12);
    let cells: Vec<String> = nodes.iter().zip(&res).map(|(m, v)| format!("{m}: {v:.1e}")).collect();
    outcome(at128 <= 1e-8 && geometric, format!("r = {r}, residual by nodes {}", cells.join(", ")))
}

fn transpose_duality() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..20u64 {
        let m = random::gaussian_matrix(4, 4, &mut random::rng(1400 + k));
        worst = worst.max(transpose_duality_check(&m, k).unwrap().difference());
    }
    outcome(worst <= 1e-3, format!("max |‖M‖_trace-mult − ‖Mᵀ‖_op-mult| = {worst:.2e} over 20 matrices"))
}

fn main() {
    let (mut failures, mut known) = (0, Vec::new());
    let mut report = |id: usize, name: &str, limit: f64, seconds: f64, o: Outcome| {
        let pass = o.pass && seconds < limit;
        if !pass {
            match o.known_false {
                Some(true) if seconds < limit => known.push(id),
                _ => failures += 1,
            }
        }
        println!(
            "{} {:>2} {:<34} {:>8.2}s (limit {:>3}s)  {}",
            if pass { "PASS" } else { "FAIL" },
            id,
            name,
            seconds,
            limit,
            o.detail
        );
    };
    let timed = |f: &dyn Fn() -> Outcome| {
        let t0 = Instant::now();
        let o = f();
        (o, t0.elapsed().as_secs_f64())
    };

    let (o, s) = timed(&rank_one_identity);
    report(1, "rank-one commutator identity", 5.0, s, o);
    let (o, s) = timed(&affine_scaling);
    report(2, "variance under affine maps", 2.0, s, o);
    let (o, s) = timed(&perturbation_bound);
    report(3, "variance perturbation bound", 5.0, s, o);
    let (o, s) = timed(&two_by_two);
    report(4, "2x2 domination decision", 10.0, s, o);
    let (o, s) = timed(&variance_equality_recovery);
    report(5, "structure from equal variances", 10.0, s, o);
    let (o, s) = timed(&spectral_lipschitz);
    report(6, "extracted function is Lipschitz", 5.0, s, o);
    let (o, s) = timed(&schur_brackets);
    report(7, "Schur norm brackets", 60.0, s, o);
    let (o, s) = timed(&kappa_consistency);
    report(8, "commutator constant consistency", 30.0, s, o);
    let (o, s) = timed(&equality_structure);
    report(9, "structure from equal constants", 30.0, s, o);

    let runs = cg_runs();
    // both criteria are charged the full quadrature time
    let shared: f64 = runs.iter().map(|c| c.seconds).sum();
    let (o, s) = timed(&|| cg_calculus(&runs));
    report(10, "Cauchy-Green functional calculus", 120.0, shared + s, o);
    let (o, s) = timed(&|| cg_intertwining(&runs));
    report(11, "Cauchy-Green intertwining", 120.0, shared + s, o);

    let (o, s) = timed(&kappa_integral_bound);
    report(12, "kappa-integral Hölder bound", 60.0, s, o);
    let (o, s) = timed(&disc_contour);
    report(13, "disc contour intertwining", 10.0, s, o);
    let (o, s) = timed(&transpose_duality);
    report(14, "transpose duality", 60.0, s, o);

    println!("{} of 14 criteria passed", 14 - failures - known.len());
    if !known.is_empty() {
        println!("criteria {known:?} fail as stated; the identity as written is false for non-normal a, the corrected form holds");
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
