use std::f64::consts::PI;

use chebpade::numerics::Complex64;
use chebpade::potential::green::*;
use chebpade::potential::*;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Exterior conformal map of `[-1, 1]` onto `|w| > 1`.
fn ext_map(z: Complex64) -> Complex64 {
    let w = z + (z - 1.0).sqrt() * (z + 1.0).sqrt();
    if w.norm() < 1.0 { 1.0 / w } else { w }
}

fn to_unit(z: Complex64, a: f64, b: f64) -> Complex64 {
    (2.0 * z - a - b) / (b - a)
}

fn interval_green_inf(z: Complex64, a: f64, b: f64) -> f64 {
    ext_map(to_unit(z, a, b)).norm().ln()
}

fn interval_green(z: Complex64, t: Complex64, a: f64, b: f64) -> f64 {
    let (u, v) = (ext_map(to_unit(z, a, b)), ext_map(to_unit(t, a, b)));
    ((1.0 - u * v.conj()) / (u - v)).norm().ln()
}

fn agm(mut x: f64, mut y: f64) -> f64 {
    while (x - y).abs() > 1e-15 * x {
        (x, y) = (0.5 * (x + y), (x * y).sqrt());
    }
    x
}

/// `1 / cap(E, [a, b])` through the modulus of the ring domain.
fn condenser_constant(a: f64, b: f64) -> f64 {
    let cross = (1.0 + a) * (b - 1.0) / ((1.0 + b) * (a - 1.0));
    let s = cross.sqrt();
    let k = (s - 1.0) / (s + 1.0);
    let kp = (1.0 - k * k).sqrt();
    0.5 * PI * agm(1.0, kp) / agm(1.0, k)
}

/// Mass of `[a, x]` under the harmonic measure of `C̄ ∖ [a, b]` at `t`.
fn harmonic_cdf(t: Complex64, a: f64, b: f64, x: f64) -> f64 {
    let tau = to_unit(t, a, b);
    let root = ext_map(tau) - tau;
    let phi = ((2.0 * x - a - b) / (b - a)).clamp(-1.0, 1.0).acos();
    let panels = 4000;
    let h = (PI - phi) / panels as f64;
    let g = |u: f64| (root / (tau - u.cos())).re / PI;
    let mut acc = g(phi) + g(PI);
    for j in 1..panels {
        acc += if j % 2 == 1 { 4.0 } else { 2.0 } * g(phi + j as f64 * h);
    }
    acc * h / 3.0
}

#[test]
fn e_green_matches_disk_formula() {
    for (z, t) in [(c(0.3, 0.2), c(2.0, 0.0)), (c(-3.0, 1.0), c(0.1, -0.4)), (c(0.0, 5.0), c(-1.2, 0.3))] {
        assert!((green_e_f64(z, t) - interval_green(z, t, -1.0, 1.0)).abs() < 1e-12);
    }
    assert!((green_e_inf_f64(c(3.0, 0.0)) - 3.0f64.acosh()).abs() < 1e-14);
    assert!((green_e_inf_f64(c(0.0, 0.75)) - 0.75f64.asinh()).abs() < 1e-14);
}

#[test]
fn interval_green_is_an_affine_pullback() {
    for z in [c(0.0, 0.0), c(1.5, 2.0), c(4.0, -0.1)] {
        assert!((green_interval_inf_f64(z, 2.0, 3.0) - interval_green_inf(z, 2.0, 3.0)).abs() < 1e-13);
        let t = c(-0.5, 0.25);
        assert!((green_interval_f64(z, t, 2.0, 3.0) - interval_green(z, t, 2.0, 3.0)).abs() < 1e-12);
    }
}

#[test]
fn symmetric_union_reduces_to_one_interval_under_squaring() {
    let k = CompactSpec::RealIntervalUnion { intervals: vec![(-3.0, -2.0), (2.0, 3.0)] };
    let g = GreenK::new(&k, 200).unwrap();
    for z in [c(0.0, 0.0), c(0.5, 0.0), c(0.0, 1.5), c(1.5, 0.2), c(5.0, 0.0), c(2.5, 0.3)] {
        let oracle = 0.5 * interval_green_inf(z * z, 4.0, 9.0);
        assert!((g.green_inf(z) - oracle).abs() < 1e-9, "{z}: {} vs {oracle}", g.green_inf(z));
    }
    let t = c(0.4, 0.0);
    for z in [c(-0.7, 0.0), c(0.0, 0.8), c(1.6, -0.5)] {
        let pair = g.green(z, t).unwrap() + g.green(z, -t).unwrap();
        let oracle = interval_green(z * z, t * t, 4.0, 9.0);
        assert!((pair - oracle).abs() < 1e-8, "{z}: {pair} vs {oracle}");
    }
}

#[test]
fn single_interval_union_matches_closed_form() {
    let union = GreenK::new(&CompactSpec::RealIntervalUnion { intervals: vec![(1.5, 4.0)] }, 200).unwrap();
    for z in [c(0.0, 0.0), c(-1.0, 0.0), c(2.0, 1.0)] {
        assert!((union.green_inf(z) - interval_green_inf(z, 1.5, 4.0)).abs() < 1e-9);
    }
}

#[test]
fn theta_zero_constant_is_the_condenser_constant() {
    for (a, b) in [(2.0, 3.0), (1.2, 5.0), (-4.0, -1.5)] {
        let k = CompactSpec::interval(a, b).unwrap();
        let eq = solve_equilibrium(&k, 0.0, 400).unwrap();
        let oracle = if a > 0.0 { condenser_constant(a, b) } else { condenser_constant(-b, -a) };
        assert!((eq.w - oracle).abs() < 1e-8, "[{a}, {b}]: {} vs {oracle}", eq.w);
    }
}

#[test]
fn theta_one_constant_from_inverted_interval() {
    for (a, b) in [(2.0, 3.0), (1.1, 1.6), (-6.0, -2.0)] {
        let eq = solve_equilibrium(&CompactSpec::interval(a, b).unwrap(), 1.0, 400).unwrap();
        let length = (1.0 / ext_map(c(b, 0.0)) - 1.0 / ext_map(c(a, 0.0))).norm();
        assert!((eq.w - (8.0 / length).ln()).abs() < 1e-8, "[{a}, {b}]: {}", eq.w);
    }
}

#[test]
fn constant_grows_with_theta_towards_robin_constant() {
    let k = CompactSpec::interval(2.0, 3.0).unwrap();
    let ws: Vec<f64> = [0.0, 0.5, 1.0, 2.0, 4.0, 500.0, 1000.0]
        .iter()
        .map(|&t| solve_equilibrium(&k, t, 300).unwrap().w)
        .collect();
    assert!(ws.windows(2).all(|p| p[1] > p[0]), "{ws:?}");
    let slope = (ws[6] - ws[5]) / 500.0;
    assert!((slope - 2.0f64.ln()).abs() < 1e-5, "{slope}");
}

#[test]
fn balayage_of_point_mass_is_harmonic_measure() {
    let k = CompactSpec::interval(2.0, 3.0).unwrap();
    for t in [c(0.0, 0.0), c(2.5, 0.5), c(4.0, 0.0), c(-10.0, 3.0)] {
        let mu = DiscreteMeasure::from_atoms(vec![t], vec![1.0]).unwrap();
        let swept = balayage(&mu, &k, 200).unwrap();
        let piece = &swept.pieces[0];
        for x in [2.1, 2.4, 2.5, 2.77, 2.95] {
            let oracle = harmonic_cdf(t, 2.0, 3.0, x);
            assert!((piece.cdf(x) - oracle).abs() < 1e-9, "t={t} x={x}: {} vs {oracle}", piece.cdf(x));
        }
    }
}

#[test]
fn atoms_on_k_are_kept() {
    let k = CompactSpec::interval(2.0, 3.0).unwrap();
    let mu = DiscreteMeasure::from_atoms(vec![c(2.5, 0.0), c(0.0, 0.0)], vec![0.25, 0.75]).unwrap();
    let swept = balayage(&mu, &k, 100).unwrap();
    let (pts, ws) = swept.atoms();
    assert_eq!(pts, &[c(2.5, 0.0)]);
    assert!((ws[0] - 0.25).abs() < 1e-12);
    assert!((swept.total_mass() - 1.0).abs() < 1e-12);
}

#[test]
fn curved_compacts_are_rejected_by_solvers() {
    let arc = CompactSpec::ArcPolyline { points: vec![c(0.0, 2.0), c(0.5, 3.0)], symmetric: false };
    assert!(GreenK::new(&arc, 50).is_err());
    assert!(CompactSpec::interval(0.5, 2.0).is_err());
}

fn outside_point() -> impl Strategy<Value = Complex64> {
    (-6.0..6.0f64, -3.0..3.0f64)
        .prop_map(|(x, y)| c(x, y))
        .prop_filter("away from K", |z| CompactSpec::RealInterval { c: 2.0, d: 3.0 }.distance(*z) > 0.2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn balayage_is_linear_in_the_swept_measure(
        atoms in prop::collection::vec((outside_point(), 0.1..1.0f64), 1..4),
        x in 2.01..2.99f64,
    ) {
        let k = CompactSpec::interval(2.0, 3.0).unwrap();
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let (pts, ws): (Vec<_>, Vec<_>) = atoms.iter().map(|&(p, w)| (p, w / total)).unzip();
        let mu = DiscreteMeasure::from_atoms(pts.clone(), ws.clone()).unwrap();
        let swept = balayage(&mu, &k, 120).unwrap();
        prop_assert!((swept.total_mass() - 1.0).abs() < 1e-12);
        prop_assert!(swept.weights.iter().all(|w| *w >= 0.0));
        let oracle: f64 = pts.iter().zip(&ws).map(|(p, w)| w * harmonic_cdf(*p, 2.0, 3.0, x)).sum();
        prop_assert!((swept.pieces[0].cdf(x) - oracle).abs() < 1e-8);
    }

    #[test]
    fn e_green_is_symmetric_and_positive(z in outside_point(), t in outside_point()) {
        prop_assume!((z - t).norm() > 1e-3 && z.im.abs() > 1e-3 && t.im.abs() > 1e-3);
        let g = green_e_f64(z, t);
        prop_assert!(g > 0.0);
        prop_assert!((g - green_e_f64(t, z)).abs() <= 1e-12 * g.abs().max(1.0));
        prop_assert!((g - green_e_f64(z.conj(), t.conj())).abs() <= 1e-12 * g.abs().max(1.0));
    }

    #[test]
    fn e_green_vanishes_on_e(x in -1.0..1.0f64, t in outside_point()) {
        prop_assume!(t.im.abs() > 1e-3 || t.re.abs() > 1.001);
        prop_assert!(green_e_f64(c(x, 0.0), t).abs() < 1e-10);
        prop_assert!(green_e_inf_f64(c(x, 0.0)).abs() < 1e-12);
    }

    #[test]
    fn counting_measures_of_conjugate_sets_are_symmetric(
        pts in prop::collection::vec((-3.0..3.0f64, 0.01..3.0f64), 1..8),
    ) {
        let all: Vec<Complex64> = pts.iter().flat_map(|&(x, y)| [c(x, y), c(x, -y)]).collect();
        let mu = DiscreteMeasure::counting(all).unwrap();
        prop_assert!(mu.is_conjugate_symmetric(1e-14));
        let z = c(4.0, 0.7);
        prop_assert!((mu.potential(z) - mu.potential(z.conj())).abs() < 1e-12);
    }
}
