use std::f64::consts::PI;

use chebpade::chebseries::*;
use chebpade::diagnostics::*;
use chebpade::functions::*;
use chebpade::numerics::*;
use chebpade::pade::*;
use chebpade::potential::*;
use chebpade::Error;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn markov_sweep(ns: std::ops::RangeInclusive<usize>) -> (FunctionSpec, Vec<(usize, chebpade::Result<ChebPadeApproximant>)>) {
    let f = markov(2.0, 3.0, MarkovWeight::Lebesgue).unwrap();
    let ns: Vec<usize> = ns.collect();
    let s = cheb_coeffs(&f, 2 * ns[ns.len() - 1] + 10, Precision::DEFAULT).unwrap();
    let opts = ChebPadeOptions { interpolation_grid: None, ..ChebPadeOptions::default() };
    let reports = sweep(&f, &s, &ns, &opts);
    (f, reports)
}

#[test]
fn markov_predictor_agrees_with_closed_form() {
    let f = markov(2.0, 3.0, MarkovWeight::Arcsine).unwrap();
    let predictor = RatePredictor::for_function(&f).unwrap();
    for z in [c(0.0, 1.5), c(0.0, 2.0), c(5.0, 0.0), c(-3.0, 0.5), c(2.5, 0.1), c(1.2, 0.0)] {
        let solver = predictor.predict(z).unwrap().unwrap();
        let closed = markov_rate_closed_form(2.0, 3.0, z).unwrap();
        assert!((solver - closed).abs() < 1e-8, "{z}: {solver} vs {closed}");
    }
    assert!(matches!(predictor.predict(c(2.5, 0.0)), Err(Error::Domain(_))));
    assert!(matches!(predictor.predict(c(0.5, 0.0)), Err(Error::Domain(_))));
    assert_eq!(predictor.distance_to_compact(c(2.5, 1.0)), Some(1.0));
}

#[test]
fn rational_functions_are_predicted_exact() {
    let f = rational(&[(c(3.0, 0.0), c(-1.0, 0.0)), (c(-2.0, 0.0), c(1.0, 0.0))]).unwrap();
    assert_eq!(predicted_rate(&f, c(0.0, 1.0)).unwrap(), None);
    let s = cheb_coeffs(&f, 30, Precision::DEFAULT).unwrap();
    let opts = ChebPadeOptions { interpolation_grid: Some(2000), ..ChebPadeOptions::default() };
    let reports = sweep(&f, &s, &(3..=10).collect::<Vec<_>>(), &opts);
    assert!(reports.iter().all(|(_, r)| r.as_ref().unwrap().exact));
    let est = rate_at(&f, c(0.0, 1.5), &reports).unwrap();
    assert!(est.exact);
    assert!(est.slope.is_infinite());
    assert!(interpolation_measure(reports[0].1.as_ref().unwrap()).is_err());
}

#[test]
fn rate_fit_needs_enough_orders() {
    let (f, reports) = markov_sweep(6..=10);
    assert!(matches!(
        rate_at(&f, c(0.0, 2.0), &reports),
        Err(Error::TooFewSamples { found: 5, required: MIN_RATE_SAMPLES })
    ));
}

#[test]
fn two_branch_prediction_is_conjugate_symmetric_and_positive() {
    let f = sqrt2(DEFAULT_A);
    let predictor = RatePredictor::for_function(&f).unwrap();
    assert!(matches!(predictor, RatePredictor::TwoBranch(_)));
    for z in [c(2.0, 0.0), c(0.0, 1.5), c(-1.5, 0.7), c(0.3, -0.2)] {
        let r = predictor.predict(z).unwrap().unwrap();
        let rc = predictor.predict(z.conj()).unwrap().unwrap();
        assert!(r > 0.0 && (r - rc).abs() < 1e-12, "{z}: {r} {rc}");
    }
    assert!(matches!(RatePredictor::for_function(&cosine()).unwrap(), RatePredictor::Unavailable));
}

#[test]
fn capacity_probe_upper_region() {
    let (f, reports) = markov_sweep(8..=16);
    let predictor = RatePredictor::for_function(&f).unwrap();
    let region = Region { re: (-2.0, 2.0), im: (0.5, 2.5) };
    let rows = capacity_convergence_probe(&f, &predictor, &reports, &region, 20, 0.1).unwrap();
    assert_eq!(rows.len(), 9);
    let last = rows.last().unwrap();
    assert_eq!((last.n, last.evaluated, last.skipped), (16, 400, 0));
    assert!(last.fraction <= 0.05, "{}", last.fraction);
    assert!(Region { re: (-2.0, 2.0), im: (-0.5, 0.5) }.validate().is_err());
    assert!(Region { re: (1.0, 0.0), im: (1.0, 2.0) }.validate().is_err());
}

#[test]
fn arcsine_against_point_mass() {
    let arcsine = DiscreteMeasure::from_pieces(vec![IntervalDensity::arcsine(-1.0, 1.0, 64)]).unwrap();
    let origin = DiscreteMeasure::from_atoms(vec![c(0.0, 0.0)], vec![1.0]).unwrap();
    let d = wasserstein_projected(&arcsine, &origin, Projection::RealPart);
    assert!((d - 2.0 / PI).abs() < 1e-6, "{d}");
}

#[test]
fn phi_angle_is_odd_off_e() {
    for z in [c(2.0, 1.0), c(-0.5, 0.3), c(0.0, -4.0)] {
        assert!((phi_angle(z) + phi_angle(z.conj())).abs() < 1e-14);
    }
    assert!((phi_angle(c(0.0, 0.0)) - 0.5 * PI).abs() < 1e-14);
}

fn atoms(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, len)
}

fn counting(xs: &[f64]) -> DiscreteMeasure {
    DiscreteMeasure::counting(xs.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
}

/// W1 of equal-size counting measures on the line: sorted matching.
fn sorted_matching(a: &[f64], b: &[f64]) -> f64 {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wasserstein_matches_sorted_matching(a in atoms(7), b in atoms(7)) {
        let d = wasserstein_projected(&counting(&a), &counting(&b), Projection::RealPart);
        prop_assert!((d - sorted_matching(&a, &b)).abs() < 1e-12);
    }

    #[test]
    fn wasserstein_is_a_metric(a in atoms(5), b in atoms(3), m in atoms(4)) {
        let (a, b, m) = (counting(&a), counting(&b), counting(&m));
        let ab = wasserstein_projected(&a, &b, Projection::RealPart);
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - wasserstein_projected(&b, &a, Projection::RealPart)).abs() < 1e-12);
        let via = wasserstein_projected(&a, &m, Projection::RealPart) + wasserstein_projected(&m, &b, Projection::RealPart);
        prop_assert!(ab <= via + 1e-12);
    }

    #[test]
    fn zeros_near_the_ellipse_are_counted(
        angles in prop::collection::vec(-PI..PI, 1..60),
        jitter in prop::collection::vec(-1.0..1.0f64, 60),
        rho in 1.1..3.0f64,
    ) {
        let delta = 0.1 * rho;
        let zeros: Vec<Complex64> = angles
            .iter()
            .zip(&jitter)
            .map(|(&t, &j)| {
                let w = Complex64::from_polar(rho + 0.5 * delta * j, t);
                0.5 * (w + 1.0 / w)
            })
            .collect();
        let r = ellipse_clustering(&zeros, rho, None).unwrap();
        prop_assert_eq!(r.fraction, 1.0);
        prop_assert_eq!(r.distance_fraction, 1.0);
        prop_assert_eq!(r.count, zeros.len());
        prop_assert!(r.angle_gap >= 0.0 && r.angle_gap <= 1.0);
    }
}
