//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::f64::consts::LN_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chebpade::chebseries::*;
use chebpade::diagnostics::*;
use chebpade::faber::faber_forward;
use chebpade::functions::*;
use chebpade::numerics::*;
use chebpade::pade::*;
use chebpade::potential::*;
use chebpade::Error;

type Check = Result<(bool, String), String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn no_grid() -> ChebPadeOptions {
    ChebPadeOptions { interpolation_grid: None, ..ChebPadeOptions::default() }
}

fn markov_23() -> FunctionSpec {
    markov(2.0, 3.0, MarkovWeight::Lebesgue).unwrap()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let f = rational(&[(c(3.0, 0.0), c(-1.0, 0.0)), (c(-2.0, 0.0), c(1.0, 0.0))]).map_err(|e| e.to_string())?;
    let a = build_chebpade(&f, 2, Precision::DEFAULT, &ChebPadeOptions::default()).map_err(|e| e.to_string())?;
    let sup = log10_abs(&sup_error_on_e(&f, &a, 2000));
    let elapsed = start.elapsed();
    let ok = sup <= -80.0 && elapsed < Duration::from_secs(10);
    Ok((ok, format!("log10 sup|f - F_2| = {sup:.1} (<= -80), {elapsed:.2?} (< 10 s)")))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let f = sqrt2(DEFAULT_A);
    let a = build_chebpade(&f, 20, Precision::DEFAULT, &no_grid()).map_err(|e| e.to_string())?;
    let gaps: Vec<f64> = a.coefficient_gaps.iter().map(log10_abs).collect();
    let matched = gaps[..=40].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let next = gaps[41];
    let elapsed = start.elapsed();
    let ok = matched <= -50.0 && next > -30.0 && elapsed < Duration::from_secs(300);
    Ok((
        ok,
        format!("max log10 gap k<=40 = {matched:.1} (<= -50), log10 gap k=41 = {next:.1} (> -30), {elapsed:.2?}"),
    ))
}

fn criterion_3() -> Check {
    let f = markov_23();
    let series = cheb_coeffs(&f, 50, Precision::DEFAULT).map_err(|e| e.to_string())?;
    let mut worst = f64::NEG_INFINITY;
    for n in [5, 10] {
        let a = build_chebpade_from_series(&f, &series, n, &no_grid()).map_err(|e| e.to_string())?;
        let res = orthogonality_residuals(&f, &a, 2 * n).map_err(|e| e.to_string())?;
        worst = worst.max(res.iter().map(log10_abs).fold(f64::NEG_INFINITY, f64::max));
    }
    let ns: Vec<usize> = (1..=16).collect();
    let reports = sweep(&f, &series, &ns, &ChebPadeOptions::default());
    let mut short = Vec::new();
    let mut existing = 0;
    for (n, r) in &reports {
        if let Ok(a) = r {
            existing += 1;
            if a.interpolation_points.len() < 2 * n + 1 {
                short.push(*n);
            }
        }
    }
    let ok = worst <= -50.0 && short.is_empty() && existing > 0;
    Ok((
        ok,
        format!(
            "max log10 residual k<=2n = {worst:.1} (<= -50); {existing} existing n <= 16, too few interpolation points at {short:?}"
        ),
    ))
}

fn criterion_4() -> Check {
    let f = markov_23();
    let series = cheb_coeffs(&f, 50, Precision::DEFAULT).map_err(|e| e.to_string())?;
    let ns: Vec<usize> = (6..=16).collect();
    let reports = sweep(&f, &series, &ns, &no_grid());
    let predictor = RatePredictor::for_function(&f).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut parts = Vec::new();
    for z in [c(0.0, 1.5), c(0.0, 2.0), c(5.0, 0.0)] {
        let r = rate_at_with(&predictor, &f, z, &reports).map_err(|e| e.to_string())?;
        let gap = r.relative_gap.ok_or("no prediction")?;
        ok &= gap <= 0.05;
        parts.push(format!("z={z}: slope {:.4} vs 2G {:.4} ({:.2}%)", r.slope, r.prediction.unwrap(), 100.0 * gap));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let f = sqrt2(DEFAULT_A);
    let series = cheb_coeffs(&f, 110, Precision::DEFAULT).map_err(|e| e.to_string())?;
    let ns: Vec<usize> = (20..=50).collect();
    let reports = sweep(&f, &series, &ns, &no_grid());
    let mut ok = true;
    let mut parts = Vec::new();
    for z in [c(2.0, 0.0), c(0.0, 1.5)] {
        let r = rate_at(&f, z, &reports).map_err(|e| e.to_string())?;
        let gap = r.relative_gap.ok_or("no prediction")?;
        ok &= gap <= 0.05;
        parts.push(format!("z={z}: slope {:.4} vs {:.4} ({:.2}%)", r.slope, r.prediction.unwrap(), 100.0 * gap));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(1800);
    Ok((ok, format!("{}; {elapsed:.2?}", parts.join("; "))))
}

fn criterion_6() -> Check {
    let f = markov_23();
    let a = build_chebpade(&f, 16, Precision::DEFAULT, &ChebPadeOptions::default()).map_err(|e| e.to_string())?;
    let k = CompactSpec::interval(2.0, 3.0).unwrap();
    let eq = solve_equilibrium(&k, 1.0, 400).map_err(|e| e.to_string())?;
    let swept = balayage(&eq.lambda, &k, 400).map_err(|e| e.to_string())?;
    let interp = interpolation_measure(&a).map_err(|e| e.to_string())?;
    let poles = pole_measure(&a).map_err(|e| e.to_string())?;
    let w_interp = wasserstein_projected(&interp, &eq.lambda, Projection::RealPart);
    let w_poles = wasserstein_projected(&poles, &swept, Projection::RealPart);
    let stray = poles
        .points
        .iter()
        .map(|p| k.distance(*p))
        .fold(0.0, f64::max);
    let ok = w_interp <= 0.05 && w_poles <= 0.05 && stray <= 1e-3;
    Ok((
        ok,
        format!(
            "W1(interpolation, λ) = {w_interp:.4}, W1(poles, λ̃) = {w_poles:.4} (<= 0.05); max pole distance to [2,3] = {stray:.1e} (<= 1e-3)"
        ),
    ))
}

fn criterion_7() -> Check {
    let f = sqrt2(DEFAULT_A);
    let series = cheb_coeffs(&f, 110, Precision::DEFAULT).map_err(|e| e.to_string())?;
    let rho0 = rho0_estimate(&series).map_err(|e| e.to_string())?.rho;
    let exact_rho0 = joukowski_inverse_f64(DEFAULT_A).norm();
    let mut rows = Vec::new();
    for n in 60..=100 {
        let zeros: Vec<Complex64> = partial_sum_zeros(&series, n)
            .map_err(|e| e.to_string())?
            .iter()
            .map(to_c64)
            .collect();
        rows.push((n, ellipse_clustering(&zeros, rho0, None).map_err(|e| e.to_string())?));
    }
    rows.sort_by(|a, b| b.1.distance_fraction.total_cmp(&a.1.distance_fraction).then(a.0.cmp(&b.0)));
    let best = &rows[..rows.len().div_ceil(2)];
    let min_fraction = best.iter().map(|r| r.1.distance_fraction).fold(1.0, f64::min);
    let max_gap = best.iter().map(|r| r.1.angle_gap).fold(0.0, f64::max);
    let index_fraction = best.iter().map(|r| r.1.fraction).fold(1.0, f64::min);
    let ok = min_fraction >= 0.9 && max_gap <= 0.1 && (rho0 - exact_rho0).abs() <= 1e-2;
    Ok((
        ok,
        format!(
            "ρ0 = {rho0:.5} (|Φ(a)| = {exact_rho0:.5}); best half of n: min fraction within 0.1ρ0 = {min_fraction:.3} (>= 0.9), max angle gap = {max_gap:.3} (<= 0.1); min fraction with ||Φ|-ρ0| <= 0.1ρ0 = {index_fraction:.3}"
        ),
    ))
}

fn criterion_8() -> Check {
    let k = CompactSpec::interval(2.0, 3.0).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for theta in [0.0, 1.0, 3.0] {
        let eq = solve_equilibrium(&k, theta, 400).map_err(|e| e.to_string())?;
        let (swept, _) = balayage_with_constant(&eq.lambda, &k, 400).map_err(|e| e.to_string())?;
        let j = energy(&k, &eq.lambda, theta, 400).map_err(|e| e.to_string())?;
        let j_phi = energy_phi_theta(&k, &swept, theta).map_err(|e| e.to_string())?;
        let identity = (j_phi - ((1.0 + theta) * j - theta * theta * LN_2)).abs();
        let vector = vector_equilibrium(&eq, &swept, 1000).map_err(|e| e.to_string())?;
        let split = (vector.w - vector.w1 - vector.w2).abs().max(vector.residual_e).max(vector.residual_k);
        let mass = (swept.total_mass() - 1.0).abs();
        let (_, sweep_dev) = balayage_residual(&eq.lambda, &swept, &k, 1000).map_err(|e| e.to_string())?;
        let (_, field_dev) = external_field_residual(&swept, &k, theta, 1000).map_err(|e| e.to_string())?;
        let balayage_dev = sweep_dev.max(field_dev).max(mass);
        ok &= identity <= 1e-4 && split <= 1e-6 && eq.residual <= 1e-8 && balayage_dev <= 1e-6;
        parts.push(format!(
            "θ={theta}: energy identity {identity:.1e}, w-w1-w2 {split:.1e}, residual {:.1e}, balayage {balayage_dev:.1e}",
            eq.residual
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn criterion_9() -> Check {
    let arc = InvertedArc::two_branch(DEFAULT_A).map_err(|e| e.to_string())?;
    let straight = s_property_residual(&arc, 50, S_PROPERTY_OFFSET);
    let bent = s_property_residual(&arc.with_bend(5f64.to_radians()), 50, S_PROPERTY_OFFSET);
    let ok = straight <= 1e-3 && bent >= 10.0 * straight;
    Ok((ok, format!("predicted arc {straight:.2e} (<= 1e-3), 5° perturbed {bent:.2e} (ratio {:.1e})", bent / straight)))
}

/// `f(x) = 4/(5 - 3x) + 16x² + 4x - 7`, whose Faber transform is
/// `1/(1 - w/3) + 1 + 2w + 4w²`; the `[1/1]` Padé pole is `21/37`.
fn synthetic() -> FunctionSpec {
    FunctionSpec::new("synthetic", chebpade::chebseries::FunctionClass::Rational { poles: vec![c(5.0 / 3.0, 0.0)] }, |z| {
        let p = z.prec().0;
        let den = BigComplex::with_val(p, 5) - BigComplex::with_val(p, z * 3u32);
        let quad = BigComplex::with_val(p, z * z) * 16u32 + BigComplex::with_val(p, z * 4u32) - 7u32;
        BigComplex::with_val(p, 4) / den + quad
    })
}

fn criterion_10() -> Check {
    let f = synthetic();
    let prec = Precision::DEFAULT;
    let series = cheb_coeffs(&f, 40, prec).map_err(|e| e.to_string())?;
    let pade = pade_nn(&faber_forward(&series), 1).map_err(|e| e.to_string())?;
    let pole = exists_nonlinear_apc(&pade, DEFAULT_EPS_DISK).map_err(|e| e.to_string())?.min_modulus;
    let pole_ok = pole.is_some_and(|r| (r - 21.0 / 37.0).abs() < 1e-12);
    let ns: Vec<usize> = (1..=6).collect();
    let reports = sweep(&f, &series, &ns, &no_grid());
    let rejected: Vec<usize> = reports
        .iter()
        .filter(|(_, r)| matches!(r, Err(Error::NotRepresentable { .. })))
        .map(|(n, _)| *n)
        .collect();
    let exact: Vec<usize> = reports
        .iter()
        .filter_map(|(n, r)| r.as_ref().ok().map(|a| (n, a)))
        .filter(|(_, a)| log10_abs(&sup_error_on_e(&f, a, 500)) < -150.0)
        .map(|(n, _)| *n)
        .collect();
    let ok = pole_ok && rejected.contains(&1) && reports.len() == 6 && [3, 4, 5, 6].iter().all(|n| exact.contains(n));
    Ok((
        ok,
        format!("[1/1] pole at |w| = {:.6} (21/37 = {:.6}); NotRepresentable at n = {rejected:?}; exact at n = {exact:?}", pole.unwrap_or(f64::NAN), 21.0 / 37.0),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("rational exactness", criterion_1),
        ("matching conditions", criterion_2),
        ("orthogonality and interpolation count", criterion_3),
        ("Markov rate", criterion_4),
        ("two-branch rate", criterion_5),
        ("limit distributions", criterion_6),
        ("Jentzsch-Szego clustering", criterion_7),
        ("potential identities", criterion_8),
        ("S-property", criterion_9),
        ("existence gate", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match check() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {detail} [{:.1?}]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
