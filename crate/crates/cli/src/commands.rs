use std::collections::BTreeMap;

use serde_json::{json, Value};

use chebpade::chebseries::{cheb_coeffs, partial_sum_zeros, rho0_estimate, ChebSeries, FunctionClass, FunctionSpec};
use chebpade::diagnostics::{
    interpolation_measure, pole_measure, rate_at_with, wasserstein_projected, zero_measure, Projection, RatePredictor,
};
use chebpade::faber::Ellipse;
use chebpade::functions::{build, fmt_c, parse_complex, DEFAULT_A, DEFAULT_B};
use chebpade::numerics::{joukowski_inverse_f64, log10_abs, to_c64, BigComplex, Complex64, Precision};
use chebpade::pade::{build_chebpade_from_series, sup_error_on_e, sweep, ChebPadeApproximant, ChebPadeOptions};
use chebpade::potential::{balayage, solve_equilibrium, CompactSpec, DiscreteMeasure, InvertedArc};
use chebpade::{Error, Result};

use crate::config::RunConfig;
use crate::output::{dec, dec_parts, float, Output};

/// Orders tried on each side of a non-existing `n`.
const NEAREST_SEARCH: usize = 6;
const ELLIPSE_VERTICES: usize = 720;
const ARC_VERTICES: usize = 401;
const SUP_POINTS: usize = 1000;
pub const FIGURE_ORDER: usize = 50;

fn precision(cfg: &RunConfig) -> Result<Precision> {
    Precision::new(cfg.precision)
}

fn function(cfg: &RunConfig) -> Result<FunctionSpec> {
    build(&cfg.function, &cfg.params)
}

fn options(cfg: &RunConfig, interpolation: bool) -> ChebPadeOptions {
    ChebPadeOptions {
        eps_disk: cfg.eps_disk,
        interpolation_grid: interpolation.then_some(cfg.interpolation_grid),
        ..ChebPadeOptions::default()
    }
}

fn complex_row(z: &BigComplex, prec: Precision) -> Vec<String> {
    let c = to_c64(z);
    let (re, im) = dec_parts(z, prec);
    vec![float(c.re), float(c.im), re, im]
}

pub fn coeffs(cfg: &RunConfig) -> Result<()> {
    let prec = precision(cfg)?;
    let f = function(cfg)?;
    let series = cheb_coeffs(&f, cfg.coefficient_count(cfg.n), prec)?;
    let floor = prec.pow10(10 - prec.digits() as i64);
    let rows: Vec<Vec<String>> = series
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.as_abs().gt(&floor))
        .map(|(k, a)| vec![k.to_string(), float(a.to_f64()), dec(a, prec)])
        .collect();
    let mut out = Output::new(cfg, "coeffs")?;
    out.csv("coeffs.csv", &["k", "a_k", "a_k_decimal"], &rows)?;
    out.summary = json!({
        "function": f.id,
        "convention": "f = a_0/2 + sum a_k T_k",
        "computed": series.len(),
        "nonzero": rows.len(),
        "rho0": rho0_estimate(&series).ok().map(|r| r.rho),
    });
    out.finish("ok")
}

/// Nearest `m ≠ n` (lower first on ties) for which `F_m` exists.
fn nearest_existing(f: &FunctionSpec, series: &ChebSeries, n: usize, opts: &ChebPadeOptions) -> Option<usize> {
    let max = (series.len().saturating_sub(1)) / 2;
    (1..=NEAREST_SEARCH).find_map(|d| {
        let below = n.checked_sub(d).filter(|m| *m >= 1);
        let above = Some(n + d).filter(|m| *m <= max);
        [below, above]
            .into_iter()
            .flatten()
            .find(|&m| build_chebpade_from_series(f, series, m, opts).is_ok())
    })
}

/// Builds `F_n`; on non-existence writes a manifest naming the nearest
/// existing order and returns the error.
fn build_or_report(cfg: &RunConfig, command: &str, f: &FunctionSpec, n: usize, interpolation: bool) -> Result<(ChebPadeApproximant, ChebSeries)> {
    let prec = precision(cfg)?;
    let series = cheb_coeffs(f, cfg.coefficient_count(n + NEAREST_SEARCH), prec)?;
    match build_chebpade_from_series(f, &series, n, &options(cfg, interpolation)) {
        Ok(a) => Ok((a, series)),
        Err(e @ Error::NotRepresentable { .. }) => {
            let nearest = nearest_existing(f, &series, n, &options(cfg, false));
            let mut out = Output::new(cfg, command)?;
            out.summary = json!({ "function": f.id, "n": n, "error": e.to_string(), "nearest_existing_n": nearest });
            out.finish("not-representable")?;
            let hint = match nearest {
                Some(m) => format!("; nearest existing order is n = {m}"),
                None => format!("; no existing order within {NEAREST_SEARCH} of n"),
            };
            Err(Error::NotRepresentable { n, reason: format!("{}{hint}", reason_of(&e)) })
        }
        Err(e) => Err(e),
    }
}

fn reason_of(e: &Error) -> String {
    match e {
        Error::NotRepresentable { reason, .. } => reason.clone(),
        other => other.to_string(),
    }
}

pub fn approx(cfg: &RunConfig) -> Result<()> {
    let prec = precision(cfg)?;
    let f = function(cfg)?;
    let (a, _) = build_or_report(cfg, "approx", &f, cfg.n, true)?;
    let sup = log10_abs(&sup_error_on_e(&f, &a, SUP_POINTS));
    let max_gap = a.coefficient_gaps.iter().take(2 * a.n + 1).map(log10_abs).fold(f64::NEG_INFINITY, f64::max);
    let zeros = a.zeros()?;
    let mut out = Output::new(cfg, "approx")?;
    out.csv(
        "approx.csv",
        &[
            "n", "exists", "defect", "numerator_degree", "denominator_degree", "interpolation_points", "tangential",
            "exact", "sup_error_log10", "max_matching_gap_log10",
        ],
        &[vec![
            a.n.to_string(),
            a.exists.to_string(),
            a.defect().to_string(),
            a.f_n.num.degree().to_string(),
            a.poles().len().to_string(),
            a.interpolation_points.len().to_string(),
            a.tangential.to_string(),
            a.exact.to_string(),
            format!("{sup:.3}"),
            format!("{max_gap:.3}"),
        ]],
    )?;
    let header = ["re", "im", "re_decimal", "im_decimal"];
    let poles: Vec<Vec<String>> = a.poles().iter().map(|p| complex_row(p, prec)).collect();
    out.csv("poles.csv", &header, &poles)?;
    let zero_rows: Vec<Vec<String>> = zeros.iter().map(|z| complex_row(z, prec)).collect();
    out.csv("zeros.csv", &header, &zero_rows)?;
    let interp: Vec<Vec<String>> = a
        .interpolation_points
        .iter()
        .map(|x| vec![float(x.to_f64()), dec(x, prec)])
        .collect();
    out.csv("interpolation.csv", &["x", "x_decimal"], &interp)?;
    out.summary = json!({ "function": f.id, "n": a.n, "interpolation_points": a.interpolation_points.len() });
    out.finish("ok")
}

fn default_points(f: &FunctionSpec) -> Vec<Complex64> {
    match &f.class {
        FunctionClass::Markov { .. } => vec![Complex64::new(0.0, 1.5), Complex64::new(0.0, 2.0), Complex64::new(5.0, 0.0)],
        _ if f.branch_points.len() == 2 || matches!(f.class, FunctionClass::TwoBranch { .. }) => {
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.5)]
        }
        _ => vec![Complex64::new(0.0, 1.5), Complex64::new(0.0, 2.0)],
    }
}

fn status_of(r: &Result<ChebPadeApproximant>) -> String {
    match r {
        Ok(_) => "ok".into(),
        Err(Error::NotRepresentable { .. }) => "not-representable".into(),
        Err(e) => format!("error: {}", e.to_string().replace(',', ";")),
    }
}

pub fn rates(cfg: &RunConfig) -> Result<()> {
    let prec = precision(cfg)?;
    let f = function(cfg)?;
    let points = if cfg.points.is_empty() {
        default_points(&f)
    } else {
        cfg.points.iter().map(|p| parse_complex(p)).collect::<Result<Vec<_>>>()?
    };
    let series = cheb_coeffs(&f, cfg.coefficient_count(cfg.n_max), prec)?;
    let ns: Vec<usize> = (cfg.n_min..=cfg.n_max).collect();
    let reports = sweep(&f, &series, &ns, &options(cfg, false));
    let predictor = RatePredictor::for_function(&f)?;
    let mut rate_rows = Vec::new();
    let mut error_rows = Vec::new();
    for z in &points {
        let r = rate_at_with(&predictor, &f, *z, &reports)?;
        let opt = |v: Option<f64>| v.map(float).unwrap_or_default();
        let dropped: Vec<String> = r.dropped.iter().map(|n| n.to_string()).collect();
        rate_rows.push(vec![
            float(z.re),
            float(z.im),
            float(r.slope),
            opt(r.prediction),
            opt(r.relative_gap),
            r.exact.to_string(),
            dropped.join(";"),
        ]);
        let mut samples = r.samples.iter();
        for (n, rep) in &reports {
            let value = if rep.is_ok() { samples.next().map(|s| float(s.neg_log_error)).unwrap_or_default() } else { String::new() };
            error_rows.push(vec![n.to_string(), status_of(rep), float(z.re), float(z.im), value]);
        }
    }
    let mut out = Output::new(cfg, "rates")?;
    out.csv("rates.csv", &["z_re", "z_im", "slope", "prediction", "gap", "exact", "dropped"], &rate_rows)?;
    out.csv("errors.csv", &["n", "status", "z_re", "z_im", "neg_log_error"], &error_rows)?;
    let existing: Vec<usize> = reports.iter().filter(|(_, r)| r.is_ok()).map(|(n, _)| *n).collect();
    out.summary = json!({ "function": f.id, "n_range": [cfg.n_min, cfg.n_max], "existing": existing });
    out.finish("ok")
}

fn measure_rows(kind: &str, mu: &DiscreteMeasure, rows: &mut Vec<Vec<String>>) {
    for (p, w) in mu.points.iter().zip(&mu.weights) {
        rows.push(vec![kind.to_string(), float(p.re), float(p.im), float(*w)]);
    }
}

pub fn measures(cfg: &RunConfig) -> Result<()> {
    let f = function(cfg)?;
    let (a, _) = build_or_report(cfg, "measures", &f, cfg.n, true)?;
    let mut rows = Vec::new();
    let mut summary = BTreeMap::new();
    let interp = interpolation_measure(&a);
    match &interp {
        Ok(mu) => measure_rows("interpolation", mu, &mut rows),
        Err(e) => {
            summary.insert("interpolation".to_string(), Value::String(e.to_string()));
        }
    }
    let poles = pole_measure(&a).ok();
    if let Some(mu) = &poles {
        measure_rows("pole", mu, &mut rows);
    }
    if let Ok(mu) = zero_measure(&a) {
        measure_rows("zero", &mu, &mut rows);
    }
    let mut out = Output::new(cfg, "measures")?;
    if let FunctionClass::Markov { c, d, .. } = f.class {
        let k = CompactSpec::interval(c, d)?;
        let eq = solve_equilibrium(&k, 1.0, cfg.equilibrium_grid)?;
        let swept = balayage(&eq.lambda, &k, cfg.equilibrium_grid)?;
        measure_rows("equilibrium", &eq.lambda, &mut rows);
        measure_rows("balayage", &swept, &mut rows);
        if let Ok(mu) = &interp {
            let w = wasserstein_projected(mu, &eq.lambda, Projection::RealPart);
            summary.insert("w1_interpolation_equilibrium".into(), json!(w));
        }
        if let Some(mu) = &poles {
            let w = wasserstein_projected(mu, &swept, Projection::RealPart);
            summary.insert("w1_poles_balayage".into(), json!(w));
        }
        out.json("equilibrium.json", &eq.report())?;
    }
    out.csv("measures.csv", &["kind", "re", "im", "weight"], &rows)?;
    summary.insert("function".into(), json!(f.id));
    summary.insert("n".into(), json!(a.n));
    out.summary = serde_json::to_value(summary).expect("summary serializes");
    out.finish("ok")
}

/// Function and parameters behind each figure; missing parameters take the
/// documented defaults, recorded as artifact choices.
fn figure_function(cfg: &RunConfig, figure: u8) -> Result<(String, BTreeMap<String, String>, Value)> {
    let mut params = cfg.params.clone();
    let mut put = |key: &str, default: String| params.entry(key.to_string()).or_insert(default).clone();
    match figure {
        1 => {
            let a = put("a", fmt_c(DEFAULT_A));
            let mut p = BTreeMap::new();
            p.insert("b".to_string(), a.clone());
            Ok(("sqrt2".into(), p, json!({ "a": a })))
        }
        2 => {
            let choices = json!({ "a": put("a", fmt_c(DEFAULT_A)), "b": put("b", fmt_c(DEFAULT_B)), "c": put("c", "-1.5".into()) });
            Ok(("fig2".into(), params, choices))
        }
        3 | 4 => {
            let c = if figure == 3 { "0.8" } else { "0.3" };
            let choices = json!({ "a": put("a", fmt_c(DEFAULT_A)), "b": put("b", fmt_c(DEFAULT_B)), "c": put("c", c.into()) });
            Ok(("fig3".into(), params, choices))
        }
        _ => Err(Error::InvalidInput(format!("figure must be 1-4, got {figure}"))),
    }
}

pub fn figure(cfg: &RunConfig) -> Result<()> {
    let figure = cfg.figure.ok_or_else(|| Error::InvalidInput("--figure is required".into()))?;
    let prec = precision(cfg)?;
    let (name, params, choices) = figure_function(cfg, figure)?;
    let f = build(&name, &params)?;
    let count = (2 * (FIGURE_ORDER + NEAREST_SEARCH) + 10).max(cfg.partial_sum + 10);
    let series = cheb_coeffs(&f, cfg.n_coeffs.unwrap_or(count), prec)?;
    let opts = options(cfg, false);
    let (order, approx) = match build_chebpade_from_series(&f, &series, FIGURE_ORDER, &opts) {
        Ok(a) => (FIGURE_ORDER, Some(a)),
        Err(Error::NotRepresentable { .. }) => match nearest_existing(&f, &series, FIGURE_ORDER, &opts) {
            Some(m) => (m, build_chebpade_from_series(&f, &series, m, &opts).ok()),
            None => (FIGURE_ORDER, None),
        },
        Err(e) => return Err(e),
    };
    let mut rows = Vec::new();
    let mut push = |z: &BigComplex, source: &str| {
        let c = to_c64(z);
        let (re, im) = dec_parts(z, prec);
        rows.push(vec![float(c.re), float(c.im), source.to_string(), re, im]);
    };
    let partial = partial_sum_zeros(&series, cfg.partial_sum)?;
    partial.iter().for_each(|z| push(z, "partial_sum"));
    let (mut pole_count, mut zero_count) = (0, 0);
    if let Some(a) = &approx {
        a.poles().iter().for_each(|z| push(z, "pade_pole"));
        let zeros = a.zeros()?;
        zeros.iter().for_each(|z| push(z, "pade_zero"));
        pole_count = a.poles().len();
        zero_count = zeros.len();
    }
    let mut out = Output::new(cfg, "figure")?;
    out.csv(&format!("fig{figure}_zeros.csv"), &["re", "im", "source", "re_decimal", "im_decimal"], &rows)?;

    let estimate = rho0_estimate(&series)?;
    let nearest_singularity = f
        .branch_points
        .iter()
        .chain(&f.poles)
        .map(|b| joukowski_inverse_f64(*b).norm())
        .fold(f64::INFINITY, f64::min);
    let ellipse: Vec<Vec<String>> = Ellipse::new(estimate.rho)?
        .polyline(ELLIPSE_VERTICES)
        .iter()
        .map(|z| vec![float(z.re), float(z.im)])
        .collect();
    out.csv(&format!("fig{figure}_ellipse.csv"), &["re", "im"], &ellipse)?;
    if let [a, b] = f.branch_points.as_slice() {
        if (a.conj() - b).norm() <= 1e-14 * a.norm().max(1.0) {
            let arc: Vec<Vec<String>> = InvertedArc::two_branch(*a)?
                .z_polyline(ARC_VERTICES)
                .iter()
                .map(|z| vec![float(z.re), float(z.im)])
                .collect();
            out.csv(&format!("fig{figure}_arc.csv"), &["re", "im"], &arc)?;
        }
    }
    out.artifact_choices = choices;
    out.summary = json!({
        "figure": figure,
        "function": f.id,
        "partial_sum_order": cfg.partial_sum,
        "partial_sum_zeros": partial.len(),
        "pade_order": order,
        "pade_exists": approx.is_some(),
        "pade_poles": pole_count,
        "pade_zeros": zero_count,
        "rho0_estimate": estimate.rho,
        "rho0_nearest_singularity": nearest_singularity,
    });
    out.finish("ok")
}
