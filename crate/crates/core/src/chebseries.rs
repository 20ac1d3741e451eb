//! Fourier–Chebyshev expansions on `E = [-1, 1]`.
//!
//! Coefficients use the standard cosine convention
//! `f(x) = a_0/2 + Σ_{k≥1} a_k T_k(x)`. [`to_orthonormal`] converts to the
//! coefficients against Chebyshev polynomials orthonormal for
//! `dτ = (1 - x²)^{-1/2} dx`; no other module rescales coefficients.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    log10_abs, poly_roots, BigComplex, BigReal, Complex64, Plane, Poly, Precision,
};

pub type Evaluator = Arc<dyn Fn(&BigComplex) -> BigComplex + Send + Sync>;

/// Structural information used to pick a theoretical prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FunctionClass {
    /// Entire function (no finite singularity).
    Entire,
    Rational { poles: Vec<Complex64> },
    /// Cauchy transform `∫ dσ(t)/(z - t)` of a positive measure on `[c, d]`.
    Markov { c: f64, d: f64, weight: MarkovWeight },
    /// Two conjugate square-root branch points `a`, `ā`.
    TwoBranch { a: Complex64 },
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarkovWeight {
    /// `dσ = dt`.
    Lebesgue,
    /// `dσ = dt / (π sqrt((t - c)(d - t)))`.
    Arcsine,
}

/// A function holomorphic and real on `E`, together with its singular data.
#[derive(Clone)]
pub struct FunctionSpec {
    pub id: String,
    pub evaluator: Evaluator,
    pub branch_points: Vec<Complex64>,
    pub poles: Vec<Complex64>,
    /// Human-readable description of the branch cuts.
    pub cut: String,
    pub class: FunctionClass,
}

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("id", &self.id)
            .field("branch_points", &self.branch_points)
            .field("poles", &self.poles)
            .field("cut", &self.cut)
            .field("class", &self.class)
            .finish()
    }
}

impl FunctionSpec {
    pub fn new<F>(id: impl Into<String>, class: FunctionClass, evaluator: F) -> Self
    where
        F: Fn(&BigComplex) -> BigComplex + Send + Sync + 'static,
    {
        FunctionSpec {
            id: id.into(),
            evaluator: Arc::new(evaluator),
            branch_points: Vec::new(),
            poles: Vec::new(),
            cut: String::new(),
            class,
        }
    }

    pub fn with_branch_points(mut self, points: Vec<Complex64>) -> Self {
        self.branch_points = points;
        self
    }

    pub fn with_poles(mut self, poles: Vec<Complex64>) -> Self {
        self.poles = poles;
        self
    }

    pub fn with_cut(mut self, cut: impl Into<String>) -> Self {
        self.cut = cut.into();
        self
    }

    pub fn eval(&self, z: &BigComplex) -> BigComplex {
        (self.evaluator)(z)
    }

    /// Real part of `f(x)`; the imaginary part is discarded.
    pub fn eval_real(&self, x: &BigReal) -> BigReal {
        let z = BigComplex::with_val(x.prec(), (x, 0));
        let v = self.eval(&z);
        BigReal::with_val(x.prec(), v.real())
    }

    /// Checks that the singular set is conjugate-symmetric and disjoint from `E`.
    pub fn validate(&self) -> Result<()> {
        for set in [&self.branch_points, &self.poles] {
            for p in set {
                if p.im.abs() <= 1e-12 && p.re.abs() <= 1.0 {
                    return Err(Error::InvalidInput(format!("{}: singularity {p} lies on E", self.id)));
                }
                let mirrored = set.iter().any(|q| (q - p.conj()).norm() <= 1e-12 * (1.0 + p.norm()));
                if !mirrored {
                    return Err(Error::InvalidInput(format!(
                        "{}: singular set is not symmetric under conjugation ({p})",
                        self.id
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Coefficient normalization tag carried with serialized series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `f = a_0/2 + Σ a_k T_k`.
    StandardCosine,
}

/// Decay fit of Chebyshev coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rho0Estimate {
    pub rho: f64,
    /// Decay steepens across the fitting window, as for entire functions.
    pub superexponential: bool,
    pub usable: usize,
}

/// Truncated Fourier–Chebyshev expansion `a_0..a_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    coeffs: Vec<BigReal>,
    /// `log10` of the estimated absolute error of each coefficient.
    error_log10: Vec<f64>,
    precision: Precision,
    convention: Convention,
    rho0: Option<Rho0Estimate>,
}

impl ChebSeries {
    /// Builds a series from given coefficients (standard convention).
    pub fn from_coeffs(coeffs: Vec<BigReal>, precision: Precision) -> Self {
        let error_log10 = vec![-(precision.digits() as f64); coeffs.len()];
        let mut s = ChebSeries {
            coeffs,
            error_log10,
            precision,
            convention: Convention::StandardCosine,
            rho0: None,
        };
        s.rho0 = rho0_estimate(&s).ok();
        s
    }

    pub fn coeffs(&self) -> &[BigReal] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest index `N`.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn error_log10(&self) -> &[f64] {
        &self.error_log10
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn rho0(&self) -> Option<Rho0Estimate> {
        self.rho0
    }

    /// Value of the full truncated sum at a real point.
    pub fn eval_real(&self, x: &BigReal) -> BigReal {
        partial_sum(self, self.order()).eval_real(x)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SerializedSeries::from(self)).expect("series serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: SerializedSeries =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("series json: {e}")))?;
        let prec = Precision::new(raw.precision)?;
        let coeffs = raw
            .coeffs
            .iter()
            .map(|c| prec.parse_real(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(ChebSeries::from_coeffs(coeffs, prec))
    }
}

#[derive(Serialize, Deserialize)]
struct SerializedSeries {
    convention: Convention,
    precision: u32,
    coeffs: Vec<String>,
}

impl From<&ChebSeries> for SerializedSeries {
    fn from(s: &ChebSeries) -> Self {
        SerializedSeries {
            convention: s.convention,
            precision: s.precision.digits(),
            coeffs: s
                .coeffs
                .iter()
                .map(|c| crate::numerics::to_decimal(c, s.precision.digits() as usize))
                .collect(),
        }
    }
}

/// Standard-convention coefficients to orthonormal ones:
/// `c_0 = (a_0/2)·sqrt(π)`, `c_k = a_k·sqrt(π/2)`.
pub fn to_orthonormal(a: &[BigReal], prec: Precision) -> Vec<BigReal> {
    let pi = prec.pi();
    let s0 = BigReal::with_val(prec.bits(), pi.sqrt_ref());
    let sk = BigReal::with_val(prec.bits(), &pi / 2u32).sqrt();
    a.iter()
        .enumerate()
        .map(|(k, v)| {
            if k == 0 {
                BigReal::with_val(prec.bits(), v * &s0) / 2u32
            } else {
                BigReal::with_val(prec.bits(), v * &sk)
            }
        })
        .collect()
}

pub fn from_orthonormal(c: &[BigReal], prec: Precision) -> Vec<BigReal> {
    let pi = prec.pi();
    let s0 = BigReal::with_val(prec.bits(), pi.sqrt_ref());
    let sk = BigReal::with_val(prec.bits(), &pi / 2u32).sqrt();
    c.iter()
        .enumerate()
        .map(|(k, v)| {
            if k == 0 {
                BigReal::with_val(prec.bits(), v * 2u32) / &s0
            } else {
                BigReal::with_val(prec.bits(), v / &sk)
            }
        })
        .collect()
}

pub const MAX_DOUBLINGS: usize = 20;

/// Chebyshev coefficients `a_0..a_N` of `f` by first-kind node quadrature.
pub fn cheb_coeffs(f: &FunctionSpec, n: usize, prec: Precision) -> Result<ChebSeries> {
    let tol = prec.rank_tol();
    let bits = prec.bits();
    let eval = |x: &BigReal| -> Result<BigReal> {
        let v = f.eval(&BigComplex::with_val(bits, (x, 0)));
        let scale = BigReal::with_val(bits, v.real().abs_ref()).max(&BigReal::with_val(bits, 1));
        if BigReal::with_val(bits, v.imag().abs_ref()) > BigReal::with_val(bits, &scale * &tol) {
            return Err(Error::Domain(format!(
                "{} is not real on E (imaginary part {:e} at x = {:.6})",
                f.id,
                v.imag().to_f64(),
                x.to_f64()
            )));
        }
        Ok(BigReal::with_val(bits, v.real()))
    };
    let (coeffs, err) = chebyshev_quadrature(eval, n, prec)?;
    let mut s = ChebSeries::from_coeffs(coeffs, prec);
    s.error_log10 = err;
    Ok(s)
}

/// Node-doubling quadrature for the standard-convention coefficients of a
/// real function on `E`. Returns coefficients and `log10` of the change
/// between the last two passes.
pub fn chebyshev_quadrature<F>(eval: F, n: usize, prec: Precision) -> Result<(Vec<BigReal>, Vec<f64>)>
where
    F: Fn(&BigReal) -> Result<BigReal> + Sync,
{
    let bits = prec.bits();
    let mut m = (n + 1).next_power_of_two().max(16);
    let mut prev = quadrature_pass(&eval, n, m, prec)?;
    for _ in 0..MAX_DOUBLINGS {
        m *= 2;
        let next = quadrature_pass(&eval, n, m, prec)?;
        let scale = next
            .iter()
            .map(|v| BigReal::with_val(bits, v.abs_ref()))
            .fold(BigReal::with_val(bits, 1), |a, b| a.max(&b));
        let tol = BigReal::with_val(bits, &scale * &prec.rank_tol());
        let diffs: Vec<BigReal> = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| BigReal::with_val(bits, a - b).abs())
            .collect();
        if diffs.iter().all(|d| *d <= tol) {
            let err = diffs
                .iter()
                .map(|d| log10_abs(d).max(-(prec.digits() as f64)))
                .collect();
            return Ok((next, err));
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergence { doublings: MAX_DOUBLINGS })
}

fn quadrature_pass<F>(eval: &F, n: usize, m: usize, prec: Precision) -> Result<Vec<BigReal>>
where
    F: Fn(&BigReal) -> Result<BigReal> + Sync,
{
    let bits = prec.bits();
    let pi = prec.pi();
    // cos(π i / (2m)) for i = 0..=m; other angles follow by symmetry.
    let quarter: Vec<BigReal> = (0..=m)
        .into_par_iter()
        .map(|i| (BigReal::with_val(bits, &pi * i as u64) / (2 * m) as u64).cos())
        .collect();
    let cos_at = |i: usize| -> BigReal {
        let i = i % (4 * m);
        match i {
            _ if i <= m => quarter[i].clone(),
            _ if i <= 2 * m => -quarter[2 * m - i].clone(),
            _ if i <= 3 * m => -quarter[i - 2 * m].clone(),
            _ => quarter[4 * m - i].clone(),
        }
    };
    let values: Vec<BigReal> = (0..m)
        .into_par_iter()
        .map(|j| eval(&cos_at(2 * j + 1)))
        .collect::<Result<_>>()?;
    let coeffs = (0..=n)
        .into_par_iter()
        .map(|k| {
            let mut acc = BigReal::with_val(bits, 0);
            let four_m = 4 * m;
            for (j, v) in values.iter().enumerate() {
                let idx = (k * (2 * j + 1)) % four_m;
                let c = match idx {
                    _ if idx <= m => &quarter[idx],
                    _ if idx <= 2 * m => {
                        acc -= BigReal::with_val(bits, v * &quarter[2 * m - idx]);
                        continue;
                    }
                    _ if idx <= 3 * m => {
                        acc -= BigReal::with_val(bits, v * &quarter[idx - 2 * m]);
                        continue;
                    }
                    _ => &quarter[four_m - idx],
                };
                acc += BigReal::with_val(bits, v * c);
            }
            acc * 2u32 / m as u64
        })
        .collect();
    Ok(coeffs)
}

/// `S_n = a_0/2 + Σ_{k=1}^n a_k T_k` as a Chebyshev-basis polynomial in `z`.
pub fn partial_sum(s: &ChebSeries, n: usize) -> Poly {
    let bits = s.precision.bits();
    let n = n.min(s.order());
    let coeffs = s.coeffs[..=n]
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let v = if k == 0 { BigReal::with_val(bits, a / 2u32) } else { a.clone() };
            BigComplex::with_val(bits, (v, 0))
        })
        .collect();
    Poly::chebyshev(coeffs, Plane::Z)
}

/// All `n` zeros of `S_n`.
pub fn partial_sum_zeros(s: &ChebSeries, n: usize) -> Result<Vec<BigComplex>> {
    if n == 0 || n > s.order() {
        return Err(Error::InvalidInput(format!(
            "partial sum order {n} outside 1..={}",
            s.order()
        )));
    }
    if s.coeffs[n].is_zero() {
        return Err(Error::InvalidInput(format!("coefficient a_{n} vanishes")));
    }
    let p = partial_sum(s, n);
    poly_roots(&p, &s.precision.rank_tol())
}

/// Estimates `ρ₀` from the geometric decay of the coefficients.
///
/// Fits `log|a_k| ≈ α - k log ρ + β log k` by least squares over the second
/// half of the coefficients that lie above the `10^(10-digits)` noise floor.
/// The `log k` column absorbs algebraic prefactors such as the `k^{-3/2}` of
/// a square-root branch point.
pub fn rho0_estimate(s: &ChebSeries) -> Result<Rho0Estimate> {
    let logs: Vec<f64> = s.coeffs.iter().map(log10_abs).collect();
    decay_fit(&logs, s.precision.digits())
}

/// Decay fit shared with the radius estimate of power series; `log10_abs[k]`
/// is `log10 |c_k|`.
pub(crate) fn decay_fit(log10_abs: &[f64], digits: u32) -> Result<Rho0Estimate> {
    let floor = -(digits as f64) + 10.0;
    let logs: Vec<(usize, f64)> = log10_abs
        .iter()
        .copied()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| l.is_finite() && *l >= floor)
        .collect();
    let last = match logs.last() {
        Some(&(k, _)) => k,
        None => return Err(Error::InsufficientDecay { usable: 0 }),
    };
    let window: Vec<(f64, f64)> = logs
        .iter()
        .filter(|(k, _)| 2 * *k >= last)
        .map(|&(k, l)| (k as f64, l * std::f64::consts::LN_10))
        .collect();
    if window.len() < 10 {
        return Err(Error::InsufficientDecay { usable: window.len() });
    }
    let slope = fit_decay(&window, true).unwrap_or_else(|| fit_decay(&window, false).unwrap());
    let rho = (-slope).exp();

    let half = window.len() / 2;
    let steepening = match (fit_decay(&window[..half], false), fit_decay(&window[half..], false)) {
        (Some(a), Some(b)) if a < 0.0 => b / a > 1.02,
        _ => false,
    };
    Ok(Rho0Estimate {
        rho,
        superexponential: rho > 1e3 || steepening,
        usable: window.len(),
    })
}

/// Least-squares slope in `k` for regressors `(1, k[, ln k])`.
fn fit_decay(points: &[(f64, f64)], with_log: bool) -> Option<f64> {
    let cols = if with_log { 3 } else { 2 };
    if points.len() < cols + 1 {
        return None;
    }
    let rows = points.len();
    let a = nalgebra::DMatrix::from_fn(rows, cols, |i, j| match j {
        0 => 1.0,
        1 => points[i].0,
        _ => points[i].0.ln(),
    });
    let b = nalgebra::DVector::from_iterator(rows, points.iter().map(|p| p.1));
    let sol = a.svd(true, true).solve(&b, 1e-12).ok()?;
    let slope = sol[1];
    slope.is_finite().then_some(slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cabs;

    fn prec() -> Precision {
        Precision::new(60).unwrap()
    }

    fn poly_fn(id: &str, coeffs: Vec<f64>) -> FunctionSpec {
        FunctionSpec::new(id, FunctionClass::Entire, move |z| {
            let mut acc = BigComplex::with_val(z.prec().0, 0);
            for c in coeffs.iter().rev() {
                acc *= z;
                acc += *c;
            }
            acc
        })
    }

    #[test]
    fn square_reproduces_half_plus_half_t2() {
        let p = prec();
        let s = cheb_coeffs(&poly_fn("x2", vec![0.0, 0.0, 1.0]), 8, p).unwrap();
        // a_0/2 = 1/2 so a_0 = 1; a_2 = 1/2.
        assert!(log10_abs(&(s.coeffs()[0].clone() - 1u32)) < -55.0);
        assert!(log10_abs(&(s.coeffs()[2].clone() - 0.5f64)) < -55.0);
        for k in [1, 3, 4, 5, 6, 7, 8] {
            assert!(log10_abs(&s.coeffs()[k]) < -55.0);
        }
    }

    #[test]
    fn orthonormal_round_trip() {
        let p = prec();
        let a: Vec<BigReal> = (0..5).map(|k| p.real(k as f64 + 0.25)).collect();
        let back = from_orthonormal(&to_orthonormal(&a, p), p);
        for (x, y) in a.iter().zip(&back) {
            assert!(log10_abs(&BigReal::with_val(p.bits(), x - y)) < -55.0);
        }
    }

    #[test]
    fn geometric_decay_gives_rho_two() {
        let p = prec();
        let coeffs = (0..40).map(|k| rug::ops::Pow::pow(p.real(2), -(k as i32))).collect();
        let s = ChebSeries::from_coeffs(coeffs, p);
        let est = rho0_estimate(&s).unwrap();
        assert!((est.rho - 2.0).abs() < 1e-3);
        assert!(!est.superexponential);
    }

    #[test]
    fn short_series_reports_insufficient_decay() {
        let p = prec();
        let s = ChebSeries::from_coeffs(vec![p.real(1), p.real(0.5)], p);
        assert!(matches!(rho0_estimate(&s), Err(Error::InsufficientDecay { .. })));
    }

    #[test]
    fn partial_sum_of_square_at_order_one_is_constant() {
        let p = prec();
        let s = cheb_coeffs(&poly_fn("x2", vec![0.0, 0.0, 1.0]), 4, p).unwrap();
        let s1 = partial_sum(&s, 1).trimmed(&p.rank_tol());
        assert_eq!(s1.degree(), 0);
        assert!(log10_abs(&cabs(&(s1.coeffs()[0].clone() - 0.5f64))) < -55.0);
    }

    #[test]
    fn json_round_trip() {
        let p = prec();
        let s = ChebSeries::from_coeffs(vec![p.real(1), p.real(-0.125), p.real(1e-30)], p);
        let back = ChebSeries::from_json(&s.to_json()).unwrap();
        assert_eq!(back.len(), 3);
        for (x, y) in s.coeffs().iter().zip(back.coeffs()) {
            let rel = BigReal::with_val(p.bits(), x - y).abs();
            assert!(rel.is_zero() || log10_abs(&rel) - log10_abs(x) < -55.0);
        }
    }

    #[test]
    fn non_real_function_is_rejected() {
        let p = prec();
        let f = FunctionSpec::new("iz", FunctionClass::Entire, |z| {
            BigComplex::with_val(z.prec().0, z * BigComplex::with_val(z.prec().0, (0, 1)))
        });
        assert!(matches!(cheb_coeffs(&f, 4, p), Err(Error::Domain(_))));
    }
}
