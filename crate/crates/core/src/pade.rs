//! Diagonal Padé approximants at `w = 0` and the nonlinear Chebyshev–Padé
//! approximant `F_n = U^{-1}([n/n]_{f̃})`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebseries::{cheb_coeffs, chebyshev_quadrature, to_orthonormal, ChebSeries, FunctionSpec};
use crate::error::{Error, Result};
use crate::faber::{faber_forward, map_rational, PowerSeries};
use crate::numerics::{
    cabs, log10_abs, poly_roots, solve_linear, to_c64, BigComplex, BigReal, Plane, Poly, Precision,
    RationalFunction,
};

/// `[n/n]` Padé approximant `P/Q` with `Q(0) = 1`.
#[derive(Debug, Clone)]
pub struct PadeApproximant {
    pub p: Poly,
    pub q: Poly,
    pub n: usize,
    /// Size of the nonsingular Hankel block actually solved (`m ≤ n`).
    pub m: usize,
    /// `(Q f̃ - P)(w) = O(w^{2n+1-defect})`.
    pub defect: usize,
    /// `log10` of the largest residual coefficient of `Q f̃ - P` below the
    /// guaranteed order.
    pub order_residual_log10: f64,
}

/// Solves the Hankel system for `Q`, descending to smaller blocks when the
/// system is singular, then forms `P` by convolution.
pub fn pade_nn(t: &PowerSeries, n: usize) -> Result<PadeApproximant> {
    let c = t.coeffs();
    if c.len() < 2 * n + 1 {
        return Err(Error::InvalidInput(format!(
            "[{n}/{n}] needs {} coefficients, series has {}",
            2 * n + 1,
            c.len()
        )));
    }
    let prec = t.precision();
    let bits = prec.bits();
    let coef = |k: isize| -> BigComplex {
        if k < 0 {
            BigComplex::with_val(bits, 0)
        } else {
            c[k as usize].clone()
        }
    };
    let scale = c[..=2 * n]
        .iter()
        .map(cabs)
        .fold(prec.zero(), |a, b| if b > a { b } else { a });

    let mut m = n;
    let q = loop {
        if m == 0 {
            break vec![prec.complex(1)];
        }
        let a: Vec<Vec<BigComplex>> = (0..m)
            .map(|r| (1..=m).map(|j| coef((m + 1 + r) as isize - j as isize)).collect())
            .collect();
        let b: Vec<BigComplex> = (0..m).map(|r| -coef((m + 1 + r) as isize)).collect();
        match solve_linear(&a, &b, prec, Some(&scale)) {
            Ok(sol) => {
                let mut qs = vec![prec.complex(1)];
                qs.extend(sol.x);
                break qs;
            }
            Err(Error::RankDeficient { .. }) => m -= 1,
            Err(e) => return Err(e),
        }
    };
    let p: Vec<BigComplex> = (0..=m)
        .map(|k| {
            let mut acc = BigComplex::with_val(bits, 0);
            for (j, qj) in q.iter().enumerate().take(k + 1) {
                acc += BigComplex::with_val(bits, qj * &c[k - j]);
            }
            acc
        })
        .collect();

    // Residual coefficients of Q f̃ - P through index 2n.
    let tol = BigReal::with_val(bits, &prec.rank_tol() * scale.clone().max(&prec.real(1)));
    let mut order = 2 * n + 1;
    let mut residuals = Vec::with_capacity(2 * n + 1);
    for k in 0..=2 * n {
        let mut acc = BigComplex::with_val(bits, 0);
        for (j, qj) in q.iter().enumerate().take(k + 1) {
            acc += BigComplex::with_val(bits, qj * &c[k - j]);
        }
        if k < p.len() {
            acc -= &p[k];
        }
        let r = cabs(&acc);
        if r > tol && order == 2 * n + 1 {
            order = k;
        }
        residuals.push(r);
    }
    let defect = 2 * n + 1 - order;
    let order_residual_log10 = residuals[..order]
        .iter()
        .map(log10_abs)
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(PadeApproximant {
        p: Poly::monomial(p, Plane::W),
        q: Poly::monomial(q, Plane::W),
        n,
        m,
        defect,
        order_residual_log10,
    })
}

impl PadeApproximant {
    pub fn eval(&self, w: &BigComplex) -> BigComplex {
        self.p.eval(w) / self.q.eval(w)
    }

    pub fn as_rational(&self, poles: Vec<BigComplex>) -> RationalFunction {
        RationalFunction::with_poles(self.p.clone(), self.q.clone(), poles)
    }
}

/// Default half-width of the excluded annulus around the unit circle.
pub const DEFAULT_EPS_DISK: f64 = 1e-10;

/// Errors at or below `|f| · 10^(-EXACT_FRACTION · digits)` count as exact
/// reproduction.
pub const EXACT_FRACTION: f64 = 0.75;

#[derive(Debug, Clone)]
pub struct Existence {
    pub exists: bool,
    /// Smallest pole modulus when it lies within `eps_disk` of the unit circle.
    pub near_boundary: Option<f64>,
    pub poles: Vec<BigComplex>,
    pub min_modulus: Option<f64>,
}

/// `F_n` exists iff every root of `Q` has modulus at least `1 + eps_disk`.
pub fn exists_nonlinear_apc(p: &PadeApproximant, eps_disk: f64) -> Result<Existence> {
    let prec = Precision::new(crate::numerics::digits_of(p.q.prec_bits()).max(Precision::MIN_DIGITS)).unwrap();
    let q = p.q.trimmed(&prec.rank_tol());
    let poles = if q.degree() == 0 { Vec::new() } else { poly_roots(&q, &prec.rank_tol())? };
    let moduli: Vec<f64> = poles.iter().map(|w| to_c64(w).norm()).collect();
    let min_modulus = moduli.iter().copied().reduce(f64::min);
    let exists = moduli.iter().all(|&r| r >= 1.0 + eps_disk);
    let near_boundary = moduli
        .iter()
        .copied()
        .filter(|&r| r >= 1.0 - eps_disk && r < 1.0 + eps_disk)
        .reduce(f64::min);
    Ok(Existence { exists, near_boundary, poles, min_modulus })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChebPadeOptions {
    pub eps_disk: f64,
    /// Coefficients computed beyond `2n` when the series is built internally.
    pub margin: usize,
    /// Uniform grid for interpolation points; `None` skips the extraction.
    pub interpolation_grid: Option<usize>,
    pub bisection_tol: f64,
    /// Verify `c_k(F_n) = c_k(f)`, `k ≤ 2n`, by quadrature.
    pub verify_matching: bool,
}

impl Default for ChebPadeOptions {
    fn default() -> Self {
        ChebPadeOptions {
            eps_disk: DEFAULT_EPS_DISK,
            margin: 10,
            interpolation_grid: Some(100_000),
            bisection_tol: 1e-30,
            verify_matching: true,
        }
    }
}

/// Nonlinear Chebyshev–Padé approximant of order `n`.
#[derive(Debug, Clone)]
pub struct ChebPadeApproximant {
    pub n: usize,
    pub exists: bool,
    pub f_n: RationalFunction,
    pub pade: PadeApproximant,
    /// Poles of `[n/n]` in the `w`-plane (outside the unit disk).
    pub w_poles: Vec<BigComplex>,
    /// Sign changes of `f - F_n` on `(-1, 1)`, with tangential zeros repeated.
    pub interpolation_points: Vec<BigReal>,
    /// Number of tangential zeros included twice in `interpolation_points`.
    pub tangential: usize,
    /// `f - F_n` vanishes to working accuracy (rational reproduction).
    pub exact: bool,
    /// Orthonormal-convention `|c_k(f) - c_k(F_n)|` for `k = 0..=2n+1`
    /// (empty when matching verification is off).
    pub coefficient_gaps: Vec<BigReal>,
    pub precision: Precision,
}

impl ChebPadeApproximant {
    pub fn defect(&self) -> usize {
        self.pade.defect
    }

    pub fn poles(&self) -> &[BigComplex] {
        &self.f_n.poles
    }

    pub fn eval(&self, z: &BigComplex) -> BigComplex {
        self.f_n.eval(z)
    }

    pub fn eval_real(&self, x: &BigReal) -> BigReal {
        self.f_n.eval_real(x)
    }

    /// Zeros of the numerator of `F_n`.
    pub fn zeros(&self) -> Result<Vec<BigComplex>> {
        let num = self.f_n.num.trimmed(&self.precision.rank_tol());
        if num.degree() == 0 {
            return Ok(Vec::new());
        }
        poly_roots(&num, &self.precision.rank_tol())
    }
}

/// Builds the series internally with `2n + margin` coefficients.
pub fn build_chebpade(f: &FunctionSpec, n: usize, prec: Precision, opts: &ChebPadeOptions) -> Result<ChebPadeApproximant> {
    let series = cheb_coeffs(f, 2 * n + opts.margin, prec)?;
    build_chebpade_from_series(f, &series, n, opts)
}

/// Pipeline `faber_forward → pade_nn → existence → map_rational` on a
/// precomputed series (at least `2n + 1` coefficients).
pub fn build_chebpade_from_series(
    f: &FunctionSpec,
    series: &ChebSeries,
    n: usize,
    opts: &ChebPadeOptions,
) -> Result<ChebPadeApproximant> {
    let prec = series.precision();
    let t = faber_forward(series);
    let pade = pade_nn(&t, n)?;
    let existence = exists_nonlinear_apc(&pade, opts.eps_disk)?;
    if !existence.exists {
        let reason = match (existence.near_boundary, existence.min_modulus) {
            (Some(r), _) => format!("Padé pole near the unit circle (|w| = {r:.3e})"),
            (None, Some(r)) => format!("Padé pole inside the unit disk (|w| = {r:.6})"),
            _ => "Padé denominator has a pole in the closed unit disk".to_string(),
        };
        return Err(Error::NotRepresentable { n, reason });
    }
    let f_n = map_rational(&pade.as_rational(existence.poles.clone()))?;
    let mut approx = ChebPadeApproximant {
        n,
        exists: true,
        f_n,
        pade,
        w_poles: existence.poles,
        interpolation_points: Vec::new(),
        tangential: 0,
        exact: false,
        coefficient_gaps: Vec::new(),
        precision: prec,
    };

    if opts.verify_matching {
        let gaps = orthogonality_residuals(f, &approx, 2 * n + 1)?;
        let bound = prec.tol_fraction(3);
        if let Some((k, g)) = gaps.iter().enumerate().take(2 * n + 1).find(|(_, g)| **g > bound) {
            return Err(Error::NotRepresentable {
                n,
                reason: format!("matching condition fails at k = {k} (gap {:e})", g.to_f64()),
            });
        }
        approx.coefficient_gaps = gaps;
    }
    if let Some(grid) = opts.interpolation_grid {
        let (points, tangential, exact) = interpolation_points(f, &approx, grid, opts.bisection_tol);
        approx.interpolation_points = points;
        approx.tangential = tangential;
        approx.exact = exact;
    }
    Ok(approx)
}

/// Runs the pipeline for each `n`, recording failures instead of stopping.
pub fn sweep(
    f: &FunctionSpec,
    series: &ChebSeries,
    ns: &[usize],
    opts: &ChebPadeOptions,
) -> Vec<(usize, Result<ChebPadeApproximant>)> {
    ns.par_iter()
        .map(|&n| (n, build_chebpade_from_series(f, series, n, opts)))
        .collect()
}

/// `|∫ (f - F_n) T̂_k dτ|` (orthonormal `T̂_k`) for `k = 0..=kmax`.
pub fn orthogonality_residuals(f: &FunctionSpec, approx: &ChebPadeApproximant, kmax: usize) -> Result<Vec<BigReal>> {
    let prec = approx.precision;
    let bits = prec.bits();
    let err = |x: &BigReal| -> Result<BigReal> {
        let fx = f.eval_real(x);
        Ok(BigReal::with_val(bits, fx - approx.eval_real(x)))
    };
    let (coeffs, _) = chebyshev_quadrature(err, kmax, prec)?;
    Ok(to_orthonormal(&coeffs, prec).into_iter().map(|c| c.abs()).collect())
}

/// `f(x) - F_n(x)` at working precision.
pub fn error_at(f: &FunctionSpec, approx: &ChebPadeApproximant, x: &BigReal) -> BigReal {
    let fx = f.eval_real(x);
    BigReal::with_val(approx.precision.bits(), fx - approx.eval_real(x))
}

/// `|f(z) - F_n(z)|` at a complex point.
pub fn error_at_complex(f: &FunctionSpec, approx: &ChebPadeApproximant, z: &BigComplex) -> BigReal {
    cabs(&(f.eval(z) - approx.eval(z)))
}

/// `max |f - F_n|` over `points` uniformly spaced points of `E` together with
/// as many Chebyshev points.
pub fn sup_error_on_e(f: &FunctionSpec, approx: &ChebPadeApproximant, points: usize) -> BigReal {
    let prec = approx.precision;
    let mut xs: Vec<f64> = (0..points).map(|i| -1.0 + 2.0 * i as f64 / (points - 1).max(1) as f64).collect();
    xs.extend((0..points).map(|j| (std::f64::consts::PI * (j as f64 + 0.5) / points as f64).cos()));
    xs.par_iter()
        .map(|&x| error_at(f, approx, &prec.real(x)).abs())
        .reduce(|| prec.zero(), |a, b| if b > a { b } else { a })
}

/// Sign changes of `f - F_n` on a uniform grid over `(-1, 1)`, refined by
/// bisection, plus tangential zeros (grid minima of `|f - F_n|` far below the
/// sup-norm) counted twice. Returns `(points, tangential, exact)`.
fn interpolation_points(
    f: &FunctionSpec,
    approx: &ChebPadeApproximant,
    grid: usize,
    bisection_tol: f64,
) -> (Vec<BigReal>, usize, bool) {
    let prec = approx.precision;
    let bits = prec.bits();
    let grid = grid.max(4);
    let xs: Vec<BigReal> = (0..=grid)
        .map(|i| BigReal::with_val(bits, (2 * i) as i64 - grid as i64) / grid as u64)
        .collect();
    let values: Vec<BigReal> = xs.par_iter().map(|x| error_at(f, approx, x)).collect();
    let sup = values
        .iter()
        .map(|v| BigReal::with_val(bits, v.abs_ref()))
        .fold(prec.zero(), |a, b| if b > a { b } else { a });
    let fscale = xs
        .iter()
        .step_by((grid / 64).max(1))
        .map(|x| f.eval_real(x).abs())
        .fold(prec.real(1), |a, b| if b > a { b } else { a });
    let floor = prec.pow10(-((EXACT_FRACTION * prec.digits() as f64) as i64));
    if sup <= BigReal::with_val(bits, &fscale * &floor) {
        return (Vec::new(), 0, true);
    }

    let sign = |v: &BigReal| -> i32 {
        if v.is_zero() {
            0
        } else if v.is_sign_negative() {
            -1
        } else {
            1
        }
    };
    let mut brackets = Vec::new();
    let mut exact_hits = Vec::new();
    for i in 0..grid {
        let (s0, s1) = (sign(&values[i]), sign(&values[i + 1]));
        if s0 == 0 && i > 0 {
            exact_hits.push(i);
        } else if s0 != 0 && s1 != 0 && s0 != s1 {
            brackets.push(i);
        }
    }
    let touch_level = BigReal::with_val(bits, &sup * &prec.tol_fraction(4));
    let mut touches = Vec::new();
    for i in 1..grid {
        let a = values[i].clone().abs();
        if a <= touch_level
            && a < values[i - 1].clone().abs()
            && a < values[i + 1].clone().abs()
            && sign(&values[i - 1]) == sign(&values[i + 1])
            && sign(&values[i]) == sign(&values[i - 1])
        {
            touches.push(i);
        }
    }

    let tol = prec.real(bisection_tol);
    let mut points: Vec<BigReal> = brackets
        .par_iter()
        .map(|&i| {
            let mut lo = xs[i].clone();
            let mut hi = xs[i + 1].clone();
            let s_lo = sign(&values[i]);
            while BigReal::with_val(bits, &hi - &lo) > tol {
                let mid = BigReal::with_val(bits, &lo + &hi) / 2u32;
                let s = sign(&error_at(f, approx, &mid));
                if s == 0 {
                    return mid;
                }
                if s == s_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            BigReal::with_val(bits, &lo + &hi) / 2u32
        })
        .collect();
    points.extend(exact_hits.iter().map(|&i| xs[i].clone()));
    for &i in &touches {
        points.push(xs[i].clone());
        points.push(xs[i].clone());
    }
    points.sort_by(|a, b| a.partial_cmp(b).unwrap());
    (points, touches.len(), false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::log10_cabs;

    fn prec() -> Precision {
        Precision::new(60).unwrap()
    }

    fn series(coeffs: &[f64]) -> PowerSeries {
        let p = prec();
        PowerSeries::new(coeffs.iter().map(|&c| p.complex(c)).collect(), p)
    }

    #[test]
    fn geometric_series_reproduced() {
        let t = series(&[1.0, 0.5, 0.25, 0.125, 0.0625]);
        let pa = pade_nn(&t, 1).unwrap();
        assert_eq!(pa.defect, 0);
        assert!(log10_cabs(&(pa.q.coeffs()[1].clone() + 0.5f64)) < -55.0);
        assert!(log10_cabs(&(pa.p.coeffs()[0].clone() - 1u32)) < -55.0);
        let ex = exists_nonlinear_apc(&pa, DEFAULT_EPS_DISK).unwrap();
        assert!(ex.exists);
        assert!((ex.min_modulus.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn even_series_has_defect() {
        let t = series(&[1.0, 0.0, 0.5, 0.0, 0.25]);
        let pa = pade_nn(&t, 1).unwrap();
        assert!(pa.defect >= 1);
        assert_eq!(pa.m, 0);
        let q = pa.q.trimmed(&prec().rank_tol());
        assert!(q.coeffs().iter().skip(1).step_by(2).all(|c| c.is_zero()));
    }

    #[test]
    fn pole_inside_disk_blocks_existence() {
        let t = series(&[1.0, 2.0, 4.0, 8.0]);
        let pa = pade_nn(&t, 1).unwrap();
        let ex = exists_nonlinear_apc(&pa, DEFAULT_EPS_DISK).unwrap();
        assert!(!ex.exists);
    }

    #[test]
    fn too_short_series_is_rejected() {
        assert!(pade_nn(&series(&[1.0, 0.5]), 1).is_err());
    }
}
