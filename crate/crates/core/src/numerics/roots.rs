use nalgebra::DMatrix;

use super::{cabs, digits_of, from_c64, log10_abs, BigComplex, BigReal, Basis, Complex64, Poly, Precision};
use crate::error::{Error, Result};

pub const ROOT_ITERATION_BUDGET: usize = 200;

/// Extra sweeps after the residual test passes; each roughly doubles the
/// number of correct digits of a simple root.
const POLISH_SWEEPS: usize = 2;

/// All roots of `p` (with multiplicity), each satisfying `|p(r)| ≤ tol·‖p‖(r)`
/// with the local coefficient norm of [`Poly::abs_eval`].
///
/// Seeds come from the eigenvalues of the companion (monomial basis) or
/// colleague (Chebyshev basis) matrix in double precision; Aberth–Ehrlich
/// iteration then refines them at the polynomial's precision.
pub fn poly_roots(p: &Poly, tol: &BigReal) -> Result<Vec<BigComplex>> {
    poly_roots_with_budget(p, tol, ROOT_ITERATION_BUDGET)
}

pub fn poly_roots_with_budget(p: &Poly, tol: &BigReal, budget: usize) -> Result<Vec<BigComplex>> {
    let bits = p.prec_bits();
    let prec = Precision::new(digits_of(bits).max(Precision::MIN_DIGITS)).unwrap();
    let p = strip_zero_tail(p);
    let n = p.degree();
    if n == 0 {
        return Err(Error::InvalidInput("poly_roots needs degree at least 1".into()));
    }
    if n == 1 {
        let c = p.coeffs();
        let mut r = BigComplex::with_val(bits, &c[0] / &c[1]);
        r = -r;
        return Ok(vec![r]);
    }

    let mut roots: Vec<BigComplex> = seeds(&p).into_iter().map(|z| from_c64(prec, z)).collect();
    let dp = p.derivative();

    // Sweeps each root has spent inside the residual bound; a root is frozen
    // once it has been polished.
    let mut passes = vec![0usize; n];
    let mut worst = f64::NAN;
    for _ in 0..budget {
        worst = f64::NEG_INFINITY;
        let mut updated = roots.clone();
        for i in 0..n {
            if passes[i] > POLISH_SWEEPS {
                continue;
            }
            let z = &roots[i];
            let value = p.eval(z);
            let scale = p.abs_eval(z);
            let resid = cabs(&value);
            let bound = BigReal::with_val(bits, &scale * tol);
            if resid <= bound {
                passes[i] += 1;
            }
            if !scale.is_zero() {
                worst = worst.max(log10_abs(&resid) - log10_abs(&scale));
            }
            if value.is_zero() {
                passes[i] = POLISH_SWEEPS + 1;
                continue;
            }
            let deriv = dp.eval(z);
            let newton = BigComplex::with_val(bits, &value / &deriv);
            let mut repulsion = BigComplex::with_val(bits, 0);
            for (j, other) in roots.iter().enumerate() {
                if j != i {
                    let d = BigComplex::with_val(bits, z - other);
                    if !d.is_zero() {
                        repulsion += d.recip();
                    }
                }
            }
            let mut denom = BigComplex::with_val(bits, &newton * &repulsion);
            denom = BigComplex::with_val(bits, 1) - denom;
            let step = if denom.is_zero() || !deriv.is_normal_like() {
                newton
            } else {
                newton / denom
            };
            updated[i] = BigComplex::with_val(bits, z - step);
        }
        if passes.iter().all(|&c| c > POLISH_SWEEPS) {
            return Ok(roots);
        }
        roots = updated;
    }
    Err(Error::NonConvergence { iterations: budget, residual: 10f64.powf(worst) })
}

trait NormalLike {
    fn is_normal_like(&self) -> bool;
}

impl NormalLike for BigComplex {
    fn is_normal_like(&self) -> bool {
        !self.is_zero() && self.real().is_finite() && self.imag().is_finite()
    }
}

fn strip_zero_tail(p: &Poly) -> Poly {
    let mut len = p.coeffs().len();
    while len > 1 && p.coeffs()[len - 1].is_zero() {
        len -= 1;
    }
    Poly::new(p.coeffs()[..len].to_vec(), p.plane(), p.basis())
}

/// Double-precision starting values.
fn seeds(p: &Poly) -> Vec<Complex64> {
    let n = p.degree();
    let lead = p.leading();
    // Ratios are formed in extended precision so huge or tiny coefficients
    // do not overflow on conversion.
    let ratio: Vec<Complex64> = p.coeffs()[..n]
        .iter()
        .map(|c| super::to_c64(&BigComplex::with_val(c.prec().0, c / lead)))
        .collect();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    match p.basis() {
        Basis::Monomial => {
            for i in 1..n {
                m[(i, i - 1)] = Complex64::new(1.0, 0.0);
            }
            for j in 0..n {
                m[(j, n - 1)] = -ratio[j];
            }
        }
        Basis::Chebyshev => {
            m[(0, 1)] = Complex64::new(1.0, 0.0);
            for i in 1..n - 1 {
                m[(i, i - 1)] = Complex64::new(0.5, 0.0);
                m[(i, i + 1)] = Complex64::new(0.5, 0.0);
            }
            for j in 0..n {
                m[(n - 1, j)] -= ratio[j] * 0.5;
            }
            m[(n - 1, n - 2)] += Complex64::new(0.5, 0.0);
        }
    }
    let finite = m.iter().all(|v| v.re.is_finite() && v.im.is_finite());
    if finite {
        balance(&mut m);
        if let Some(schur) = m.clone().try_schur(1e-14, 10_000) {
            if let Some(ev) = schur.eigenvalues() {
                let mut out: Vec<Complex64> = ev.iter().copied().collect();
                if out.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                    separate_duplicates(&mut out);
                    return out;
                }
            }
        }
    }
    circle_seeds(&ratio, n)
}

/// Parlett–Reinsch diagonal balancing by powers of two; eigenvalues are
/// unchanged, but the Schur iteration sees comparable row and column norms.
fn balance(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].l1_norm();
                    r += m[(i, j)].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = c + r;
            while c < r / 2.0 {
                c *= 2.0;
                r /= 2.0;
                f *= 2.0;
            }
            while c >= r * 2.0 {
                c /= 2.0;
                r *= 2.0;
                f /= 2.0;
            }
            if (c + r) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// Aberth needs distinct starting points; nudge exact duplicates apart.
fn separate_duplicates(z: &mut [Complex64]) {
    for i in 0..z.len() {
        for j in 0..i {
            if z[i] == z[j] {
                let bump = 1e-8 * (1.0 + z[i].norm());
                z[i] += Complex64::from_polar(bump, 0.7 + i as f64);
            }
        }
    }
}

/// Points on a circle of the Cauchy bound radius, offset to avoid symmetry traps.
fn circle_seeds(ratio: &[Complex64], n: usize) -> Vec<Complex64> {
    let radius = ratio
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm().powf(1.0 / (n - k) as f64))
        .filter(|r| r.is_finite())
        .fold(0.0f64, f64::max)
        .max(1e-3);
    (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Plane;

    fn sort_by_re(mut v: Vec<BigComplex>) -> Vec<BigComplex> {
        v.sort_by(|a, b| a.real().partial_cmp(b.real()).unwrap());
        v
    }

    #[test]
    fn symmetric_pair() {
        let p = Precision::new(60).unwrap();
        let q = Poly::monomial(vec![p.complex(-1), p.czero(), p.complex(1)], Plane::W);
        let r = sort_by_re(poly_roots(&q, &p.tol_fraction(2)).unwrap());
        assert!(log10_abs(&cabs(&(r[0].clone() + 1u32))) < -55.0);
        assert!(log10_abs(&cabs(&(r[1].clone() - 1u32))) < -55.0);
    }

    #[test]
    fn linear_root() {
        let p = Precision::new(60).unwrap();
        let q = Poly::monomial(vec![p.complex(1), p.complex(-0.5)], Plane::W);
        let r = poly_roots(&q, &p.tol_fraction(2)).unwrap();
        assert!(log10_abs(&cabs(&(r[0].clone() - 2u32))) < -55.0);
    }

    #[test]
    fn chebyshev_t5_zeros() {
        let p = Precision::new(100).unwrap();
        let mut c = vec![p.czero(); 6];
        c[5] = p.complex(1);
        let t5 = Poly::chebyshev(c, Plane::Z);
        let roots = sort_by_re(poly_roots(&t5, &p.tol_fraction(1)).unwrap());
        let pi = p.pi();
        let mut oracle: Vec<BigReal> = (0..5)
            .map(|k| (BigReal::with_val(p.bits(), &pi * (2 * k + 1) as u32) / 10u32).cos())
            .collect();
        oracle.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (r, o) in roots.iter().zip(&oracle) {
            let err = cabs(&BigComplex::with_val(p.bits(), r - o));
            assert!(log10_abs(&err) < -50.0, "{}", log10_abs(&err));
        }
    }

    #[test]
    fn zero_budget_reports_nonconvergence() {
        let p = Precision::new(60).unwrap();
        let q = Poly::monomial(vec![p.complex(2), p.complex(-3), p.complex(1)], Plane::W);
        assert!(matches!(
            poly_roots_with_budget(&q, &p.tol_fraction(1), 0),
            Err(Error::NonConvergence { .. })
        ));
    }
}
