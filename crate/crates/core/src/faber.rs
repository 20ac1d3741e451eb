//! Joukowski transplant between `C̄ \ [-1, 1]` and the exterior of the unit
//! disk, and the Faber operator `U`.
//!
//! For `E = [-1, 1]` the Faber polynomials are `Φ_0 = 1`, `Φ_k = 2T_k`, so a
//! standard-convention series `a_0/2 + Σ a_k T_k` is sent to the power series
//! `f̃(w) = Σ (a_k/2) w^k`. On `|w| = 1` this satisfies
//! `f(Zh(w)) = f̃(w) + f̃(1/w) - f̃(0)`, which is also how rational functions
//! are mapped back.

use serde::{Deserialize, Serialize};

use crate::chebseries::{decay_fit, ChebSeries, Rho0Estimate};
use crate::error::{Error, Result};
use crate::numerics::{
    cabs, joukowski, joukowski_f64, joukowski_inverse, joukowski_inverse_f64, log10_abs, poly_roots, to_c64,
    BigComplex, BigReal, Complex64, Plane, Poly, Precision, RationalFunction,
};

/// Taylor coefficients at `w = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<BigComplex>,
    precision: Precision,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<BigComplex>, precision: Precision) -> Self {
        PowerSeries { coeffs, precision }
    }

    pub fn coeffs(&self) -> &[BigComplex] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn eval(&self, w: &BigComplex) -> BigComplex {
        Poly::monomial(self.coeffs.clone(), Plane::W).eval(w)
    }

    /// Radius of convergence from the coefficient decay.
    pub fn radius_estimate(&self) -> Result<Rho0Estimate> {
        let logs: Vec<f64> = self.coeffs.iter().map(|c| log10_abs(&cabs(c))).collect();
        decay_fit(&logs, self.precision.digits())
    }
}

/// Side of the cut `(-1, 1)` from which a boundary value of `Φ` is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Upper,
    Lower,
}

fn on_open_interval(z: &BigComplex, prec: Precision) -> bool {
    let tol = prec.rank_tol();
    let im = BigReal::with_val(prec.bits(), z.imag().abs_ref());
    let re = BigReal::with_val(prec.bits(), z.real().abs_ref());
    im <= tol && re < BigReal::with_val(prec.bits(), 1u32 - &tol)
}

fn prec_of(z: &BigComplex) -> Precision {
    Precision::new(crate::numerics::digits_of(z.prec().0).max(Precision::MIN_DIGITS)).unwrap()
}

/// `Φ(z) = z + sqrt(z² - 1)`, `Φ(z) ~ 2z`, `|Φ| > 1` off `E`.
pub fn phi(z: &BigComplex) -> Result<BigComplex> {
    if on_open_interval(z, prec_of(z)) {
        return Err(Error::BranchAmbiguity);
    }
    Ok(joukowski_inverse(z))
}

/// Boundary value `Φ(x ± i0)` for points of `(-1, 1)`; elsewhere equal to [`phi`].
pub fn phi_side(z: &BigComplex, side: Side) -> BigComplex {
    let prec = prec_of(z);
    if !on_open_interval(z, prec) {
        return joukowski_inverse(z);
    }
    let p = prec.bits();
    let x = BigReal::with_val(p, z.real());
    let y = (BigReal::with_val(p, 1u32) - BigReal::with_val(p, x.square_ref())).sqrt();
    match side {
        Side::Upper => BigComplex::with_val(p, (x, y)),
        Side::Lower => BigComplex::with_val(p, (x, -y)),
    }
}

/// `Ψ(w) = Zh(w) = (w + 1/w)/2`.
pub fn psi(w: &BigComplex) -> Result<BigComplex> {
    if w.is_zero() {
        return Err(Error::Domain("psi is undefined at w = 0".into()));
    }
    Ok(joukowski(w))
}

/// Level curve `Γ_ρ = {|Φ(z)| = ρ}`: foci ±1, semi-axes summing to `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    pub rho: f64,
}

impl Ellipse {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho > 1.0) || !rho.is_finite() {
            return Err(Error::InvalidInput(format!("ellipse index must exceed 1, got {rho}")));
        }
        Ok(Ellipse { rho })
    }

    /// `(a, b)` with `a + b = ρ`.
    pub fn semi_axes(&self) -> (f64, f64) {
        let r = self.rho;
        ((r + 1.0 / r) / 2.0, (r - 1.0 / r) / 2.0)
    }

    pub fn point(&self, angle: f64) -> Complex64 {
        joukowski_f64(Complex64::from_polar(self.rho, angle))
    }

    /// Closed polyline with `m` distinct vertices (the first is repeated at the end).
    pub fn polyline(&self, m: usize) -> Vec<Complex64> {
        (0..=m)
            .map(|j| self.point(2.0 * std::f64::consts::PI * j as f64 / m as f64))
            .collect()
    }

    /// `|Φ(z)|`, the index of the level curve through `z`.
    pub fn index_of(z: Complex64) -> f64 {
        let v = joukowski_inverse_f64(z).norm();
        v.max(1.0 / v)
    }
}

/// `U(f)`: coefficients `t_k = a_k / 2` of `f̃`.
pub fn faber_forward(s: &ChebSeries) -> PowerSeries {
    let prec = s.precision();
    let coeffs = s
        .coeffs()
        .iter()
        .map(|a| BigComplex::with_val(prec.bits(), (BigReal::with_val(prec.bits(), a / 2u32), 0)))
        .collect();
    PowerSeries::new(coeffs, prec)
}

/// `U^{-1}`: `a_k = 2 t_k`, padded or truncated to `target_len` coefficients.
pub fn faber_inverse(t: &PowerSeries, target_len: usize) -> Result<ChebSeries> {
    if let Ok(est) = t.radius_estimate() {
        if est.rho <= 1.0 && !est.superexponential {
            return Err(Error::RadiusTooSmall { radius: est.rho });
        }
    }
    let prec = t.precision();
    let bits = prec.bits();
    let tol = prec.rank_tol();
    let mut coeffs = Vec::with_capacity(target_len);
    for k in 0..target_len {
        match t.coeffs().get(k) {
            Some(c) => {
                let scale = cabs(c).max(&BigReal::with_val(bits, 1));
                if BigReal::with_val(bits, c.imag().abs_ref()) > BigReal::with_val(bits, &scale * &tol) {
                    return Err(Error::InvalidInput(format!(
                        "coefficient {k} is not real; the series is not the image of a function real on E"
                    )));
                }
                coeffs.push(BigReal::with_val(bits, c.real() * 2u32));
            }
            None => coeffs.push(prec.zero()),
        }
    }
    Ok(ChebSeries::from_coeffs(coeffs, prec))
}

/// Distance of a pole modulus from the unit circle below which the pole
/// correspondence is rejected.
pub const UNIT_CIRCLE_GAP: f64 = 1e-20;

/// `U^{-1}(r)` for a rational function of `w` with poles outside the closed
/// unit disk.
///
/// With `r = P/Q`, `F(Zh(w)) = r(w) + r(1/w) - r(0)`. Writing the Laurent
/// coefficients `d_k = Σ_{i-j=k} q_i q_j` of `Q(w)Q(1/w)` and
/// `e_k = Σ_{i-j=±k} p_i q_j - r(0) d_k` of the numerator, both are symmetric
/// in `k`, so `F = (e_0 + 2Σ e_k T_k) / (d_0 + 2Σ d_k T_k)`. Every pole `w_0`
/// of `r` gives the pole `Zh(w_0)` of `F` with the same multiplicity.
pub fn map_rational(r: &RationalFunction) -> Result<RationalFunction> {
    if r.plane() != Plane::W {
        return Err(Error::InvalidInput("map_rational expects a w-plane rational function".into()));
    }
    let bits = r.num.prec_bits().max(r.den.prec_bits());
    let prec = Precision::new(crate::numerics::digits_of(bits).max(Precision::MIN_DIGITS)).unwrap();
    let num = r.num.to_monomial();
    let den = r.den.to_monomial().trimmed(&prec.rank_tol());

    let poles = if !r.poles.is_empty() || den.degree() == 0 {
        r.poles.clone()
    } else {
        poly_roots(&den, &prec.rank_tol())?
    };
    for w0 in &poles {
        let m = to_c64(w0).norm();
        let modulus = cabs(w0);
        let gap = BigReal::with_val(bits, &modulus - 1u32).abs();
        if gap <= UNIT_CIRCLE_GAP {
            return Err(Error::PoleOnUnitCircle { modulus: m });
        }
        if modulus < 1u32 {
            return Err(Error::PoleInsideDisk { modulus: m });
        }
    }

    let p = num.coeffs();
    let q = den.coeffs();
    let r0 = BigComplex::with_val(bits, &p[0] / &q[0]);
    let dq = q.len() - 1;
    let width = (p.len() - 1).max(dq);

    // Laurent coefficient of w^k in A(w)B(1/w): Σ_{i-j=k} a_i b_j.
    let cross = |a: &[BigComplex], b: &[BigComplex], k: isize| -> BigComplex {
        let mut acc = BigComplex::with_val(bits, 0);
        for (j, bj) in b.iter().enumerate() {
            let i = j as isize + k;
            if i >= 0 && (i as usize) < a.len() {
                acc += BigComplex::with_val(bits, &a[i as usize] * bj);
            }
        }
        acc
    };

    let mut den_cheb = Vec::with_capacity(dq + 1);
    for k in 0..=dq {
        let d = cross(q, q, k as isize);
        den_cheb.push(if k == 0 { d } else { d * 2u32 });
    }
    let mut num_cheb = Vec::with_capacity(width + 1);
    for k in 0..=width {
        let dk = if k <= dq { cross(q, q, k as isize) } else { BigComplex::with_val(bits, 0) };
        let mut e = cross(p, q, k as isize) + cross(p, q, -(k as isize));
        e -= BigComplex::with_val(bits, &r0 * &dk);
        num_cheb.push(if k == 0 { e } else { e * 2u32 });
    }

    let z_poles = poles.iter().map(joukowski).collect();
    Ok(RationalFunction::with_poles(
        Poly::chebyshev(num_cheb, Plane::Z),
        Poly::chebyshev(den_cheb, Plane::Z),
        z_poles,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::log10_cabs;

    fn p() -> Precision {
        Precision::new(60).unwrap()
    }

    #[test]
    fn fixed_points_and_real_branch() {
        let prec = p();
        let one = phi(&prec.complex(1)).unwrap();
        assert!(log10_cabs(&(one - 1u32)) < -55.0);
        let minus = phi(&prec.complex(-1)).unwrap();
        assert!(log10_cabs(&(minus + 1u32)) < -55.0);
        let three = phi(&prec.complex(3)).unwrap();
        let oracle = BigReal::with_val(prec.bits(), 8u32).sqrt() + 3u32;
        assert!(log10_cabs(&(three - oracle)) < -55.0);
    }

    #[test]
    fn interior_point_needs_a_side() {
        let prec = p();
        assert_eq!(phi(&prec.complex(0.3)).unwrap_err(), Error::BranchAmbiguity);
        let up = phi_side(&prec.complex(0.3), Side::Upper);
        let down = phi_side(&prec.complex(0.3), Side::Lower);
        assert!(*up.imag() > 0 && *down.imag() < 0);
        assert!(log10_abs(&(cabs(&up) - 1u32)) < -55.0);
    }

    #[test]
    fn psi_inverts_phi() {
        let prec = p();
        let z = prec.complex((2, 1));
        let back = psi(&phi(&z).unwrap()).unwrap();
        assert!(log10_cabs(&(back - &z)) < -30.0);
        assert!(psi(&prec.czero()).is_err());
    }

    #[test]
    fn ellipse_semi_axes_sum_to_rho() {
        let e = Ellipse::new(1.7).unwrap();
        let (a, b) = e.semi_axes();
        assert!((a + b - 1.7).abs() < 1e-15);
        assert!((Ellipse::index_of(e.point(0.9)) - 1.7).abs() < 1e-12);
        assert!(Ellipse::new(1.0).is_err());
    }

    #[test]
    fn chebyshev_basis_maps_to_half_monomial() {
        let prec = p();
        let mut a = vec![prec.zero(); 6];
        a[4] = prec.real(1);
        let t = faber_forward(&ChebSeries::from_coeffs(a, prec));
        assert!(log10_cabs(&(t.coeffs()[4].clone() - 0.5f64)) < -55.0);
        let constant = faber_forward(&ChebSeries::from_coeffs(vec![prec.real(2)], prec));
        assert!(log10_cabs(&(constant.coeffs()[0].clone() - 1u32)) < -55.0);
    }

    #[test]
    fn pole_inside_disk_and_on_circle_are_rejected() {
        let prec = p();
        let num = Poly::monomial(vec![prec.complex(1)], Plane::W);
        let inside = Poly::monomial(vec![prec.complex(1), prec.complex(-2)], Plane::W);
        assert!(matches!(
            map_rational(&RationalFunction::new(num.clone(), inside)),
            Err(Error::PoleInsideDisk { .. })
        ));
        let on = Poly::monomial(vec![prec.complex(1), prec.complex(-1)], Plane::W);
        assert!(matches!(
            map_rational(&RationalFunction::new(num, on)),
            Err(Error::PoleOnUnitCircle { .. })
        ));
    }
}
