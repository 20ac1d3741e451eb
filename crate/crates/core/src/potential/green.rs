//! Green functions of `C̄ ∖ E` and of complements of segments, written in
//! the Joukowski coordinate `ζ = 1/Φ(z)`, `|ζ| < 1`.

use crate::numerics::{joukowski_inverse, joukowski_inverse_f64, BigComplex, BigReal, Complex64};

fn on_e(z: &BigComplex) -> bool {
    z.imag().is_zero() && z.real().clone().abs() <= 1u32
}

fn zeta(z: &BigComplex) -> BigComplex {
    let bits = z.prec().0;
    BigComplex::with_val(bits, joukowski_inverse(z).recip_ref())
}

/// `g_E(z, ∞) = log|Φ(z)| = log(1/|ζ|)`; zero on `E`.
pub fn green_e_inf(z: &BigComplex) -> BigReal {
    let bits = z.prec().0;
    if on_e(z) {
        return BigReal::with_val(bits, 0);
    }
    BigReal::with_val(bits, joukowski_inverse(z).abs_ref()).ln()
}

/// `g_E(z, t) = log|(1 - ξ̄ζ)/(ζ - ξ)|`; zero when either point is on `E`.
pub fn green_e(z: &BigComplex, t: &BigComplex) -> BigReal {
    let bits = z.prec().0.max(t.prec().0);
    if on_e(z) || on_e(t) {
        return BigReal::with_val(bits, 0);
    }
    let zt = zeta(z);
    let xi = zeta(t);
    let num = BigComplex::with_val(bits, 1) - BigComplex::with_val(bits, xi.conj_ref()) * &zt;
    let den = BigComplex::with_val(bits, &zt - &xi);
    let ratio = BigComplex::with_val(bits, num / den);
    BigReal::with_val(bits, ratio.abs_ref()).ln()
}

fn to_unit(z: &BigComplex, c: &BigReal, d: &BigReal) -> BigComplex {
    let bits = z.prec().0;
    let sum = BigReal::with_val(bits, c + d);
    let len = BigReal::with_val(bits, d - c);
    BigComplex::with_val(bits, (BigComplex::with_val(bits, z * 2u32) - sum) / len)
}

/// Green function of `C̄ ∖ [c, d]` through the affine map onto `E`.
pub fn green_interval_complement(z: &BigComplex, t: &BigComplex, c: &BigReal, d: &BigReal) -> BigReal {
    green_e(&to_unit(z, c, d), &to_unit(t, c, d))
}

/// `g_{[c,d]}(z, ∞)`.
pub fn green_interval_complement_inf(z: &BigComplex, c: &BigReal, d: &BigReal) -> BigReal {
    green_e_inf(&to_unit(z, c, d))
}

/// `1/Φ(z)` in double precision.
pub fn zeta_f64(z: Complex64) -> Complex64 {
    joukowski_inverse_f64(z).inv()
}

fn on_e_f64(z: Complex64) -> bool {
    z.im == 0.0 && z.re.abs() <= 1.0
}

pub fn green_e_inf_f64(z: Complex64) -> f64 {
    if on_e_f64(z) {
        return 0.0;
    }
    joukowski_inverse_f64(z).norm().ln().max(0.0)
}

pub fn green_e_f64(z: Complex64, t: Complex64) -> f64 {
    if on_e_f64(z) || on_e_f64(t) {
        return 0.0;
    }
    let (zt, xi) = (zeta_f64(z), zeta_f64(t));
    ((1.0 - xi.conj() * zt) / (zt - xi)).norm().ln()
}

/// Regular part `g_E(u, v) + log|u - v|` for `u, v ∉ E`, finite on the
/// diagonal.
///
/// From `u - v = (ζ - ξ)(1 - 1/(ζξ))/2` the logarithmic singularity cancels
/// analytically.
pub fn green_e_regular_f64(u: Complex64, v: Complex64) -> f64 {
    let (zt, xi) = (zeta_f64(u), zeta_f64(v));
    let prod = zt * xi;
    (1.0 - xi.conj() * zt).norm().ln() + (1.0 - prod).norm().ln() - prod.norm().ln() - std::f64::consts::LN_2
}

/// Affine map of the segment `[p, q] ⊂ C` onto `E`.
pub fn segment_to_unit(z: Complex64, p: Complex64, q: Complex64) -> Complex64 {
    (2.0 * z - p - q) / (q - p)
}

pub fn green_interval_f64(z: Complex64, t: Complex64, c: f64, d: f64) -> f64 {
    let (p, q) = (Complex64::new(c, 0.0), Complex64::new(d, 0.0));
    green_e_f64(segment_to_unit(z, p, q), segment_to_unit(t, p, q))
}

pub fn green_interval_inf_f64(z: Complex64, c: f64, d: f64) -> f64 {
    let (p, q) = (Complex64::new(c, 0.0), Complex64::new(d, 0.0));
    green_e_inf_f64(segment_to_unit(z, p, q))
}

/// `g_{[c,d]}(z, t) + log|z - t|` for `z, t ∉ [c, d]`.
pub fn green_interval_regular_f64(z: Complex64, t: Complex64, c: f64, d: f64) -> f64 {
    let (p, q) = (Complex64::new(c, 0.0), Complex64::new(d, 0.0));
    green_e_regular_f64(segment_to_unit(z, p, q), segment_to_unit(t, p, q)) + (0.5 * (d - c)).ln()
}
