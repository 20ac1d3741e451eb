//! Closed-form Green potentials for compacts whose image under `ζ = 1/Φ(z)`
//! is a segment or a circular arc.
//!
//! For `θ = 1` and any admissible `K`, `G_K^λ(z) = g_{Φ(K)}(Φ(z), 0)`; after
//! the inversion `w ↦ 1/w` this is `g_A(1/Φ(z), ∞)` with `A = 1/Φ(K)`, and
//! `K = Zh(A)`.

use std::f64::consts::PI;

use crate::chebseries::{FunctionClass, FunctionSpec};
use crate::error::{Error, Result};
use crate::numerics::{joukowski_f64, joukowski_inverse_f64, Complex64};

/// Arc in the `ζ`-plane from `p` to `q`; `bend` is the angle between the
/// chord and the tangent at `p` (zero for the straight segment).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvertedArc {
    pub p: Complex64,
    pub q: Complex64,
    pub bend: f64,
}

fn on_e(z: Complex64) -> bool {
    z.im == 0.0 && z.re.abs() <= 1.0
}

impl InvertedArc {
    pub fn segment(p: Complex64, q: Complex64) -> Self {
        InvertedArc { p, q, bend: 0.0 }
    }

    /// Segment joining `1/Φ(a)` and its conjugate: the minimal-capacity
    /// continuum for the inverted branch points.
    pub fn two_branch(a: Complex64) -> Result<Self> {
        if on_e(a) || a.im == 0.0 {
            return Err(Error::InvalidInput(format!("branch point {a} must be non-real")));
        }
        let p = joukowski_inverse_f64(a).inv();
        Ok(InvertedArc::segment(p, p.conj()))
    }

    /// `A = 1/Φ([c, d])` for a real interval disjoint from `E`.
    pub fn interval(c: f64, d: f64) -> Result<Self> {
        if !(c < d) || (c <= 1.0 && d >= -1.0) {
            return Err(Error::InvalidInput(format!("[{c}, {d}] must be disjoint from E")));
        }
        let image = |x: f64| joukowski_inverse_f64(Complex64::new(x, 0.0)).inv();
        Ok(InvertedArc::segment(image(d), image(c)))
    }

    pub fn with_bend(self, bend: f64) -> Self {
        InvertedArc { bend, ..self }
    }

    fn rotation(&self) -> Complex64 {
        Complex64::from_polar(1.0, -(PI + self.bend))
    }

    /// Möbius image sending the arc onto `[0, +∞]`.
    fn straighten(&self, zeta: Complex64) -> Complex64 {
        (zeta - self.p) / (zeta - self.q) * self.rotation()
    }

    /// Point of the arc for `s ∈ [-1, 1]` (`p` at `-1`, `q` at `1`).
    pub fn point(&self, s: f64) -> Complex64 {
        if s >= 1.0 {
            return self.q;
        }
        let r = (1.0 + s) / (1.0 - s);
        let u = -Complex64::from_polar(r, self.bend);
        (self.p - self.q * u) / (1.0 - u)
    }

    /// Point of `K = Zh(A)` in the `z`-plane.
    pub fn z_point(&self, s: f64) -> Complex64 {
        joukowski_f64(self.point(s))
    }

    pub fn z_polyline(&self, count: usize) -> Vec<Complex64> {
        (0..count)
            .map(|j| self.z_point(-1.0 + 2.0 * j as f64 / (count - 1).max(1) as f64))
            .collect()
    }

    /// `g_A(ζ, ∞)`: straighten the arc to a ray, then open the slit with a
    /// square root onto the upper half-plane.
    pub fn green_inf(&self, zeta: Complex64) -> f64 {
        let up = |v: Complex64| Complex64::i() * (-v).sqrt();
        let s = up(self.straighten(zeta));
        let s0 = up(self.rotation());
        ((s - s0.conj()) / (s - s0)).norm().ln().max(0.0)
    }

    /// `ζ` lies on the arc within `tol`.
    pub fn contains_zeta(&self, zeta: Complex64, tol: f64) -> bool {
        let v = self.straighten(zeta);
        v.re >= -tol && v.im.abs() <= tol * (1.0 + v.norm())
    }

    /// Distance from `z` to `K = Zh(A)`, measured on a polyline of `count` vertices.
    pub fn z_distance(&self, z: Complex64, count: usize) -> f64 {
        let line = self.z_polyline(count);
        line.windows(2)
            .map(|w| {
                let ab = w[1] - w[0];
                let t = if ab.norm_sqr() == 0.0 { 0.0 } else { (((z - w[0]) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0) };
                (z - w[0] - ab * t).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `G(z) = g_A(1/Φ(z), ∞)`.
    pub fn green_potential(&self, z: Complex64) -> f64 {
        self.green_inf(joukowski_inverse_f64(z).inv())
    }
}

/// `2 G_F^λ(z)` for the two-branch Stahl arc, the exponent in
/// `|f - F_n|^{1/n} → e^{-2G}`.
pub fn theoretical_rate_two_branch(f: &FunctionSpec, z: Complex64) -> Result<f64> {
    let a = match &f.class {
        FunctionClass::TwoBranch { a } => *a,
        _ => match f.branch_points.as_slice() {
            [a, b] if (a.conj() - b).norm() <= 1e-14 * a.norm().max(1.0) => *a,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "{} does not have exactly two conjugate branch points",
                    f.id
                )))
            }
        },
    };
    let arc = InvertedArc::two_branch(a)?;
    rate_from_arc(&arc, z)
}

/// `2 G_K^{λ(1)}(z)` for a real interval `K = [c, d]`.
pub fn markov_rate_closed_form(c: f64, d: f64, z: Complex64) -> Result<f64> {
    rate_from_arc(&InvertedArc::interval(c, d)?, z)
}

pub(crate) fn rate_from_arc(arc: &InvertedArc, z: Complex64) -> Result<f64> {
    if on_e(z) {
        return Err(Error::Domain(format!("{z} lies on E")));
    }
    let zeta = joukowski_inverse_f64(z).inv();
    if arc.contains_zeta(zeta, 1e-12) {
        return Err(Error::Domain(format!("{z} lies on the predicted arc")));
    }
    Ok(2.0 * arc.green_potential(z))
}

/// Equilibrium constant `w(1) = log 2 + log(4/|q - p|)` for a straight `A`.
pub fn equilibrium_constant_closed_form(arc: &InvertedArc) -> f64 {
    (8.0 / (arc.q - arc.p).norm()).ln()
}

pub const S_PROPERTY_OFFSET: f64 = 1e-4;

/// Max over interior points of `K = Zh(A)` of `|∂G/∂n₊ - ∂G/∂n₋|`, with
/// one-sided second-order differences at offset `h` along the normal.
pub fn s_property_residual(arc: &InvertedArc, samples: usize, h: f64) -> f64 {
    let g = |z: Complex64| arc.green_potential(z);
    let ds = 1e-6;
    (0..samples)
        .map(|j| {
            let s = -0.8 + 1.6 * j as f64 / (samples - 1).max(1) as f64;
            let z = arc.z_point(s);
            let tangent = arc.z_point(s + ds) - arc.z_point(s - ds);
            let normal = Complex64::i() * tangent / tangent.norm();
            let side = |n: Complex64| (4.0 * g(z + n * h) - g(z + n * 2.0 * h)) / (2.0 * h);
            (side(normal) - side(-normal)).abs()
        })
        .fold(0.0, f64::max)
}
