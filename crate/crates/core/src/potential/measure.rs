use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{joukowski_inverse_f64, Complex64};

/// Measure `P(s) ds / (π sqrt(1 - s²))` on `[c, d]`, `s` the affine
/// coordinate onto `[-1, 1]`, with `P = Σ b_k T_k` of degree below the number
/// of nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalDensity {
    pub c: f64,
    pub d: f64,
    /// `b_k`; `b_0` is the mass.
    pub coeffs: Vec<f64>,
    /// `P` at the Gauss–Chebyshev nodes `s_m = cos(π(m + 1/2)/M)`.
    pub values: Vec<f64>,
}

pub(crate) fn node_angle(m: usize, count: usize) -> f64 {
    PI * (m as f64 + 0.5) / count as f64
}

impl IntervalDensity {
    pub fn from_values(c: f64, d: f64, values: Vec<f64>) -> Self {
        let m = values.len();
        let coeffs = (0..m)
            .map(|k| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (k as f64 * node_angle(j, m)).cos())
                    .sum();
                if k == 0 {
                    s / m as f64
                } else {
                    2.0 * s / m as f64
                }
            })
            .collect();
        IntervalDensity { c, d, coeffs, values }
    }

    /// Normalized arcsine (equilibrium) measure of `[c, d]` on `m` nodes.
    pub fn arcsine(c: f64, d: f64, m: usize) -> Self {
        IntervalDensity::from_values(c, d, vec![1.0; m])
    }

    pub fn half_length(&self) -> f64 {
        0.5 * (self.d - self.c)
    }

    pub fn local(&self, z: Complex64) -> Complex64 {
        (2.0 * z - self.c - self.d) / (self.d - self.c)
    }

    pub fn to_global(&self, s: f64) -> f64 {
        0.5 * (self.c + self.d) + self.half_length() * s
    }

    pub fn mass(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let m = self.values.len();
        (0..m)
            .map(|j| (self.to_global(node_angle(j, m).cos()), self.values[j] / m as f64))
            .collect()
    }

    /// `P(s)` at a point of `[c, d]`.
    pub fn polynomial(&self, x: f64) -> f64 {
        let s = self.local(Complex64::new(x, 0.0)).re.clamp(-1.0, 1.0);
        let phi = s.acos();
        self.coeffs.iter().enumerate().map(|(k, b)| b * (k as f64 * phi).cos()).sum()
    }

    /// Density with respect to `dx`; infinite at the endpoints.
    pub fn density(&self, x: f64) -> f64 {
        let s = self.local(Complex64::new(x, 0.0)).re;
        if s.abs() >= 1.0 {
            return 0.0;
        }
        self.polynomial(x) / (PI * self.half_length() * (1.0 - s * s).sqrt())
    }

    /// Mass of `[c, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let s = self.local(Complex64::new(x, 0.0)).re;
        if s <= -1.0 {
            return 0.0;
        }
        if s >= 1.0 {
            return self.mass();
        }
        let phi = s.acos();
        let tail: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, b)| b * (k as f64 * phi).sin() / k as f64)
            .sum();
        (self.coeffs[0] * (PI - phi) - tail) / PI
    }

    /// `V(z) = ∫ log(1/|z - t|) dμ(t)`, exact for the polynomial density.
    ///
    /// Uses `log(1/|s - t|) = log(2/|Φ(s)|) + Σ (2/k) Re(Φ(s)^{-k}) T_k(t)`.
    pub fn potential(&self, z: Complex64) -> f64 {
        let s = self.local(z);
        let big = joukowski_inverse_f64(s);
        let zeta = big.inv();
        let mut acc = self.coeffs[0] * ((2.0 / big.norm()).ln() - self.half_length().ln());
        let mut power = Complex64::new(1.0, 0.0);
        for (k, b) in self.coeffs.iter().enumerate().skip(1) {
            power *= zeta;
            acc += b * power.re / k as f64;
        }
        acc
    }
}

/// Finite unit measure: atoms plus absolutely continuous pieces.
///
/// `points`/`weights` always hold the full discretization (atoms first, then
/// the Gauss–Chebyshev nodes of each piece); `pieces` keeps the exact
/// representation used for potentials and energies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
    pub pieces: Vec<IntervalDensity>,
    atom_count: usize,
}

pub const MASS_TOL: f64 = 1e-12;

impl DiscreteMeasure {
    pub fn from_atoms(points: Vec<Complex64>, weights: Vec<f64>) -> Result<Self> {
        DiscreteMeasure::new(points, weights, Vec::new())
    }

    /// Equal weights `1/N`.
    pub fn counting(points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("counting measure of an empty set".into()));
        }
        let w = 1.0 / points.len() as f64;
        let weights = vec![w; points.len()];
        DiscreteMeasure::from_atoms(points, weights)
    }

    pub fn from_pieces(pieces: Vec<IntervalDensity>) -> Result<Self> {
        DiscreteMeasure::new(Vec::new(), Vec::new(), pieces)
    }

    pub fn new(atoms: Vec<Complex64>, atom_weights: Vec<f64>, pieces: Vec<IntervalDensity>) -> Result<Self> {
        if atoms.len() != atom_weights.len() {
            return Err(Error::InvalidInput("points and weights differ in length".into()));
        }
        let atom_count = atoms.len();
        let mut points = atoms;
        let mut weights = atom_weights;
        for piece in &pieces {
            for (x, w) in piece.nodes() {
                points.push(Complex64::new(x, 0.0));
                weights.push(w);
            }
        }
        let min = weights.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -MASS_TOL {
            return Err(Error::NonPositiveDensity { min_weight: min });
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!("measure has mass {total}, expected 1")));
        }
        Ok(DiscreteMeasure { points, weights, pieces, atom_count })
    }

    pub fn atoms(&self) -> (&[Complex64], &[f64]) {
        (&self.points[..self.atom_count], &self.weights[..self.atom_count])
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Logarithmic potential; `+∞` at an atom.
    pub fn potential(&self, z: Complex64) -> f64 {
        let (pts, ws) = self.atoms();
        let atoms: f64 = pts.iter().zip(ws).map(|(p, w)| -w * (z - p).norm().ln()).sum();
        atoms + self.pieces.iter().map(|p| p.potential(z)).sum::<f64>()
    }

    /// Every atom has a conjugate partner of equal weight within `tol`.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        let (pts, ws) = self.atoms();
        pts.iter().zip(ws).all(|(p, w)| {
            pts.iter()
                .zip(ws)
                .any(|(q, v)| (q - p.conj()).norm() <= tol && (v - w).abs() <= tol)
        })
    }

    /// `point,weight` rows (real part only when every point is real).
    pub fn to_csv(&self) -> String {
        let real = self.points.iter().all(|p| p.im == 0.0);
        let mut out = String::from(if real { "point,weight\n" } else { "re,im,weight\n" });
        for (p, w) in self.points.iter().zip(&self.weights) {
            if real {
                out.push_str(&format!("{:e},{:e}\n", p.re, w));
            } else {
                out.push_str(&format!("{:e},{:e},{:e}\n", p.re, p.im, w));
            }
        }
        out
    }
}

/// Admissible compact `K` disjoint from `E`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CompactSpec {
    RealInterval { c: f64, d: f64 },
    RealIntervalUnion { intervals: Vec<(f64, f64)> },
    /// Piecewise linear arc; supported for distance and plotting only.
    ArcPolyline { points: Vec<Complex64>, symmetric: bool },
}

fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a) * ab.conj()).re / len2;
    (z - (a + ab * t.clamp(0.0, 1.0))).norm()
}

impl CompactSpec {
    pub fn interval(c: f64, d: f64) -> Result<Self> {
        let k = CompactSpec::RealInterval { c, d };
        k.validate()?;
        Ok(k)
    }

    pub fn intervals(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            CompactSpec::RealInterval { c, d } => Some(vec![(*c, *d)]),
            CompactSpec::RealIntervalUnion { intervals } => Some(intervals.clone()),
            CompactSpec::ArcPolyline { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.intervals() {
            Some(list) => {
                if list.is_empty() {
                    return Err(Error::InvalidInput("empty interval union".into()));
                }
                for (i, &(c, d)) in list.iter().enumerate() {
                    if !(c < d) || !c.is_finite() || !d.is_finite() {
                        return Err(Error::InvalidInput(format!("bad interval [{c}, {d}]")));
                    }
                    if c <= 1.0 && d >= -1.0 {
                        return Err(Error::InvalidInput(format!("[{c}, {d}] meets E = [-1, 1]")));
                    }
                    if list.iter().skip(i + 1).any(|&(c2, d2)| c2 <= d && c <= d2) {
                        return Err(Error::InvalidInput("intervals overlap".into()));
                    }
                }
                Ok(())
            }
            None => {
                let CompactSpec::ArcPolyline { points, symmetric } = self else { unreachable!() };
                if points.len() < 2 {
                    return Err(Error::InvalidInput("polyline needs two points".into()));
                }
                let e = (Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0));
                for w in points.windows(2) {
                    let crosses = (w[0].im <= 0.0 && w[1].im >= 0.0) || (w[0].im >= 0.0 && w[1].im <= 0.0);
                    if crosses {
                        let t = if w[1].im == w[0].im { 0.0 } else { w[0].im / (w[0].im - w[1].im) };
                        let x = w[0].re + t * (w[1].re - w[0].re);
                        if x.abs() <= 1.0 {
                            return Err(Error::InvalidInput("polyline meets E".into()));
                        }
                    }
                    if segment_distance(w[0], e.0, e.1) == 0.0 {
                        return Err(Error::InvalidInput("polyline meets E".into()));
                    }
                }
                if *symmetric {
                    let scale = points.iter().map(|p| p.norm()).fold(1.0, f64::max);
                    let ok = points.iter().all(|p| points.iter().any(|q| (q - p.conj()).norm() <= 1e-9 * scale));
                    if !ok {
                        return Err(Error::InvalidInput("polyline is not conjugate symmetric".into()));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn distance(&self, z: Complex64) -> f64 {
        match self.intervals() {
            Some(list) => list
                .iter()
                .map(|&(c, d)| segment_distance(z, Complex64::new(c, 0.0), Complex64::new(d, 0.0)))
                .fold(f64::INFINITY, f64::min),
            None => {
                let CompactSpec::ArcPolyline { points, .. } = self else { unreachable!() };
                points
                    .windows(2)
                    .map(|w| segment_distance(z, w[0], w[1]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.distance(z) <= tol
    }
}
