//! Asymptotic checks on sweeps of Chebyshev–Padé approximants: fitted
//! convergence rates against Green-potential predictions, weak limits of
//! counting measures, and the clustering of partial-sum zeros on `Γ_{ρ₀}`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebseries::{FunctionClass, FunctionSpec};
use crate::error::{Error, Result};
use crate::faber::Ellipse;
use crate::numerics::{from_c64, joukowski_inverse_f64, log10_abs, to_c64, Complex64};
use crate::pade::{error_at_complex, ChebPadeApproximant, EXACT_FRACTION};
use crate::potential::stahl::rate_from_arc;
use crate::potential::{solve_equilibrium, CompactSpec, DiscreteMeasure, Equilibrium, InvertedArc};

/// Minimum number of existing `F_n` for a rate fit.
pub const MIN_RATE_SAMPLES: usize = 8;
/// Fraction of worst-fitting samples dropped before the final fit.
pub const OUTLIER_FRACTION: f64 = 0.1;
/// Grid used when the prediction needs an equilibrium solve.
pub const PREDICTION_GRID: usize = 400;
pub const DEFAULT_CLUSTER_DELTA: f64 = 0.1;


#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateSample {
    pub n: usize,
    /// `-log|f(z) - F_n(z)|`.
    pub neg_log_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub z: Complex64,
    /// Least-squares slope of `-log|f - F_n|(z)` against `n`.
    pub slope: f64,
    pub prediction: Option<f64>,
    pub relative_gap: Option<f64>,
    /// The error fell below working accuracy; `slope` is infinite.
    pub exact: bool,
    pub samples: Vec<RateSample>,
    /// Indices `n` rejected as outliers.
    pub dropped: Vec<usize>,
}

/// Source of the predicted rate `2 G_F^λ(z)`.
pub enum RatePredictor {
    /// Rational functions are reproduced exactly.
    Exact,
    TwoBranch(InvertedArc),
    Markov(Box<Equilibrium>),
    /// No closed-form or solver prediction for this function class.
    Unavailable,
}

impl RatePredictor {
    pub fn for_function(f: &FunctionSpec) -> Result<Self> {
        match &f.class {
            FunctionClass::Rational { .. } => Ok(RatePredictor::Exact),
            FunctionClass::Markov { c, d, .. } => {
                let eq = solve_equilibrium(&CompactSpec::interval(*c, *d)?, 1.0, PREDICTION_GRID)?;
                Ok(RatePredictor::Markov(Box::new(eq)))
            }
            FunctionClass::TwoBranch { a } => Ok(RatePredictor::TwoBranch(InvertedArc::two_branch(*a)?)),
            _ => match f.branch_points.as_slice() {
                [a, b] if (a.conj() - b).norm() <= 1e-14 * a.norm().max(1.0) => {
                    Ok(RatePredictor::TwoBranch(InvertedArc::two_branch(*a)?))
                }
                _ => Ok(RatePredictor::Unavailable),
            },
        }
    }

    /// `Some(2G(z))`, or `None` for exact reproduction.
    pub fn predict(&self, z: Complex64) -> Result<Option<f64>> {
        if z.im == 0.0 && z.re.abs() <= 1.0 {
            return Err(Error::Domain(format!("{z} lies on E")));
        }
        match self {
            RatePredictor::Exact => Ok(None),
            RatePredictor::Unavailable => Err(Error::InvalidInput("no rate prediction for this function class".into())),
            RatePredictor::TwoBranch(arc) => rate_from_arc(arc, z).map(Some),
            RatePredictor::Markov(eq) => {
                if eq.compact().contains(z, 1e-12) {
                    return Err(Error::Domain(format!("{z} lies on K")));
                }
                Ok(Some(2.0 * eq.green_potential(z)))
            }
        }
    }

    /// Distance from `z` to the predicted compact `F`.
    pub fn distance_to_compact(&self, z: Complex64) -> Option<f64> {
        match self {
            RatePredictor::Exact | RatePredictor::Unavailable => None,
            RatePredictor::TwoBranch(arc) => Some(arc.z_distance(z, 2001)),
            RatePredictor::Markov(eq) => Some(eq.compact().distance(z)),
        }
    }
}

/// `2 G_F^λ(z)` for the singularity structure of `f`.
pub fn predicted_rate(f: &FunctionSpec, z: Complex64) -> Result<Option<f64>> {
    RatePredictor::for_function(f)?.predict(z)
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn existing(reports: &[(usize, Result<ChebPadeApproximant>)]) -> impl Iterator<Item = &ChebPadeApproximant> {
    reports.iter().filter_map(|(_, r)| r.as_ref().ok())
}

/// Fitted rate at `z` over the existing approximants of a sweep.
pub fn rate_at(f: &FunctionSpec, z: Complex64, reports: &[(usize, Result<ChebPadeApproximant>)]) -> Result<RateEstimate> {
    rate_at_with(&RatePredictor::for_function(f)?, f, z, reports)
}

pub fn rate_at_with(
    predictor: &RatePredictor,
    f: &FunctionSpec,
    z: Complex64,
    reports: &[(usize, Result<ChebPadeApproximant>)],
) -> Result<RateEstimate> {
    if z.im == 0.0 && z.re.abs() <= 1.0 {
        return Err(Error::Domain(format!("{z} lies on E")));
    }
    let approximants: Vec<&ChebPadeApproximant> = existing(reports).collect();
    let raw: Vec<(RateSample, bool)> = approximants
        .par_iter()
        .map(|a| {
            let err = error_at_complex(f, a, &from_c64(a.precision, z));
            let floor = EXACT_FRACTION * a.precision.digits() as f64 * std::f64::consts::LN_10;
            let neg = if err.is_zero() { f64::INFINITY } else { -log10_abs(&err) * std::f64::consts::LN_10 };
            (RateSample { n: a.n, neg_log_error: neg }, neg >= floor)
        })
        .collect();
    let exact_count = raw.iter().filter(|(_, e)| *e).count();
    let samples: Vec<RateSample> = raw.iter().map(|(s, _)| *s).collect();
    let usable: Vec<(f64, f64)> = raw
        .iter()
        .filter(|(_, e)| !e)
        .map(|(s, _)| (s.n as f64, s.neg_log_error))
        .collect();
    let prediction = match predictor.predict(z) {
        Ok(p) => p,
        Err(Error::Domain(_)) => None,
        Err(_) if matches!(predictor, RatePredictor::Unavailable) => None,
        Err(e) => return Err(e),
    };
    if usable.len() < MIN_RATE_SAMPLES {
        if exact_count > 0 {
            return Ok(RateEstimate {
                z,
                slope: f64::INFINITY,
                prediction,
                relative_gap: None,
                exact: true,
                samples,
                dropped: Vec::new(),
            });
        }
        return Err(Error::TooFewSamples { found: usable.len(), required: MIN_RATE_SAMPLES });
    }
    let (slope0, icpt0) = least_squares(&usable);
    let drop = (OUTLIER_FRACTION * usable.len() as f64).floor() as usize;
    let mut ranked: Vec<(f64, usize)> = usable
        .iter()
        .enumerate()
        .map(|(i, &(n, y))| ((y - icpt0 - slope0 * n).abs(), i))
        .collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    let rejected: Vec<usize> = ranked.iter().take(drop).map(|&(_, i)| i).collect();
    let kept: Vec<(f64, f64)> = usable
        .iter()
        .enumerate()
        .filter(|(i, _)| !rejected.contains(i))
        .map(|(_, p)| *p)
        .collect();
    let (slope, _) = least_squares(&kept);
    let mut dropped: Vec<usize> = rejected.iter().map(|&i| usable[i].0 as usize).collect();
    dropped.sort_unstable();
    let relative_gap = prediction.map(|p| (slope - p).abs() / p.abs());
    Ok(RateEstimate { z, slope, prediction, relative_gap, exact: false, samples, dropped })
}

/// `(1/N) Σ δ_x` over the interpolation points of `F_n` (normalized by the
/// number found, at least `2n + 1` when `F_n` exists).
pub fn interpolation_measure(approx: &ChebPadeApproximant) -> Result<DiscreteMeasure> {
    if approx.exact {
        return Err(Error::Domain(format!(
            "f - F_{} vanishes identically; the interpolation measure is undefined",
            approx.n
        )));
    }
    if approx.interpolation_points.is_empty() {
        return Err(Error::InvalidInput("interpolation points were not extracted".into()));
    }
    let points = approx
        .interpolation_points
        .iter()
        .map(|x| Complex64::new(x.to_f64(), 0.0))
        .collect();
    DiscreteMeasure::counting(points)
}

/// `(1/deg Q) Σ δ_ζ` over the poles of `F_n`.
pub fn pole_measure(approx: &ChebPadeApproximant) -> Result<DiscreteMeasure> {
    if approx.poles().is_empty() {
        return Err(Error::Domain(format!("F_{} has no finite poles", approx.n)));
    }
    DiscreteMeasure::counting(approx.poles().iter().map(to_c64).collect())
}

/// Zeros of the numerator of `F_n` as a counting measure.
pub fn zero_measure(approx: &ChebPadeApproximant) -> Result<DiscreteMeasure> {
    let zeros = approx.zeros()?;
    if zeros.is_empty() {
        return Err(Error::Domain(format!("F_{} has no finite zeros", approx.n)));
    }
    DiscreteMeasure::counting(zeros.iter().map(to_c64).collect())
}

/// Coordinate onto which measures are projected before comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Projection {
    /// `Re z`, for measures on real intervals.
    RealPart,
    /// `arg Φ(z) ∈ (-π, π]`, for measures on arcs and ellipses.
    PhiAngle,
}

impl Projection {
    pub fn apply(self, z: Complex64) -> f64 {
        match self {
            Projection::RealPart => z.re,
            Projection::PhiAngle => phi_angle(z),
        }
    }
}

/// `arg Φ(z)`; points of `E` take the angle of the upper side.
pub fn phi_angle(z: Complex64) -> f64 {
    let w = joukowski_inverse_f64(z);
    if z.im == 0.0 && z.re.abs() <= 1.0 {
        return w.arg().abs();
    }
    w.arg()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureComparison {
    pub empirical: DiscreteMeasure,
    pub reference: DiscreteMeasure,
    pub projection: Projection,
    /// 1-Wasserstein distance of the projected measures.
    pub distance: f64,
}

/// Number of cells added between atoms when a measure has a density.
const COMPARISON_CELLS: usize = 4096;

struct Projected {
    atoms: Vec<(f64, f64)>,
    /// Densities kept exact under `RealPart`.
    pieces: Vec<crate::potential::IntervalDensity>,
}

impl Projected {
    fn new(mu: &DiscreteMeasure, projection: Projection) -> Self {
        let (pts, ws) = mu.atoms();
        let mut atoms: Vec<(f64, f64)> = pts.iter().zip(ws).map(|(p, w)| (projection.apply(*p), *w)).collect();
        let pieces = match projection {
            Projection::RealPart => mu.pieces.clone(),
            Projection::PhiAngle => {
                for p in &mu.pieces {
                    atoms.extend(p.nodes().into_iter().map(|(x, w)| (projection.apply(Complex64::new(x, 0.0)), w)));
                }
                Vec::new()
            }
        };
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Projected { atoms, pieces }
    }

    fn support(&self) -> (f64, f64) {
        let lo = self.atoms.iter().map(|a| a.0).chain(self.pieces.iter().map(|p| p.c));
        let hi = self.atoms.iter().map(|a| a.0).chain(self.pieces.iter().map(|p| p.d));
        (lo.fold(f64::INFINITY, f64::min), hi.fold(f64::NEG_INFINITY, f64::max))
    }

    fn cdf(&self, x: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().take_while(|a| a.0 <= x).map(|a| a.1).sum();
        atoms + self.pieces.iter().map(|p| p.cdf(x)).sum::<f64>()
    }
}

/// `∫ |F_μ(x) - F_ν(x)| dx` for the projected CDFs. Atoms are breakpoints of
/// the comparison grid; densities are integrated with the midpoint rule.
pub fn wasserstein_projected(mu: &DiscreteMeasure, nu: &DiscreteMeasure, projection: Projection) -> f64 {
    let (a, b) = (Projected::new(mu, projection), Projected::new(nu, projection));
    let (lo_a, hi_a) = a.support();
    let (lo_b, hi_b) = b.support();
    let (lo, hi) = (lo_a.min(lo_b), hi_a.max(hi_b));
    if !(hi > lo) {
        return 0.0;
    }
    let mut grid: Vec<f64> = a.atoms.iter().chain(&b.atoms).map(|p| p.0).collect();
    for p in a.pieces.iter().chain(&b.pieces) {
        grid.push(p.c);
        grid.push(p.d);
    }
    if !a.pieces.is_empty() || !b.pieces.is_empty() {
        grid.extend((0..=COMPARISON_CELLS).map(|j| lo + (hi - lo) * j as f64 / COMPARISON_CELLS as f64));
    }
    grid.sort_by(|x, y| x.total_cmp(y));
    grid.dedup();
    grid.windows(2)
        .map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            (a.cdf(mid) - b.cdf(mid)).abs() * (w[1] - w[0])
        })
        .sum()
}

pub fn compare_measures(empirical: &DiscreteMeasure, reference: &DiscreteMeasure, projection: Projection) -> MeasureComparison {
    MeasureComparison {
        empirical: empirical.clone(),
        reference: reference.clone(),
        projection,
        distance: wasserstein_projected(empirical, reference, projection),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusteringReport {
    /// Share of zeros with `||Φ(z)| - ρ₀| ≤ δ`.
    pub fraction: f64,
    /// Share of zeros within Euclidean distance `δ` of the curve `Γ_{ρ₀}`.
    pub distance_fraction: f64,
    /// Kolmogorov distance between the `arg Φ` distribution and the uniform one.
    pub angle_gap: f64,
    pub delta: f64,
    pub rho0: f64,
    pub count: usize,
}

const ELLIPSE_VERTICES: usize = 4096;

fn segment_distance(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let t = if ab.norm_sqr() == 0.0 { 0.0 } else { (((z - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0) };
    (z - a - ab * t).norm()
}

/// Jentzsch–Szegő diagnostics; `delta` defaults to `0.1 ρ₀`.
pub fn ellipse_clustering(zeros: &[Complex64], rho0: f64, delta: Option<f64>) -> Result<ClusteringReport> {
    if zeros.is_empty() {
        return Err(Error::InvalidInput("no zeros to classify".into()));
    }
    let delta = delta.unwrap_or(DEFAULT_CLUSTER_DELTA * rho0);
    let near = zeros
        .iter()
        .filter(|z| (joukowski_inverse_f64(**z).norm() - rho0).abs() <= delta)
        .count();
    let curve = Ellipse::new(rho0)?.polyline(ELLIPSE_VERTICES);
    let close = zeros
        .iter()
        .filter(|z| {
            curve
                .windows(2)
                .map(|w| segment_distance(**z, w[0], w[1]))
                .fold(f64::INFINITY, f64::min)
                <= delta
        })
        .count();
    let mut u: Vec<f64> = zeros.iter().map(|z| (phi_angle(*z) + PI) / (2.0 * PI)).collect();
    u.sort_by(|a, b| a.total_cmp(b));
    let m = u.len() as f64;
    let angle_gap = u
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / m - x).max(x - i as f64 / m))
        .fold(0.0, f64::max);
    Ok(ClusteringReport { fraction: near as f64 / m, distance_fraction: close as f64 / m, angle_gap, delta, rho0, count: zeros.len() })
}

/// Axis-parallel rectangle in the `z`-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Region {
    pub fn validate(&self) -> Result<()> {
        let ok = self.re.0 < self.re.1 && self.im.0 < self.im.1;
        if !ok || ![self.re.0, self.re.1, self.im.0, self.im.1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(format!("degenerate region {self:?}")));
        }
        let meets_e = self.im.0 <= 0.0 && self.im.1 >= 0.0 && self.re.0 <= 1.0 && self.re.1 >= -1.0;
        if meets_e {
            return Err(Error::InvalidInput(format!("region {self:?} meets E")));
        }
        Ok(())
    }

    /// `count × count` cell centres.
    pub fn grid(&self, count: usize) -> Vec<Complex64> {
        let at = |(a, b): (f64, f64), j: usize| a + (b - a) * (j as f64 + 0.5) / count as f64;
        (0..count)
            .flat_map(|i| (0..count).map(move |j| Complex64::new(at(self.re, i), at(self.im, j))))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub n: usize,
    pub evaluated: usize,
    /// Grid points on the predicted compact, where no bound applies.
    pub skipped: usize,
    pub fraction: f64,
    pub violations: Vec<Complex64>,
}

/// Per-`n` share of grid points violating
/// `e^{-n(2G + ε)} ≤ |f - F_n| ≤ e^{-n(2G - ε)}`.
pub fn capacity_convergence_probe(
    f: &FunctionSpec,
    predictor: &RatePredictor,
    reports: &[(usize, Result<ChebPadeApproximant>)],
    region: &Region,
    grid: usize,
    eps: f64,
) -> Result<Vec<ProbeRow>> {
    region.validate()?;
    let points: Vec<(Complex64, Option<f64>)> = region
        .grid(grid)
        .into_iter()
        .filter_map(|z| match predictor.predict(z) {
            Ok(p) => Some((z, p)),
            Err(_) => None,
        })
        .collect();
    let skipped = grid * grid - points.len();
    Ok(existing(reports)
        .map(|a| {
            let floor = EXACT_FRACTION * a.precision.digits() as f64 * std::f64::consts::LN_10;
            let violations: Vec<Complex64> = points
                .par_iter()
                .filter(|(z, rate)| {
                    let err = error_at_complex(f, a, &from_c64(a.precision, *z));
                    let neg = if err.is_zero() {
                        f64::INFINITY
                    } else {
                        -log10_abs(&err) * std::f64::consts::LN_10
                    };
                    if neg >= floor {
                        return false;
                    }
                    match rate {
                        None => true,
                        Some(r) => (neg / a.n as f64 - r).abs() > eps,
                    }
                })
                .map(|(z, _)| *z)
                .collect();
            ProbeRow {
                n: a.n,
                evaluated: points.len(),
                skipped,
                fraction: violations.len() as f64 / points.len().max(1) as f64,
                violations,
            }
        })
        .collect())
}
