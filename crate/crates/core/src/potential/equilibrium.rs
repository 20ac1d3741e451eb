use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::green::{green_e_inf_f64, green_e_regular_f64, green_interval_inf_f64, green_interval_regular_f64};
use super::measure::{node_angle, CompactSpec, DiscreteMeasure, IntervalDensity, MASS_TOL};
use crate::error::{Error, Result};
use crate::numerics::{joukowski_inverse_f64, Complex64};

/// Collocation system `α V^ν + ∫ H(·, t) dν(t) - C = rhs` on a union of
/// intervals, with `ν` a unit measure carried by Gauss–Chebyshev nodes.
///
/// The logarithmic part is integrated exactly for polynomial densities, so
/// the only discretization error comes from the smooth kernel `H`.
pub(crate) struct LogSystem {
    intervals: Vec<(f64, f64)>,
    m: usize,
    nodes: Vec<f64>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

/// `(1/M) [log(2/(h|Φ(s)|)) + Σ_{k≥1} (2/k) Re(Φ(s)^{-k}) cos(kθ_m)]`, the
/// potential at `z` of the node basis of `[c, d]`.
fn log_kernel_rows(zs: &[Complex64], (c, d): (f64, f64), m: usize, cos: &DMatrix<f64>) -> DMatrix<f64> {
    let h = 0.5 * (d - c);
    let mut r = DMatrix::<f64>::zeros(zs.len(), m);
    for (i, &z) in zs.iter().enumerate() {
        let s = (2.0 * z - c - d) / (d - c);
        let big = joukowski_inverse_f64(s);
        let zeta = big.inv();
        r[(i, 0)] = (2.0 / (h * big.norm())).ln();
        let mut power = Complex64::new(1.0, 0.0);
        for k in 1..m {
            power *= zeta;
            r[(i, k)] = 2.0 * power.re / k as f64;
        }
    }
    (r * cos) / m as f64
}

fn cos_table(m: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, m, |k, j| (k as f64 * node_angle(j, m)).cos())
}

impl LogSystem {
    pub(crate) fn new(
        intervals: &[(f64, f64)],
        m: usize,
        alpha: f64,
        smooth: Option<&(dyn Fn(usize, &[f64]) -> Vec<f64> + Sync)>,
    ) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidInput("grid size must be at least 2".into()));
        }
        let cos = cos_table(m);
        let nodes: Vec<f64> = intervals
            .iter()
            .flat_map(|&(c, d)| (0..m).map(move |j| 0.5 * (c + d) + 0.5 * (d - c) * node_angle(j, m).cos()))
            .collect();
        let total = nodes.len();
        let zs: Vec<Complex64> = nodes.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut a = DMatrix::<f64>::zeros(total + 1, total + 1);
        for (j, &iv) in intervals.iter().enumerate() {
            let block = log_kernel_rows(&zs, iv, m, &cos);
            a.view_mut((0, j * m), (total, m)).copy_from(&(block * alpha));
        }
        if let Some(h) = smooth {
            // Column `col` holds H(x_i, t_col) / M.
            let columns: Vec<Vec<f64>> = (0..total).into_par_iter().map(|col| h(col, &nodes)).collect();
            for (col, values) in columns.iter().enumerate() {
                for (i, v) in values.iter().enumerate() {
                    a[(i, col)] += v / m as f64;
                }
            }
        }
        for i in 0..total {
            a[(i, total)] = -1.0;
            a[(total, i)] = 1.0 / m as f64;
        }
        Ok(LogSystem { intervals: intervals.to_vec(), m, nodes, lu: a.lu() })
    }

    pub(crate) fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Densities on each interval and the constant `C`.
    pub(crate) fn solve(&self, rhs: &[f64]) -> Result<(Vec<IntervalDensity>, f64)> {
        let total = self.nodes.len();
        let mut b = DVector::<f64>::zeros(total + 1);
        for (i, v) in rhs.iter().enumerate() {
            b[i] = *v;
        }
        b[total] = 1.0;
        let x = self
            .lu
            .solve(&b)
            .ok_or_else(|| Error::InvalidInput("singular collocation matrix".into()))?;
        let pieces = self
            .intervals
            .iter()
            .enumerate()
            .map(|(j, &(c, d))| IntervalDensity::from_values(c, d, x.as_slice()[j * self.m..(j + 1) * self.m].to_vec()))
            .collect();
        Ok((pieces, x[total]))
    }
}

fn positive_measure(pieces: Vec<IntervalDensity>) -> Result<DiscreteMeasure> {
    let min = pieces
        .iter()
        .flat_map(|p| p.values.iter().map(move |v| v / p.node_count() as f64))
        .fold(f64::INFINITY, f64::min);
    if min < -MASS_TOL {
        return Err(Error::NonPositiveDensity { min_weight: min });
    }
    DiscreteMeasure::from_pieces(pieces)
}

/// Green function of `C̄ ∖ K` split as `log(1/|z - t|) + H_K(z, t)`.
pub struct GreenK {
    compact: CompactSpec,
    /// Collocation on `K` for unions: balayage onto `K` and its Robin measure.
    system: Option<LogSystem>,
    robin: Option<(Vec<IntervalDensity>, f64)>,
}

impl GreenK {
    pub fn new(compact: &CompactSpec, grid_size: usize) -> Result<Self> {
        compact.validate()?;
        match compact {
            CompactSpec::RealInterval { .. } => Ok(GreenK { compact: compact.clone(), system: None, robin: None }),
            CompactSpec::RealIntervalUnion { intervals } => {
                let system = LogSystem::new(intervals, grid_size, 1.0, None)?;
                let zero = vec![0.0; system.nodes().len()];
                let robin = system.solve(&zero)?;
                Ok(GreenK { compact: compact.clone(), system: Some(system), robin: Some(robin) })
            }
            CompactSpec::ArcPolyline { .. } => {
                Err(Error::Domain("Green functions of curved compacts are not supported".into()))
            }
        }
    }

    pub fn compact(&self) -> &CompactSpec {
        &self.compact
    }

    /// `z ↦ H_K(z, t)` for a fixed pole `t ∉ K`.
    ///
    /// For unions, `g_K(z, t) = log(1/|z - t|) - V^{ν_t}(z) + c_t` with
    /// `ν_t` the balayage of `δ_t` onto `K`.
    pub fn kernel_at(&self, t: Complex64) -> Result<RegularKernel> {
        match (&self.compact, &self.system) {
            (CompactSpec::RealInterval { c, d }, _) => Ok(RegularKernel::Closed { t, c: *c, d: *d }),
            (_, Some(system)) => {
                let rhs: Vec<f64> = system.nodes().iter().map(|&y| -(Complex64::new(y, 0.0) - t).norm().ln()).collect();
                let (pieces, ct) = system.solve(&rhs)?;
                Ok(RegularKernel::Swept { pieces, ct })
            }
            _ => unreachable!(),
        }
    }

    pub fn regular_row(&self, t: Complex64, zs: &[Complex64]) -> Result<Vec<f64>> {
        let kernel = self.kernel_at(t)?;
        Ok(zs.iter().map(|&z| kernel.eval(z)).collect())
    }

    /// `g_K(z, ∞)`.
    pub fn green_inf(&self, z: Complex64) -> f64 {
        match (&self.compact, &self.robin) {
            (CompactSpec::RealInterval { c, d }, _) => green_interval_inf_f64(z, *c, *d),
            (_, Some((pieces, gamma))) => gamma - pieces.iter().map(|p| p.potential(z)).sum::<f64>(),
            _ => unreachable!(),
        }
    }

    /// `g_K(z, t)`.
    pub fn green(&self, z: Complex64, t: Complex64) -> Result<f64> {
        Ok(self.regular_row(t, &[z])?[0] - (z - t).norm().ln())
    }
}

/// `H_K(·, t)` for one pole.
pub enum RegularKernel {
    Closed { t: Complex64, c: f64, d: f64 },
    Swept { pieces: Vec<IntervalDensity>, ct: f64 },
}

impl RegularKernel {
    pub fn eval(&self, z: Complex64) -> f64 {
        match self {
            RegularKernel::Closed { t, c, d } => green_interval_regular_f64(z, *t, *c, *d),
            RegularKernel::Swept { pieces, ct } => ct - pieces.iter().map(|p| p.potential(z)).sum::<f64>(),
        }
    }
}

/// Solution of `θ V^λ + G_K^λ ≡ w` on `E`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub theta: f64,
    pub w: f64,
    pub residual: f64,
    pub grid_size: usize,
}

pub struct Equilibrium {
    pub theta: f64,
    pub w: f64,
    pub lambda: DiscreteMeasure,
    /// Max of `|θV^λ + G_K^λ - w|` over the verification grid.
    pub residual: f64,
    pub grid_size: usize,
    green: GreenK,
    /// `H_K(·, t_j)` at the nodes of `λ`.
    kernels: Vec<RegularKernel>,
}

/// Verification points `cos(πj/(count-1))`, endpoints included.
pub fn verification_grid(c: f64, d: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|j| {
            let s = (std::f64::consts::PI * j as f64 / (count - 1).max(1) as f64).cos();
            0.5 * (c + d) + 0.5 * (d - c) * s
        })
        .collect()
}

pub const VERIFICATION_POINTS: usize = 4000;

/// Collocation on `grid_size` Chebyshev points of `E` for the density of
/// `λ`, with the kernel `(θ + 1) log(1/|x - t|) + H_K(x, t)`.
pub fn solve_equilibrium(k: &CompactSpec, theta: f64, grid_size: usize) -> Result<Equilibrium> {
    if !(theta >= 0.0) {
        return Err(Error::InvalidInput(format!("theta must be nonnegative, got {theta}")));
    }
    let green = GreenK::new(k, grid_size)?;
    let smooth = |col: usize, nodes: &[f64]| -> Vec<f64> {
        let zs: Vec<Complex64> = nodes.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        green.regular_row(Complex64::new(nodes[col], 0.0), &zs).unwrap_or_else(|_| vec![f64::NAN; nodes.len()])
    };
    let system = LogSystem::new(&[(-1.0, 1.0)], grid_size, theta + 1.0, Some(&smooth))?;
    let nodes = system.nodes().to_vec();
    let (pieces, w) = system.solve(&vec![0.0; nodes.len()])?;
    if pieces.iter().any(|p| p.values.iter().any(|v| !v.is_finite())) {
        return Err(Error::InvalidInput("Green kernel evaluation failed".into()));
    }
    let lambda = positive_measure(pieces)?;
    let kernels = nodes
        .iter()
        .map(|&t| green.kernel_at(Complex64::new(t, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    let mut eq = Equilibrium { theta, w, lambda, residual: f64::NAN, grid_size, green, kernels };
    let grid = verification_grid(-1.0, 1.0, VERIFICATION_POINTS);
    eq.residual = grid
        .par_iter()
        .map(|&x| (eq.mixed_potential(Complex64::new(x, 0.0)) - eq.w).abs())
        .reduce(|| 0.0, f64::max);
    Ok(eq)
}

impl Equilibrium {
    pub fn density(&self) -> &IntervalDensity {
        &self.lambda.pieces[0]
    }

    pub fn compact(&self) -> &CompactSpec {
        self.green.compact()
    }

    pub fn green_k(&self) -> &GreenK {
        &self.green
    }

    pub fn report(&self) -> EquilibriumReport {
        EquilibriumReport { theta: self.theta, w: self.w, residual: self.residual, grid_size: self.grid_size }
    }

    pub fn log_potential(&self, z: Complex64) -> f64 {
        self.lambda.potential(z)
    }

    /// `∫ H_K(z, t) dλ(t)` by Gauss–Chebyshev quadrature.
    fn regular_potential(&self, z: Complex64) -> f64 {
        let rho = self.density();
        let m = rho.node_count() as f64;
        self.kernels.iter().zip(&rho.values).map(|(k, v)| k.eval(z) * v / m).sum()
    }

    /// `G_K^λ(z)`.
    pub fn green_potential(&self, z: Complex64) -> f64 {
        self.log_potential(z) + self.regular_potential(z)
    }

    /// `θ V^λ(z) + G_K^λ(z)`.
    pub fn mixed_potential(&self, z: Complex64) -> f64 {
        (self.theta + 1.0) * self.log_potential(z) + self.regular_potential(z)
    }

    /// `c_K(λ) = ∫ g_K(x, ∞) dλ(x)`.
    pub fn robin_k(&self) -> f64 {
        let rho = self.density();
        rho.nodes().iter().map(|&(t, w)| self.green.green_inf(Complex64::new(t, 0.0)) * w).sum()
    }
}

/// Balayage of `μ` from `C̄ ∖ K` onto `K`: `V^μ̃ = V^μ + const` on `K`.
///
/// Atoms already on `K` are kept; the rest is swept by collocation on
/// `grid_size` Chebyshev points per interval.
pub fn balayage(mu: &DiscreteMeasure, k: &CompactSpec, grid_size: usize) -> Result<DiscreteMeasure> {
    Ok(balayage_with_constant(mu, k, grid_size)?.0)
}

/// Balayage together with the constant `c` in `V^μ̃ = V^μ + c` on `K`.
pub fn balayage_with_constant(mu: &DiscreteMeasure, k: &CompactSpec, grid_size: usize) -> Result<(DiscreteMeasure, f64)> {
    k.validate()?;
    let intervals = k
        .intervals()
        .ok_or_else(|| Error::Domain("balayage needs a real interval or a union of intervals".into()))?;
    let on_k = |p: &Complex64| p.im == 0.0 && intervals.iter().any(|&(c, d)| p.re >= c && p.re <= d);
    let (atoms, atom_w) = mu.atoms();
    let kept: Vec<(Complex64, f64)> = atoms.iter().zip(atom_w).filter(|(p, _)| on_k(p)).map(|(p, w)| (*p, *w)).collect();
    let kept_mass: f64 = kept.iter().map(|(_, w)| w).sum();
    let outside_atoms: Vec<(Complex64, f64)> =
        atoms.iter().zip(atom_w).filter(|(p, _)| !on_k(p)).map(|(p, w)| (*p, *w)).collect();
    for piece in &mu.pieces {
        if intervals.iter().any(|&(c, d)| piece.c < d && c < piece.d) {
            return Err(Error::Domain("absolutely continuous part meets K".into()));
        }
    }
    let swept_mass = 1.0 - kept_mass;
    let (kept_points, kept_weights): (Vec<Complex64>, Vec<f64>) = kept.into_iter().unzip();
    if swept_mass <= MASS_TOL {
        return Ok((DiscreteMeasure::from_atoms(kept_points, kept_weights)?, 0.0));
    }

    let system = LogSystem::new(&intervals, grid_size, 1.0, None)?;
    let outside_potential = |z: Complex64| -> f64 {
        let a: f64 = outside_atoms.iter().map(|(p, w)| -w * (z - p).norm().ln()).sum();
        a + mu.pieces.iter().map(|p| p.potential(z)).sum::<f64>()
    };
    // Unit-mass problem for the normalized swept part.
    let rhs: Vec<f64> = system
        .nodes()
        .iter()
        .map(|&x| outside_potential(Complex64::new(x, 0.0)) / swept_mass)
        .collect();
    let (mut pieces, constant) = system.solve(&rhs)?;
    let min = pieces.iter().flat_map(|p| p.values.iter().copied()).fold(f64::INFINITY, f64::min);
    if min < -MASS_TOL * grid_size as f64 {
        return Err(Error::NonPositiveDensity { min_weight: min / grid_size as f64 });
    }
    for p in &mut pieces {
        let values: Vec<f64> = p.values.iter().map(|v| v.max(0.0) * swept_mass).collect();
        *p = IntervalDensity::from_values(p.c, p.d, values);
    }
    let total: f64 = kept_weights.iter().sum::<f64>() + pieces.iter().map(|p| p.mass()).sum::<f64>();
    for p in &mut pieces {
        let values: Vec<f64> = p.values.iter().map(|v| v / total).collect();
        *p = IntervalDensity::from_values(p.c, p.d, values);
    }
    let kept_weights: Vec<f64> = kept_weights.iter().map(|w| w / total).collect();
    Ok((DiscreteMeasure::new(kept_points, kept_weights, pieces)?, constant * swept_mass))
}

/// `max |V^μ̃ - V^μ - c|` over a Chebyshev grid on each interval of `K`,
/// with `c` the mean offset; returns `(c, deviation)`.
pub fn balayage_residual(mu: &DiscreteMeasure, swept: &DiscreteMeasure, k: &CompactSpec, points: usize) -> Result<(f64, f64)> {
    let intervals = k
        .intervals()
        .ok_or_else(|| Error::Domain("balayage needs a real interval or a union of intervals".into()))?;
    let diffs: Vec<f64> = intervals
        .iter()
        .flat_map(|&(c, d)| verification_grid(c, d, points))
        .map(|x| {
            let z = Complex64::new(x, 0.0);
            swept.potential(z) - mu.potential(z)
        })
        .collect();
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let dev = diffs.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    Ok((mean, dev))
}

/// External-field equilibrium on `K`: `θV^μ + G_E^μ + θ g_E(·, ∞)` on a grid
/// of `K`; returns `(mean, max deviation)`. Constant for the swept
/// equilibrium measure of the same `θ`.
pub fn external_field_residual(mu: &DiscreteMeasure, k: &CompactSpec, theta: f64, points: usize) -> Result<(f64, f64)> {
    let intervals = k
        .intervals()
        .ok_or_else(|| Error::Domain("needs a real interval or a union of intervals".into()))?;
    let values: Vec<f64> = intervals
        .iter()
        .flat_map(|&(c, d)| verification_grid(c, d, points))
        .map(|x| {
            let z = Complex64::new(x, 0.0);
            let regular: f64 = mu.points.iter().zip(&mu.weights).map(|(t, w)| w * green_e_regular_f64(z, *t)).sum();
            (theta + 1.0) * mu.potential(z) + regular + theta * green_e_inf_f64(z)
        })
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let dev = values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    Ok((mean, dev))
}
