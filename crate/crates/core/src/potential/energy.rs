use super::equilibrium::GreenK;
use super::green::{green_e_inf_f64, green_e_regular_f64};
use super::measure::{CompactSpec, DiscreteMeasure};
use crate::error::{Error, Result};
use crate::numerics::Complex64;

/// Robin constant of `E = [-1, 1]`.
pub const ROBIN_E: f64 = std::f64::consts::LN_2;

/// `Σ_{i≠j} w_i w_j log(1/|z_i - z_j|) + Σ w_i² log(1/δ_i)` with `δ_i` half
/// the distance to the nearest other point.
pub fn discrete_log_energy(points: &[Complex64], weights: &[f64]) -> f64 {
    let n = points.len();
    let mut acc = 0.0;
    for i in 0..n {
        let mut nearest = f64::INFINITY;
        for j in 0..n {
            if i == j {
                continue;
            }
            let r = (points[i] - points[j]).norm();
            nearest = nearest.min(r);
            acc -= weights[i] * weights[j] * r.ln();
        }
        acc -= weights[i] * weights[i] * (0.5 * nearest).ln();
    }
    acc
}

/// Logarithmic energy `I(μ) = ∫∫ log(1/|z - t|) dμ dμ`.
///
/// Absolutely continuous pieces are integrated with their exact potentials;
/// atoms fall back to [`discrete_log_energy`].
pub fn log_energy(mu: &DiscreteMeasure) -> f64 {
    let smooth = |z: Complex64| mu.pieces.iter().map(|p| p.potential(z)).sum::<f64>();
    let (atoms, atom_w) = mu.atoms();
    let piece_piece: f64 = mu
        .pieces
        .iter()
        .flat_map(|p| p.nodes())
        .map(|(t, w)| w * smooth(Complex64::new(t, 0.0)))
        .sum();
    let atom_piece: f64 = atoms.iter().zip(atom_w).map(|(a, w)| 2.0 * w * smooth(*a)).sum();
    let atom_atom = if atoms.is_empty() { 0.0 } else { discrete_log_energy(atoms, atom_w) };
    piece_piece + atom_piece + atom_atom
}

fn double_sum(mu: &DiscreteMeasure, kernel: impl Fn(Complex64, Complex64) -> f64 + Sync) -> f64 {
    use rayon::prelude::*;
    mu.points
        .par_iter()
        .zip(&mu.weights)
        .map(|(z, wz)| {
            mu.points
                .iter()
                .zip(&mu.weights)
                .map(|(t, wt)| wz * wt * kernel(*z, *t))
                .sum::<f64>()
        })
        .sum()
}

/// `J(K, μ; θ) = ∫∫ (θ log(1/|x - t|) + g_K(x, t)) dμ dμ` for `μ` on `E`.
pub fn energy(k: &CompactSpec, mu: &DiscreteMeasure, theta: f64, grid_size: usize) -> Result<f64> {
    let green = GreenK::new(k, grid_size)?;
    let kernels = mu
        .points
        .iter()
        .map(|&t| green.kernel_at(t))
        .collect::<Result<Vec<_>>>()?;
    let regular: f64 = mu
        .points
        .iter()
        .zip(&mu.weights)
        .map(|(z, wz)| {
            kernels
                .iter()
                .zip(&mu.weights)
                .map(|(kern, wt)| wz * wt * kern.eval(*z))
                .sum::<f64>()
        })
        .sum();
    Ok((theta + 1.0) * log_energy(mu) + regular)
}

/// `J_φ(K, μ) = ∫∫ (log(1/|z - t|) + g_E(z, t)) dμ dμ + 2 ∫ φ dμ` with
/// `φ = g_E(·, ∞)`, for `μ` carried by `K`.
pub fn energy_phi(k: &CompactSpec, mu: &DiscreteMeasure) -> Result<f64> {
    energy_phi_theta(k, mu, 1.0)
}

/// `∫∫ (θ log(1/|z - t|) + g_E(z, t)) dμ dμ + 2θ ∫ φ dμ`. For the swept
/// equilibrium measure this equals `(1 + θ) J(K, λ) - θ² log 2`.
pub fn energy_phi_theta(k: &CompactSpec, mu: &DiscreteMeasure, theta: f64) -> Result<f64> {
    k.validate()?;
    let scale = mu.points.iter().map(|p| p.norm()).fold(1.0, f64::max);
    if let Some(p) = mu.points.iter().find(|p| !k.contains(**p, 1e-12 * scale)) {
        return Err(Error::Domain(format!("measure has a point {p} off K")));
    }
    let regular = double_sum(mu, green_e_regular_f64);
    let field: f64 = mu.points.iter().zip(&mu.weights).map(|(z, w)| w * green_e_inf_f64(*z)).sum();
    Ok((theta + 1.0) * log_energy(mu) + regular + 2.0 * theta * field)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::IntervalDensity;

    #[test]
    fn arcsine_energy_is_log_two() {
        let mu = DiscreteMeasure::from_pieces(vec![IntervalDensity::arcsine(-1.0, 1.0, 64)]).unwrap();
        assert!((log_energy(&mu) - ROBIN_E).abs() < 1e-13);
        let atoms = DiscreteMeasure::from_atoms(mu.points.clone(), mu.weights.clone()).unwrap();
        assert!((log_energy(&atoms) - ROBIN_E).abs() < 0.05);
    }
}
