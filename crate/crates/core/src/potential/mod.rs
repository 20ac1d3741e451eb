//! Potential theory on `E = [-1, 1]` in double precision: Green functions,
//! the mixed equilibrium problem `θV^λ + G_K^λ ≡ w`, balayage onto `K`,
//! energies and the closed-form two-branch predictions.

mod energy;
mod equilibrium;
pub mod green;
mod measure;
pub(crate) mod stahl;

pub use energy::{discrete_log_energy, energy, energy_phi, energy_phi_theta, log_energy, ROBIN_E};
pub use equilibrium::{
    balayage, balayage_residual, balayage_with_constant, external_field_residual, solve_equilibrium,
    verification_grid, Equilibrium, EquilibriumReport, GreenK, RegularKernel, VERIFICATION_POINTS,
};
pub use green::{green_e, green_e_inf, green_interval_complement, green_interval_complement_inf};
pub use measure::{CompactSpec, DiscreteMeasure, IntervalDensity, MASS_TOL};
pub use stahl::{
    equilibrium_constant_closed_form, markov_rate_closed_form, s_property_residual, theoretical_rate_two_branch,
    InvertedArc, S_PROPERTY_OFFSET,
};

use crate::error::Result;
use crate::numerics::Complex64;

/// Constants and residuals of the vector problem with interaction matrix
/// `[[θ + 1, -1], [-1, 1]]`:
/// `(θ+1)V^{λ₁} - V^{λ₂} ≡ w₁` on `E`, `-V^{λ₁} + V^{λ₂} ≡ w₂` on `K`.
#[derive(Debug, Clone, Copy)]
pub struct VectorEquilibrium {
    pub w1: f64,
    pub w2: f64,
    pub w: f64,
    /// `c_K(λ) = ∫ g_K(x, ∞) dλ(x)`, which should equal `w₂`.
    pub robin_k: f64,
    pub residual_e: f64,
    pub residual_k: f64,
}

pub fn vector_equilibrium(eq: &Equilibrium, swept: &DiscreteMeasure, points: usize) -> Result<VectorEquilibrium> {
    let intervals = eq
        .compact()
        .intervals()
        .ok_or_else(|| crate::Error::Domain("vector problem needs real intervals".into()))?;
    let spread = |values: Vec<f64>| -> (f64, f64) {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        (mean, values.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max))
    };
    let on_e: Vec<f64> = verification_grid(-1.0, 1.0, points)
        .into_iter()
        .map(|x| {
            let z = Complex64::new(x, 0.0);
            (eq.theta + 1.0) * eq.log_potential(z) - swept.potential(z)
        })
        .collect();
    let on_k: Vec<f64> = intervals
        .iter()
        .flat_map(|&(c, d)| verification_grid(c, d, points))
        .map(|x| {
            let z = Complex64::new(x, 0.0);
            swept.potential(z) - eq.log_potential(z)
        })
        .collect();
    let (w1, residual_e) = spread(on_e);
    let (w2, residual_k) = spread(on_k);
    Ok(VectorEquilibrium { w1, w2, w: eq.w, robin_k: eq.robin_k(), residual_e, residual_k })
}
