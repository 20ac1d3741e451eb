use thiserror::Error;

/// Errors raised by the approximation engine.
///
/// Several variants (`RankDeficient`, `NotRepresentable`) describe expected
/// structural outcomes rather than bugs; callers sweeping over `n` are
/// expected to record them and continue.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("iteration did not converge after {iterations} steps (residual {residual:e}); raise the working precision")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("matrix is rank deficient: numerical rank {rank}")]
    RankDeficient { rank: usize },

    #[error("Chebyshev quadrature did not stabilise after {doublings} doublings")]
    QuadratureNonConvergence { doublings: usize },

    #[error("only {usable} usable coefficients for the decay fit (need at least 10)")]
    InsufficientDecay { usable: usize },

    #[error("point lies on the open interval (-1, 1); a side (+/-) must be requested")]
    BranchAmbiguity,

    #[error("power series radius of convergence {radius} is not larger than 1")]
    RadiusTooSmall { radius: f64 },

    #[error("pole at modulus {modulus} lies on the unit circle")]
    PoleOnUnitCircle { modulus: f64 },

    #[error("pole at modulus {modulus} lies inside the unit disk")]
    PoleInsideDisk { modulus: f64 },

    #[error("no nonlinear Chebyshev-Pade approximant of order {n}: {reason}")]
    NotRepresentable { n: usize, reason: String },

    #[error("equilibrium density has negative weight {min_weight:e}; refine the grid")]
    NonPositiveDensity { min_weight: f64 },

    #[error("point outside the domain: {0}")]
    Domain(String),

    #[error("{found} samples available, at least {required} required")]
    TooFewSamples { found: usize, required: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
