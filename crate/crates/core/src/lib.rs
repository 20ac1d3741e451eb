//! Nonlinear Chebyshev–Padé approximation on `[-1, 1]` through the Faber
//! transplant to the unit disk, with potential-theoretic diagnostics.

pub mod chebseries;
pub mod diagnostics;
pub mod error;
pub mod faber;
pub mod functions;
pub mod numerics;
pub mod pade;
pub mod potential;

pub use error::{Error, Result};
