//! Extended-precision substrate: scalars, polynomials, dense linear solves and
//! polynomial root finding.
//!
//! Scalars are MPFR/MPC values from `rug`. A [`Precision`] is carried through
//! every constructor so that arithmetic never silently drops to a lower
//! precision; owned `rug` operations keep the precision of their left operand.

mod linalg;
mod poly;
mod roots;

pub use linalg::{solve_linear, LinearSolution};
pub use poly::{Basis, Plane, Poly, RationalFunction};
pub use roots::{poly_roots, poly_roots_with_budget, ROOT_ITERATION_BUDGET};

use rug::float::Constant;
use rug::ops::Pow;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type BigReal = rug::Float;
pub type BigComplex = rug::Complex;
pub type Complex64 = num_complex::Complex64;

const LOG2_10: f64 = std::f64::consts::LOG2_10;
const GUARD_BITS: u32 = 16;

/// Working precision in decimal digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Precision(u32);

impl Precision {
    pub const MIN_DIGITS: u32 = 32;
    pub const DEFAULT: Precision = Precision(200);

    pub fn new(digits: u32) -> Result<Self> {
        if digits < Self::MIN_DIGITS {
            return Err(Error::InvalidInput(format!(
                "precision must be at least {} digits, got {digits}",
                Self::MIN_DIGITS
            )));
        }
        Ok(Precision(digits))
    }

    pub fn digits(self) -> u32 {
        self.0
    }

    /// Mantissa bits used for every value created at this precision.
    pub fn bits(self) -> u32 {
        (self.0 as f64 * LOG2_10).ceil() as u32 + GUARD_BITS
    }

    pub fn real<T>(self, value: T) -> BigReal
    where
        BigReal: rug::Assign<T>,
    {
        BigReal::with_val(self.bits(), value)
    }

    pub fn complex<T>(self, value: T) -> BigComplex
    where
        BigComplex: rug::Assign<T>,
    {
        BigComplex::with_val(self.bits(), value)
    }

    pub fn zero(self) -> BigReal {
        self.real(0)
    }

    pub fn czero(self) -> BigComplex {
        self.complex(0)
    }

    pub fn pi(self) -> BigReal {
        self.real(Constant::Pi)
    }

    /// `10^exponent` at this precision.
    pub fn pow10(self, exponent: i64) -> BigReal {
        self.real(10).pow(exponent as i32)
    }

    /// `10^(-digits/den)`, the family of tolerances used throughout.
    pub fn tol_fraction(self, den: u32) -> BigReal {
        self.pow10(-((self.0 / den) as i64))
    }

    /// The uniform rank / trimming threshold `10^(-digits/2)`.
    pub fn rank_tol(self) -> BigReal {
        self.tol_fraction(2)
    }

    /// Parses a decimal literal such as `"0.7"` or `"-1.25e-3"` exactly at this precision.
    pub fn parse_real(self, text: &str) -> Result<BigReal> {
        let parsed = BigReal::parse(text.trim())
            .map_err(|e| Error::InvalidInput(format!("bad real literal {text:?}: {e}")))?;
        Ok(self.real(parsed))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl TryFrom<u32> for Precision {
    type Error = Error;
    fn try_from(value: u32) -> Result<Self> {
        Precision::new(value)
    }
}

impl From<Precision> for u32 {
    fn from(p: Precision) -> u32 {
        p.0
    }
}

/// Precision (in decimal digits) carried by a value.
pub fn digits_of(bits: u32) -> u32 {
    ((bits.saturating_sub(GUARD_BITS)) as f64 / LOG2_10).floor() as u32
}

/// `|z|` as a real at the precision of `z`.
pub fn cabs(z: &BigComplex) -> BigReal {
    BigReal::with_val(z.prec().0, z.abs_ref())
}

pub fn to_c64(z: &BigComplex) -> Complex64 {
    Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

pub fn from_c64(prec: Precision, z: Complex64) -> BigComplex {
    prec.complex((z.re, z.im))
}

/// `log10 |x|`, robust for values far outside the f64 range.
pub fn log10_abs(x: &BigReal) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (mantissa, exp) = x.to_f64_exp();
    mantissa.abs().log10() + exp as f64 * std::f64::consts::LOG10_2
}

pub fn log10_cabs(z: &BigComplex) -> f64 {
    log10_abs(&cabs(z))
}

/// Natural log of `|z|` as f64, robust against underflow of `|z|` in f64.
pub fn ln_cabs(z: &BigComplex) -> f64 {
    log10_cabs(z) * std::f64::consts::LN_10
}

/// Decimal string with `digits` significant digits, stable across runs.
pub fn to_decimal(x: &BigReal, digits: usize) -> String {
    x.to_string_radix(10, Some(digits.max(1)))
}

/// Principal branch of `Φ(z) = z + sqrt(z-1) sqrt(z+1)`, `|Φ| ≥ 1`, `Φ(z) ~ 2z`.
///
/// The product of principal roots has its only cut on `[-1, 1]`, where the
/// upper-side boundary value is returned.
pub fn joukowski_inverse(z: &BigComplex) -> BigComplex {
    let p = z.prec().0;
    let a = BigComplex::with_val(p, z - 1u32).sqrt();
    let b = BigComplex::with_val(p, z + 1u32).sqrt();
    BigComplex::with_val(p, &a * &b) + z
}

/// `Zh(w) = (w + 1/w) / 2`.
pub fn joukowski(w: &BigComplex) -> BigComplex {
    let p = w.prec().0;
    let inv = BigComplex::with_val(p, w.recip_ref());
    (inv + w) / 2u32
}

/// f64 version of [`joukowski_inverse`].
pub fn joukowski_inverse_f64(z: Complex64) -> Complex64 {
    z + (z - 1.0).sqrt() * (z + 1.0).sqrt()
}

pub fn joukowski_f64(w: Complex64) -> Complex64 {
    (w + w.inv()) * 0.5
}
