use serde::{Deserialize, Serialize};

use super::{cabs, BigComplex, BigReal, Complex64, Precision};

/// Which complex plane a polynomial lives in: the original variable `z`
/// (around the interval `[-1, 1]`) or the transplanted variable `w` (around
/// the unit disk).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Plane {
    Z,
    W,
}

/// Coefficient basis. `Chebyshev` means `p(z) = Σ c_k T_k(z)` with no halving
/// of the constant term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Monomial,
    Chebyshev,
}

/// Polynomial with extended-precision complex coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<BigComplex>,
    plane: Plane,
    basis: Basis,
}

impl Poly {
    pub fn new(coeffs: Vec<BigComplex>, plane: Plane, basis: Basis) -> Self {
        assert!(!coeffs.is_empty(), "polynomial needs at least one coefficient");
        Poly { coeffs, plane, basis }
    }

    pub fn monomial(coeffs: Vec<BigComplex>, plane: Plane) -> Self {
        Self::new(coeffs, plane, Basis::Monomial)
    }

    pub fn chebyshev(coeffs: Vec<BigComplex>, plane: Plane) -> Self {
        Self::new(coeffs, plane, Basis::Chebyshev)
    }

    pub fn constant(value: BigComplex, plane: Plane) -> Self {
        Self::monomial(vec![value], plane)
    }

    /// Monic polynomial `Π (x - r)` in the monomial basis.
    pub fn from_roots(roots: &[BigComplex], plane: Plane, prec: Precision) -> Self {
        let mut coeffs = vec![prec.complex(1)];
        for r in roots {
            let mut next = vec![prec.czero(); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= BigComplex::with_val(prec.bits(), c * r);
            }
            coeffs = next;
        }
        Self::monomial(coeffs, plane)
    }

    pub fn coeffs(&self) -> &[BigComplex] {
        &self.coeffs
    }

    pub fn plane(&self) -> Plane {
        self.plane
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn prec_bits(&self) -> u32 {
        self.coeffs[0].prec().0
    }

    /// Nominal degree, `len - 1`. Call [`Poly::trimmed`] first for the true degree.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &BigComplex {
        self.coeffs.last().unwrap()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> BigReal {
        let mut m = BigReal::with_val(self.prec_bits(), 0);
        for c in &self.coeffs {
            let a = cabs(c);
            if a > m {
                m = a;
            }
        }
        m
    }

    /// Drops trailing coefficients with modulus `≤ tol · max|c_k|`.
    pub fn trimmed(&self, tol: &BigReal) -> Poly {
        let scale = self.max_abs();
        let cutoff = BigReal::with_val(self.prec_bits(), tol * &scale);
        let mut len = self.coeffs.len();
        while len > 1 && cabs(&self.coeffs[len - 1]) <= cutoff {
            len -= 1;
        }
        Poly::new(self.coeffs[..len].to_vec(), self.plane, self.basis)
    }

    pub fn eval(&self, z: &BigComplex) -> BigComplex {
        let p = self.prec_bits().max(z.prec().0);
        match self.basis {
            Basis::Monomial => {
                let mut acc = BigComplex::with_val(p, 0);
                for c in self.coeffs.iter().rev() {
                    acc *= z;
                    acc += c;
                }
                acc
            }
            Basis::Chebyshev => clenshaw(&self.coeffs, z, p),
        }
    }

    /// Evaluation on the real axis using only the real parts of the coefficients.
    pub fn eval_real(&self, x: &BigReal) -> BigReal {
        let p = self.prec_bits().max(x.prec());
        match self.basis {
            Basis::Monomial => {
                let mut acc = BigReal::with_val(p, 0);
                for c in self.coeffs.iter().rev() {
                    acc *= x;
                    acc += c.real();
                }
                acc
            }
            Basis::Chebyshev => {
                let two_x = BigReal::with_val(p, x * 2u32);
                let mut b1 = BigReal::with_val(p, 0);
                let mut b2 = BigReal::with_val(p, 0);
                for c in self.coeffs.iter().skip(1).rev() {
                    let mut b0 = BigReal::with_val(p, &two_x * &b1);
                    b0 -= &b2;
                    b0 += c.real();
                    b2 = std::mem::replace(&mut b1, b0);
                }
                let mut out = BigReal::with_val(p, x * &b1);
                out -= &b2;
                out += self.coeffs[0].real();
                out
            }
        }
    }

    /// `Σ |c_k| |z|^k` (monomial) or `Σ |c_k| |Φ(z)|^k` (Chebyshev): the scale
    /// against which a residual `|p(z)|` is judged. Both reduce to `Σ |c_k|` on
    /// the unit circle and on `[-1, 1]` respectively.
    pub fn abs_eval(&self, z: &BigComplex) -> BigReal {
        let p = self.prec_bits().max(z.prec().0);
        let mut total = BigReal::with_val(p, 0);
        match self.basis {
            Basis::Monomial => {
                let r = cabs(z);
                let mut power = BigReal::with_val(p, 1);
                for c in &self.coeffs {
                    total += BigReal::with_val(p, &cabs(c) * &power);
                    power *= &r;
                }
            }
            Basis::Chebyshev => {
                // |T_k(z)| ≤ ρ^k with ρ = |Φ(z)|, and ρ = 1 on [-1, 1].
                let mut rho = cabs(&super::joukowski_inverse(z));
                if rho < 1u32 {
                    rho.recip_mut();
                }
                let mut power = BigReal::with_val(p, 1);
                for c in &self.coeffs {
                    total += BigReal::with_val(p, &cabs(c) * &power);
                    power *= &rho;
                }
            }
        }
        total
    }

    pub fn derivative(&self) -> Poly {
        let p = self.prec_bits();
        let n = self.degree();
        if n == 0 {
            return Poly::new(vec![BigComplex::with_val(p, 0)], self.plane, self.basis);
        }
        let coeffs = match self.basis {
            Basis::Monomial => (1..=n)
                .map(|k| BigComplex::with_val(p, &self.coeffs[k] * k as u32))
                .collect(),
            Basis::Chebyshev => {
                // d_{k-1} = d_{k+1} + 2k c_k, then halve d_0.
                let mut d = vec![BigComplex::with_val(p, 0); n + 1];
                for k in (1..=n).rev() {
                    let mut v = BigComplex::with_val(p, &self.coeffs[k] * (2 * k) as u32);
                    if k + 1 <= n {
                        v += &d[k + 1];
                    }
                    d[k - 1] = v;
                }
                d[0] /= 2u32;
                d.truncate(n);
                d
            }
        };
        Poly::new(coeffs, self.plane, self.basis)
    }

    /// Re-expresses a Chebyshev-basis polynomial in the monomial basis.
    pub fn to_monomial(&self) -> Poly {
        if self.basis == Basis::Monomial {
            return self.clone();
        }
        let p = self.prec_bits();
        let n = self.degree();
        let mut out = vec![BigComplex::with_val(p, 0); n + 1];
        // Monomial coefficients of T_k via T_{k+1} = 2x T_k - T_{k-1}.
        let mut t_prev: Vec<BigComplex> = vec![BigComplex::with_val(p, 1)];
        let mut t_cur: Vec<BigComplex> = vec![BigComplex::with_val(p, 0), BigComplex::with_val(p, 1)];
        for (k, c) in self.coeffs.iter().enumerate() {
            let tk = if k == 0 { &t_prev } else { &t_cur };
            for (j, t) in tk.iter().enumerate() {
                out[j] += BigComplex::with_val(p, c * t);
            }
            if k >= 1 {
                let mut next = vec![BigComplex::with_val(p, 0); t_cur.len() + 1];
                for (j, t) in t_cur.iter().enumerate() {
                    next[j + 1] += BigComplex::with_val(p, t * 2u32);
                }
                for (j, t) in t_prev.iter().enumerate() {
                    next[j] -= t;
                }
                t_prev = std::mem::replace(&mut t_cur, next);
            }
        }
        Poly::monomial(out, self.plane)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.basis, Basis::Monomial, "product is implemented for the monomial basis");
        assert_eq!(other.basis, Basis::Monomial, "product is implemented for the monomial basis");
        let p = self.prec_bits().max(other.prec_bits());
        let mut out = vec![BigComplex::with_val(p, 0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += BigComplex::with_val(p, a * b);
            }
        }
        Poly::monomial(out, self.plane)
    }

    pub fn coeffs_f64(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(super::to_c64).collect()
    }
}

/// Clenshaw recurrence for `Σ c_k T_k(z)`.
pub(crate) fn clenshaw(coeffs: &[BigComplex], z: &BigComplex, p: u32) -> BigComplex {
    let two_z = BigComplex::with_val(p, z * 2u32);
    let mut b1 = BigComplex::with_val(p, 0);
    let mut b2 = BigComplex::with_val(p, 0);
    for c in coeffs.iter().skip(1).rev() {
        let mut b0 = BigComplex::with_val(p, &two_z * &b1);
        b0 -= &b2;
        b0 += c;
        b2 = std::mem::replace(&mut b1, b0);
    }
    let mut out = BigComplex::with_val(p, z * &b1);
    out -= &b2;
    out += &coeffs[0];
    out
}

/// Quotient of two polynomials in the same plane. `poles` caches the known
/// roots of the denominator (with multiplicity) when the constructor knows them.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    pub num: Poly,
    pub den: Poly,
    pub poles: Vec<BigComplex>,
}

impl RationalFunction {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert_eq!(num.plane(), den.plane(), "numerator and denominator planes differ");
        RationalFunction { num, den, poles: Vec::new() }
    }

    pub fn with_poles(num: Poly, den: Poly, poles: Vec<BigComplex>) -> Self {
        let mut r = Self::new(num, den);
        r.poles = poles;
        r
    }

    pub fn plane(&self) -> Plane {
        self.num.plane()
    }

    pub fn eval(&self, z: &BigComplex) -> BigComplex {
        self.num.eval(z) / self.den.eval(z)
    }

    pub fn eval_real(&self, x: &BigReal) -> BigReal {
        self.num.eval_real(x) / self.den.eval_real(x)
    }
}
