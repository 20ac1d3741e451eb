use super::{cabs, BigComplex, BigReal, Precision};
use crate::error::{Error, Result};

/// Solution of a dense system together with the numerical rank observed
/// during elimination.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub x: Vec<BigComplex>,
    pub rank: usize,
}

/// Solves `A x = b` by Gaussian elimination with full pivoting.
///
/// A pivot is considered zero when it falls below `10^(-digits/2)` times the
/// largest of the first pivot and `reference_scale` (if given). Passing a
/// reference scale lets callers detect a matrix that is uniformly negligible,
/// e.g. a Hankel block built from vanishing series coefficients.
pub fn solve_linear(
    a: &[Vec<BigComplex>],
    b: &[BigComplex],
    prec: Precision,
    reference_scale: Option<&BigReal>,
) -> Result<LinearSolution> {
    let n = a.len();
    if b.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInput(format!(
            "expected a square system of size {n}, got right-hand side of length {}",
            b.len()
        )));
    }
    let bits = prec.bits();
    let mut m: Vec<Vec<BigComplex>> = a
        .iter()
        .map(|row| row.iter().map(|v| BigComplex::with_val(bits, v)).collect())
        .collect();
    let mut rhs: Vec<BigComplex> = b.iter().map(|v| BigComplex::with_val(bits, v)).collect();
    let mut col_perm: Vec<usize> = (0..n).collect();

    let tol = prec.rank_tol();
    let mut threshold: Option<BigReal> = None;

    for k in 0..n {
        let (mut pr, mut pc) = (k, k);
        let mut best = BigReal::with_val(bits, -1);
        for (i, row) in m.iter().enumerate().skip(k) {
            for (j, v) in row.iter().enumerate().skip(k) {
                let mag = cabs(v);
                if mag > best {
                    best = mag;
                    pr = i;
                    pc = j;
                }
            }
        }
        let limit = threshold.get_or_insert_with(|| {
            let mut scale = best.clone();
            if let Some(r) = reference_scale {
                if *r > scale {
                    scale = BigReal::with_val(bits, r);
                }
            }
            BigReal::with_val(bits, &scale * &tol)
        });
        if best <= *limit || best.is_zero() {
            return Err(Error::RankDeficient { rank: k });
        }
        m.swap(k, pr);
        rhs.swap(k, pr);
        if pc != k {
            for row in m.iter_mut() {
                row.swap(k, pc);
            }
            col_perm.swap(k, pc);
        }

        let pivot_inv = BigComplex::with_val(bits, m[k][k].recip_ref());
        let (upper, lower) = m.split_at_mut(k + 1);
        let pivot_row = &upper[k];
        let pivot_rhs = rhs[k].clone();
        for (off, row) in lower.iter_mut().enumerate() {
            let factor = BigComplex::with_val(bits, &row[k] * &pivot_inv);
            if factor.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let t = BigComplex::with_val(bits, &factor * &pivot_row[j]);
                row[j] -= t;
            }
            row[k] = BigComplex::with_val(bits, 0);
            let t = BigComplex::with_val(bits, &factor * &pivot_rhs);
            rhs[k + 1 + off] -= t;
        }
    }

    let mut y = vec![BigComplex::with_val(bits, 0); n];
    for i in (0..n).rev() {
        let mut acc = rhs[i].clone();
        for j in i + 1..n {
            acc -= BigComplex::with_val(bits, &m[i][j] * &y[j]);
        }
        y[i] = acc / &m[i][i];
    }
    let mut x = vec![BigComplex::with_val(bits, 0); n];
    for (k, &c) in col_perm.iter().enumerate() {
        x[c] = y[k].clone();
    }
    Ok(LinearSolution { x, rank: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::log10_cabs;

    #[test]
    fn identity_returns_rhs() {
        let p = Precision::new(50).unwrap();
        let a: Vec<Vec<BigComplex>> = (0..3)
            .map(|i| (0..3).map(|j| p.complex(u32::from(i == j))).collect())
            .collect();
        let b = vec![p.complex(1), p.complex((2, -1)), p.complex(-3)];
        let sol = solve_linear(&a, &b, p, None).unwrap();
        assert_eq!(sol.rank, 3);
        for (x, y) in sol.x.iter().zip(&b) {
            assert!(log10_cabs(&(x.clone() - y)) < -45.0);
        }
    }

    #[test]
    fn ones_matrix_has_rank_one() {
        let p = Precision::new(50).unwrap();
        let a = vec![vec![p.complex(1); 3]; 3];
        let b = vec![p.complex(1); 3];
        assert_eq!(solve_linear(&a, &b, p, None).unwrap_err(), Error::RankDeficient { rank: 1 });
    }

    #[test]
    fn geometric_hankel_by_hand() {
        // [1/1] of 1 + w/2 + w^2/4: c_1 q_1 = -c_2 gives q_1 = -1/2.
        let p = Precision::new(50).unwrap();
        let a = vec![vec![p.complex(0.5)]];
        let b = vec![p.complex(-0.25)];
        let sol = solve_linear(&a, &b, p, None).unwrap();
        assert!(log10_cabs(&(sol.x[0].clone() + 0.5)) < -45.0);
    }
}
