//! Built-in test functions, each real on `E` with a documented branch.

use std::collections::BTreeMap;

use crate::chebseries::{FunctionClass, FunctionSpec, MarkovWeight};
use crate::error::{Error, Result};
use crate::numerics::{cabs, joukowski_inverse, BigComplex, BigReal, Complex64};

pub const DEFAULT_A: Complex64 = Complex64::new(0.5, 0.5);
pub const DEFAULT_B: Complex64 = Complex64::new(-0.4, 0.7);

fn big(z: &BigComplex, c: Complex64) -> BigComplex {
    BigComplex::with_val(z.prec().0, (c.re, c.im))
}

/// `sqrt((z-a)(z-ā))` continued from `E` with its cut on the arc
/// `F = Zh([1/Φ(a), 1/Φ(ā)])`, positive on `E`.
///
/// With `u = 1/Φ(z)` and `u_a = 1/Φ(a)`,
/// `(z-a)(z-ā) = h(u)² k(u)² / (2u|u_a|)²` where
/// `h(u)² = (u-u_a)(u-ū_a)` and `k(u)² = (1-u u_a)(1-u ū_a)`.
/// `h` takes its cut on the straight segment between `u_a` and `ū_a` and `k`
/// has no zero in the unit disk.
pub fn sqrt_arc_branch(z: &BigComplex, a: Complex64) -> BigComplex {
    let p = z.prec().0;
    let u = BigComplex::with_val(p, joukowski_inverse(z).recip_ref());
    let ua = BigComplex::with_val(p, joukowski_inverse(&big(z, a)).recip_ref());
    let ua_bar = BigComplex::with_val(p, ua.conj_ref());
    let x0 = BigReal::with_val(p, ua.real());
    let y0 = BigReal::with_val(p, ua.imag());
    let v = BigComplex::with_val(p, &u - &x0);
    let y2 = BigReal::with_val(p, y0.square_ref());
    let ratio = BigComplex::with_val(p, v.square_ref());
    let inner = ratio.recip() * y2 + 1u32;
    let h = BigComplex::with_val(p, &v * inner.sqrt());
    let k1 = (BigComplex::with_val(p, &u * &ua) * -1i32 + 1u32).sqrt();
    let k2 = (BigComplex::with_val(p, &u * &ua_bar) * -1i32 + 1u32).sqrt();
    let modulus = cabs(&ua);
    let denom = BigComplex::with_val(p, &u * modulus) * 2u32;
    h * k1 * k2 / denom
}

fn cbrt_principal(w: &BigComplex) -> BigComplex {
    if w.is_zero() {
        return w.clone();
    }
    let p = w.prec().0;
    (BigComplex::with_val(p, w.ln_ref()) / 3u32).exp()
}

/// `sqrt((z-b)(z-b̄))`.
pub fn sqrt2(b: Complex64) -> FunctionSpec {
    FunctionSpec::new(format!("sqrt2(b={})", fmt_c(b)), FunctionClass::TwoBranch { a: b }, move |z| {
        sqrt_arc_branch(z, b)
    })
    .with_branch_points(vec![b, b.conj()])
    .with_cut("arc Zh([1/Φ(b), 1/Φ(b̄)]) through the real axis beyond 1; positive on E")
}

/// `cbrt((z-b)(z-b̄)(z-a))` with real `a` outside `E`, real on `E`.
pub fn cbrt3(b: Complex64, a: f64) -> Result<FunctionSpec> {
    if a.abs() <= 1.0 {
        return Err(Error::InvalidInput(format!("cbrt3 needs |a| > 1, got {a}")));
    }
    Ok(FunctionSpec::new(
        format!("cbrt3(b={},a={a})", fmt_c(b)),
        FunctionClass::General,
        move |z| {
            let p = z.prec().0;
            let q = BigComplex::with_val(p, z - &big(z, b)) * BigComplex::with_val(p, z - &big(z, b.conj()));
            let first = cbrt_principal(&q);
            let lin = if a < -1.0 {
                cbrt_principal(&BigComplex::with_val(p, z - a))
            } else {
                -cbrt_principal(&BigComplex::with_val(p, a - z.clone()))
            };
            first * lin
        },
    )
    .with_branch_points(vec![b, b.conj(), Complex64::new(a, 0.0)])
    .with_cut("principal cube root of (z-b)(z-b̄) times the real cube root of z-a (cut along the real ray beyond a)"))
}

/// `-i·log((z-b)/(z-b̄))`, i.e. `-i(log(z-b) - log(z-b̄))` with principal
/// logarithms, whose cuts run horizontally left from `b` and `b̄`.
pub fn logratio(b: Complex64) -> FunctionSpec {
    FunctionSpec::new(format!("logratio(b={})", fmt_c(b)), FunctionClass::General, move |z| {
        let p = z.prec().0;
        let l1 = BigComplex::with_val(p, z - &big(z, b)).ln();
        let l2 = BigComplex::with_val(p, z - &big(z, b.conj())).ln();
        let diff = l1 - l2;
        // -i (x + iy) = y - i x
        BigComplex::with_val(p, (diff.imag(), -diff.real().clone()))
    })
    .with_branch_points(vec![b, b.conj()])
    .with_cut("horizontal rays to the left of b and b̄; scaled by -i so the values on E are real")
}

/// Markov function `∫_c^d dσ(t)/(z - t)`.
pub fn markov(c: f64, d: f64, weight: MarkovWeight) -> Result<FunctionSpec> {
    if !(c < d) || (c <= 1.0 && d >= -1.0) {
        return Err(Error::InvalidInput(format!("markov support [{c}, {d}] must be an interval disjoint from E")));
    }
    let spec = match weight {
        MarkovWeight::Lebesgue => FunctionSpec::new(
            format!("markov(c={c},d={d},weight=lebesgue)"),
            FunctionClass::Markov { c, d, weight },
            move |z| {
                let p = z.prec().0;
                let num = BigComplex::with_val(p, z - c);
                let den = BigComplex::with_val(p, z - d);
                (num / den).ln()
            },
        ),
        MarkovWeight::Arcsine => FunctionSpec::new(
            format!("markov(c={c},d={d},weight=arcsine)"),
            FunctionClass::Markov { c, d, weight },
            move |z| {
                let p = z.prec().0;
                let r1 = BigComplex::with_val(p, z - c).sqrt();
                let r2 = BigComplex::with_val(p, z - d).sqrt();
                (r1 * r2).recip()
            },
        ),
    };
    Ok(spec
        .with_branch_points(vec![Complex64::new(c, 0.0), Complex64::new(d, 0.0)])
        .with_cut(format!("segment [{c}, {d}]")))
}

/// `Σ_j sqrt((z-b_j)(z-b̄_j))`, each term with the arc cut of [`sqrt2`].
pub fn sqrtsum(points: &[Complex64]) -> FunctionSpec {
    let pts = points.to_vec();
    let id = format!(
        "sqrtsum({})",
        points.iter().map(|b| fmt_c(*b)).collect::<Vec<_>>().join(",")
    );
    let mut branch = Vec::new();
    for b in points {
        branch.push(*b);
        branch.push(b.conj());
    }
    FunctionSpec::new(id, FunctionClass::General, move |z| {
        let mut acc = BigComplex::with_val(z.prec().0, 0);
        for b in &pts {
            acc += sqrt_arc_branch(z, *b);
        }
        acc
    })
    .with_branch_points(branch)
    .with_cut("one arc per conjugate pair, as for sqrt2")
}

/// Sum of functions; singular data are merged.
pub fn sum(parts: Vec<FunctionSpec>) -> FunctionSpec {
    let id = parts.iter().map(|f| f.id.clone()).collect::<Vec<_>>().join("+");
    let mut branch = Vec::new();
    let mut poles = Vec::new();
    let mut cuts = Vec::new();
    for f in &parts {
        branch.extend(f.branch_points.iter().copied());
        poles.extend(f.poles.iter().copied());
        cuts.push(f.cut.clone());
    }
    FunctionSpec::new(id, FunctionClass::General, move |z| {
        let mut acc = BigComplex::with_val(z.prec().0, 0);
        for f in &parts {
            acc += f.eval(z);
        }
        acc
    })
    .with_branch_points(branch)
    .with_poles(poles)
    .with_cut(cuts.join("; "))
}

/// `Σ r_j / (z - p_j)`; real on `E` when poles and residues come in conjugate pairs.
pub fn rational(terms: &[(Complex64, Complex64)]) -> Result<FunctionSpec> {
    for (pole, _) in terms {
        if pole.im.abs() <= 1e-12 && pole.re.abs() <= 1.0 {
            return Err(Error::InvalidInput(format!("pole {pole} lies on E")));
        }
    }
    let t = terms.to_vec();
    let id = format!(
        "rational({})",
        terms
            .iter()
            .map(|(p, r)| format!("{}:{}", fmt_c(*p), fmt_c(*r)))
            .collect::<Vec<_>>()
            .join(",")
    );
    let poles: Vec<Complex64> = terms.iter().map(|(p, _)| *p).collect();
    Ok(FunctionSpec::new(id, FunctionClass::Rational { poles: poles.clone() }, move |z| {
        let mut acc = BigComplex::with_val(z.prec().0, 0);
        for (pole, res) in &t {
            let d = BigComplex::with_val(z.prec().0, z - &big(z, *pole));
            acc += big(z, *res) / d;
        }
        acc
    })
    .with_poles(poles))
}

pub fn power(k: u32) -> FunctionSpec {
    FunctionSpec::new(format!("power(k={k})"), FunctionClass::Entire, move |z| {
        BigComplex::with_val(z.prec().0, rug::ops::Pow::pow(z, k))
    })
}

/// Chebyshev polynomial `T_k`.
pub fn cheb_t(k: u32) -> FunctionSpec {
    FunctionSpec::new(format!("chebT(k={k})"), FunctionClass::Entire, move |z| {
        let p = z.prec().0;
        let mut t0 = BigComplex::with_val(p, 1);
        let mut t1 = z.clone();
        if k == 0 {
            return t0;
        }
        for _ in 1..k {
            let t2 = BigComplex::with_val(p, z * &t1) * 2u32 - &t0;
            t0 = std::mem::replace(&mut t1, t2);
        }
        t1
    })
}

pub fn cosine() -> FunctionSpec {
    FunctionSpec::new("cos", FunctionClass::Entire, |z| z.clone().cos())
}

/// Parses `"0.5+0.5i"`, `"-2"`, `"1.5i"`, `"3-4i"`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidInput(format!("cannot parse complex number {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some(body) = s.strip_suffix('i') {
        // Find the split between real and imaginary parts: the last sign not
        // preceded by an exponent marker and not at position 0.
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                split = Some(i);
                break;
            }
        }
        let (re, im) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            other => other,
        };
        let re: f64 = re.parse().map_err(|_| bad())?;
        let im: f64 = im.parse().map_err(|_| bad())?;
        Ok(Complex64::new(re, im))
    } else {
        Ok(Complex64::new(s.parse().map_err(|_| bad())?, 0.0))
    }
}

pub fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Names accepted by [`build`].
pub const REGISTRY: &[&str] = &[
    "sqrt2", "cbrt3", "logratio", "markov", "sqrtsum", "fig2", "fig3", "rational", "power", "chebT", "cos",
];

/// Builds a registry function from string parameters.
pub fn build(name: &str, params: &BTreeMap<String, String>) -> Result<FunctionSpec> {
    let known: &[&str] = match name {
        "sqrt2" | "logratio" => &["b"],
        "cbrt3" => &["b", "a"],
        "markov" => &["c", "d", "weight"],
        "sqrtsum" => &["b"],
        "fig2" => &["a", "b", "c"],
        "fig3" => &["a", "b", "c"],
        "rational" => &["terms"],
        "power" | "chebT" => &["k"],
        "cos" => &[],
        _ => {
            return Err(Error::InvalidInput(format!(
                "unknown function {name:?}; available: {}",
                REGISTRY.join(", ")
            )))
        }
    };
    if let Some(extra) = params.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(Error::InvalidInput(format!("{name} does not take parameter {extra:?}")));
    }
    let cplx = |key: &str, default: Complex64| -> Result<Complex64> {
        params.get(key).map(|v| parse_complex(v)).unwrap_or(Ok(default))
    };
    let real = |key: &str, default: f64| -> Result<f64> {
        match params.get(key) {
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("parameter {key}={v:?} is not a real number"))),
            None => Ok(default),
        }
    };
    let int = |key: &str, default: u32| -> Result<u32> {
        match params.get(key) {
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("parameter {key}={v:?} is not a nonnegative integer"))),
            None => Ok(default),
        }
    };
    match name {
        "sqrt2" => Ok(sqrt2(cplx("b", DEFAULT_A)?)),
        "cbrt3" => cbrt3(cplx("b", DEFAULT_B)?, real("a", -1.5)?),
        "logratio" => Ok(logratio(cplx("b", DEFAULT_B)?)),
        "markov" => {
            let weight = match params.get("weight").map(|s| s.as_str()).unwrap_or("lebesgue") {
                "lebesgue" => MarkovWeight::Lebesgue,
                "arcsine" => MarkovWeight::Arcsine,
                other => return Err(Error::InvalidInput(format!("unknown markov weight {other:?}"))),
            };
            markov(real("c", 2.0)?, real("d", 3.0)?, weight)
        }
        "sqrtsum" => {
            let pts = match params.get("b") {
                Some(list) => list.split(';').map(parse_complex).collect::<Result<Vec<_>>>()?,
                None => vec![DEFAULT_A, DEFAULT_B],
            };
            Ok(sqrtsum(&pts))
        }
        "fig2" => Ok(sum(vec![
            sqrt2(cplx("a", DEFAULT_A)?),
            cbrt3(cplx("b", DEFAULT_B)?, real("c", -1.5)?)?,
        ])),
        "fig3" => {
            let c = real("c", 0.8)?;
            Ok(sqrtsum(&[cplx("a", DEFAULT_A)?, cplx("b", DEFAULT_B)?, Complex64::new(0.0, c)]))
        }
        "rational" => {
            let terms = match params.get("terms") {
                Some(list) => list
                    .split(';')
                    .map(|t| {
                        let (p, r) = t
                            .split_once(':')
                            .ok_or_else(|| Error::InvalidInput(format!("rational term {t:?} must be pole:residue")))?;
                        Ok((parse_complex(p)?, parse_complex(r)?))
                    })
                    .collect::<Result<Vec<_>>>()?,
                None => vec![(Complex64::new(3.0, 0.0), Complex64::new(-1.0, 0.0)), (Complex64::new(-2.0, 0.0), Complex64::new(1.0, 0.0))],
            };
            rational(&terms)
        }
        "power" => Ok(power(int("k", 2)?)),
        "chebT" => Ok(cheb_t(int("k", 5)?)),
        "cos" => Ok(cosine()),
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{log10_abs, Precision};

    fn p() -> Precision {
        Precision::new(60).unwrap()
    }

    fn naive_sqrt(z: &BigComplex, a: Complex64) -> BigComplex {
        let q = BigComplex::with_val(z.prec().0, z - &big(z, a)) * BigComplex::with_val(z.prec().0, z - &big(z, a.conj()));
        q.sqrt()
    }

    #[test]
    fn arc_branch_agrees_with_principal_root_on_e_and_near_two() {
        let prec = p();
        for x in [-1.0, -0.3, 0.0, 0.6, 1.0, 1.5, 2.0] {
            let z = prec.complex((x, 0.0));
            let a = sqrt_arc_branch(&z, DEFAULT_A);
            let b = naive_sqrt(&z, DEFAULT_A);
            assert!(log10_abs(&cabs(&(a.clone() - b))) < -50.0, "x = {x}");
            assert!(*a.real() > 0);
        }
    }

    #[test]
    fn arc_branch_squares_to_the_quadratic() {
        let prec = p();
        for (x, y) in [(0.0, 1.5), (-2.0, 0.3), (3.0, -1.0), (0.2, 0.9)] {
            let z = prec.complex((x, y));
            let v = sqrt_arc_branch(&z, DEFAULT_A);
            let q = naive_sqrt(&z, DEFAULT_A).square();
            assert!(log10_abs(&cabs(&(v.square() - q))) < -50.0);
        }
    }

    #[test]
    fn arc_branch_grows_like_z() {
        let prec = p();
        let z = prec.complex((0.0, 1e6));
        let v = sqrt_arc_branch(&z, DEFAULT_A);
        let ratio = crate::numerics::to_c64(&(v / &z));
        assert!((ratio.norm() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn registry_functions_are_real_on_e() {
        let prec = p();
        let names = ["sqrt2", "cbrt3", "logratio", "markov", "sqrtsum", "fig2", "fig3", "rational", "power", "chebT", "cos"];
        for name in names {
            let f = build(name, &BTreeMap::new()).unwrap();
            f.validate().unwrap();
            for x in [-0.9, -0.1, 0.45, 0.99] {
                let v = f.eval(&prec.complex((x, 0.0)));
                assert!(log10_abs(&BigReal::with_val(prec.bits(), v.imag().abs_ref())) < -50.0, "{name} at {x}");
            }
        }
    }

    #[test]
    fn markov_lebesgue_matches_integral_sign() {
        let prec = p();
        let f = markov(2.0, 3.0, MarkovWeight::Lebesgue).unwrap();
        // ∫_2^3 dt / (0 - t) = -log(3/2)
        let v = f.eval(&prec.complex(0)).real().to_f64();
        assert!((v + 1.5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.5+0.5i").unwrap(), Complex64::new(0.5, 0.5));
        assert_eq!(parse_complex("-0.4+0.7i").unwrap(), Complex64::new(-0.4, 0.7));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("3").unwrap(), Complex64::new(3.0, 0.0));
        assert_eq!(parse_complex("1e-3-2e+1i").unwrap(), Complex64::new(1e-3, -20.0));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn unknown_parameter_is_rejected() {
        let mut params = BTreeMap::new();
        params.insert("q".to_string(), "1".to_string());
        assert!(build("sqrt2", &params).is_err());
    }
}
