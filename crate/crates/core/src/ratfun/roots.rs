//! Aberth–Ehrlich simultaneous iteration with Newton polish, escalating to
//! double-double polish when the residual test fails.

use num_complex::Complex64;

use super::dd::{horner_ddc, Dd, DdComplex};
use super::poly::{horner_c, Polynomial};
use super::{Precision, RatFunError};

const MAX_ITER: usize = 2000;
const RESIDUAL_REL: f64 = 1e-10;
const SNAP_REL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
    /// The imaginary part was below the snapping tolerance and was set to zero.
    pub snapped: bool,
}

/// Residual tolerance `1e-10 · max|c| · max(1,|ρ|)^deg`.
pub fn residual_bound(coeffs: &[Complex64], rho: Complex64) -> f64 {
    let deg = coeffs.len().saturating_sub(1) as i32;
    let cmax = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    RESIDUAL_REL * cmax * rho.norm().max(1.0).powi(deg)
}

/// Roots of an exact polynomial, grouped by multiplicity via square-free decomposition.
pub fn roots(p: &Polynomial, precision: Precision) -> Result<Vec<Root>, RatFunError> {
    if p.is_zero() {
        return Err(RatFunError::ZeroPolynomial);
    }
    let mut out = Vec::new();
    for (factor, mult) in p.squarefree_decomposition() {
        let coeffs: Vec<Complex64> = factor.to_f64().into_iter().map(|c| Complex64::new(c, 0.0)).collect();
        let exact: Vec<DdComplex> =
            factor.coeffs().iter().map(|c| DdComplex::new(Dd::from_rational(c), Dd::ZERO)).collect();
        for mut r in solve(&coeffs, Some(&exact), precision)? {
            r.multiplicity = mult;
            out.push(r);
        }
    }
    sort_roots(&mut out);
    Ok(out)
}

/// Roots of a polynomial with floating complex coefficients (ascending order),
/// each reported with multiplicity one.
pub fn roots_complex(coeffs: &[Complex64], precision: Precision) -> Result<Vec<Root>, RatFunError> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|x| *x == Complex64::new(0.0, 0.0)) {
        c.pop();
    }
    if c.is_empty() {
        return Err(RatFunError::ZeroPolynomial);
    }
    let mut out = solve(&c, None, precision)?;
    sort_roots(&mut out);
    Ok(out)
}

fn sort_roots(rs: &mut [Root]) {
    rs.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
}

fn solve(coeffs: &[Complex64], exact: Option<&[DdComplex]>, precision: Precision) -> Result<Vec<Root>, RatFunError> {
    let deg = coeffs.len() - 1;
    let real_coeffs = coeffs.iter().all(|c| c.im == 0.0);
    // exact zero roots first
    let zeros = coeffs.iter().position(|c| *c != Complex64::new(0.0, 0.0)).unwrap_or(0);
    let reduced = &coeffs[zeros..];
    let mut values = vec![Complex64::new(0.0, 0.0); zeros];
    let found = aberth(reduced).ok_or(RatFunError::NoConvergence { degree: deg })?;
    let exact_reduced = exact.map(|e| &e[zeros..]);
    let dd_coeffs: Vec<DdComplex> = match exact_reduced {
        Some(e) => e.to_vec(),
        None => reduced.iter().map(|&c| DdComplex::from_c64(c)).collect(),
    };
    for z in found {
        let mut z = z;
        let needs_polish = precision == Precision::Extended || horner_c(reduced, z).norm() > residual_bound(reduced, z);
        if needs_polish {
            log::debug!("escalating root {z} of degree-{deg} polynomial to double-double polish");
            z = polish_dd(&dd_coeffs, z);
            let res = horner_ddc(&dd_coeffs, DdComplex::from_c64(z)).norm();
            if res > residual_bound(reduced, z) {
                return Err(RatFunError::NoConvergence { degree: deg });
            }
        }
        values.push(z);
    }
    Ok(values
        .into_iter()
        .map(|z| {
            let snap = real_coeffs && z.im != 0.0 && z.im.abs() < SNAP_REL * (1.0 + z.re.abs());
            if snap {
                log::debug!("snapping root {z} to the real axis");
            }
            Root {
                value: if snap { Complex64::new(z.re, 0.0) } else { z },
                multiplicity: 1,
                snapped: snap,
            }
        })
        .collect())
}

/// Newton correction p/p' computed stably: directly for |z| ≤ 1, through the
/// reversed polynomial for |z| > 1. The flag reports that p(z) is at the level
/// of its own rounding error.
fn newton_ratio(c: &[Complex64], z: Complex64) -> (Complex64, bool) {
    let n = c.len() - 1;
    let noise = 8.0 * f64::EPSILON;
    if z.norm() <= 1.0 {
        let r = z.norm();
        let mut p = c[n];
        let mut dp = Complex64::new(0.0, 0.0);
        let mut bound = c[n].norm();
        for k in (0..n).rev() {
            dp = dp * z + p;
            p = p * z + c[k];
            bound = bound * r + c[k].norm();
        }
        (p / dp, p.norm() <= noise * bound)
    } else {
        // p(z) = z^n r(u), u = 1/z, r(u) = Σ c_{n-k} u^k
        let u = z.inv();
        let ru = u.norm();
        let mut r = c[0];
        let mut dr = Complex64::new(0.0, 0.0);
        let mut bound = c[0].norm();
        for k in 1..=n {
            dr = dr * u + r;
            r = r * u + c[k];
            bound = bound * ru + c[k].norm();
        }
        let denom = r * (n as f64) - dr * u;
        (z * r / denom, r.norm() <= noise * bound)
    }
}

fn aberth(c: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = c.len() - 1;
    match n {
        0 => return Some(Vec::new()),
        1 => return Some(vec![-c[0] / c[1]]),
        2 => return Some(quadratic(c[0], c[1], c[2]).to_vec()),
        _ => {}
    }
    let radius = (c[0].norm() / c[n].norm()).powf(1.0 / n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];
    for _ in 0..MAX_ITER {
        let mut all = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let (ratio, at_noise) = newton_ratio(c, z[k]);
            if at_noise {
                done[k] = true;
                continue;
            }
            let sum: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if !w.re.is_finite() || !w.im.is_finite() {
                return None;
            }
            z[k] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * z[k].norm().max(f64::MIN_POSITIVE) {
                done[k] = true;
            } else {
                all = false;
            }
        }
        if all {
            for zk in &mut z {
                for _ in 0..2 {
                    let (ratio, at_noise) = newton_ratio(c, *zk);
                    if at_noise || !ratio.re.is_finite() || !ratio.im.is_finite() {
                        break;
                    }
                    *zk -= ratio;
                }
            }
            return Some(z);
        }
    }
    None
}

fn quadratic(c: Complex64, b: Complex64, a: Complex64) -> [Complex64; 2] {
    let disc = (b * b - a * c * 4.0).sqrt();
    let s = if (b + disc).norm() >= (b - disc).norm() { b + disc } else { b - disc };
    if s == Complex64::new(0.0, 0.0) {
        return [Complex64::new(0.0, 0.0); 2];
    }
    let q = -s / 2.0;
    [q / a, c / q]
}

fn polish_dd(c: &[DdComplex], z0: Complex64) -> Complex64 {
    let n = c.len() - 1;
    let mut z = DdComplex::from_c64(z0);
    for _ in 0..30 {
        let mut p = c[n];
        let mut dp = DdComplex::default();
        for k in (0..n).rev() {
            dp = dp * z + p;
            p = p * z + c[k];
        }
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z = z - step;
        if step.norm() <= 1e-30 * z.norm().max(1e-300) {
            break;
        }
    }
    z.to_c64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn roots_of_return_function_denominator() {
        let r = roots(&Polynomial::from_i64(&[2, 0, -1]), Precision::Double).unwrap();
        assert_eq!(r.len(), 2);
        let s = 2f64.sqrt();
        assert!(approx(r[0].value, Complex64::new(-s, 0.0), 1e-14));
        assert!(approx(r[1].value, Complex64::new(s, 0.0), 1e-14));
    }

    #[test]
    fn double_root_at_zero() {
        let r = roots(&Polynomial::from_i64(&[0, 0, 1]), Precision::Double).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
        assert_eq!(r[0].value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn preimages_of_sqrt2_under_line_map() {
        // z^2 = sqrt2 (2 - z^2)  <=>  (1 + sqrt2) z^2 - 2 sqrt2 = 0
        let s = 2f64.sqrt();
        let c = [Complex64::new(-2.0 * s, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0 + s, 0.0)];
        let r = roots_complex(&c, Precision::Double).unwrap();
        let expect = (2.0 * s / (1.0 + s)).sqrt();
        assert!((expect - 1.0824).abs() < 1e-4);
        assert!(approx(r[0].value, Complex64::new(-expect, 0.0), 1e-14));
        assert!(approx(r[1].value, Complex64::new(expect, 0.0), 1e-14));
    }

    #[test]
    fn wilkinson_like_high_degree() {
        // Π_{k=1}^{12} (z - k)
        let mut p = Polynomial::one();
        for k in 1..=12 {
            p = &p * &Polynomial::from_i64(&[-k, 1]);
        }
        let r = roots(&p, Precision::Extended).unwrap();
        assert_eq!(r.len(), 12);
        for (k, root) in r.iter().enumerate() {
            assert!(approx(root.value, Complex64::new((k + 1) as f64, 0.0), 1e-9), "{root:?}");
        }
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        assert_eq!(roots(&Polynomial::zero(), Precision::Double), Err(RatFunError::ZeroPolynomial));
    }
}
