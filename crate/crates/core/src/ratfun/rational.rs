use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::dd::{horner_dd, Dd, DdComplex};
use super::poly::{horner, Polynomial};
use super::roots::{roots, Root};
use super::{ComplexPoint, Precision, RatFunError};

/// Reduced quotient `N/D` with monic `D`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

/// Result of a composition: either a rational function or the constant ∞.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtendedRational {
    Finite(RationalFunction),
    Infinity,
}

impl ExtendedRational {
    pub fn finite(self) -> Option<RationalFunction> {
        match self {
            ExtendedRational::Finite(r) => Some(r),
            ExtendedRational::Infinity => None,
        }
    }

    /// Panics on the constant ∞; composition with a nonconstant inner function never produces it.
    pub fn unwrap_finite(self) -> RationalFunction {
        self.finite().expect("composition produced the constant infinity")
    }
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, RatFunError> {
        if den.is_zero() {
            return Err(RatFunError::ZeroDenominator);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() { (num, den) } else { (num.exact_div(&g), den.exact_div(&g)) };
        Self::normalized(num, den)
    }

    /// Makes the denominator monic; the caller guarantees coprimality.
    fn normalized(num: Polynomial, den: Polynomial) -> Self {
        let lc = den.leading().expect("nonzero denominator").clone();
        if lc.is_one() {
            Self { num, den }
        } else {
            let inv = lc.recip();
            Self { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn zero() -> Self {
        Self { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn one() -> Self {
        Self::from_polynomial(Polynomial::one())
    }

    pub fn identity() -> Self {
        Self::from_polynomial(Polynomial::x())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_polynomial(Polynomial::constant(c))
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        Self { num: p, den: Polynomial::one() }
    }

    /// Convenience constructor from integer coefficient lists.
    pub fn from_i64(num: &[i64], den: &[i64]) -> Result<Self, RatFunError> {
        Self::new(Polynomial::from_i64(num), Polynomial::from_i64(den))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    /// Numerator and denominator as coprime integer coefficient lists
    /// (ascending powers), scaled so the lowest nonzero denominator
    /// coefficient is positive.
    pub fn integer_form(&self) -> (Vec<BigInt>, Vec<BigInt>) {
        let all = self.num.coeffs().iter().chain(self.den.coeffs());
        let lcm = all.clone().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scale = |p: &Polynomial| -> Vec<BigInt> { p.coeffs().iter().map(|c| c.numer() * (&lcm / c.denom())).collect() };
        let (mut num, mut den) = (scale(&self.num), scale(&self.den));
        let content = num.iter().chain(&den).fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let negate = den.iter().find(|c| !c.is_zero()).is_some_and(Signed::is_negative);
        for c in num.iter_mut().chain(den.iter_mut()) {
            *c /= &content;
            if negate {
                *c = -&*c;
            }
        }
        if num.is_empty() {
            num.push(BigInt::zero());
        }
        (num, den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// Degree as a map of the sphere: max(deg N, deg D).
    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    pub fn recip(&self) -> Result<Self, RatFunError> {
        if self.is_zero() {
            return Err(RatFunError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, RatFunError> {
        Ok(self * &other.recip()?)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn pow(&self, k: u32) -> Self {
        Self { num: self.num.pow(k), den: self.den.pow(k) }
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::reduce(n, &self.den * &self.den)
    }

    /// Exact composition `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> ExtendedRational {
        if inner.is_constant() {
            let c = &inner.num.coeffs().first().cloned().unwrap_or_else(BigRational::zero);
            return match self.eval_rational(c) {
                Some(v) => ExtendedRational::Finite(Self::constant(v)),
                None => ExtendedRational::Infinity,
            };
        }
        // homogenize: q^m N(p/q) / q^m D(p/q) with m = deg self
        let m = self.degree();
        let (p, q) = (&inner.num, &inner.den);
        let mut p_pow = vec![Polynomial::one()];
        let mut q_pow = vec![Polynomial::one()];
        for k in 1..=m {
            p_pow.push(&p_pow[k - 1] * p);
            q_pow.push(&q_pow[k - 1] * q);
        }
        let homog = |outer: &Polynomial| {
            let mut acc = Polynomial::zero();
            for (k, c) in outer.coeffs().iter().enumerate() {
                if !c.is_zero() {
                    acc = &acc + &(&p_pow[k] * &q_pow[m - k]).scale(c);
                }
            }
            acc
        };
        let num = homog(&self.num);
        let den = homog(&self.den);
        ExtendedRational::Finite(Self::reduce(num, den))
    }

    /// `k`-fold iterate; `iterate(0)` is the identity.
    pub fn iterate(&self, k: usize) -> Self {
        let mut acc = Self::identity();
        for _ in 0..k {
            acc = self.compose(&acc).unwrap_finite();
        }
        acc
    }

    /// Exact value at a rational point; `None` at a pole.
    pub fn eval_rational(&self, z: &BigRational) -> Option<BigRational> {
        let d = self.den.eval_rational(z);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval_rational(z) / d)
    }

    /// Value at `z = ∞` by degree comparison.
    pub fn value_at_infinity(&self) -> ComplexPoint {
        let dn = self.num.degree();
        let dd = self.den.degree().unwrap_or(0);
        match dn {
            None => ComplexPoint::real(0.0),
            Some(dn) if dn > dd => ComplexPoint::Infinity,
            Some(dn) if dn < dd => ComplexPoint::real(0.0),
            Some(_) => {
                let v = self.num.leading().unwrap() / self.den.leading().unwrap();
                ComplexPoint::real(super::rational_to_f64(&v))
            }
        }
    }

    pub fn eval(&self, z: ComplexPoint, precision: Precision) -> Result<ComplexPoint, RatFunError> {
        let zc = match z {
            ComplexPoint::Infinity => return Ok(self.value_at_infinity()),
            ComplexPoint::Finite(zc) => zc,
        };
        if self.num.is_zero() {
            return Ok(ComplexPoint::real(0.0));
        }
        match precision {
            Precision::Double => self.eval_f64(zc),
            Precision::Extended => self.eval_dd(zc),
        }
    }

    /// Double precision evaluation at a finite point; `Indeterminate` is mapped to an error.
    pub fn eval_c64(&self, z: Complex64) -> Result<ComplexPoint, RatFunError> {
        self.eval(ComplexPoint::Finite(z), Precision::Double)
    }

    fn eval_f64(&self, z: Complex64) -> Result<ComplexPoint, RatFunError> {
        let nc = self.num.to_f64();
        let dc = self.den.to_f64();
        let (n, d, nb, db, shift) = if z.norm() <= 1.0 {
            let n = horner(&nc, z);
            let d = horner(&dc, z);
            (n, d, abs_bound(&nc, z.norm()), abs_bound(&dc, z.norm()), 0i64)
        } else {
            // N(z)/D(z) = z^(deg N - deg D) · Nrev(1/z) / Drev(1/z)
            let u = z.inv();
            let nr: Vec<f64> = nc.iter().rev().copied().collect();
            let dr: Vec<f64> = dc.iter().rev().copied().collect();
            let n = horner(&nr, u);
            let d = horner(&dr, u);
            let shift = nc.len() as i64 - dc.len() as i64;
            (n, d, abs_bound(&nr, u.norm()), abs_bound(&dr, u.norm()), shift)
        };
        let tol = 64.0 * f64::EPSILON;
        if n.norm() <= tol * nb && d.norm() <= tol * db {
            return Err(RatFunError::Indeterminate(ComplexPoint::Finite(z)));
        }
        if d == Complex64::zero() {
            return Ok(ComplexPoint::Infinity);
        }
        let v = n / d * z.powi(shift as i32);
        Ok(ComplexPoint::from_complex(v))
    }

    fn eval_dd(&self, z: Complex64) -> Result<ComplexPoint, RatFunError> {
        let nc: Vec<Dd> = self.num.coeffs().iter().map(Dd::from_rational).collect();
        let dc: Vec<Dd> = self.den.coeffs().iter().map(Dd::from_rational).collect();
        let zd = DdComplex::from_c64(z);
        let (n, d, nb, db, shift) = if z.norm() <= 1.0 {
            let nf: Vec<f64> = nc.iter().map(|c| c.to_f64()).collect();
            let df: Vec<f64> = dc.iter().map(|c| c.to_f64()).collect();
            (horner_dd(&nc, zd), horner_dd(&dc, zd), abs_bound(&nf, z.norm()), abs_bound(&df, z.norm()), 0i64)
        } else {
            let u = DdComplex::new(Dd::new(1.0), Dd::ZERO) / zd;
            let nr: Vec<Dd> = nc.iter().rev().copied().collect();
            let dr: Vec<Dd> = dc.iter().rev().copied().collect();
            let nf: Vec<f64> = nr.iter().map(|c| c.to_f64()).collect();
            let df: Vec<f64> = dr.iter().map(|c| c.to_f64()).collect();
            let shift = nc.len() as i64 - dc.len() as i64;
            let un = 1.0 / z.norm();
            (horner_dd(&nr, u), horner_dd(&dr, u), abs_bound(&nf, un), abs_bound(&df, un), shift)
        };
        let tol = 1e-30;
        if n.norm() <= tol * nb && d.norm() <= tol * db {
            return Err(RatFunError::Indeterminate(ComplexPoint::Finite(z)));
        }
        if d.re.hi == 0.0 && d.im.hi == 0.0 {
            return Ok(ComplexPoint::Infinity);
        }
        let mut v = n / d;
        let zpow = if shift >= 0 { zd } else { DdComplex::new(Dd::new(1.0), Dd::ZERO) / zd };
        for _ in 0..shift.unsigned_abs() {
            v = v * zpow;
        }
        Ok(ComplexPoint::from_complex(v.to_c64()))
    }

    /// First `order + 1` Taylor coefficients at 0, by the recurrence from the denominator.
    /// `None` when 0 is a pole.
    pub fn series(&self, order: usize) -> Option<Vec<BigRational>> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            return None;
        }
        let inv = d0.recip();
        let dcs = self.den.coeffs();
        let mut out: Vec<BigRational> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut acc = self.num.coeff(k);
            for j in 1..dcs.len().min(k + 1) {
                acc -= &dcs[j] * &out[k - j];
            }
            out.push(acc * &inv);
        }
        Some(out)
    }

    pub fn poles(&self, precision: Precision) -> Result<Vec<Root>, RatFunError> {
        roots(&self.den, precision)
    }

    pub fn zeros(&self, precision: Precision) -> Result<Vec<Root>, RatFunError> {
        if self.num.is_zero() {
            return Ok(Vec::new());
        }
        roots(&self.num, precision)
    }
}

/// Σ|c_k| r^k, the natural scale of Horner's rounding error.
fn abs_bound(coeffs: &[f64], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.abs())
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let g = self.den.gcd(&rhs.den);
        if g.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            if num.is_zero() {
                return RationalFunction::zero();
            }
            return RationalFunction::normalized(num, &self.den * &rhs.den);
        }
        let b1 = self.den.exact_div(&g);
        let d1 = rhs.den.exact_div(&g);
        let t = &(&self.num * &d1) + &(&rhs.num * &b1);
        if t.is_zero() {
            return RationalFunction::zero();
        }
        let g2 = t.gcd(&g);
        let (t, g) = if g2.is_one() { (t, g) } else { (t.exact_div(&g2), g.exact_div(&g2)) };
        RationalFunction::normalized(t, &(&b1 * &d1) * &g)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        let g1 = self.num.gcd(&rhs.den);
        let g2 = rhs.num.gcd(&self.den);
        let (a, d) = if g1.is_one() {
            (self.num.clone(), rhs.den.clone())
        } else {
            (self.num.exact_div(&g1), rhs.den.exact_div(&g1))
        };
        let (c, b) = if g2.is_one() {
            (rhs.num.clone(), self.den.clone())
        } else {
            (rhs.num.exact_div(&g2), self.den.exact_div(&g2))
        };
        RationalFunction::normalized(&a * &c, &b * &d)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}
