use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComplexPoint {
    Finite(Complex64),
    Infinity,
}

impl ComplexPoint {
    pub fn new(re: f64, im: f64) -> Self {
        Self::from_complex(Complex64::new(re, im))
    }

    pub fn real(re: f64) -> Self {
        Self::new(re, 0.0)
    }

    /// Non-finite coordinates collapse to the point at infinity.
    pub fn from_complex(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            ComplexPoint::Finite(z)
        } else {
            ComplexPoint::Infinity
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ComplexPoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match self {
            ComplexPoint::Finite(z) => Some(*z),
            ComplexPoint::Infinity => None,
        }
    }

    pub fn abs(&self) -> f64 {
        match self {
            ComplexPoint::Finite(z) => z.norm(),
            ComplexPoint::Infinity => f64::INFINITY,
        }
    }

    pub fn re(&self) -> f64 {
        self.finite().map_or(f64::INFINITY, |z| z.re)
    }

    pub fn im(&self) -> f64 {
        self.finite().map_or(0.0, |z| z.im)
    }

    pub fn conj(&self) -> Self {
        match self {
            ComplexPoint::Finite(z) => ComplexPoint::Finite(z.conj()),
            ComplexPoint::Infinity => ComplexPoint::Infinity,
        }
    }

    /// Chordal distance on the unit sphere; convenient for comparing points near infinity.
    pub fn chordal_distance(&self, other: &Self) -> f64 {
        match (self, other) {
            (ComplexPoint::Infinity, ComplexPoint::Infinity) => 0.0,
            (ComplexPoint::Finite(a), ComplexPoint::Infinity)
            | (ComplexPoint::Infinity, ComplexPoint::Finite(a)) => {
                2.0 / (1.0 + a.norm_sqr()).sqrt()
            }
            (ComplexPoint::Finite(a), ComplexPoint::Finite(b)) => {
                2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt())
            }
        }
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        Self::from_complex(z)
    }
}

impl From<f64> for ComplexPoint {
    fn from(x: f64) -> Self {
        Self::real(x)
    }
}

impl fmt::Display for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexPoint::Infinity => write!(f, "inf"),
            ComplexPoint::Finite(z) if z.im == 0.0 => write!(f, "{}", z.re),
            ComplexPoint::Finite(z) => {
                if z.im < 0.0 {
                    write!(f, "{}-{}i", z.re, -z.im)
                } else {
                    write!(f, "{}+{}i", z.re, z.im)
                }
            }
        }
    }
}

impl serde::Serialize for ComplexPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse complex point from {0:?}")]
pub struct ParsePointError(pub String);

impl FromStr for ComplexPoint {
    type Err = ParsePointError;

    /// Accepts `inf`, `a`, `bi`, `a+bi`, `a-bi` (with optional `j` for `i`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParsePointError(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let lower = t.to_ascii_lowercase();
        if matches!(lower.as_str(), "inf" | "infinity" | "+inf" | "∞") {
            return Ok(ComplexPoint::Infinity);
        }
        if t.is_empty() {
            return Err(err());
        }
        let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
            let re: f64 = t.parse().map_err(|_| err())?;
            return if re.is_finite() { Ok(ComplexPoint::real(re)) } else { Err(err()) };
        };
        // split at the last sign that is not an exponent sign or leading sign
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re_part, im_part) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im_part {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse().map_err(|_| err())?,
        };
        let re: f64 = re_part.parse().map_err(|_| err())?;
        let z = ComplexPoint::new(re, im);
        if z.is_infinite() {
            return Err(err());
        }
        Ok(z)
    }
}
