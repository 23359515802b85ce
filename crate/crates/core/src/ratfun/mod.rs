//! Exact polynomial and rational-function arithmetic over arbitrary-precision
//! rationals, with floating evaluation and root finding at the edges.

mod dd;
mod point;
mod poly;
mod rational;
mod resolvent;
mod roots;

pub use dd::{Dd, DdComplex};
pub use point::{ComplexPoint, ParsePointError};
pub use poly::Polynomial;
pub use rational::{ExtendedRational, RationalFunction};
pub use resolvent::{solve_resolvent, TransitionMatrix};
pub use roots::{residual_bound, roots, roots_complex, Root};

pub(crate) use poly::rational_to_f64;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RatFunError {
    #[error("division by the zero rational function")]
    DivisionByZero,
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("indeterminate evaluation at {0}: numerator and denominator both below tolerance")]
    Indeterminate(ComplexPoint),
    #[error("root finding did not converge (degree {degree})")]
    NoConvergence { degree: usize },
    #[error("roots of the zero polynomial are undefined")]
    ZeroPolynomial,
    #[error("invalid transition matrix: {0}")]
    InvalidMatrix(String),
}

/// Working precision for floating evaluation and root polishing.
///
/// `Extended` is double-double arithmetic (about 106 significant bits).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum Precision {
    #[default]
    Double,
    Extended,
}

impl Precision {
    /// Smallest supported precision with at least `bits` significand bits.
    pub fn from_bits(bits: u32) -> Self {
        if bits <= 53 {
            Precision::Double
        } else {
            Precision::Extended
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            Precision::Double => 53,
            Precision::Extended => 106,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn poly_arith(a: &Polynomial, b: &Polynomial, op: PolyOp) -> Polynomial {
    match op {
        PolyOp::Add => a + b,
        PolyOp::Sub => a - b,
        PolyOp::Mul => a * b,
    }
}

pub fn ratfun_arith(
    a: &RationalFunction,
    b: &RationalFunction,
    op: RatOp,
) -> Result<RationalFunction, RatFunError> {
    Ok(match op {
        RatOp::Add => a + b,
        RatOp::Sub => a - b,
        RatOp::Mul => a * b,
        RatOp::Div => a.checked_div(b)?,
    })
}
