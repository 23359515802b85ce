//! Transfer functions of a cell: the transition function d, the return
//! function f and the inner transition functions h, h̃.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cellmodel::{check_bounded_geometry, check_symmetry, CellError, CellSpec, FiniteGraph};
use crate::ratfun::{solve_resolvent, ComplexPoint, Precision, RatFunError, RationalFunction, TransitionMatrix};

/// Matching radius used when merging numerically computed pole sets.
pub const POLE_DEDUP_RADIUS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransferError {
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    RatFun(#[from] RatFunError),
    #[error("cell {0:?} does not have bounded geometry")]
    UnboundedGeometry(String),
    #[error("cell {0:?} is not doubly symmetric")]
    NotDoublySymmetric(String),
    #[error("{what} depends on the boundary choice ({first} vs {second}); inconsistent substitution data")]
    PairDependence { what: &'static str, first: String, second: String },
    #[error("fixed point check failed: {0}")]
    FixedPoint(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferSet {
    #[serde(serialize_with = "ser_ratfun")]
    pub d: RationalFunction,
    #[serde(serialize_with = "ser_ratfun")]
    pub f: RationalFunction,
    /// `h[(x, y)]` for interior `x` and any closure vertex `y`.
    #[serde(skip)]
    pub h: BTreeMap<(usize, usize), RationalFunction>,
    /// `h_tilde[(w, y)]` for boundary `w` and interior `y`.
    #[serde(skip)]
    pub h_tilde: BTreeMap<(usize, usize), RationalFunction>,
    pub poles_f: Vec<ComplexPoint>,
    pub poles_cell: Vec<ComplexPoint>,
    pub zeroes_f: Vec<ComplexPoint>,
    pub theta: usize,
    pub diam_boundary: usize,
}

fn ser_ratfun<S: serde::Serializer>(r: &RationalFunction, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl TransferSet {
    pub fn h(&self, x: usize, y: usize) -> Option<&RationalFunction> {
        self.h.get(&(x, y))
    }

    pub fn h_tilde(&self, w: usize, y: usize) -> Option<&RationalFunction> {
        self.h_tilde.get(&(w, y))
    }
}

fn cell_graph(spec: &CellSpec) -> FiniteGraph {
    let mut edges = Vec::new();
    for x in 0..spec.vertex_count() {
        for &y in spec.neighbours(x) {
            if x < y {
                edges.push((x, y));
            }
        }
    }
    FiniteGraph::from_edges(spec.vertex_names().to_vec(), &edges, spec.boundary().to_vec())
}

/// Walk on Ĉ absorbed at `absorbing`.
pub fn cell_transition(spec: &CellSpec, absorbing: &[usize]) -> TransitionMatrix {
    cell_graph(spec).transition_matrix(absorbing)
}

fn int(k: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

pub fn compute_transfer(spec: &CellSpec) -> Result<TransferSet, TransferError> {
    compute_transfer_with(spec, Precision::Double)
}

/// As [`compute_transfer`], locating poles and zeroes at the given precision.
pub fn compute_transfer_with(spec: &CellSpec, precision: Precision) -> Result<TransferSet, TransferError> {
    if !check_bounded_geometry(spec).bounded {
        return Err(TransferError::UnboundedGeometry(spec.name().to_string()));
    }
    if !check_symmetry(spec)?.doubly_symmetric {
        return Err(TransferError::NotDoublySymmetric(spec.name().to_string()));
    }
    compute_transfer_unchecked_with(spec, precision)
}

/// As [`compute_transfer`] without the geometry and automorphism checks; pair
/// independence is still verified.
pub fn compute_transfer_unchecked(spec: &CellSpec) -> Result<TransferSet, TransferError> {
    compute_transfer_unchecked_with(spec, Precision::Double)
}

pub fn compute_transfer_unchecked_with(spec: &CellSpec, precision: Precision) -> Result<TransferSet, TransferError> {
    let boundary = spec.boundary().to_vec();
    let theta1 = int(spec.theta() - 1);
    let name = |v: usize| spec.vertex_name(v).to_string();

    // one absorbing problem per boundary vertex v, absorbed on θC \ {v}
    let per_vertex: Vec<Result<Vec<RationalFunction>, RatFunError>> = boundary
        .par_iter()
        .map(|&v| {
            let absorbing: Vec<usize> = boundary.iter().copied().filter(|&b| b != v).collect();
            let q = cell_transition(spec, &absorbing);
            Ok(solve_resolvent(&q, &[v], &boundary)?.remove(0))
        })
        .collect();
    let mut f: Option<(usize, RationalFunction)> = None;
    let mut d: Option<((usize, usize), RationalFunction)> = None;
    for (i, row) in per_vertex.into_iter().enumerate() {
        let row = row?;
        let v = boundary[i];
        for (j, g) in row.into_iter().enumerate() {
            let w = boundary[j];
            if v == w {
                match &f {
                    None => f = Some((v, g)),
                    Some((v0, f0)) if *f0 != g => {
                        return Err(TransferError::PairDependence { what: "f", first: name(*v0), second: name(v) })
                    }
                    _ => {}
                }
            } else {
                let g = g.scale(&theta1);
                match &d {
                    None => d = Some(((v, w), g)),
                    Some(((a, b), d0)) if *d0 != g => {
                        return Err(TransferError::PairDependence {
                            what: "d",
                            first: format!("({}, {})", name(*a), name(*b)),
                            second: format!("({}, {})", name(v), name(w)),
                        })
                    }
                    _ => {}
                }
            }
        }
    }
    let (_, f) = f.expect("boundary is nonempty");
    let (_, d) = d.expect("theta is at least 2");

    let interior = spec.interior();
    let all: Vec<usize> = (0..spec.vertex_count()).collect();
    let q = cell_transition(spec, &boundary);
    let hm = if interior.is_empty() { Vec::new() } else { solve_resolvent(&q, &interior, &all)? };
    let mut h = BTreeMap::new();
    for (i, &x) in interior.iter().enumerate() {
        for &y in &all {
            h.insert((x, y), hm[i][y].clone());
        }
    }
    let mut h_tilde = BTreeMap::new();
    for &w in &boundary {
        for &y in &interior {
            let ratio = BigRational::new(BigInt::from(spec.degree(y)), BigInt::from(spec.degree(w)));
            h_tilde.insert((w, y), h[&(y, w)].scale(&ratio));
        }
    }

    let poles_f = point_set(f.poles(precision)?.into_iter().map(|r| r.value.into()).collect());
    let zeroes_f = point_set(f.zeros(precision)?.into_iter().map(|r| r.value.into()).collect());
    let mut dens: Vec<&crate::ratfun::Polynomial> = h.values().map(RationalFunction::denominator).collect();
    dens.sort_by_key(|p| p.to_string());
    dens.dedup();
    let mut pc = Vec::new();
    for p in dens {
        if p.degree().unwrap_or(0) > 0 {
            pc.extend(crate::ratfun::roots(p, precision)?.into_iter().map(|r| ComplexPoint::from(r.value)));
        }
    }
    let poles_cell = point_set(pc);

    Ok(TransferSet {
        d,
        f,
        h,
        h_tilde,
        poles_f,
        poles_cell,
        zeroes_f,
        theta: spec.theta(),
        diam_boundary: spec.diam_boundary(),
    })
}

/// Sorts and merges points closer than [`POLE_DEDUP_RADIUS`].
pub(crate) fn point_set(mut pts: Vec<ComplexPoint>) -> Vec<ComplexPoint> {
    pts.sort_by(|a, b| a.re().total_cmp(&b.re()).then(a.im().total_cmp(&b.im())));
    let mut out: Vec<ComplexPoint> = Vec::with_capacity(pts.len());
    for p in pts {
        if !out.iter().any(|q| close(q, &p, POLE_DEDUP_RADIUS)) {
            out.push(p);
        }
    }
    out
}

pub(crate) fn close(a: &ComplexPoint, b: &ComplexPoint, radius: f64) -> bool {
    match (a.finite(), b.finite()) {
        (Some(x), Some(y)) => (x - y).norm() <= radius * (1.0 + x.norm().max(y.norm())),
        (None, None) => true,
        _ => false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointReport {
    pub order_at_zero: usize,
    pub diam_boundary: usize,
    /// d(1) as an exact rational, `None` when 1 is a pole.
    pub d_at_one: Option<String>,
    pub d_prime_at_one: Option<String>,
    pub order_matches: bool,
    pub one_is_fixed: bool,
    pub repelling: bool,
}

impl FixedPointReport {
    pub fn passed(&self) -> bool {
        self.order_matches && self.one_is_fixed && self.repelling
    }

    pub fn require(&self) -> Result<(), TransferError> {
        if self.passed() {
            Ok(())
        } else {
            Err(TransferError::FixedPoint(format!(
                "ord0 d = {} (diam {}), d(1) = {:?}, d'(1) = {:?}",
                self.order_at_zero, self.diam_boundary, self.d_at_one, self.d_prime_at_one
            )))
        }
    }
}

/// Exact checks at the fixed points 0 and 1 of d.
pub fn check_fixed_points(t: &TransferSet) -> FixedPointReport {
    let one = BigRational::one();
    let order_at_zero = t.d.numerator().valuation().unwrap_or(0);
    let d1 = t.d.eval_rational(&one);
    let dp1 = t.d.derivative().eval_rational(&one);
    FixedPointReport {
        order_at_zero,
        diam_boundary: t.diam_boundary,
        order_matches: order_at_zero == t.diam_boundary && t.d.eval_rational(&BigRational::zero()) == Some(BigRational::zero()),
        one_is_fixed: d1.as_ref() == Some(&one),
        repelling: dp1.as_ref().is_some_and(|v| v > &int(2)),
        d_at_one: d1.map(|v| v.to_string()),
        d_prime_at_one: dp1.map(|v| v.to_string()),
    }
}

/// Every zero of f lies within `radius` of a pole of some h.
pub fn check_zeroes_lemma(t: &TransferSet, radius: f64) -> bool {
    t.zeroes_f.iter().all(|z| t.poles_cell.iter().any(|p| close(z, p, radius)))
}

/// First-return function to boundary vertex `v` with the rest of θC absorbing,
/// assembled from the inner transition functions: `z/deg v · Σ_{u~v} h(u, v)`.
pub fn first_return(spec: &CellSpec, t: &TransferSet, v: usize) -> RationalFunction {
    let step = RationalFunction::from_polynomial(crate::ratfun::Polynomial::monomial(
        BigRational::new(BigInt::one(), BigInt::from(spec.degree(v))),
        1,
    ));
    let sum = spec.neighbours(v).iter().fold(RationalFunction::zero(), |acc, &u| &acc + &t.h[&(u, v)]);
    &step * &sum
}

/// Checks `F̂(v,v) = 1 − 1/f` exactly for every boundary vertex.
pub fn first_passage_identity(spec: &CellSpec, t: &TransferSet) -> Result<bool, TransferError> {
    let rhs = &RationalFunction::one() - &t.f.recip()?;
    Ok(spec.boundary().iter().all(|&v| first_return(spec, t, v) == rhs))
}

/// Power-series coefficients of d and f are probabilities: nonnegative, and
/// for f the partial sums stay in [0, 1] up to `order`.
pub fn series_are_substochastic(t: &TransferSet, order: usize) -> bool {
    let (Some(ds), Some(fs)) = (t.d.series(order), t.f.series(order)) else {
        return false;
    };
    let one = BigRational::one();
    let d_ok = ds.iter().all(|c| !c.is_negative()) && ds.iter().fold(BigRational::zero(), |a, c| a + c) <= one;
    let f_ok = fs.iter().all(|c| !c.is_negative() && c <= &one);
    d_ok && f_ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellmodel::bundled;

    fn rf(n: &[i64], d: &[i64]) -> RationalFunction {
        RationalFunction::from_i64(n, d).unwrap()
    }

    #[test]
    fn line_transfer_functions() {
        let spec = bundled::line2();
        let t = compute_transfer(&spec).unwrap();
        assert_eq!(t.d, rf(&[0, 0, 1], &[2, 0, -1]));
        assert_eq!(t.f, rf(&[2], &[2, 0, -1]));
        let m = spec.vertex("m").unwrap();
        let b0 = spec.vertex("b0").unwrap();
        assert_eq!(t.h(m, b0).unwrap(), &rf(&[0, 1], &[2]));
        assert_eq!(t.h(m, m).unwrap(), &RationalFunction::one());
        assert!(t.poles_cell.is_empty());
        assert_eq!(t.poles_f.len(), 2);
        assert!(t.zeroes_f.is_empty());
    }

    #[test]
    fn sierpinski_and_vicsek_golden() {
        let t = compute_transfer(&bundled::sierpinski()).unwrap();
        assert_eq!(t.d, rf(&[0, 0, 1], &[4, -3]));
        // (z−2)(z+4) / ((z+2)(3z−4))
        assert_eq!(t.f, rf(&[-8, 2, 1], &[-8, 2, 3]));
        let t = compute_transfer(&bundled::vicsek()).unwrap();
        // z³ / ((3−2z)(z²−12z+12))
        assert_eq!(t.d, rf(&[0, 0, 0, 1], &[36, -60, 27, -2]));
        assert_eq!(t.diam_boundary, 3);
    }

    #[test]
    fn fixed_points_and_lemmas() {
        for spec in bundled::all() {
            let t = compute_transfer(&spec).unwrap();
            let r = check_fixed_points(&t);
            assert!(r.passed(), "{}: {r:?}", spec.name());
            assert!(check_zeroes_lemma(&t, 1e-8), "{}", spec.name());
            assert!(first_passage_identity(&spec, &t).unwrap(), "{}", spec.name());
            assert!(series_are_substochastic(&t, 30), "{}", spec.name());
        }
    }

    #[test]
    fn h_tilde_reversibility() {
        for spec in bundled::all() {
            let t = compute_transfer(&spec).unwrap();
            for (&(w, y), ht) in &t.h_tilde {
                let lhs = ht.scale(&int(spec.degree(w)));
                let rhs = t.h[&(y, w)].scale(&int(spec.degree(y)));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn derivative_at_one() {
        let expected = [("line2", 4), ("sierpinski", 5), ("vicsek", 15)];
        for (spec, (name, dp)) in bundled::all().iter().zip(expected) {
            let t = compute_transfer(spec).unwrap();
            assert_eq!(spec.name(), name);
            assert_eq!(check_fixed_points(&t).d_prime_at_one.unwrap(), dp.to_string());
        }
    }
}
