//! Exact Green functions on finite n-cells, used to cross-check the iterated
//! transfer functions, and a series check of the functional equation on X.

use std::collections::{BTreeSet, HashMap};

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cellmodel::{build_ncell, CellError, CellSpec, FiniteGraph, SelfSimilarGraph, VertexKey, VertexRefError};
use crate::ratfun::{solve_resolvent, RatFunError, RationalFunction};
use crate::transfer::{compute_transfer, TransferError, TransferSet};
use crate::walk::exact_distributions;

/// Default cap on the order of the functional-equation series check.
pub const SERIES_ORDER_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Cell(#[from] CellError),
    #[error(transparent)]
    RatFun(#[from] RatFunError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Vertex(#[from] VertexRefError),
    #[error("invalid absorbing walk problem: {0}")]
    InvalidProblem(String),
    #[error("series order {order} above the cap of {cap}")]
    OrderCap { order: usize, cap: usize },
}

#[derive(Debug, Clone)]
pub struct AbsorbingWalkProblem<'a> {
    pub graph: &'a FiniteGraph,
    pub absorbing: Vec<usize>,
    pub source: usize,
    pub target: usize,
}

impl AbsorbingWalkProblem<'_> {
    fn validate(&self) -> Result<(), OracleError> {
        let n = self.graph.vertex_count();
        if self.source >= n || self.target >= n {
            return Err(OracleError::InvalidProblem(format!(
                "source {} or target {} out of range for {n} vertices",
                self.source, self.target
            )));
        }
        if let Some(a) = self.absorbing.iter().find(|a| !self.graph.boundary().contains(a)) {
            return Err(OracleError::InvalidProblem(format!("absorbing vertex {a} is not on the boundary")));
        }
        Ok(())
    }
}

/// Exact entry `(I − zQ_B)^{-1}[source][target]`.
pub fn green_ncell(problem: &AbsorbingWalkProblem<'_>) -> Result<RationalFunction, OracleError> {
    problem.validate()?;
    let q = problem.graph.transition_matrix(&problem.absorbing);
    Ok(solve_resolvent(&q, &[problem.source], &[problem.target])?.remove(0).remove(0))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelCheck {
    pub n: usize,
    pub vertices: usize,
    pub transition: bool,
    pub return_product: bool,
    pub inner: bool,
    /// First failing comparison, if any.
    pub mismatch: Option<String>,
}

impl LevelCheck {
    pub fn passed(&self) -> bool {
        self.transition && self.return_product && self.inner
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecimationReport {
    pub spec: String,
    pub levels: Vec<LevelCheck>,
    /// Set when a level could not be built; later levels are skipped.
    pub stopped: Option<String>,
}

impl DecimationReport {
    pub fn passed(&self) -> bool {
        self.stopped.is_none() && self.levels.iter().all(LevelCheck::passed)
    }

    /// Largest n up to which every identity holds.
    pub fn largest_verified(&self) -> usize {
        self.levels.iter().take_while(|l| l.passed()).map(|l| l.n).last().unwrap_or(0)
    }
}

pub fn verify_decimation_identities(spec: &CellSpec, n_max: usize) -> Result<DecimationReport, OracleError> {
    let t = compute_transfer(spec)?;
    verify_with(spec, &t, n_max)
}

pub fn verify_with(spec: &CellSpec, t: &TransferSet, n_max: usize) -> Result<DecimationReport, OracleError> {
    let mut report = DecimationReport { spec: spec.name().to_string(), levels: Vec::new(), stopped: None };
    let mut d_pow = vec![RationalFunction::identity()];
    for n in 1..=n_max {
        d_pow.push(t.d.compose(&d_pow[n - 1]).unwrap_finite());
        let cell = match build_ncell(spec, n) {
            Ok(c) => c,
            Err(e @ CellError::SizeCap { .. }) => {
                report.stopped = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e.into()),
        };
        report.levels.push(check_level(spec, t, &cell.graph, n, &d_pow, |v| cell.skeleton(v))?);
    }
    Ok(report)
}

fn check_level(
    spec: &CellSpec,
    t: &TransferSet,
    graph: &FiniteGraph,
    n: usize,
    d_pow: &[RationalFunction],
    skeleton: impl Fn(usize) -> usize + Sync,
) -> Result<LevelCheck, OracleError> {
    let boundary = spec.boundary();
    let v = boundary[0];
    let gv = skeleton(v);
    let gb: Vec<usize> = boundary.iter().map(|&b| skeleton(b)).collect();
    let theta1 = BigRational::from_integer((spec.theta() - 1).into());
    let mut mismatch = None;
    let mut note = |m: String| {
        if mismatch.is_none() {
            mismatch = Some(m);
        }
    };

    let absorbing_a: Vec<usize> = gb.iter().copied().filter(|&b| b != gv).collect();
    let qa = graph.transition_matrix(&absorbing_a);
    let row = solve_resolvent(&qa, &[gv], &gb)?.remove(0);

    let mut transition = true;
    for (j, &w) in boundary.iter().enumerate() {
        if w == v {
            continue;
        }
        let lhs = row[j].scale(&theta1);
        if lhs != d_pow[n] {
            transition = false;
            note(format!("n={n}: (θ−1)·G_A({}, {}) = {lhs}, d^{n} = {}", spec.vertex_name(v), spec.vertex_name(w), d_pow[n]));
        }
    }

    let mut product = RationalFunction::one();
    for dk in &d_pow[..n] {
        product = &product * &t.f.compose(dk).unwrap_finite();
    }
    let return_product = row[0] == product;
    if !return_product {
        note(format!("n={n}: G_A(v, v) = {}, product of f∘d^k = {product}", row[0]));
    }

    // skeleton vertices are F^{n-1} ∩ closure; φ^{n-1} relabels them as vertices of Ĉ
    let qb = graph.transition_matrix(&gb);
    let interior = spec.interior();
    let rows: Vec<usize> = interior.iter().map(|&y| skeleton(y)).collect();
    let gbm = if rows.is_empty() { Vec::new() } else { solve_resolvent(&qb, &rows, &gb)? };
    let checks: Vec<Option<String>> = interior
        .par_iter()
        .enumerate()
        .flat_map(|(i, &y)| {
            let gbm = &gbm;
            boundary.par_iter().enumerate().map(move |(j, &w)| {
                let expected = t.h[&(y, w)].compose(&d_pow[n - 1]).unwrap_finite();
                (gbm[i][j] != expected).then(|| {
                    format!(
                        "n={n}: G_B({}, {}) = {}, h∘d^{} = {expected}",
                        spec.vertex_name(y),
                        spec.vertex_name(w),
                        gbm[i][j],
                        n - 1
                    )
                })
            })
        })
        .collect();
    // rows of absorbing vertices are unit vectors by construction, so only interior y are compared
    let mut inner = true;
    for m in checks.into_iter().flatten() {
        inner = false;
        note(m);
    }
    Ok(LevelCheck { n, vertices: graph.vertex_count(), transition, return_product, inner, mismatch })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesMismatch {
    pub v: String,
    pub w: String,
    pub coefficient: usize,
    pub direct: String,
    pub decomposed: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeriesReport {
    pub spec: String,
    pub order: usize,
    pub pairs: usize,
    pub mismatches: Vec<SeriesMismatch>,
}

impl SeriesReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Truncated product of two series.
fn series_mul(a: &[BigRational], b: &[BigRational], order: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); order + 1];
    for (i, x) in a.iter().enumerate().take(order + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(order + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `Σ c_j s^j` truncated at `order`, for a series `s` with `s(0) = 0`.
fn series_compose(c: &[BigRational], s: &[BigRational], order: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); order + 1];
    let mut power = vec![BigRational::zero(); order + 1];
    power[0] = BigRational::one();
    for cj in c {
        if power.iter().all(Zero::is_zero) {
            break;
        }
        for (o, p) in out.iter_mut().zip(&power) {
            *o += cj * p;
        }
        power = series_mul(&power, s, order);
    }
    out
}

/// F-vertices near the origin: those with frame level at most 1 within graph
/// distance `radius` of o.
pub fn sample_f_vertices(g: &SelfSimilarGraph, radius: usize) -> Result<Vec<VertexKey>, VertexRefError> {
    let o = g.origin();
    let mut seen = BTreeSet::from([o.clone()]);
    let mut frontier = vec![o];
    for _ in 0..radius {
        let mut next = Vec::new();
        for x in &frontier {
            for y in g.neighbours(x)?.iter() {
                if seen.insert(y.clone()) {
                    next.push(y.clone());
                }
            }
        }
        frontier = next;
    }
    Ok(seen.into_iter().filter(|k| g.in_f(k) && k.level <= 1).collect())
}

/// Compares the Taylor coefficients of `G(v,w|z)` and `G(φv,φw|d(z))·f(z)`
/// up to `order`, for all pairs of sampled F-vertices.
pub fn functional_equation_series_check(spec: &CellSpec, order: usize) -> Result<SeriesReport, OracleError> {
    let t = compute_transfer(spec)?;
    let g = SelfSimilarGraph::new(spec);
    let vertices = sample_f_vertices(&g, 2 * spec.diam_boundary())?;
    functional_equation_series_check_with(&g, &t, &vertices, order)
}

pub fn functional_equation_series_check_with(
    g: &SelfSimilarGraph,
    t: &TransferSet,
    vertices: &[VertexKey],
    order: usize,
) -> Result<SeriesReport, OracleError> {
    if order > SERIES_ORDER_CAP {
        return Err(OracleError::OrderCap { order, cap: SERIES_ORDER_CAP });
    }
    let d_series = t.d.series(order).expect("d is analytic at 0");
    let f_series = t.f.series(order).expect("f is analytic at 0");
    let shrink = order / t.diam_boundary.max(1);
    let per_source: Vec<Result<Vec<SeriesMismatch>, OracleError>> = vertices
        .par_iter()
        .map(|v| {
            let pv = g.phi(v).expect("sampled vertices lie in F");
            let direct = exact_distributions(g, v, order)?;
            let shrunk = exact_distributions(g, &pv, shrink)?;
            let mut out = Vec::new();
            for w in vertices {
                let pw = g.phi(w).expect("sampled vertices lie in F");
                let coeff = |rows: &[HashMap<VertexKey, BigRational>], y: &VertexKey| -> Vec<BigRational> {
                    rows.iter().map(|m| m.get(y).cloned().unwrap_or_else(BigRational::zero)).collect()
                };
                let lhs = coeff(&direct, w);
                let rhs = series_mul(&series_compose(&coeff(&shrunk, &pw), &d_series, order), &f_series, order);
                if let Some(k) = (0..=order).find(|&k| lhs[k] != rhs[k]) {
                    out.push(SeriesMismatch {
                        v: g.format_key(v),
                        w: g.format_key(w),
                        coefficient: k,
                        direct: lhs[k].to_string(),
                        decomposed: rhs[k].to_string(),
                    });
                }
            }
            Ok(out)
        })
        .collect();
    let mut mismatches = Vec::new();
    for r in per_source {
        mismatches.extend(r?);
    }
    Ok(SeriesReport {
        spec: g.spec().name().to_string(),
        order,
        pairs: vertices.len() * vertices.len(),
        mismatches,
    })
}
