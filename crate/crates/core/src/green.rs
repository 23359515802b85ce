//! Green functions on X, evaluated anywhere in the basin of 0 of d by
//! stripping endpoints to F, contracting with φ and substituting z → d(z)
//! until the variable is small enough for the power series.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::cellmodel::{CellSpec, SelfSimilarGraph, VertexKey, VertexRef, VertexRefError};
use crate::ratfun::{ComplexPoint, Precision, RatFunError, RationalFunction};
use crate::transfer::{close, TransferSet};
use crate::walk::{exact_series, float_distributions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GreenError {
    #[error(transparent)]
    Vertex(#[from] VertexRefError),
    #[error(transparent)]
    RatFun(#[from] RatFunError),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("forward orbit of {z} did not reach the base radius after {iterations} iterations (undecided)")]
    NotInBasin { z: ComplexPoint, iterations: usize },
    #[error("pole hit at continuation level {level} (d^k(z) = {at}); {z} is a candidate point of the exceptional set")]
    PoleHit { z: ComplexPoint, at: ComplexPoint, level: usize },
    #[error("accuracy {target:e} not reachable with {cap} series terms (bound {bound:e})")]
    AccuracyUnreachable { target: f64, cap: usize, bound: f64 },
    #[error("vertex {0} is not in F")]
    NotInF(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreenQuery {
    pub x: VertexRef,
    pub y: VertexRef,
    pub z: ComplexPoint,
    pub target_accuracy: f64,
    pub base_radius: f64,
    pub series_cap: usize,
    pub max_iter: usize,
}

impl GreenQuery {
    pub fn new(x: VertexRef, y: VertexRef, z: ComplexPoint) -> Self {
        Self { x, y, z, target_accuracy: 1e-10, base_radius: 0.5, series_cap: 200, max_iter: 200 }
    }

    pub fn with_accuracy(mut self, acc: f64) -> Self {
        self.target_accuracy = acc;
        self
    }

    pub fn with_base_radius(mut self, r: f64) -> Self {
        self.base_radius = r;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenValue {
    #[serde(serialize_with = "ser_c64")]
    pub value: Complex64,
    /// Series truncation bound plus an estimate of the rounding error.
    pub error_bound: f64,
    /// Number n of substitutions z → d(z) used.
    pub depth: usize,
    /// Number of series terms at the base point.
    pub terms: usize,
    /// Number of base Green functions summed.
    pub pairs: usize,
}

fn ser_c64<S: serde::Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&ComplexPoint::Finite(*z))
}

/// Exact Taylor coefficients `p^(k)(x, y)`, `k <= order`.
pub fn base_green_series(g: &SelfSimilarGraph, x: &VertexRef, y: &VertexRef, order: usize) -> Result<Vec<BigRational>, GreenError> {
    let (x, y) = (x.resolve(g)?, y.resolve(g)?);
    Ok(exact_series(g, &x, &y, order)?)
}

fn value_of(r: &RationalFunction, z: Complex64, z0: Complex64, level: usize) -> Result<Complex64, GreenError> {
    match r.eval_c64(z)? {
        ComplexPoint::Finite(v) => Ok(v),
        ComplexPoint::Infinity => Err(GreenError::PoleHit { z: z0.into(), at: z.into(), level }),
    }
}

/// Inner transition functions evaluated at one point.
struct LevelValues {
    h: BTreeMap<(usize, usize), Complex64>,
    f: Complex64,
}

fn level_values(t: &TransferSet, z: Complex64, z0: Complex64, level: usize) -> Result<LevelValues, GreenError> {
    let mut h = BTreeMap::new();
    for (&k, r) in &t.h {
        h.insert(k, value_of(r, z, z0, level)?);
    }
    Ok(LevelValues { h, f: value_of(&t.f, z, z0, level)? })
}

/// Relative distance below which d^k(z) counts as hitting a pole.
const POLE_RADIUS: f64 = 1e-12;

type Combination = BTreeMap<(VertexKey, VertexKey), Complex64>;

/// Rewrites every pair as a combination of pairs in F × F. Returns the
/// Kronecker contribution separately.
fn strip_to_f(
    g: &SelfSimilarGraph,
    spec: &CellSpec,
    comb: &Combination,
    vals: &LevelValues,
) -> Result<(Combination, Complex64), GreenError> {
    let mut out = Combination::new();
    let mut kron = Complex64::new(0.0, 0.0);
    for ((a, b), &c) in comb {
        let left: Vec<(VertexKey, Complex64)> = match g.cell_of(a) {
            None => vec![(a.clone(), Complex64::new(1.0, 0.0))],
            Some(cell) => spec
                .boundary()
                .iter()
                .map(|&v| (g.cell_vertex(&cell, v), vals.h[&(a.local, v)]))
                .collect(),
        };
        let right: Vec<(VertexKey, Complex64)> = match g.cell_of(b) {
            None => vec![(b.clone(), Complex64::new(1.0, 0.0))],
            Some(cell) => {
                let mut r = Vec::with_capacity(spec.theta());
                for &w in spec.boundary() {
                    let wk = g.cell_vertex(&cell, w);
                    // entering the cell from w: one step out of deg_X w, then absorbed inside
                    let ratio = spec.degree(b.local) as f64 / g.degree(&wk)? as f64;
                    r.push((wk, vals.h[&(b.local, w)] * ratio));
                }
                r
            }
        };
        if let (Some(ca), Some(cb)) = (g.cell_of(a), g.cell_of(b)) {
            if ca == cb {
                kron += c * vals.h[&(a.local, b.local)];
            }
        }
        for (v, alpha) in &left {
            for (w, beta) in &right {
                *out.entry((v.clone(), w.clone())).or_insert(Complex64::new(0.0, 0.0)) += c * alpha * beta;
            }
        }
    }
    out.retain(|_, c| *c != Complex64::new(0.0, 0.0));
    Ok((out, kron))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenOptions {
    pub target_accuracy: f64,
    pub base_radius: f64,
    pub series_cap: usize,
    pub max_iter: usize,
}

impl Default for GreenOptions {
    fn default() -> Self {
        Self { target_accuracy: 1e-10, base_radius: 0.5, series_cap: 200, max_iter: 200 }
    }
}

pub fn evaluate_green(g: &SelfSimilarGraph, t: &TransferSet, q: &GreenQuery) -> Result<GreenValue, GreenError> {
    let x = q.x.resolve(g)?;
    let y = q.y.resolve(g)?;
    let opts = GreenOptions {
        target_accuracy: q.target_accuracy,
        base_radius: q.base_radius,
        series_cap: q.series_cap,
        max_iter: q.max_iter,
    };
    evaluate_green_keys(g, t, &x, &y, q.z, &opts)
}

pub fn evaluate_green_keys(
    g: &SelfSimilarGraph,
    t: &TransferSet,
    x: &VertexKey,
    y: &VertexKey,
    z: ComplexPoint,
    opts: &GreenOptions,
) -> Result<GreenValue, GreenError> {
    if !(opts.target_accuracy > 0.0) {
        return Err(GreenError::InvalidQuery(format!("target accuracy {} must be positive", opts.target_accuracy)));
    }
    if !(opts.base_radius > 0.0 && opts.base_radius < 1.0) {
        return Err(GreenError::InvalidQuery(format!("base radius {} must lie in (0, 1)", opts.base_radius)));
    }
    let Some(z0) = z.finite() else {
        return Err(GreenError::InvalidQuery("z must be finite".into()));
    };
    let spec = g.spec();
    let mut singular: Vec<ComplexPoint> = t.poles_f.iter().chain(&t.poles_cell).copied().collect();
    singular.extend(t.d.poles(Precision::Double)?.into_iter().map(|r| ComplexPoint::Finite(r.value)));
    let mut comb = Combination::from([((x.clone(), y.clone()), Complex64::new(1.0, 0.0))]);
    let mut prefactor = Complex64::new(1.0, 0.0);
    let mut constant = Complex64::new(0.0, 0.0);
    // running Σ of magnitudes entering the result, for the rounding estimate
    let mut magnitude = 0.0;
    let mut zk = z0;
    let mut level = 0;
    while zk.norm() > opts.base_radius {
        if level >= opts.max_iter {
            return Err(GreenError::NotInBasin { z, iterations: level });
        }
        if let Some(p) = singular.iter().find(|p| close(p, &ComplexPoint::Finite(zk), POLE_RADIUS)) {
            return Err(GreenError::PoleHit { z, at: *p, level });
        }
        let vals = level_values(t, zk, z0, level)?;
        let (stripped, kron) = strip_to_f(g, spec, &comb, &vals)?;
        constant += prefactor * kron;
        magnitude += (prefactor * kron).norm();
        prefactor *= vals.f;
        let mut next = Combination::new();
        for ((a, b), c) in stripped {
            let key = (g.phi(&a).expect("stripped to F"), g.phi(&b).expect("stripped to F"));
            *next.entry(key).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        comb = next;
        zk = match t.d.eval_c64(zk)? {
            ComplexPoint::Finite(v) => v,
            ComplexPoint::Infinity => {
                return Err(GreenError::PoleHit { z, at: ComplexPoint::Finite(zk), level });
            }
        };
        level += 1;
    }

    // base series: 0 ≤ p^(k) ≤ 1, so the tail after N terms is at most |w|^{N+1}/(1−|w|)
    let w = zk;
    let r = w.norm();
    let weight: f64 = prefactor.norm() * comb.values().map(|c| c.norm()).sum::<f64>();
    let tail = |n: usize| weight * r.powi(n as i32 + 1) / (1.0 - r);
    let mut n = 0;
    while tail(n) > opts.target_accuracy / 2.0 && n < opts.series_cap {
        n += 1;
    }
    let truncation = tail(n);
    if truncation > opts.target_accuracy {
        return Err(GreenError::AccuracyUnreachable { target: opts.target_accuracy, cap: opts.series_cap, bound: truncation });
    }
    let mut by_source: BTreeMap<&VertexKey, Vec<(&VertexKey, Complex64)>> = BTreeMap::new();
    for ((a, b), c) in &comb {
        by_source.entry(a).or_default().push((b, *c));
    }
    let sources: Vec<(&VertexKey, Vec<(&VertexKey, Complex64)>)> = by_source.into_iter().collect();
    let partial: Vec<Result<Complex64, VertexRefError>> = sources
        .par_iter()
        .map(|(a, targets)| {
            let dist = float_distributions(g, a, n)?;
            let mut acc = Complex64::new(0.0, 0.0);
            for (b, c) in targets {
                // Horner in w over the coefficients p^(k)(a, b)
                let mut s = Complex64::new(0.0, 0.0);
                for row in dist.iter().rev() {
                    s = s * w + row.get(*b).copied().unwrap_or(0.0);
                }
                acc += c * s;
            }
            Ok(acc)
        })
        .collect();
    let mut base = Complex64::new(0.0, 0.0);
    for p in partial {
        base += p?;
    }
    let value = constant + prefactor * base;
    magnitude += weight / (1.0 - r);
    let rounding = 64.0 * f64::EPSILON * (level + n + 1) as f64 * magnitude;
    Ok(GreenValue { value, error_bound: truncation + rounding, depth: level, terms: n + 1, pairs: comb.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalResidual {
    #[serde(serialize_with = "ser_c64")]
    pub lhs: Complex64,
    #[serde(serialize_with = "ser_c64")]
    pub rhs: Complex64,
    pub residual: f64,
    /// Sum of the error bounds of both sides.
    pub bound: f64,
}

impl FunctionalResidual {
    pub fn within_bound(&self) -> bool {
        self.residual <= self.bound
    }
}

/// `|G(v,w|z) − G(φv,φw|d(z))·f(z)|` with both sides evaluated independently.
pub fn check_functional_equation_numeric(
    g: &SelfSimilarGraph,
    t: &TransferSet,
    v: &VertexRef,
    w: &VertexRef,
    z: ComplexPoint,
    opts: &GreenOptions,
) -> Result<FunctionalResidual, GreenError> {
    let (vk, wk) = (v.resolve(g)?, w.resolve(g)?);
    let pv = g.phi(&vk).ok_or_else(|| GreenError::NotInF(v.to_string()))?;
    let pw = g.phi(&wk).ok_or_else(|| GreenError::NotInF(w.to_string()))?;
    let Some(z0) = z.finite() else {
        return Err(GreenError::InvalidQuery("z must be finite".into()));
    };
    let lhs = evaluate_green_keys(g, t, &vk, &wk, z, opts)?;
    let dz = t.d.eval_c64(z0)?;
    let f = value_of(&t.f, z0, z0, 0)?;
    let inner = evaluate_green_keys(g, t, &pv, &pw, dz, opts)?;
    let rhs = inner.value * f;
    Ok(FunctionalResidual {
        lhs: lhs.value,
        rhs,
        residual: (lhs.value - rhs).norm(),
        bound: lhs.error_bound + inner.error_bound * f.norm(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSample {
    pub k: usize,
    pub r: f64,
    pub value: f64,
    pub error_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityReport {
    pub samples: Vec<ProbeSample>,
    /// G(x,y|r) strictly increasing along the samples.
    pub monotone: bool,
    /// G grows beyond any bound suggested by the samples (last value ≫ first).
    pub diverging: bool,
    /// Least-squares slope of log G against log(1 − r) over the last half of the samples.
    pub growth_exponent: f64,
    /// Local slopes between consecutive samples.
    pub local_slopes: Vec<f64>,
    /// True when the slope is within 0.05 of a negative integer (a pole would give −1, −2, …).
    pub pole_like: bool,
    /// First-passage generating function F(x,y|r) at the last sample.
    pub first_passage: f64,
}

/// Probes G(x,y|r) for r = 1 − 2^{−k}, k = 1..=k_max.
pub fn singularity_probe(
    g: &SelfSimilarGraph,
    t: &TransferSet,
    x: &VertexRef,
    y: &VertexRef,
    k_max: usize,
) -> Result<SingularityReport, GreenError> {
    let (xk, yk) = (x.resolve(g)?, y.resolve(g)?);
    let opts = GreenOptions { target_accuracy: 1e-9, ..GreenOptions::default() };
    let samples: Vec<Result<(ProbeSample, f64), GreenError>> = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let r = 1.0 - 0.5f64.powi(k as i32);
            let gxy = evaluate_green_keys(g, t, &xk, &yk, ComplexPoint::real(r), &opts)?;
            let gyy = if xk == yk { gxy } else { evaluate_green_keys(g, t, &yk, &yk, ComplexPoint::real(r), &opts)? };
            // F(x,y) = G(x,y)/G(y,y) for x ≠ y; for x = y it is the first-return function 1 − 1/G(x,x)
            let first = if xk == yk { 1.0 - 1.0 / gxy.value.re } else { gxy.value.re / gyy.value.re };
            Ok((ProbeSample { k, r, value: gxy.value.re, error_bound: gxy.error_bound }, first))
        })
        .collect();
    let mut out = Vec::with_capacity(k_max);
    let mut first_passage = 0.0;
    for s in samples {
        let (s, f) = s?;
        first_passage = f;
        out.push(s);
    }
    let monotone = out.windows(2).all(|w| w[1].value > w[0].value);
    let log = |s: &ProbeSample| (s.value.ln(), (1.0 - s.r).ln());
    let local_slopes: Vec<f64> = out
        .windows(2)
        .map(|w| {
            let (a, b) = (log(&w[0]), log(&w[1]));
            (b.0 - a.0) / (b.1 - a.1)
        })
        .collect();
    let tail = &out[out.len() / 2..];
    let growth_exponent = if tail.len() >= 2 {
        let pts: Vec<(f64, f64)> = tail.iter().map(|s| (log(s).1, log(s).0)).collect();
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
        let (mx, my) = (sx / m, sy / m);
        let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        num / den
    } else {
        f64::NAN
    };
    let pole_like = growth_exponent <= -0.95 && (growth_exponent - growth_exponent.round()).abs() < 0.05;
    let diverging = monotone && out.len() >= 2 && out[out.len() - 1].value > 2.0 * out[0].value && growth_exponent < 0.0;
    Ok(SingularityReport { samples: out, monotone, diverging, growth_exponent, local_slopes, pole_like, first_passage })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShellReport {
    /// `a[n-1]` = number of edges leaving the n-th nested neighbourhood of o.
    pub a: Vec<usize>,
    /// A priori bound branches·θ·(θ−1) on every a_n.
    pub bound: usize,
    pub bounded: bool,
}

/// Edge counts between consecutive shells of the nested origin neighbourhoods.
/// Edges leave the n-th neighbourhood only through its boundary vertices.
pub fn shell_conductance_check(g: &SelfSimilarGraph, n_max: usize) -> Result<ShellReport, GreenError> {
    let spec = g.spec();
    let mut a = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut count = 0;
        for v in g.frame_boundary(n - 1) {
            count += g.neighbours(&v)?.iter().filter(|u| u.level >= n).count();
        }
        a.push(count);
    }
    let bound = g.branches() * spec.theta() * (spec.theta() - 1);
    Ok(ShellReport { bounded: a.iter().all(|&x| x <= bound), a, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellmodel::bundled;
    use crate::transfer::compute_transfer;

    fn line() -> (SelfSimilarGraph, TransferSet) {
        let spec = bundled::line2();
        (SelfSimilarGraph::new(&spec), compute_transfer(&spec).unwrap())
    }

    fn closed_form(z: Complex64) -> Complex64 {
        (Complex64::new(1.0, 0.0) - z * z).sqrt().inv()
    }

    #[test]
    fn line_origin_at_real_point() {
        let (g, t) = line();
        let q = GreenQuery::new(VertexRef::origin(), VertexRef::origin(), ComplexPoint::real(0.6));
        let v = evaluate_green(&g, &t, &q).unwrap();
        assert!((v.value - Complex64::new(1.25, 0.0)).norm() < 1e-10, "{v:?}");
        assert!(v.error_bound < 1e-10);
        assert_eq!(v.depth, 1);
    }

    #[test]
    fn line_off_axis_and_off_origin() {
        let (g, t) = line();
        let z = Complex64::new(2.0, 0.5);
        let q = GreenQuery::new(VertexRef::origin(), VertexRef::origin(), z.into());
        let v = evaluate_green(&g, &t, &q).unwrap();
        assert!((v.value - closed_form(z)).norm() < 1e-8, "{v:?} vs {}", closed_form(z));
        // G(0, k) = G(0,0)·((1 − √(1−z²))/z)^|k| on the integer line
        let x: VertexRef = "0:-:b1@0".parse().unwrap();
        let z = Complex64::new(0.7, 0.2);
        let ratio = (Complex64::new(1.0, 0.0) - (Complex64::new(1.0, 0.0) - z * z).sqrt()) / z;
        let q = GreenQuery::new(VertexRef::origin(), x, z.into());
        let v = evaluate_green(&g, &t, &q).unwrap();
        let want = closed_form(z) * ratio * ratio;
        assert!((v.value - want).norm() < 1e-9, "{} vs {want}", v.value);
    }

    #[test]
    fn base_series_and_trivial_points() {
        let (g, t) = line();
        let o = VertexRef::origin();
        let s = base_green_series(&g, &o, &o, 4).unwrap();
        let want: Vec<BigRational> = [(1, 1), (0, 1), (1, 2), (0, 1), (3, 8)]
            .iter()
            .map(|&(a, b)| BigRational::new(a.into(), num_bigint::BigInt::from(b)))
            .collect();
        assert_eq!(s, want);
        let v = evaluate_green(&g, &t, &GreenQuery::new(o.clone(), o.clone(), ComplexPoint::real(0.0))).unwrap();
        assert_eq!(v.value, Complex64::new(1.0, 0.0));
        let m: VertexRef = "0:-:m".parse().unwrap();
        let v = evaluate_green(&g, &t, &GreenQuery::new(o, m, ComplexPoint::real(0.0))).unwrap();
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn functional_equation_residuals() {
        let (g, t) = line();
        let o = VertexRef::origin();
        let r = check_functional_equation_numeric(&g, &t, &o, &o, ComplexPoint::real(0.3), &GreenOptions::default()).unwrap();
        assert!(r.residual < 1e-10 && r.within_bound(), "{r:?}");
        let spec = bundled::sierpinski();
        let g = SelfSimilarGraph::new(&spec);
        let t = compute_transfer(&spec).unwrap();
        let b: VertexRef = "0:-:b".parse().unwrap();
        let r = check_functional_equation_numeric(&g, &t, &o, &b, ComplexPoint::real(0.25), &GreenOptions::default()).unwrap();
        assert!(r.residual <= r.bound + 1e-12, "{r:?}");
    }

    #[test]
    fn pole_hit_is_reported() {
        let (g, t) = line();
        let o = VertexRef::origin();
        let q = GreenQuery::new(o.clone(), o, ComplexPoint::real(2f64.sqrt()));
        assert!(matches!(evaluate_green(&g, &t, &q), Err(GreenError::PoleHit { .. })));
    }

    #[test]
    fn shells_of_bundled_graphs() {
        let expected = [2, 8, 6];
        for (spec, want) in bundled::all().iter().zip(expected) {
            let g = SelfSimilarGraph::new(spec);
            let r = shell_conductance_check(&g, 8).unwrap();
            assert!(r.bounded);
            assert!(r.a.iter().all(|&a| a == want), "{}: {:?}", spec.name(), r.a);
        }
    }

    #[test]
    fn line_probe_exponent() {
        let (g, t) = line();
        let o = VertexRef::origin();
        let r = singularity_probe(&g, &t, &o, &o, 20).unwrap();
        assert!(r.monotone && r.diverging);
        assert!((r.growth_exponent + 0.5).abs() < 0.05, "{}", r.growth_exponent);
        assert!(!r.pole_like);
        assert!(r.first_passage > 0.99);
    }
}
