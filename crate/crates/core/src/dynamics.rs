//! Forward and backward iteration of the transition function on the Riemann
//! sphere; approximations of the Julia set, the discrete exceptional set and
//! the reciprocal spectrum.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ratfun::{roots, roots_complex, ComplexPoint, Polynomial, Precision, RatFunError, RationalFunction};
use crate::transfer::{check_fixed_points, TransferError, TransferSet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    RatFun(#[from] RatFunError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error("d is constant; it has no dynamics")]
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynamicsConfig {
    pub dedup_radius: f64,
    /// Maximal number of stored points before the expansion is cut off.
    pub budget: usize,
    /// Relative tolerance for `|d(z) − parent|`.
    pub residual_tol: f64,
    pub min_classify_depth: usize,
    /// Gaps wider than this (in the circle coordinate) are counted.
    pub gap_resolution: f64,
    /// Half-width of the window on which the plain max gap is reported.
    pub window: f64,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            dedup_radius: 1e-9,
            budget: 1_000_000,
            residual_tol: 1e-8,
            min_classify_depth: 8,
            gap_resolution: 1e-2,
            window: 10.0,
        }
    }
}

/// Tolerance below which an imaginary part counts as zero.
pub const REAL_TOL: f64 = 1e-9;

fn eval(d: &RationalFunction, z: ComplexPoint) -> Result<ComplexPoint, RatFunError> {
    match d.eval(z, Precision::Double) {
        Err(RatFunError::Indeterminate(_)) => d.eval(z, Precision::Extended),
        r => r,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForwardOrbit {
    pub converges_to_zero: bool,
    /// Index n of the first iterate inside the attraction radius (or `max_iter`).
    pub iterations: usize,
    pub orbit: Vec<ComplexPoint>,
}

pub fn forward_orbit(
    d: &RationalFunction,
    z: ComplexPoint,
    max_iter: usize,
    attraction_radius: f64,
) -> Result<ForwardOrbit, DynamicsError> {
    let mut orbit = vec![z];
    let mut cur = z;
    for n in 0..=max_iter {
        if cur.abs() < attraction_radius {
            return Ok(ForwardOrbit { converges_to_zero: true, iterations: n, orbit });
        }
        if n == max_iter {
            break;
        }
        cur = eval(d, cur)?;
        orbit.push(cur);
    }
    Ok(ForwardOrbit { converges_to_zero: false, iterations: max_iter, orbit })
}

fn snap(z: Complex64) -> ComplexPoint {
    if z.im != 0.0 && z.im.abs() <= REAL_TOL * (1.0 + z.re.abs()) {
        ComplexPoint::real(z.re)
    } else {
        ComplexPoint::from_complex(z)
    }
}

pub fn is_real(z: &ComplexPoint) -> bool {
    match z.finite() {
        None => true,
        Some(c) => c.im.abs() <= REAL_TOL * (1.0 + c.re.abs()),
    }
}

/// All solutions of `d(z) = w` on the sphere, listed with multiplicity.
///
/// Real `w` are handled exactly: `N − wD` is formed over the rationals, so
/// multiple roots (critical values) come out with their multiplicity.
pub fn preimages(d: &RationalFunction, w: ComplexPoint) -> Result<Vec<ComplexPoint>, DynamicsError> {
    if d.is_constant() {
        return Err(DynamicsError::Constant);
    }
    let deg = d.degree();
    let mut out = Vec::with_capacity(deg);
    let expand = |p: &Polynomial, out: &mut Vec<ComplexPoint>| -> Result<(), RatFunError> {
        for r in roots(p, Precision::Double)? {
            for _ in 0..r.multiplicity {
                out.push(ComplexPoint::from(r.value));
            }
        }
        Ok(())
    };
    let p = match w.finite() {
        None => d.denominator().clone(),
        Some(c) if c.im == 0.0 => {
            let wq = BigRational::from_float(c.re).expect("finite");
            d.numerator() - &d.denominator().scale(&wq)
        }
        Some(c) => {
            let coeffs = equation_coeffs(d, c);
            for r in roots_complex(&trim(coeffs), Precision::Double)? {
                out.push(snap(r.value));
            }
            pad_infinity(&mut out, deg);
            return Ok(out);
        }
    };
    if !p.is_zero() && p.degree().unwrap_or(0) > 0 {
        expand(&p, &mut out)?;
    }
    pad_infinity(&mut out, deg);
    Ok(out)
}

fn pad_infinity(out: &mut Vec<ComplexPoint>, deg: usize) {
    while out.len() < deg {
        out.push(ComplexPoint::Infinity);
    }
}

fn equation_coeffs(d: &RationalFunction, w: Complex64) -> Vec<Complex64> {
    let n = d.numerator().to_f64();
    let m = d.denominator().to_f64();
    let len = n.len().max(m.len());
    (0..len)
        .map(|k| Complex64::new(*n.get(k).unwrap_or(&0.0), 0.0) - w * m.get(k).copied().unwrap_or(0.0))
        .collect()
}

/// Drops leading coefficients that vanish to rounding level, so the
/// corresponding roots are reported at ∞.
fn trim(mut c: Vec<Complex64>) -> Vec<Complex64> {
    let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    while c.len() > 1 && c.last().is_some_and(|x| x.norm() <= 4.0 * f64::EPSILON * scale) {
        c.pop();
    }
    c
}

/// Fast floating preimages used inside orbit expansion (simple roots assumed;
/// multiple roots are still found, to reduced accuracy).
fn preimages_fast(d: &RationalFunction, poles: &[ComplexPoint], w: ComplexPoint) -> Result<Vec<ComplexPoint>, RatFunError> {
    let deg = d.degree();
    let mut out = Vec::with_capacity(deg);
    match w.finite() {
        None => out.extend_from_slice(poles),
        Some(c) => {
            let coeffs = trim(equation_coeffs(d, c));
            if coeffs.len() > 1 {
                out.extend(roots_complex(&coeffs, Precision::Double)?.into_iter().map(|r| snap(r.value)));
            }
        }
    }
    pad_infinity(&mut out, deg);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitPoint {
    pub z: ComplexPoint,
    pub depth: usize,
    /// Index of the parent in `OrbitTree::points`; `None` for seeds.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitTree {
    pub seeds: Vec<ComplexPoint>,
    pub depth: usize,
    pub reached_depth: usize,
    /// Real points (including ∞), deduplicated.
    pub points: Vec<OrbitPoint>,
    /// Points off the real axis: reported, not expanded further.
    pub non_real: Vec<OrbitPoint>,
    pub dedup_radius: f64,
    pub truncated: bool,
    /// Preimages produced before deduplication.
    pub candidates: usize,
    pub max_residual: f64,
    pub residual_failures: usize,
}

impl OrbitTree {
    pub fn count_at_depth(&self, k: usize) -> usize {
        self.points.iter().filter(|p| p.depth == k).count()
    }
}

/// Monotone map of f64 onto u64 for ordered range queries.
fn ordered_bits(x: f64) -> u64 {
    let b = x.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

/// Deduplication index over stored points, keyed by real part.
struct PointIndex {
    by_re: BTreeMap<u64, Vec<ComplexPoint>>,
    has_infinity: bool,
    radius: f64,
}

impl PointIndex {
    fn new(radius: f64) -> Self {
        Self { by_re: BTreeMap::new(), has_infinity: false, radius }
    }

    fn contains(&self, z: &ComplexPoint) -> bool {
        let Some(c) = z.finite() else {
            return self.has_infinity;
        };
        let tol = 2.0 * self.radius * (1.0 + c.norm()) + f64::MIN_POSITIVE;
        let lo = ordered_bits(c.re - tol);
        let hi = ordered_bits(c.re + tol);
        self.by_re.range(lo..=hi).flat_map(|(_, v)| v).any(|q| {
            let q = q.finite().expect("finite entries");
            (q - c).norm() <= self.radius * (1.0 + q.norm().max(c.norm()))
        })
    }

    /// Inserts unless a stored point lies within the radius; reports insertion.
    fn insert(&mut self, z: ComplexPoint) -> bool {
        if self.contains(&z) {
            return false;
        }
        match z.finite() {
            None => self.has_infinity = true,
            Some(c) => self.by_re.entry(ordered_bits(c.re)).or_default().push(z),
        }
        true
    }
}

fn residual(d: &RationalFunction, z: ComplexPoint, w: ComplexPoint) -> f64 {
    let Ok(dz) = eval(d, z) else {
        return f64::INFINITY;
    };
    match (dz.finite(), w.finite()) {
        (Some(a), Some(b)) => (a - b).norm() / (1.0 + b.norm()),
        _ => dz.chordal_distance(&w),
    }
}

fn cmp_points(a: &ComplexPoint, b: &ComplexPoint) -> std::cmp::Ordering {
    let key = |p: &ComplexPoint| match p.finite() {
        Some(c) => (0u8, c.re, c.im),
        None => (1u8, 0.0, 0.0),
    };
    let (ka, kb) = (key(a), key(b));
    ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(ka.2.total_cmp(&kb.2))
}

/// Breadth-first preimage expansion with deduplication. Each level is
/// expanded in parallel and merged in sorted order, so the result does not
/// depend on scheduling.
pub fn backward_orbit(
    d: &RationalFunction,
    seeds: &[ComplexPoint],
    depth: usize,
    config: &DynamicsConfig,
) -> Result<OrbitTree, DynamicsError> {
    if d.is_constant() {
        return Err(DynamicsError::Constant);
    }
    let poles: Vec<ComplexPoint> = {
        let mut p = Vec::new();
        if d.denominator().degree().unwrap_or(0) > 0 {
            for r in d.poles(Precision::Double)? {
                for _ in 0..r.multiplicity {
                    p.push(snap(r.value));
                }
            }
        }
        p
    };
    let mut tree = OrbitTree {
        seeds: seeds.to_vec(),
        depth,
        reached_depth: 0,
        points: Vec::new(),
        non_real: Vec::new(),
        dedup_radius: config.dedup_radius,
        truncated: false,
        candidates: 0,
        max_residual: 0.0,
        residual_failures: 0,
    };
    let mut index = PointIndex::new(config.dedup_radius);
    let mut frontier = Vec::new();
    let mut sorted_seeds: Vec<ComplexPoint> = seeds.iter().map(|s| s.finite().map_or(*s, snap)).collect();
    sorted_seeds.sort_by(cmp_points);
    for s in sorted_seeds {
        if index.insert(s) {
            let p = OrbitPoint { z: s, depth: 0, parent: None };
            if is_real(&s) {
                frontier.push(tree.points.len());
                tree.points.push(p);
            } else {
                tree.non_real.push(p);
            }
        }
    }
    for k in 1..=depth {
        if frontier.is_empty() || tree.truncated {
            break;
        }
        let expanded: Vec<Result<Vec<(ComplexPoint, usize, f64)>, RatFunError>> = frontier
            .par_iter()
            .map(|&i| {
                let w = tree.points[i].z;
                Ok(preimages_fast(d, &poles, w)?.into_iter().map(|z| (z, i, residual(d, z, w))).collect())
            })
            .collect();
        let mut fresh = Vec::new();
        for r in expanded {
            fresh.extend(r?);
        }
        tree.candidates += fresh.len();
        fresh.sort_by(|a, b| cmp_points(&a.0, &b.0).then(a.1.cmp(&b.1)));
        let mut next = Vec::new();
        for (z, parent, res) in fresh {
            if res > config.residual_tol {
                tree.residual_failures += 1;
                log::warn!("preimage {z} of {} fails the residual check ({res:e})", tree.points[parent].z);
                continue;
            }
            if !index.insert(z) {
                continue;
            }
            if tree.points.len() + tree.non_real.len() >= config.budget {
                tree.truncated = true;
                break;
            }
            tree.max_residual = tree.max_residual.max(res);
            let p = OrbitPoint { z, depth: k, parent: Some(parent) };
            if is_real(&z) {
                next.push(tree.points.len());
                tree.points.push(p);
            } else {
                tree.non_real.push(p);
            }
        }
        tree.reached_depth = k;
        frontier = next;
    }
    Ok(tree)
}

/// Position on the circle R̄ ≅ S¹ measured from 1 through ∞ to −1: the
/// complement of (−1, 1) becomes the interval [0, π].
pub fn arc_coordinate(z: &ComplexPoint) -> f64 {
    match z.finite() {
        None => PI / 2.0,
        Some(c) => (2.0 * c.re.atan() - PI / 2.0).rem_euclid(2.0 * PI),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapStats {
    pub depth: usize,
    pub points: usize,
    /// Largest gap between consecutive points inside their hull, in the arc coordinate.
    pub hull_gap: f64,
    /// Largest gap of the point set within [−window, −1] ∪ [1, window].
    pub window_gap: f64,
    pub gaps_above_resolution: usize,
}

/// Gap statistics of a real point set (finite values plus optional ∞).
pub fn gap_stats(finite: &[f64], has_infinity: bool, depth: usize, config: &DynamicsConfig) -> GapStats {
    let mut arc: Vec<f64> = finite
        .iter()
        .filter(|x| x.abs() >= 1.0 - REAL_TOL)
        .map(|&x| arc_coordinate(&ComplexPoint::real(x)).min(PI))
        .collect();
    if has_infinity {
        arc.push(PI / 2.0);
    }
    arc.sort_by(f64::total_cmp);
    let gaps: Vec<f64> = arc.windows(2).map(|w| w[1] - w[0]).collect();
    let hull_gap = gaps.iter().copied().fold(0.0, f64::max);
    let gaps_above_resolution = gaps.iter().filter(|&&g| g > config.gap_resolution).count();
    let side = |sign: f64| -> f64 {
        let mut xs: Vec<f64> = finite.iter().map(|&x| sign * x).filter(|&x| x >= 1.0 - REAL_TOL).collect();
        xs.sort_by(f64::total_cmp);
        let w = config.window;
        let mut prev = 1.0;
        let mut gap: f64 = 0.0;
        for x in xs {
            let x = x.max(1.0);
            gap = gap.max(x.min(w) - prev);
            if x >= w {
                return gap;
            }
            prev = x;
        }
        gap.max(w - prev)
    };
    GapStats {
        depth,
        points: arc.len(),
        hull_gap,
        window_gap: side(1.0).max(side(-1.0)),
        gaps_above_resolution,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct JuliaApproximation {
    /// Sorted finite real points.
    pub points: Vec<f64>,
    pub has_infinity: bool,
    pub depth: usize,
    pub stats: GapStats,
    /// Statistics of the subsets of depth ≤ k, for k = 0..=depth.
    pub history: Vec<GapStats>,
    pub non_real: Vec<ComplexPoint>,
    pub truncated: bool,
    pub max_residual: f64,
}

fn real_parts(tree: &OrbitTree, max_depth: usize) -> (Vec<f64>, bool) {
    let mut has_inf = false;
    let mut xs = Vec::new();
    for p in tree.points.iter().filter(|p| p.depth <= max_depth) {
        match p.z.finite() {
            Some(c) => xs.push(c.re),
            None => has_inf = true,
        }
    }
    xs.sort_by(f64::total_cmp);
    (xs, has_inf)
}

/// Julia approximation read off a backward-orbit tree of 1.
pub fn julia_from_tree(tree: &OrbitTree, config: &DynamicsConfig) -> JuliaApproximation {
    let history: Vec<GapStats> = (0..=tree.reached_depth)
        .map(|k| {
            let (xs, inf) = real_parts(tree, k);
            gap_stats(&xs, inf, k, config)
        })
        .collect();
    let (points, has_infinity) = real_parts(tree, tree.reached_depth);
    JuliaApproximation {
        stats: history.last().cloned().expect("depth 0 is always present"),
        points,
        has_infinity,
        depth: tree.reached_depth,
        history,
        non_real: tree.non_real.iter().map(|p| p.z).collect(),
        truncated: tree.truncated,
        max_residual: tree.max_residual,
    }
}

/// Backward orbit of the repelling fixed point 1.
pub fn approximate_julia(t: &TransferSet, depth: usize, config: &DynamicsConfig) -> Result<JuliaApproximation, DynamicsError> {
    check_fixed_points(t).require()?;
    let tree = backward_orbit(&t.d, &[ComplexPoint::real(1.0)], depth, config)?;
    Ok(julia_from_tree(&tree, config))
}

/// Seeds of the exceptional set: the finite poles of f and of the inner
/// transition functions.
pub fn exceptional_seeds(t: &TransferSet) -> Vec<ComplexPoint> {
    t.poles_f.iter().chain(&t.poles_cell).copied().collect()
}

pub fn exceptional_set(t: &TransferSet, depth: usize, config: &DynamicsConfig) -> Result<OrbitTree, DynamicsError> {
    backward_orbit(&t.d, &exceptional_seeds(t), depth, config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JuliaClass {
    IntervalLike,
    CantorLike,
    Unresolved,
}

impl std::fmt::Display for JuliaClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            JuliaClass::IntervalLike => "interval-like",
            JuliaClass::CantorLike => "Cantor-like",
            JuliaClass::Unresolved => "unresolved",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: JuliaClass,
    /// Always true: the verdict is read off gap statistics, it is not a proof.
    pub heuristic: bool,
    /// Ratios g(k+1)/g(k) of the largest hull gap over the last increments.
    pub ratios: Vec<f64>,
    pub evidence: String,
}

const PERSIST_RATIO: f64 = 0.99;
const SHRINK_RATIO: f64 = 0.75;

/// Interval-like if the largest gap keeps shrinking geometrically, Cantor-like
/// if it stays put over the last three depth increments.
pub fn classify_julia(j: &JuliaApproximation, min_depth: usize) -> Classification {
    let unresolved = |evidence: String, ratios: Vec<f64>| Classification {
        verdict: JuliaClass::Unresolved,
        heuristic: true,
        ratios,
        evidence,
    };
    if j.depth < min_depth.max(3) || j.history.len() < 4 {
        return unresolved(format!("depth {} below the minimum of {min_depth}", j.depth), Vec::new());
    }
    let g: Vec<f64> = j.history.iter().map(|s| s.hull_gap).collect();
    let ratios: Vec<f64> = g[g.len() - 4..].windows(2).map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 1.0 }).collect();
    let gaps = format!("largest gaps {:?}", &g[g.len() - 4..]);
    if ratios.iter().all(|&r| r >= PERSIST_RATIO) {
        Classification {
            verdict: JuliaClass::CantorLike,
            heuristic: true,
            ratios,
            evidence: format!("largest gap persists over the last 3 depths ({gaps})"),
        }
    } else if ratios.iter().all(|&r| r <= SHRINK_RATIO) {
        Classification {
            verdict: JuliaClass::IntervalLike,
            heuristic: true,
            ratios,
            evidence: format!("largest gap shrinks geometrically ({gaps})"),
        }
    } else {
        unresolved(format!("no consistent trend ({gaps})"), ratios)
    }
}

/// λ = 1 − 1/z, the Laplacian eigenvalue matching a reciprocal-spectrum point.
pub fn laplacian_image(z: &ComplexPoint) -> f64 {
    match z.finite() {
        None => 1.0,
        Some(c) => 1.0 - 1.0 / c.re,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub depth: usize,
    /// Inner bound: approximation of J ⊂ spec⁻¹P.
    pub inner: JuliaApproximation,
    /// Real points of the truncated exceptional set not already in the inner bound.
    pub outer_extra: Vec<ComplexPoint>,
    /// Gap statistics of the outer bound J ∪ D.
    pub outer_stats: GapStats,
    pub exceptional_truncated: bool,
    pub exceptional_non_real: Vec<ComplexPoint>,
    pub classification: Classification,
    /// Present when the classification is Cantor-like.
    pub note: Option<String>,
    pub parameters: DynamicsConfig,
}

impl SpectrumReport {
    /// Inner bound mapped to the Laplacian spectrum, sorted.
    pub fn laplacian_inner(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.inner.points.iter().map(|&x| laplacian_image(&ComplexPoint::real(x))).collect();
        if self.inner.has_infinity {
            out.push(1.0);
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// Outer bound (inner ∪ exceptional points) mapped to the Laplacian spectrum, sorted.
    pub fn laplacian_outer(&self) -> Vec<f64> {
        let mut out = self.laplacian_inner();
        out.extend(self.outer_extra.iter().map(laplacian_image));
        out.sort_by(f64::total_cmp);
        out
    }

    /// Outer-bound points in the reciprocal form.
    pub fn outer_points(&self) -> Vec<ComplexPoint> {
        let mut out: Vec<ComplexPoint> = self.inner.points.iter().map(|&x| ComplexPoint::real(x)).collect();
        if self.inner.has_infinity {
            out.push(ComplexPoint::Infinity);
        }
        out.extend(self.outer_extra.iter().copied());
        out.sort_by(cmp_points);
        out
    }
}

pub fn spectrum_bounds(t: &TransferSet, depth: usize, config: &DynamicsConfig) -> Result<SpectrumReport, DynamicsError> {
    check_fixed_points(t).require()?;
    let j_tree = backward_orbit(&t.d, &[ComplexPoint::real(1.0)], depth, config)?;
    let d_tree = exceptional_set(t, depth, config)?;
    Ok(spectrum_from_trees(&j_tree, &d_tree, depth, config))
}

/// Spectrum bounds from precomputed orbit trees of 1 and of the exceptional seeds.
pub fn spectrum_from_trees(j_tree: &OrbitTree, d_tree: &OrbitTree, depth: usize, config: &DynamicsConfig) -> SpectrumReport {
    let inner = julia_from_tree(j_tree, config);
    let mut index = PointIndex::new(config.dedup_radius);
    for &x in &inner.points {
        index.insert(ComplexPoint::real(x));
    }
    if inner.has_infinity {
        index.insert(ComplexPoint::Infinity);
    }
    let mut outer_extra = Vec::new();
    for p in &d_tree.points {
        if index.insert(p.z) {
            outer_extra.push(p.z);
        }
    }
    outer_extra.sort_by(cmp_points);
    let mut all: Vec<f64> = inner.points.clone();
    all.extend(outer_extra.iter().filter_map(|z| z.finite()).map(|c| c.re));
    all.sort_by(f64::total_cmp);
    let outer_stats = gap_stats(
        &all,
        inner.has_infinity || outer_extra.iter().any(ComplexPoint::is_infinite),
        depth,
        config,
    );
    let classification = classify_julia(&inner, config.min_classify_depth);
    let note = (classification.verdict == JuliaClass::CantorLike)
        .then(|| "Cantor-like Julia set: the reciprocal spectrum coincides with the singularity set of the Green functions".to_string());
    SpectrumReport {
        depth,
        inner,
        outer_extra,
        outer_stats,
        exceptional_truncated: d_tree.truncated,
        exceptional_non_real: d_tree.non_real.iter().map(|p| p.z).collect(),
        classification,
        note,
        parameters: *config,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellmodel::bundled;
    use crate::transfer::compute_transfer;

    fn line_d() -> RationalFunction {
        RationalFunction::from_i64(&[0, 0, 1], &[2, 0, -1]).unwrap()
    }

    #[test]
    fn forward_orbits() {
        let d = line_d();
        let r = forward_orbit(&d, ComplexPoint::real(0.3), 200, 0.5).unwrap();
        assert!(r.converges_to_zero);
        assert_eq!(r.iterations, 0);
        let r = forward_orbit(&d, ComplexPoint::real(0.3), 200, 0.05).unwrap();
        assert_eq!(r.iterations, 1);
        assert!((r.orbit[1].re() - 0.09 / 1.91).abs() < 1e-15);
        let r = forward_orbit(&d, ComplexPoint::real(1.0), 200, 0.5).unwrap();
        assert!(!r.converges_to_zero);
        let r = forward_orbit(&d, ComplexPoint::real(0.0), 200, 0.5).unwrap();
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn line_preimages() {
        let d = line_d();
        let p = preimages(&d, ComplexPoint::real(1.0)).unwrap();
        assert_eq!(p, vec![ComplexPoint::real(-1.0), ComplexPoint::real(1.0)]);
        assert_eq!(preimages(&d, ComplexPoint::real(0.0)).unwrap(), vec![ComplexPoint::real(0.0); 2]);
        let s = 2f64.sqrt();
        let want = (2.0 * s / (1.0 + s)).sqrt();
        let p = preimages(&d, ComplexPoint::real(s)).unwrap();
        assert!((p[0].re() + want).abs() < 1e-12 && (p[1].re() - want).abs() < 1e-12);
        // −1 = d(∞) with multiplicity two
        assert_eq!(preimages(&d, ComplexPoint::real(-1.0)).unwrap(), vec![ComplexPoint::Infinity; 2]);
        let p = preimages(&d, ComplexPoint::Infinity).unwrap();
        assert!((p[0].re() + s).abs() < 1e-12 && (p[1].re() - s).abs() < 1e-12);
    }

    #[test]
    fn line_backward_orbit_is_chebyshev_grid() {
        let d = line_d();
        let cfg = DynamicsConfig::default();
        let tree = backward_orbit(&d, &[ComplexPoint::real(1.0)], 1, &cfg).unwrap();
        assert_eq!(tree.points.len(), 2);
        let n = 8;
        let tree = backward_orbit(&d, &[ComplexPoint::real(1.0)], n, &cfg).unwrap();
        // preimages of 1 under the n-th iterate: 1/cos(kπ/2^{n-1})
        let m = 1usize << (n - 1);
        assert_eq!(tree.points.len(), m + 1);
        for k in 0..=m {
            let c = (k as f64 * PI / m as f64).cos();
            let hit = tree.points.iter().any(|p| match p.z.finite() {
                None => c.abs() < 1e-12,
                Some(z) => (z.re * c - 1.0).abs() < 1e-8 * (1.0 + z.re.abs()),
            });
            assert!(hit, "missing 1/cos({k}π/{m})");
        }
        assert!(tree.non_real.is_empty());
        assert!(tree.max_residual < 1e-8);
    }

    #[test]
    fn gap_statistics() {
        let cfg = DynamicsConfig::default();
        let s = gap_stats(&[1.0, 2.0, 10.0, -1.0, -10.0], true, 0, &cfg);
        assert_eq!(s.window_gap, 9.0);
        assert_eq!(s.points, 6);
        assert!((arc_coordinate(&ComplexPoint::real(1.0))).abs() < 1e-15);
        assert!((arc_coordinate(&ComplexPoint::real(-1.0)) - PI).abs() < 1e-12);
    }

    #[test]
    fn classification_and_laplacian_map() {
        let cfg = DynamicsConfig::default();
        let t = compute_transfer(&bundled::line2()).unwrap();
        let j = approximate_julia(&t, 2, &cfg).unwrap();
        assert_eq!(classify_julia(&j, 8).verdict, JuliaClass::Unresolved);
        let j = approximate_julia(&t, 10, &cfg).unwrap();
        assert_eq!(classify_julia(&j, 8).verdict, JuliaClass::IntervalLike);
        let t = compute_transfer(&bundled::sierpinski()).unwrap();
        let j = approximate_julia(&t, 10, &cfg).unwrap();
        assert_eq!(classify_julia(&j, 8).verdict, JuliaClass::CantorLike);
        assert_eq!(laplacian_image(&ComplexPoint::real(1.0)), 0.0);
        assert_eq!(laplacian_image(&ComplexPoint::real(-1.0)), 2.0);
        assert_eq!(laplacian_image(&ComplexPoint::Infinity), 1.0);
    }

    #[test]
    fn line_exceptional_set() {
        let t = compute_transfer(&bundled::line2()).unwrap();
        let tree = exceptional_set(&t, 0, &DynamicsConfig::default()).unwrap();
        let s = 2f64.sqrt();
        let xs: Vec<f64> = tree.points.iter().map(|p| p.z.re()).collect();
        assert_eq!(xs.len(), 2);
        assert!((xs[0] + s).abs() < 1e-12 && (xs[1] - s).abs() < 1e-12);
    }
}
