use std::collections::BTreeSet;

use num_complex::Complex64;
use proptest::prelude::*;

use selfsim::cellmodel::{bundled, CellSpec, SelfSimilarGraph, VertexKey};
use selfsim::green::{evaluate_green_keys, GreenOptions, GreenValue};
use selfsim::ratfun::ComplexPoint;
use selfsim::transfer::{compute_transfer, TransferSet};

struct Case {
    g: SelfSimilarGraph,
    t: TransferSet,
    near: Vec<VertexKey>,
}

fn case(spec: &CellSpec) -> Case {
    let g = SelfSimilarGraph::new(spec);
    let t = compute_transfer(spec).unwrap();
    let mut seen = BTreeSet::from([g.origin()]);
    let mut frontier = vec![g.origin()];
    for _ in 0..3 {
        let mut next = Vec::new();
        for x in &frontier {
            for y in g.neighbours(x).unwrap().iter() {
                if seen.insert(y.clone()) {
                    next.push(y.clone());
                }
            }
        }
        frontier = next;
    }
    Case { g, t, near: seen.into_iter().collect() }
}

fn eval(c: &Case, x: &VertexKey, y: &VertexKey, z: Complex64, opts: &GreenOptions) -> GreenValue {
    evaluate_green_keys(&c.g, &c.t, x, y, z.into(), opts).unwrap()
}

/// Off the real axis, so always in the basin of 0 for the bundled cells.
fn off_axis() -> impl Strategy<Value = Complex64> {
    (-3.0f64..3.0, 0.3f64..3.0, any::<bool>()).prop_map(|(re, im, up)| Complex64::new(re, if up { im } else { -im }))
}

fn case_pair() -> impl Strategy<Value = (usize, usize, usize)> {
    (0usize..3, 0usize..64, 0usize..64)
}

fn pick(c: &Case, i: usize) -> VertexKey {
    c.near[i % c.near.len()].clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn resolvent_row_identity((s, i, j) in case_pair(), z in off_axis()) {
        let c = case(&bundled::all()[s]);
        let (x, y) = (pick(&c, i), pick(&c, j));
        let opts = GreenOptions::default();
        let gx = eval(&c, &x, &y, z, &opts);
        let nb = c.g.neighbours(&x).unwrap();
        let p = 1.0 / nb.len() as f64;
        let mut lhs = gx.value;
        let mut bound = gx.error_bound;
        for u in nb.iter() {
            let gu = eval(&c, u, &y, z, &opts);
            lhs -= z * p * gu.value;
            bound += z.norm() * p * gu.error_bound;
        }
        let delta = if x == y { 1.0 } else { 0.0 };
        let r = (lhs - delta).norm();
        prop_assert!(r <= bound + 1e-8, "residual {:e}, bound {:e}", r, bound);
    }

    #[test]
    fn reversible_and_conjugate_symmetric((s, i, j) in case_pair(), z in off_axis()) {
        let c = case(&bundled::all()[s]);
        let (x, y) = (pick(&c, i), pick(&c, j));
        let opts = GreenOptions::default();
        let a = eval(&c, &x, &y, z, &opts);
        let b = eval(&c, &y, &x, z, &opts);
        let (dx, dy) = (c.g.degree(&x).unwrap() as f64, c.g.degree(&y).unwrap() as f64);
        let r = (a.value * dx - b.value * dy).norm();
        prop_assert!(r <= dx * a.error_bound + dy * b.error_bound + 1e-9, "reversibility residual {:e}", r);
        let conj = eval(&c, &x, &y, z.conj(), &opts);
        prop_assert!((conj.value - a.value.conj()).norm() <= conj.error_bound + a.error_bound + 1e-12);
    }

    #[test]
    fn base_radius_does_not_change_the_value((s, i, j) in case_pair(), z in off_axis()) {
        let c = case(&bundled::all()[s]);
        let (x, y) = (pick(&c, i), pick(&c, j));
        let half = eval(&c, &x, &y, z, &GreenOptions::default());
        let quarter = eval(&c, &x, &y, z, &GreenOptions { base_radius: 0.25, ..GreenOptions::default() });
        let r = (half.value - quarter.value).norm();
        prop_assert!(r <= half.error_bound + quarter.error_bound + 1e-10, "{} vs {}", half.value, quarter.value);
    }
}

#[test]
fn real_fatou_points_are_approached_from_both_sides() {
    // real points whose forward orbits fall into the disc
    for (spec, x) in [(bundled::sierpinski(), 3.0), (bundled::vicsek(), -2.0), (bundled::line2(), 0.7)] {
        let c = case(&spec);
        let o = c.g.origin();
        let opts = GreenOptions::default();
        let on = eval(&c, &o, &o, Complex64::new(x, 0.0), &opts);
        assert!(on.value.im.abs() <= on.error_bound + 1e-12, "{}: G({x}) = {}", spec.name(), on.value);
        for delta in [1e-4, 1e-6] {
            let up = eval(&c, &o, &o, Complex64::new(x, delta), &opts);
            let down = eval(&c, &o, &o, Complex64::new(x, -delta), &opts);
            assert!((up.value - down.value).norm() <= 1e3 * delta, "{}: {} vs {}", spec.name(), up.value, down.value);
            assert!((up.value - on.value).norm() <= 1e3 * delta, "{}: {} vs {}", spec.name(), up.value, on.value);
        }
    }
}

#[test]
fn real_axis_values_inside_the_disc_are_real() {
    for spec in bundled::all() {
        let c = case(&spec);
        for x in &c.near {
            for k in -9..=9 {
                let z = ComplexPoint::real(k as f64 / 10.0);
                let v = evaluate_green_keys(&c.g, &c.t, x, &c.g.origin(), z, &GreenOptions::default()).unwrap();
                assert!(v.value.im.abs() <= 1e-12, "{}: {}", spec.name(), v.value);
                assert!(k < 0 || v.value.re >= 0.0);
            }
        }
    }
}
