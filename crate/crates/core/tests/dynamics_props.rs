use num_complex::Complex64;
use proptest::prelude::*;

use selfsim::cellmodel::bundled;
use selfsim::dynamics::{approximate_julia, backward_orbit, preimages, DynamicsConfig};
use selfsim::ratfun::{ComplexPoint, RationalFunction};
use selfsim::transfer::{compute_transfer, TransferSet};

fn transfers() -> Vec<TransferSet> {
    bundled::all().iter().map(|s| compute_transfer(s).unwrap()).collect()
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-7 * (1.0 + b.norm())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn preimages_map_back(i in 0usize..3, re in -20.0f64..20.0, im in prop_oneof![Just(0.0), -5.0f64..5.0]) {
        let d = &transfers()[i].d;
        let w = Complex64::new(re, im);
        let pre = preimages(d, w.into()).unwrap();
        prop_assert_eq!(pre.len(), d.degree());
        for p in pre {
            match d.eval(p, selfsim::ratfun::Precision::Extended).unwrap().finite() {
                Some(v) => {
                    // near critical points the preimage is only accurate to about sqrt(eps)
                    let slack = d.derivative().eval_c64(p.finite().unwrap()).map(|dv| dv.abs()).unwrap_or(1.0);
                    prop_assert!(close(v, w) || slack < 1e-3, "d({}) = {} != {}", p, v, w);
                }
                None => prop_assert!(false, "preimage {} maps to infinity", p),
            }
        }
    }
}

#[test]
fn backward_orbits_are_consistent() {
    let config = DynamicsConfig::default();
    for t in transfers() {
        let tree = backward_orbit(&t.d, &[ComplexPoint::real(1.0)], 8, &config).unwrap();
        assert_eq!(tree.residual_failures, 0);
        assert!(tree.max_residual <= config.residual_tol);
        for p in &tree.points {
            if let Some(parent) = p.parent {
                let image = t.d.eval(p.z, selfsim::ratfun::Precision::Extended).unwrap();
                assert!(image.chordal_distance(&tree.points[parent].z) <= 1e-8, "{} -> {}", p.z, tree.points[parent].z);
                assert_eq!(tree.points[parent].depth + 1, p.depth);
            }
        }
    }
}

#[test]
fn deeper_orbits_extend_shallower_ones() {
    let config = DynamicsConfig::default();
    for t in transfers() {
        let shallow = approximate_julia(&t, 6, &config).unwrap();
        let deep = approximate_julia(&t, 7, &config).unwrap();
        for x in &shallow.points {
            let nearest = deep.points.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min);
            assert!(nearest <= 1e-9 * (1.0 + x.abs()), "{x} missing at depth 7");
        }
        assert!(deep.points.len() >= shallow.points.len());
        assert_eq!(deep.history[6].points, shallow.stats.points);
    }
}

#[test]
fn julia_points_avoid_the_attracting_fixed_point() {
    let config = DynamicsConfig::default();
    for t in transfers() {
        let j = approximate_julia(&t, 10, &config).unwrap();
        assert!(j.non_real.is_empty());
        // 0 is superattracting; every point of J is at distance ≥ 1 from it
        assert!(j.points.iter().all(|x| x.abs() >= 1.0 - 1e-9));
        assert!(j.points.contains(&1.0));
    }
}

#[test]
fn line_julia_set_is_a_cosine_image() {
    // d(z) = z²/(2 − z²) is conjugate to T_2 through z ↦ 1/z, so J = {1/cos(kπ/2^(n−1))}
    let d = RationalFunction::from_i64(&[0, 0, 1], &[2, 0, -1]).unwrap();
    let tree = backward_orbit(&d, &[ComplexPoint::real(1.0)], 5, &DynamicsConfig::default()).unwrap();
    for p in &tree.points {
        if let Some(c) = p.z.finite() {
            let theta = (1.0 / c.re).acos() / std::f64::consts::PI * (1 << 4) as f64;
            assert!((theta - theta.round()).abs() < 1e-6, "{}", c.re);
        }
    }
}
