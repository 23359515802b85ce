use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use selfsim::cellmodel::{build_ncell, bundled, NCell};
use selfsim::oracle::{green_ncell, AbsorbingWalkProblem};

fn ncell_case() -> impl Strategy<Value = (NCell, usize, usize, bool)> {
    (0usize..3, 1usize..=2).prop_flat_map(|(i, n)| {
        let spec = bundled::all().swap_remove(i);
        let c = build_ncell(&spec, n).unwrap();
        let nv = c.graph.vertex_count();
        (Just(c), 0..nv, 0..nv, any::<bool>())
    })
}

fn absorbing(c: &NCell, absorb: bool) -> Vec<usize> {
    if absorb {
        c.graph.boundary().to_vec()
    } else {
        Vec::new()
    }
}

fn green(c: &NCell, absorb: bool, x: usize, y: usize) -> selfsim::ratfun::RationalFunction {
    green_ncell(&AbsorbingWalkProblem { graph: &c.graph, absorbing: absorbing(c, absorb), source: x, target: y }).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn coefficients_are_probabilities((c, x, y, absorb) in ncell_case()) {
        let s = green(&c, absorb, x, y).series(24).unwrap();
        for (k, a) in s.iter().enumerate() {
            prop_assert!(!a.is_negative() && *a <= BigRational::one(), "coefficient {} = {}", k, a);
        }
    }

    #[test]
    fn finite_walk_is_reversible((c, x, y, absorb) in ncell_case()) {
        let deg = |v: usize| BigRational::from_integer(BigInt::from(c.graph.degree(v)));
        let b = absorbing(&c, absorb);
        // reversibility only holds between non-absorbing states
        prop_assume!(!b.contains(&x) && !b.contains(&y));
        prop_assert_eq!(green(&c, absorb, x, y).scale(&deg(x)), green(&c, absorb, y, x).scale(&deg(y)));
    }

    #[test]
    fn resolvent_identity_holds((c, x, y, absorb) in ncell_case(), p in 1i64..9) {
        // (I − zQ)G = I, row x, column y, at z = p/10
        let z = BigRational::new(BigInt::from(p), BigInt::from(10));
        let q = c.graph.transition_matrix(&absorbing(&c, absorb));
        let at = |u: usize| green(&c, absorb, u, y).eval_rational(&z).unwrap();
        let mut lhs = at(x);
        for (u, pxu) in q.row(x) {
            lhs -= &z * pxu * at(u);
        }
        let delta = if x == y { BigRational::one() } else { BigRational::zero() };
        prop_assert_eq!(lhs, delta);
    }
}
