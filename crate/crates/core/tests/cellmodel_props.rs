use std::collections::BTreeSet;

use proptest::prelude::*;

use selfsim::cellmodel::{build_ncell, bundled, check_symmetry, CellAddress, CellSpec, CellSpecFile};
use selfsim::transfer::compute_transfer;

/// Same cell with vertex `i` renamed to `u{perm[i]}` and the vertex list reordered.
fn relabel(spec: &CellSpec, perm: &[usize]) -> CellSpec {
    let file = spec.to_file();
    let rename = |name: &String| format!("u{}", perm[spec.vertex(name).unwrap()]);
    let mut vertices: Vec<(usize, String)> = file.vertices.iter().map(|v| (perm[spec.vertex(v).unwrap()], rename(v))).collect();
    vertices.sort();
    let out = CellSpecFile {
        name: file.name.clone(),
        theta: file.theta,
        vertices: vertices.into_iter().map(|(_, n)| n).collect(),
        boundary: file.boundary.iter().map(rename).collect(),
        cliques: file.cliques.iter().map(|c| c.iter().map(rename).collect()).collect(),
        origin_clique: file.origin_clique,
        substitution_maps: file.substitution_maps.iter().map(|m| m.iter().map(rename).collect()).collect(),
        origin_vertex: file.origin_vertex.as_ref().map(rename),
        star_multiplicity: file.star_multiplicity,
    };
    CellSpec::from_file(&out).unwrap()
}

fn spec_and_perm() -> impl Strategy<Value = (CellSpec, Vec<usize>)> {
    (0usize..3).prop_flat_map(|i| {
        let spec = bundled::all().swap_remove(i);
        let n = spec.vertex_count();
        (Just(spec), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn symmetry_ignores_labels((spec, perm) in spec_and_perm()) {
        let relabelled = relabel(&spec, &perm);
        let a = check_symmetry(&spec).unwrap();
        let b = check_symmetry(&relabelled).unwrap();
        prop_assert_eq!(a.simply_symmetric, b.simply_symmetric);
        prop_assert_eq!(a.doubly_symmetric, b.doubly_symmetric);
        let (ta, tb) = (compute_transfer(&spec).unwrap(), compute_transfer(&relabelled).unwrap());
        prop_assert_eq!(ta.d, tb.d);
        prop_assert_eq!(ta.f, tb.f);
    }
}

#[test]
fn ncell_boundary_is_independent() {
    for spec in bundled::all() {
        for n in 1..=4 {
            let c = build_ncell(&spec, n).unwrap();
            let b = c.graph.boundary();
            assert_eq!(b.len(), spec.theta());
            for (i, &x) in b.iter().enumerate() {
                for &y in &b[i + 1..] {
                    assert!(!c.graph.is_adjacent(x, y), "{} n = {n}", spec.name());
                }
            }
        }
    }
}

#[test]
fn ncell_counts_follow_gluing() {
    for spec in bundled::all() {
        let glued: usize = (0..spec.vertex_count()).map(|v| spec.cliques_of(v).len().saturating_sub(1)).sum();
        let mut prev = build_ncell(&spec, 1).unwrap();
        assert_eq!(prev.graph.vertex_count(), spec.vertex_count());
        for n in 2..=4 {
            let c = build_ncell(&spec, n).unwrap();
            assert_eq!(c.graph.vertex_count(), spec.mu() * prev.graph.vertex_count() - glued, "{} n = {n}", spec.name());
            assert_eq!(c.graph.edge_count(), spec.mu() * prev.graph.edge_count(), "{} n = {n}", spec.name());
            prev = c;
        }
    }
}

#[test]
fn inserted_copies_share_at_most_one_vertex() {
    for spec in bundled::all() {
        for n in 2..=3 {
            let c = build_ncell(&spec, n).unwrap();
            let copies: Vec<BTreeSet<usize>> = (0..spec.mu())
                .map(|top| {
                    let mut set = BTreeSet::new();
                    for rest in CellAddress::all(spec.mu(), n - 2) {
                        let mut addr = vec![top];
                        addr.extend_from_slice(rest.digits());
                        for v in 0..spec.vertex_count() {
                            set.insert(c.index(&spec, &addr, v).unwrap());
                        }
                    }
                    set
                })
                .collect();
            let union: BTreeSet<usize> = copies.iter().flatten().copied().collect();
            assert_eq!(union.len(), c.graph.vertex_count());
            for i in 0..copies.len() {
                for j in i + 1..copies.len() {
                    let shared = copies[i].intersection(&copies[j]).count();
                    assert!(shared <= 1, "{} n = {n}: copies {i}, {j} share {shared}", spec.name());
                }
            }
        }
    }
}
