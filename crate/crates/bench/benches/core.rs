use criterion::{black_box, criterion_group, criterion_main, Criterion};

use num_complex::Complex64;
use selfsim::cellmodel::{build_ncell, bundled, SelfSimilarGraph, VertexRef};
use selfsim::dynamics::{approximate_julia, DynamicsConfig};
use selfsim::green::{evaluate_green, GreenQuery};
use selfsim::oracle::functional_equation_series_check;
use selfsim::transfer::compute_transfer;

fn transfer(c: &mut Criterion) {
    for spec in bundled::all() {
        c.bench_function(&format!("compute_transfer/{}", spec.name()), |b| b.iter(|| compute_transfer(black_box(&spec)).unwrap()));
    }
    let v = bundled::vicsek();
    c.bench_function("build_ncell/vicsek/4", |b| b.iter(|| build_ncell(black_box(&v), 4).unwrap()));
}

fn dynamics(c: &mut Criterion) {
    let config = DynamicsConfig::default();
    for spec in bundled::all() {
        let t = compute_transfer(&spec).unwrap();
        c.bench_function(&format!("approximate_julia/{}/8", spec.name()), |b| {
            b.iter(|| approximate_julia(black_box(&t), 8, &config).unwrap())
        });
    }
}

fn green(c: &mut Criterion) {
    for spec in bundled::all() {
        let t = compute_transfer(&spec).unwrap();
        let g = SelfSimilarGraph::new(&spec);
        let o = VertexRef::origin();
        for (label, z) in [("inside", Complex64::new(0.3, 0.4)), ("continued", Complex64::new(2.0, 0.5))] {
            let q = GreenQuery::new(o.clone(), o.clone(), z.into());
            c.bench_function(&format!("evaluate_green/{}/{label}", spec.name()), |b| b.iter(|| evaluate_green(&g, &t, black_box(&q)).unwrap()));
        }
    }
}

fn series(c: &mut Criterion) {
    let mut group = c.benchmark_group("series_check");
    group.sample_size(10);
    let s = bundled::sierpinski();
    group.bench_function("sierpinski/8", |b| b.iter(|| functional_equation_series_check(black_box(&s), 8).unwrap()));
    group.finish();
}

criterion_group!(benches, transfer, dynamics, green, series);
criterion_main!(benches);
