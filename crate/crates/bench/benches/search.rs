use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use shellsat_core::collapse::is_collapsible;
use shellsat_core::harness::canon::graph_from_edges;
use shellsat_core::harness::subdivide;
use shellsat_core::shelling::find_shelling;
use shellsat_core::wsat::{decide_wsat_eq_treesize, k3_closure, wsat_number};
use shellsat_core::{run_chain, Budget, Complex, Graph};

fn complex(facets: &[&str]) -> Complex {
    Complex::from_facets(facets.iter().map(|f| f.split_whitespace())).unwrap()
}

fn octahedron() -> Complex {
    complex(&[
        "a b c", "a c d", "a d e", "a b e", "f b c", "f c d", "f d e", "f b e",
    ])
}

fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for a in 0..n as u8 {
        for b in a + 1..n as u8 {
            edges.push([a, b]);
        }
    }
    graph_from_edges(n, &edges)
}

fn shelling(c: &mut Criterion) {
    let sd_octahedron = subdivide(&octahedron(), 1);
    c.bench_function("shelling/sd octahedron", |b| {
        b.iter(|| find_shelling(black_box(&sd_octahedron), &mut Budget::default()).unwrap())
    });
    let annulus = subdivide(
        &complex(&["a b d", "b d e", "b c e", "c e f", "a c f", "a d f"]),
        1,
    );
    c.bench_function("shelling/sd annulus (refuted)", |b| {
        b.iter(|| find_shelling(black_box(&annulus), &mut Budget::default()).unwrap())
    });
}

fn collapse(c: &mut Criterion) {
    let disc = subdivide(&complex(&["a b c", "a c d", "a d e"]), 2);
    c.bench_function("collapse/sd2 fan of three", |b| {
        b.iter(|| is_collapsible(black_box(&disc), &mut Budget::default()))
    });
}

fn saturation(c: &mut Criterion) {
    let k9 = complete(9);
    let path = k9
        .with_edges(k9.edges().iter().copied().filter(|e| e.v() == e.u() + 1))
        .unwrap();
    c.bench_function("closure/K9 from a path", |b| {
        b.iter(|| k3_closure(black_box(&k9), &path).unwrap())
    });
    let host = Graph::one_skeleton(&subdivide(&octahedron(), 1));
    c.bench_function("wsat/tree decision on sd octahedron", |b| {
        b.iter(|| decide_wsat_eq_treesize(black_box(&host), &mut Budget::default()).unwrap())
    });
    let k7 = complete(7);
    c.bench_function("wsat/number of K7", |b| {
        b.iter(|| wsat_number(black_box(&k7), &mut Budget::default()).unwrap())
    });
}

fn chain(c: &mut Criterion) {
    let cone = complex(&["a b c", "a b d", "a c d"]);
    c.bench_function("chain/non-flag cone", |b| {
        b.iter_batched(
            || cone.clone(),
            |k| run_chain(&k, &mut Budget::default()).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, shelling, collapse, saturation, chain);
criterion_main!(benches);
