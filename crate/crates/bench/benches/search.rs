use beauville_bench::{base_structure, metacyclic};
use beauville_core::{search, verify, SearchOptions};
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

fn exhaustive(c: &mut Criterion) {
    let mut group = c.benchmark_group("exhaustive search");
    group.sample_size(10);
    // orders 25, 49, 625 and 4096
    for (p, m, n, lambda) in [(5, 1, 1, 1), (7, 1, 1, 1), (5, 2, 2, 6), (2, 6, 6, 5)] {
        let g = metacyclic(p, m, n, lambda);
        let options = SearchOptions::exhaustive().with_limit(1);
        group.bench_function(g.spec(), |b| {
            b.iter(|| search(black_box(&g), &options).unwrap().count)
        });
    }
    group.finish();
}

fn first_found(c: &mut Criterion) {
    let g = metacyclic(5, 2, 2, 6);
    c.bench_function("first-found search, order 625", |b| {
        b.iter(|| {
            search(black_box(&g), &SearchOptions::first_found())
                .unwrap()
                .exists()
        })
    });
}

fn verification(c: &mut Criterion) {
    let s = base_structure(5);
    c.bench_function("verify (Z/5)^2", |b| {
        b.iter(|| verify(&s.group, black_box(s.first), s.second).unwrap())
    });
}

criterion_group!(benches, exhaustive, first_found, verification);
criterion_main!(benches);
