use beauville_bench::{base_structure, metacyclic};
use beauville_core::{build_tower, frattini_lift, LambdaRule};
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

fn lift(c: &mut Criterion) {
    let s0 = base_structure(5);
    for n in [2, 3, 4] {
        let g = metacyclic(5, n, n, 6);
        c.bench_function(&format!("frattini lift, order 5^{}", 2 * n), |b| {
            b.iter(|| frattini_lift(black_box(&g), &s0).unwrap())
        });
    }
}

fn tower(c: &mut Criterion) {
    let mut group = c.benchmark_group("tower");
    group.sample_size(10);
    for depth in [2, 4] {
        group.bench_function(format!("p=5, depth {depth}"), |b| {
            b.iter(|| build_tower(5, black_box(depth), &LambdaRule::OnePlusP).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, lift, tower);
criterion_main!(benches);
