use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use qbeat_core::{
    beat::{simulate, BeatConfig},
    build_ep, find_all_roots, random_system, solve_full, solve_truncated, SizeBounds, SolverParams,
};

fn bench_reduction(c: &mut Criterion) {
    let bounds = SizeBounds {
        nq: (4, 4),
        nxi: (10, 10),
    };
    let instance = random_system(7, &bounds);
    let sys = &instance.system;
    let params = SolverParams::default();

    c.bench_function("solve_full_4x10", |b| {
        b.iter(|| black_box(solve_full(sys)))
    });

    c.bench_function("solve_truncated_4x10", |b| {
        b.iter(|| black_box(solve_truncated(sys).unwrap()))
    });

    let truncated = solve_truncated(sys).unwrap();
    c.bench_function("build_ep_4x10", |b| {
        b.iter(|| black_box(build_ep(sys, &truncated, &params)))
    });

    let ep = build_ep(sys, &truncated, &params);
    c.bench_function("find_all_roots_4x10", |b| {
        b.iter(|| black_box(find_all_roots(&ep, sys.background(), &params).unwrap()))
    });
}

fn bench_beat(c: &mut Criterion) {
    let cfg = BeatConfig::new(vec![0.2, 0.3, 0.5], vec![-1.0, 0.0, 1.0], 100_000, 42);
    c.bench_function("beat_simulate_1e5", |b| {
        b.iter(|| black_box(simulate(&cfg).unwrap()))
    });
}

criterion_group!(benches, bench_reduction, bench_beat);
criterion_main!(benches);
