use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use volrat::john::{self, solve_max_inscribed_ellipsoid, SolverOptions};
use volrat::lp_spaces::lewis_position;
use volrat::measures::polytope_volume;
use volrat::{bodies, random};
use volrat_bench::fixtures;

fn ellipsoid(c: &mut Criterion) {
    let mut group = c.benchmark_group("max_inscribed_ellipsoid");
    group.bench_function("cube3", |b| {
        let p = bodies::cube(3);
        b.iter(|| solve_max_inscribed_ellipsoid(black_box(&p), &SolverOptions::default()).unwrap())
    });
    for n in [2, 3, 4] {
        let ps = fixtures(n, 8, false);
        group.bench_with_input(BenchmarkId::new("random", n), &ps, |b, ps| {
            b.iter(|| {
                for p in ps {
                    solve_max_inscribed_ellipsoid(black_box(p), &SolverOptions::default()).unwrap();
                }
            })
        });
    }
    group.finish();
}

fn pipeline(c: &mut Criterion) {
    let ps = fixtures(3, 8, true);
    c.bench_function("john_analyze_symmetric_n3", |b| {
        b.iter(|| {
            for p in &ps {
                john::analyze(black_box(p), true).unwrap();
            }
        })
    });
}

fn conversions(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact");
    for n in [3, 4, 5] {
        let p = fixtures(n, 1, true).remove(0);
        group.bench_with_input(BenchmarkId::new("h_to_v", n), &p, |b, p| {
            b.iter(|| p.to_vrep().unwrap())
        });
        let v = p.to_vrep().unwrap();
        group.bench_with_input(BenchmarkId::new("volume", n), &v, |b, v| {
            b.iter(|| polytope_volume(v).unwrap())
        });
    }
    group.finish();
}

fn lewis(c: &mut Criterion) {
    let mut group = c.benchmark_group("lewis_position");
    for p in [1.0, 1.5, 3.0] {
        let spec = random::random_subspace(&mut random::rng(5), 8, 3, p);
        group.bench_with_input(BenchmarkId::from_parameter(p), &spec, |b, s| {
            b.iter(|| lewis_position(s).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ellipsoid, pipeline, conversions, lewis);
criterion_main!(benches);
