use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use nhpseudo::bounds::GapComparison;
use nhpseudo::kernels::{schur, set_blas_threads, sigma_min};
use nhpseudo::localizer::nh_localizer;
use nhpseudo::quadratic::quadratic_gaps;
use nhpseudo::{build_rep, gap_record};
use nhpseudo_bench::{haldane_instance, random_instance};

fn kernels(c: &mut Criterion) {
    set_blas_threads(1);
    let mut g = c.benchmark_group("localizer_kernels");
    for n in [16, 48, 96] {
        let (t, site) = random_instance(n, 3);
        let rep = build_rep(1).unwrap();
        let l = nh_localizer(&t, &site, &rep).unwrap();
        g.bench_with_input(BenchmarkId::new("assemble", n), &n, |b, _| {
            b.iter(|| nh_localizer(black_box(&t), black_box(&site), &rep).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("schur", n), &n, |b, _| {
            b.iter(|| schur(black_box(&l), false).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sigma_min", n), &n, |b, _| {
            b.iter(|| sigma_min(black_box(&l)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("quadratic_gaps", n), &n, |b, _| {
            b.iter(|| quadratic_gaps(black_box(&t), black_box(&site)).unwrap())
        });
    }
    g.finish();
}

fn haldane_point(c: &mut Criterion) {
    set_blas_threads(1);
    let (t, site) = haldane_instance();
    let rep = build_rep(2).unwrap();
    let mut g = c.benchmark_group("haldane_point");
    g.sample_size(10);
    g.bench_function("gap_record", |b| {
        b.iter(|| gap_record(black_box(&t), black_box(&site), &rep).unwrap())
    });
    g.bench_function("gap_comparison", |b| {
        b.iter(|| GapComparison::evaluate(black_box(&t), black_box(&site), &rep).unwrap())
    });
    g.finish();
}

criterion_group!(benches, kernels, haldane_point);
criterion_main!(benches);
