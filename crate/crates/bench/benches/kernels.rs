use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use ltwist::characters::{count_family, enumerate_family, FamilySpec, Variant};
use ltwist::gauss::{gauss_sum_direct, GaussEngine};
use ltwist::lfun::{ap_point_count, l_value_with_table, twist_sign, CoefficientTable};
use ltwist_bench::{coefficients, curve, sample};

fn point_counting(c: &mut Criterion) {
    let e = curve();
    let mut g = c.benchmark_group("a_p");
    for p in [10_007u64, 100_003, 1_000_003] {
        g.bench_function(format!("point_count/{p}"), |b| b.iter(|| ap_point_count(&e, black_box(p))));
    }
    g.sample_size(10);
    g.bench_function("table/100000", |b| b.iter(|| CoefficientTable::build(&e, black_box(100_000))));
    g.finish();
}

fn gauss_sums(c: &mut Criterion) {
    let chars = sample(4, Variant::All, 20_000, 97);
    let mut g = c.benchmark_group("gauss");
    g.bench_function("direct", |b| {
        b.iter(|| chars.iter().map(|chi| gauss_sum_direct(chi).value).sum::<num_complex::Complex64>())
    });
    g.bench_function("engine_tau_sq", |b| {
        b.iter_batched(
            GaussEngine::new,
            |eng| chars.iter().map(|chi| eng.tau_sq(chi)).sum::<num_complex::Complex64>(),
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

fn smoothed_sums(c: &mut Criterion) {
    let e = curve();
    let tol = 1e-12;
    let chars = sample(4, Variant::Prime, 5000, 25);
    let coeffs = coefficients(5000, tol);
    let engine = GaussEngine::new();
    let prepared: Vec<_> = chars
        .iter()
        .map(|chi| (chi, chi.table(), twist_sign(&e, chi, engine.tau_sq(chi))))
        .collect();
    c.bench_function("l_value/prime_quartic_q<=5000", |b| {
        b.iter(|| {
            prepared
                .iter()
                .map(|(chi, t, eps)| l_value_with_table(&e, chi, t, &coeffs, *eps, tol).unwrap().value)
                .sum::<num_complex::Complex64>()
        })
    });
}

fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("families");
    g.bench_function("enumerate/4:all/20000", |b| {
        b.iter(|| enumerate_family(FamilySpec::new(4, Variant::All), black_box(20_000)).count())
    });
    g.bench_function("count/6:all/100000", |b| {
        b.iter(|| count_family(&FamilySpec::new(6, Variant::All), &[black_box(100_000)]))
    });
    g.finish();
}

criterion_group!(benches, point_counting, gauss_sums, smoothed_sums, enumeration);
criterion_main!(benches);
