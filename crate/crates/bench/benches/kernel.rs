use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fracmap_core::kernel::{
    partial_kernel_sum, weights_direct, weights_loggamma, weights_recurrence, FractionalOrder,
};

fn order(q: f64) -> FractionalOrder {
    FractionalOrder::new(q).unwrap()
}

fn bench_weight_paths(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel_weights");
    for n_max in [2_500usize, 100_000] {
        group.bench_with_input(BenchmarkId::new("recurrence", n_max), &n_max, |b, &n| {
            b.iter(|| weights_recurrence(order(0.5), n))
        });
        group.bench_with_input(BenchmarkId::new("loggamma", n_max), &n_max, |b, &n| {
            b.iter(|| weights_loggamma(order(0.5), n))
        });
    }
    group.bench_function("direct_250", |b| b.iter(|| weights_direct(order(0.5), 250)));
    group.finish();
}

fn bench_partial_sums(c: &mut Criterion) {
    c.bench_function("partial_kernel_sum_100k", |b| {
        b.iter(|| partial_kernel_sum(order(0.3), 100_000))
    });
}

criterion_group!(benches, bench_weight_paths, bench_partial_sums);
criterion_main!(benches);
