use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use pmrsim::divdiff::{dd_exp_exact, dd_exp_oracle, ehat_partition};
use pmrsim_bench::dd_inputs;

fn exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("dd_exp_exact");
    for q in [2, 8, 32] {
        let x = dd_inputs(q);
        g.bench_with_input(BenchmarkId::from_parameter(q), &x, |b, x| b.iter(|| dd_exp_exact(black_box(x), 0.7)));
    }
    g.finish();
    let x = dd_inputs(8);
    c.bench_function("dd_exp_oracle/8", |b| b.iter(|| dd_exp_oracle(black_box(&x), 0.7, 30)));
}

fn approx(c: &mut Criterion) {
    let mut g = c.benchmark_group("ehat_partition");
    for (q, k) in [(4, 4), (6, 8), (8, 16)] {
        let x = dd_inputs(q);
        g.bench_with_input(BenchmarkId::new(format!("q{q}"), k), &k, |b, &k| {
            b.iter(|| ehat_partition(black_box(&x), 0.7, k))
        });
    }
    g.finish();
}

criterion_group!(benches, exact, approx);
criterion_main!(benches);
