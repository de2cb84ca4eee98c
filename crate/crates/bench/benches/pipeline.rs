use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use pmrsim::circuit::{compile_step, count_step, AlphaMode};
use pmrsim::lcu::{build_u_tilde, simulate, SimOptions};
use pmrsim::linalg::CVec;
use pmrsim::pmr::pmr_decompose;
use pmrsim::Complex64;
use pmrsim_bench::{dipolar_family, ising_ring, rydberg_family};

fn decompose(c: &mut Criterion) {
    let mut g = c.benchmark_group("pmr_decompose");
    for (name, fam) in [("rydberg", rydberg_family()), ("dipolar", dipolar_family())] {
        let pauli = fam.instance(32).unwrap().pauli;
        g.bench_function(BenchmarkId::new(name, 32), |b| b.iter(|| pmr_decompose(black_box(&pauli))));
    }
    g.finish();
}

fn operators(c: &mut Criterion) {
    let (h, p) = ising_ring(4);
    c.bench_function("build_u_tilde/ising4", |b| b.iter(|| build_u_tilde(black_box(&h), &p, 1e7, 12)));
    let psi = CVec::from_fn(16, |i, _| if i == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    c.bench_function("simulate/ising4", |b| b.iter(|| simulate(&h, black_box(&psi), 0.01, 1.0, &SimOptions::default())));
}

fn circuits(c: &mut Criterion) {
    let (h, p) = ising_ring(8);
    c.bench_function("compile_step/ising8", |b| b.iter(|| compile_step(black_box(&h), &p, AlphaMode::BinarySearch)));
    let big = rydberg_family().instance(64).unwrap().pmr;
    let pb = pmrsim::lcu::choose_params(0.01, 1.0, &big).unwrap();
    c.bench_function("count_step/rydberg64", |b| b.iter(|| count_step(black_box(&big), &pb, AlphaMode::BinarySearch)));
}

criterion_group!(benches, decompose, operators, circuits);
criterion_main!(benches);
