//! Hot-path benchmarks: transforms, one solver step per scheme, noise
//! sampling, radial binning, and the fixed-point solve.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use torus_spde_bench::{grid, noise_spec, sample_field, solver};
use torus_spde_core::{
    forward_dft, inverse_dft, radial_energy_density, sample_increment, solve_cn, Equation,
};

fn bench_transforms(c: &mut Criterion) {
    let mut group = c.benchmark_group("dft");
    for n in [64usize, 256] {
        let field = sample_field(n);
        let hat = forward_dft(&field);
        group.bench_with_input(BenchmarkId::new("forward", n), &field, |b, f| {
            b.iter(|| black_box(forward_dft(f)))
        });
        group.bench_with_input(BenchmarkId::new("inverse", n), &hat, |b, h| {
            b.iter(|| black_box(inverse_dft(h).unwrap()))
        });
    }
    group.finish();
}

fn bench_solver_steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for (name, equation) in [
        ("heat", Equation::Heat),
        ("dac", Equation::DecoupledAc),
        ("ac", Equation::AllenCahn),
    ] {
        for n in [64usize, 256] {
            let mut s = solver(equation, n);
            let inc = sample_increment(grid(n), &noise_spec(), s.config().dt(), 0);
            group.bench_function(BenchmarkId::new(name, n), |b| {
                b.iter(|| s.step(black_box(&inc)).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_noise(c: &mut Criterion) {
    let mut group = c.benchmark_group("noise");
    for n in [64usize, 256] {
        let spec = noise_spec();
        let mut step = 0u64;
        group.bench_function(BenchmarkId::new("sample_increment", n), |b| {
            b.iter(|| {
                step += 1;
                black_box(sample_increment(grid(n), &spec, 1e-3, step))
            })
        });
    }
    group.finish();
}

fn bench_diagnostics(c: &mut Criterion) {
    let mut group = c.benchmark_group("diagnostics");
    for n in [64usize, 256] {
        let hat = forward_dft(&sample_field(n));
        group.bench_function(BenchmarkId::new("radial_energy_density", n), |b| {
            b.iter(|| black_box(radial_energy_density(&hat).unwrap()))
        });
    }
    group.finish();
}

fn bench_fixed_point(c: &mut Criterion) {
    let mut group = c.benchmark_group("renorm");
    group.sample_size(20);
    for n in [256usize, 1024] {
        group.bench_function(BenchmarkId::new("solve_cn", n), |b| {
            b.iter(|| black_box(solve_cn(1.0, n).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_transforms,
    bench_solver_steps,
    bench_noise,
    bench_diagnostics,
    bench_fixed_point
);
criterion_main!(benches);
