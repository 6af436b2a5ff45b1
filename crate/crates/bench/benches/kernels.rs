use std::hint::black_box;

use chslab_core::inequality::{kernel_integral, random_field};
use chslab_core::solver::{profile, rhs, step_rk4, ProfileKind, State, SystemParams};
use chslab_core::spectral::{product_exact, sobolev_norm};
use chslab_core::Grid;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn state(n: usize) -> State {
    let grid = Grid::new(64.0, n).unwrap();
    let u = profile(&grid, ProfileKind::Gaussian, 1.0, 4.0, 0).unwrap();
    let rho = profile(&grid, ProfileKind::Gaussian, 0.5, 4.0, 0).unwrap();
    State::new(u, rho, 0.0).unwrap()
}

fn solver(c: &mut Criterion) {
    let params = SystemParams::default();
    let mut group = c.benchmark_group("solver");
    for n in [256, 1024] {
        let st = state(n);
        group.bench_with_input(BenchmarkId::new("rhs", n), &st, |b, st| b.iter(|| rhs(black_box(st), &params).unwrap()));
        group.bench_with_input(BenchmarkId::new("rk4_step", n), &st, |b, st| {
            b.iter(|| step_rk4(black_box(st), &params, 0.01).unwrap())
        });
    }
    group.finish();
}

fn spectral(c: &mut Criterion) {
    let grid = Grid::new(64.0, 1024).unwrap();
    let f = random_field(&grid, 2.0, 0.6, 1.0, 1).unwrap();
    let g = random_field(&grid, 1.0, 0.6, 1.0, 2).unwrap();
    c.bench_function("sobolev_norm/1024", |b| b.iter(|| sobolev_norm(black_box(&f), 2.5)));
    c.bench_function("product_exact/1024", |b| b.iter(|| product_exact(black_box(&f), &g).unwrap()));
}

fn quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel_integral");
    for eta in [0.0, 10.0, 1e4] {
        group.bench_with_input(BenchmarkId::from_parameter(eta), &eta, |b, &eta| {
            b.iter(|| kernel_integral(0.5, 1.5, 2.0, black_box(eta)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, solver, spectral, quadrature);
criterion_main!(benches);
