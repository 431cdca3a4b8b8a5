use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mforce::dos::{density_sharp, energy_grid};
use mforce::dynamics::propagators_driven;
use mforce::equilibrium::free_energy_sharp;
use mforce::focklab::{lindblad_evolve_truncated, truncated_so_gibbs, LindbladSpec};
use mforce::numerics::uniform_grid;
use mforce::thermo::{run_scenario, Scenario, ThermoSpec};
use mforce::{DrivingParams, IltSpec, ModelParams, OdeSpec, QuadratureSpec};
use std::hint::black_box;

fn params() -> ModelParams {
    ModelParams::new(1.0, 0.25, 0.1, 1.0).unwrap()
}

fn equilibrium(c: &mut Criterion) {
    let q = QuadratureSpec::default();
    let mode = params().static_mode();
    let mut group = c.benchmark_group("free_energy_sharp");
    for beta in [0.5, 2.0, 8.0] {
        group.bench_with_input(BenchmarkId::from_parameter(beta), &beta, |b, &beta| {
            b.iter(|| free_energy_sharp(black_box(beta), &mode, &q).unwrap())
        });
    }
    group.finish();
}

fn dos(c: &mut Criterion) {
    let q = QuadratureSpec { rel_tol: 1e-9, ..QuadratureSpec::default() };
    let grid = energy_grid(6.0, 5e-3);
    let p = params();
    c.bench_function("density_sharp/eps=2e-2", |b| {
        b.iter(|| density_sharp(&p, black_box(&grid), 2e-2, &IltSpec::default(), &q).unwrap())
    });
}

fn dynamics(c: &mut Criterion) {
    let p = params();
    let d = DrivingParams::new(0.25, 0.2, 0.0);
    let grid = uniform_grid(0.0, 100.0, 0.5);
    let spec = OdeSpec::default();
    c.bench_function("propagators_driven/t=100", |b| {
        b.iter(|| propagators_driven(black_box(&grid), &p, &d, &spec).unwrap())
    });
    let sc = Scenario::driven(p, d);
    let grid = uniform_grid(0.0, 100.0, 0.1);
    let spec = ThermoSpec::default();
    c.bench_function("run_scenario/periodic/t=100", |b| b.iter(|| run_scenario(&sc, black_box(&grid), &spec).unwrap()));
}

fn fock(c: &mut Criterion) {
    let p = params();
    let mut group = c.benchmark_group("truncated_so_gibbs");
    group.sample_size(10);
    for n_max in [10, 20, 40] {
        group.bench_with_input(BenchmarkId::from_parameter(n_max), &n_max, |b, &n| {
            b.iter(|| truncated_so_gibbs(n, 1.0, &p).unwrap())
        });
    }
    group.finish();
    let g = truncated_so_gibbs(8, 1.0, &p).unwrap();
    let grid = [0.0, 1.0, 2.0];
    c.bench_function("lindblad/n_max=8/t=2", |b| {
        b.iter(|| lindblad_evolve_truncated(&g.rho, black_box(&grid), &p, 8, &LindbladSpec::default()).unwrap())
    });
}

criterion_group!(benches, equilibrium, dos, dynamics, fock);
criterion_main!(benches);
