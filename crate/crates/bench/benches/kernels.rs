use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use photonic_engine::units::hz_to_rad;
use photonic_engine::{
    concurrence, evolve, exact_map, lindblad_rhs, reservoir_coefficients, run_cycle, steady_state_numeric,
    superoperator_second_order, CavityState, EvolveOptions, JointUnitary, SteadyMethod, SteadyOptions,
};
use photonic_engine_bench::{fuel, physics};

fn atoms(c: &mut Criterion) {
    let s = fuel();
    let p = physics(0.03, 1.0, 74e3);
    c.bench_function("concurrence", |b| b.iter(|| concurrence(black_box(&s))));
    c.bench_function("reservoir_coefficients", |b| b.iter(|| reservoir_coefficients(black_box(&s), black_box(&p))));
}

fn collision_maps(c: &mut Criterion) {
    let s = fuel();
    let p = physics(0.03, 1.0, 74e3);
    let mut group = c.benchmark_group("collision_map");
    for d in [8usize, 16, 32] {
        let rho = CavityState::thermal(d, 1.0).unwrap();
        let u = JointUnitary::new(&p, d).unwrap();
        group.bench_with_input(BenchmarkId::new("exact", d), &d, |b, _| b.iter(|| exact_map(&rho, &s, &u)));
        group.bench_with_input(BenchmarkId::new("second_order", d), &d, |b, _| {
            b.iter(|| superoperator_second_order(&rho, &s, &p))
        });
        group.bench_with_input(BenchmarkId::new("unitary", d), &d, |b, &d| b.iter(|| JointUnitary::new(&p, d)));
    }
    group.finish();
}

fn master_equation(c: &mut Criterion) {
    let p = physics(0.01, 1.0, 740e3);
    let coeffs = reservoir_coefficients(&fuel(), &p).unwrap();
    let mut group = c.benchmark_group("master_equation");
    for d in [16usize, 64, 128] {
        let rho = CavityState::thermal(d, 1.0).unwrap();
        group.bench_with_input(BenchmarkId::new("rhs", d), &d, |b, _| b.iter(|| lindblad_rhs(&rho, &coeffs, true)));
    }
    let rho = CavityState::vacuum(16).unwrap();
    let opts = EvolveOptions { track_min_eigenvalue: false, ..EvolveOptions::default() };
    group.bench_function("evolve_5_over_gamma_d16", |b| b.iter(|| evolve(&rho, &coeffs, 5.0 / coeffs.gamma, &opts)));
    for (name, method) in [("null_space", SteadyMethod::NullSpace), ("long_time", SteadyMethod::LongTime)] {
        let opts = SteadyOptions { method, ..SteadyOptions::default() };
        group.bench_function(format!("steady_{name}_d16"), |b| b.iter(|| steady_state_numeric(&coeffs, 16, &opts)));
    }
    group.finish();
}

fn cycle(c: &mut Criterion) {
    let s = fuel();
    let p = physics(0.17, 1.0, 74e3);
    let delta = -hz_to_rad(1e6);
    let mut group = c.benchmark_group("cycle");
    for steps in [40usize, 400] {
        group.bench_with_input(BenchmarkId::from_parameter(steps), &steps, |b, &n| b.iter(|| run_cycle(&s, &p, delta, n)));
    }
    group.finish();
}

criterion_group!(benches, atoms, collision_maps, master_equation, cycle);
criterion_main!(benches);
