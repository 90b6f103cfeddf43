//! Behaviour of the cavity maps, generator, integrator and steady states.

use nalgebra::DMatrix;
use photonic_engine::atoms::{EE, GG};
use photonic_engine::cavity::{Generator, SteadyMethod};
use photonic_engine::linalg::{hermiticity_error, max_abs, trace};
use photonic_engine::sweep::{random_cavity_state, random_pure_family};
use photonic_engine::units::hz_to_rad;
use photonic_engine::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn params(g: f64, g_tau: f64, delta_tau: f64) -> InteractionParams {
    let tau = if g > 0.0 { g_tau / g } else { 1e-6 };
    InteractionParams::new(g, tau, 2.0e4, delta_tau / tau, 1.0, 0.0).unwrap()
}

fn lab(g_tau: f64, kappa_hz: f64, n_pair: f64) -> InteractionParams {
    InteractionParams::with_g_tau(hz_to_rad(334e3), g_tau, hz_to_rad(kappa_hz), 0.0, n_pair).unwrap()
}

fn fuel(a: f64, b: f64, c: f64) -> AtomPairState {
    build_pure_family(PureFamilyParams::new(a, b, c, 0.0)).unwrap()
}

#[test]
fn propagator_is_identity_without_coupling_or_time() {
    let space = FockSpace::new(6).unwrap();
    let id = DMatrix::<C64>::identity(24, 24);
    let no_coupling = joint_unitary(&params(0.0, 0.0, 0.0), &space).unwrap();
    assert!(max_abs(&(no_coupling.matrix() - &id)) < 1e-15);
    let no_time = InteractionParams::new(1e5, 0.0, 1.0, 3e5, 1.0, 0.0).unwrap();
    assert!(max_abs(&(joint_unitary(&no_time, &space).unwrap().matrix() - &id)) < 1e-15);
}

#[test]
fn ground_pair_and_vacuum_only_acquire_a_phase() {
    let d = 5;
    let u = JointUnitary::new(&params(1e5, 0.4, 1.3), d).unwrap();
    let col = u.matrix().column(GG * d);
    assert!((col[GG * d].norm() - 1.0).abs() < 1e-12);
    assert!((col.norm_squared() - col[GG * d].norm_sqr()).abs() < 1e-12);
}

#[test]
fn diagonal_inputs_give_diagonal_outputs() {
    let d = 8;
    let u = JointUnitary::new(&params(1e5, 0.3, 0.0), d).unwrap();
    let out = exact_map(&CavityState::vacuum(d).unwrap(), &AtomPairState::maximally_mixed(), &u).unwrap();
    let m = out.state.matrix();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                assert!(m[(i, j)].norm() < 1e-15);
            }
        }
    }
}

#[test]
fn exact_map_preserves_trace_on_random_inputs() {
    let d = 16;
    let mut rng = StdRng::seed_from_u64(21);
    let u = JointUnitary::new(&params(1e5, 0.25, 0.6), d).unwrap();
    for _ in 0..10 {
        let atoms = random_pure_family(&mut rng);
        let cavity = random_cavity_state(&mut rng, d, d - 2).unwrap();
        let out = exact_map(&cavity, &atoms, &u).unwrap();
        assert!((trace(out.state.matrix()).re - 1.0).abs() < 1e-10);
        assert!(out.leakage.abs() < 1e-10);
    }
}

#[test]
fn truncation_leakage_falls_with_dimension() {
    let mut previous = f64::INFINITY;
    for d in [6, 8, 10, 12, 14] {
        let u = JointUnitary::new(&params(1e5, 0.3, 0.0), d).unwrap();
        let out = exact_map(&CavityState::thermal(d, 1.0).unwrap(), &AtomPairState::basis(EE), &u).unwrap();
        assert!(out.leakage > 0.0 && out.leakage < previous, "d={d}: {}", out.leakage);
        previous = out.leakage;
    }
}

#[test]
fn product_table_is_only_approximately_unitary() {
    let d = 8;
    let p = params(1e5, 0.3, 0.5);
    let table = JointUnitary::from_product_table(&p, d).unwrap();
    let exact = JointUnitary::new(&p, d).unwrap();
    assert!(exact.unitarity_error(d - 3) < 1e-12);
    let err = table.unitarity_error(d - 3);
    assert!(err > 1e-6, "table deficit {err}");
}

#[test]
fn second_order_map_fixed_points_and_identity() {
    let d = 8;
    let vac = CavityState::vacuum(d).unwrap();
    let out = superoperator_second_order(&vac, &AtomPairState::basis(GG), &params(1e5, 0.1, 0.7)).unwrap();
    assert!(max_abs(&(out.matrix() - vac.matrix())) < 1e-15);
    let mut rng = StdRng::seed_from_u64(2);
    let rho = random_cavity_state(&mut rng, d, d).unwrap();
    let same = superoperator_second_order(&rho, &random_pure_family(&mut rng), &params(0.0, 0.0, 0.0)).unwrap();
    assert!(max_abs(&(same.matrix() - rho.matrix())) < 1e-15);
}

#[test]
fn second_order_map_halving_ratio() {
    // The residual against the exact map drops about eightfold per halving of gτ.
    let mut rng = StdRng::seed_from_u64(8);
    let d = 8;
    let atoms = random_pure_family(&mut rng);
    let rho = random_cavity_state(&mut rng, d, d - 2).unwrap();
    let residual = |gt: f64| {
        let p = params(1e5, gt, 0.0);
        let exact = exact_map(&rho, &atoms, &JointUnitary::new(&p, d).unwrap()).unwrap();
        let approx = superoperator_second_order(&rho, &atoms, &p).unwrap();
        max_abs(&(exact.state.matrix() - approx.matrix()))
    };
    let ratio = residual(0.02) / residual(0.01);
    assert!((6.5..=9.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn ground_fuel_leaves_vacuum_stationary() {
    let c = reservoir_coefficients(&AtomPairState::basis(GG), &lab(0.03, 74e3, 2.0)).unwrap();
    let rhs = lindblad_rhs(&CavityState::vacuum(6).unwrap(), &c, true);
    assert!(max_abs(&rhs) < 1e-20);
    let s = steady_state_numeric(&c, 10, &SteadyOptions::default()).unwrap();
    assert!((s.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
}

#[test]
fn pure_decay_of_a_diagonal_state() {
    let kappa = 3.0e4;
    let c = ReservoirCoefficients {
        p1: 0.0,
        p2: 0.0,
        mu: C64::new(0.0, 0.0),
        alpha: C64::new(0.0, 0.0),
        gamma: 0.5 * kappa,
        n_th: 0.0,
        drive_strength: C64::new(0.0, 0.0),
        push_pull: 0.0,
        const_shift: 0.0,
        kappa,
    };
    let start = CavityState::fock(40, 3).unwrap();
    let t = 2.0 / kappa;
    let traj = evolve(&start, &c, t, &EvolveOptions::default()).unwrap();
    for p in &traj.points {
        let want = 3.0 * (-kappa * p.t).exp();
        assert!((p.n_mean - want).abs() <= 1e-3 * want, "t={}: {} vs {want}", p.t, p.n_mean);
    }
}

#[test]
fn bell_fuel_relaxes_to_thermal_occupation_without_coherent_amplitude() {
    let c = reservoir_coefficients(&fuel(1.0, 0.0, 1.0), &lab(0.03, 74e3, 2.0)).unwrap();
    let m = steady_state_moments(&c).unwrap();
    let d = auto_fock_dim(&m).unwrap();
    let traj = evolve(&CavityState::vacuum(d).unwrap(), &c, 15.0 / c.gamma, &EvolveOptions::default()).unwrap();
    let mut last = -1.0;
    for p in &traj.points {
        assert!(p.a_mean.norm() < 1e-12);
        // Allow for the per-step integration tolerance.
        assert!(p.n_mean >= last - 1e-8, "n(t) must rise monotonically");
        last = p.n_mean;
    }
    assert!((last - m.n_th).abs() < 1e-3 * m.n_th);
    let s = steady_state_numeric(&c, d, &SteadyOptions::default()).unwrap();
    assert!((s.mean_photon() - m.n_th).abs() < 1e-2 * m.n_th);
    assert!(s.mean_a2().norm() > 1e-3, "two-photon coherence from the Bell pair");
}

#[test]
fn coherent_amplitude_approaches_closed_form() {
    let c = reservoir_coefficients(&fuel(1.0, 1.0, 1.0), &lab(0.01, 740e3, 1.0)).unwrap();
    let m = steady_state_moments(&c).unwrap();
    let d = auto_fock_dim(&m).unwrap();
    let traj = evolve(&CavityState::vacuum(d).unwrap(), &c, 10.0 / c.gamma, &EvolveOptions::default()).unwrap();
    let end = traj.points.last().unwrap();
    assert!((end.n_mean - m.n_ss).abs() < 0.01 * m.n_ss);
    assert!((end.a_mean - m.a_ss).norm() < 1e-3 * m.a_ss.norm());
    let want = C64::new(0.0, -1.0) * c.drive_strength / c.gamma;
    assert!((m.a_ss - want).norm() < 1e-15);
    assert!((m.a_ss.norm_sqr() - (m.n_ss - m.n_th)).abs() < 1e-12);
}

#[test]
fn null_space_and_long_time_agree() {
    let c = reservoir_coefficients(&fuel(1.0, 0.6, 0.8), &lab(0.01, 740e3, 1.0)).unwrap();
    let d = 16;
    let solve = |method| {
        let opts = SteadyOptions { method, tail_tolerance: None, ..Default::default() };
        steady_state_numeric(&c, d, &opts).unwrap()
    };
    let a = solve(SteadyMethod::NullSpace);
    let b = solve(SteadyMethod::LongTime);
    assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-6);
}

#[test]
fn coarse_grained_collisions_match_the_generator() {
    // ρ + r_a Δt (S(τ) − 1)ρ + Δt κ-damping agrees with the master equation
    // to second order in Δt.
    let d = 12;
    let mut rng = StdRng::seed_from_u64(4);
    let atoms = random_pure_family(&mut rng);
    let p = lab(0.02, 74e3, 1.5);
    let c = ReservoirCoefficients::evaluate(&atoms, &p);
    let rho = random_cavity_state(&mut rng, d, 4).unwrap();
    let mapped = superoperator_second_order(&rho, &atoms, &p).unwrap();
    let damping_only = ReservoirCoefficients {
        p1: 0.0,
        p2: 0.0,
        mu: C64::new(0.0, 0.0),
        drive_strength: C64::new(0.0, 0.0),
        push_pull: 0.0,
        ..c
    };
    let damping = Generator::new(&damping_only, d, false).apply(rho.matrix());
    let gap = |dt: f64| {
        let step = rho.matrix() + (mapped.matrix() - rho.matrix()) * C64::new(p.pump_rate() * dt, 0.0)
            + &damping * C64::new(dt, 0.0);
        let opts = EvolveOptions { tol: 1e-14, include_heff: true, ..Default::default() };
        let exact = evolve(&rho, &c, dt, &opts).unwrap().final_state;
        max_abs(&(step - exact.matrix()))
    };
    let t0 = 0.05 / c.rate_scale();
    let (g1, g2) = (gap(t0), gap(0.5 * t0));
    let ratio = g1 / g2;
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio} ({g1:e}, {g2:e})");
}

#[test]
fn heff_changes_phases_not_populations_at_resonance() {
    let atoms = fuel(1.0, 0.5, 0.2);
    let p = InteractionParams { delta: hz_to_rad(300e3), ..lab(0.03, 74e3, 1.0) };
    let c = reservoir_coefficients(&atoms, &p).unwrap();
    assert!(c.push_pull != 0.0);
    let rho = CavityState::coherent(30, C64::new(0.8, 0.1)).unwrap();
    let with = lindblad_rhs(&rho, &c, true);
    let without = lindblad_rhs(&rho, &c, false);
    let diff = &with - &without;
    assert!(hermiticity_error(&diff) < 1e-9 * max_abs(&with));
    for k in 0..30 {
        assert!(diff[(k, k)].norm() < 1e-9 * max_abs(&with));
    }
}
