//! Energy functionals and monitors on computed trajectories.

use vacuum_euler::cli::{build_initial_data, DataSpec};
use vacuum_euler::diagnostics::{
    energy_gamma, energy_history, energy_snapshot, parabolic_field, parabolic_monitor,
    stack_consistency, ENERGY_DEPTH,
};
use vacuum_euler::initial_data::{ProfileKind, VelocityKind};
use vacuum_euler::kappa_solver::{direct_mol_solve, SolverConfig, Trajectory};
use vacuum_euler::oracles::{quadrature_oracle, AffineOracle};

fn data(velocity: VelocityKind) -> DataSpec {
    DataSpec {
        profile: ProfileKind::Quadratic { a: 1.0 },
        velocity,
        epsilon: 0.0,
    }
}

fn run(velocity: VelocityKind, kappa: f64, t_final: f64) -> (Trajectory, vacuum_euler::initial_data::InitialData) {
    let cfg = SolverConfig {
        kappa,
        dt: 1e-4,
        t_final,
        ..SolverConfig::default()
    };
    let init = build_initial_data(&data(velocity), &cfg, None).unwrap();
    (direct_mol_solve(&cfg, &init).unwrap(), init)
}

fn component(c: &[(String, f64)], name: &str) -> f64 {
    c.iter()
        .find(|(n, _)| n == name)
        .unwrap_or_else(|| panic!("no component {name}"))
        .1
}

#[test]
fn fluid_at_rest_has_the_closed_form_acceleration_norm() {
    let (traj, init) = run(VelocityKind::Affine { beta: 0.0, delta: 0.0 }, 0.0, 1e-3);
    let snap = energy_snapshot(&traj.state(0, ENERGY_DEPTH), &init.density).unwrap();
    assert!(component(&snap.components, "dt0_v_H2") < 1e-24);
    // v_t(0) = -2(1 - 2x): ∫(4x - 2)² + ∫16
    let e = component(&snap.components, "dt1_v_H1.5");
    assert!((e - 52.0 / 3.0).abs() < 1e-9, "{e}");
    let sum: f64 = snap.components.iter().map(|c| c.1).sum();
    assert_eq!(sum, snap.total);
}

#[test]
fn weighted_acceleration_norm_matches_the_affine_oracle() {
    let (beta, delta, kappa) = (0.1, -0.05, 0.05);
    let (traj, init) = run(VelocityKind::Affine { beta, delta }, kappa, 0.02);
    let oracle = AffineOracle::new(1.0, beta, delta, kappa).unwrap();
    for i in [0, traj.len() / 2, traj.len() - 1] {
        let snap = energy_snapshot(&traj.state(i, ENERGY_DEPTH), &init.density).unwrap();
        let s = oracle.state(traj.times[i]).unwrap();
        // ρ₀ ∂ₜ²v = x(1-x)(px + q)
        let (h, g) = oracle.jet(&s, 3);
        let (p, q) = (h[3], g[3]);
        let f0 = |x: f64| x * (1.0 - x) * (p * x + q);
        let f1 = |x: f64| -3.0 * p * x * x + 2.0 * (p - q) * x + q;
        let f2 = |x: f64| -6.0 * p * x + 2.0 * (p - q);
        let exact = quadrature_oracle(|x| f0(x).powi(2) + f1(x).powi(2) + f2(x).powi(2), 1e-13).unwrap();
        let got = component(&snap.components, "rho0_dt2_v_H2");
        assert!((got - exact).abs() < 1e-6 * exact.max(1.0), "t={} {got} {exact}", traj.times[i]);
    }
}

#[test]
fn gamma_two_functional_shares_the_velocity_norms() {
    let (traj, init) = run(VelocityKind::Sine { amplitude: 0.1, mode: 1 }, 0.0, 1e-3);
    let state = traj.state(traj.len() - 1, ENERGY_DEPTH);
    let e = energy_snapshot(&state, &init.density).unwrap();
    let g = energy_gamma(&state, &init.density, 2.0).unwrap();
    assert_eq!(g.a0, 0);
    for s in 0..5 {
        let order = 2.0 - s as f64 / 2.0;
        let name = format!("dt{s}_v_H{order}");
        assert_eq!(component(&e.components, &name), component(&g.components, &name));
    }
    assert!(energy_gamma(&state, &init.density, 3.0).is_err());
}

#[test]
fn history_keeps_the_final_record() {
    let (traj, init) = run(VelocityKind::Sine { amplitude: 0.1, mode: 1 }, 0.0, 1.1e-3);
    let h = energy_history(&traj, &init.density, 4).unwrap();
    assert_eq!(h.first().unwrap().t, 0.0);
    assert_eq!(h.last().unwrap().t, traj.final_time());
    assert!(h.windows(2).all(|w| w[0].t < w[1].t));
}

#[test]
fn jets_agree_with_differences_of_the_trajectory() {
    let (traj, _) = run(VelocityKind::Sine { amplitude: 0.1, mode: 1 }, 0.0, 2e-3);
    let i = traj.len() / 2;
    for k in 1..=2 {
        let r = stack_consistency(&traj, i, k).unwrap();
        assert!(r < 1e-5, "order {k}: {r}");
    }
    assert!(stack_consistency(&traj, 0, 1).is_err());
    assert!(stack_consistency(&traj, i, 5).is_err());
}

#[test]
fn parabolic_monitor_holds_with_viscosity() {
    let (traj, _) = run(VelocityKind::Sine { amplitude: 0.1, mode: 1 }, 0.1, 0.01);
    let f: Vec<Vec<f64>> = (0..traj.len()).map(|i| parabolic_field(&traj, i)).collect();
    let space = traj.space().clone();
    let m = parabolic_monitor(&traj.times, &f, |v| space.integrate(v), 0.1, 1e-3).unwrap();
    assert!(m.holds, "{m:?}");
    assert!(m.sup_f.is_finite() && m.f0 > 0.0);
}
