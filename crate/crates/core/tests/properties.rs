//! Property-based checks of invariants across modules.

use std::sync::Arc;

use nalgebra::SymmetricEigen;
use proptest::prelude::*;

use vacuum_euler::cli::fmt_f64;
use vacuum_euler::diagnostics::{a0, check_bound};
use vacuum_euler::function_space::{
    build_sine_basis, check_hardy_ratio, sobolev_norm, Grid, ScalarField,
};
use vacuum_euler::initial_data::{make_density, mollify_field, ProfileKind};
use vacuum_euler::kappa_solver::{assemble_galerkin, grid_for_modes};
use vacuum_euler::oracles::AffineOracle;

fn grid() -> Arc<Grid> {
    Arc::new(Grid::default())
}

fn sine_combination(coeffs: &[f64]) -> ScalarField {
    let c = coeffs.to_vec();
    ScalarField::analytic(grid(), move |x, k| {
        c.iter()
            .enumerate()
            .map(|(i, a)| a * vacuum_euler::function_space::sine_mode(i + 1, x, k))
            .sum()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn a0_keeps_exponent_in_unit_window(gamma in 1.01f64..10.0) {
        let a = a0(gamma).unwrap() as f64;
        let v = 1.0 + 1.0 / (gamma - 1.0) - a;
        prop_assert!(v > 1.0 && v <= 2.0 + 1e-12);
    }

    #[test]
    fn sobolev_norms_are_homogeneous_and_ordered(
        coeffs in prop::collection::vec(-1.0f64..1.0, 1..6),
        scale in 0.1f64..10.0,
    ) {
        let f = sine_combination(&coeffs);
        let g = f.scale(scale);
        let mut prev = 0.0;
        for s in [0.0, 0.5, 1.0, 1.5, 2.0] {
            let n = sobolev_norm(&f, s).unwrap();
            let m = sobolev_norm(&g, s).unwrap();
            prop_assert!((m - scale * n).abs() <= 1e-10 * m.max(1.0));
            prop_assert!(n >= prev * (1.0 - 1e-12));
            prev = n;
        }
    }

    #[test]
    fn first_order_hardy_constant_is_two(coeffs in prop::collection::vec(-1.0f64..1.0, 1..8)) {
        prop_assume!(coeffs.iter().any(|c| c.abs() > 1e-3));
        // ‖u/d‖₀ ≤ 2‖u′‖₀ ≤ 2‖u‖₁
        let r = check_hardy_ratio(&sine_combination(&coeffs), 1).unwrap();
        prop_assert!(r.is_finite() && r <= 2.0);
    }

    #[test]
    fn mollifier_preserves_affine_fields(slope in -3.0f64..3.0, offset in -1.0f64..1.0, eps in 0.01f64..0.2) {
        let f = ScalarField::analytic(grid(), move |x, k| match k {
            0 => slope * x + offset,
            1 => slope,
            _ => 0.0,
        });
        let m = mollify_field(&f, eps, grid()).unwrap();
        for &x in &[0.0, 0.1, 0.5, 0.93, 1.0] {
            prop_assert!((m.eval(x) - f.eval(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn galerkin_mass_is_spd(a in 1.0f64..4.0) {
        let g = Arc::new(grid_for_modes(12));
        let basis = build_sine_basis(12, g.clone()).unwrap();
        let density = make_density(&ProfileKind::Quadratic { a }, 2.0, g.clone()).unwrap();
        let sys = assemble_galerkin(&density, &basis, &ScalarField::constant(g, 1.0)).unwrap();
        prop_assert!((&sys.mass - sys.mass.transpose()).amax() < 1e-10 * sys.mass.amax());
        prop_assert!(SymmetricEigen::new(sys.mass).eigenvalues.min() > 0.0);
    }

    #[test]
    fn affine_first_integral_is_conserved(a in 0.5f64..2.0, beta in -0.5f64..0.5, delta in -0.5f64..0.5) {
        let o = AffineOracle::new(a, beta, delta, 0.0).unwrap();
        let states = o.states(&[0.0, 0.05, 0.1]).unwrap();
        let i0 = o.first_integral(&states[0]);
        for s in &states {
            prop_assert!((o.first_integral(s) - i0).abs() < 1e-10 * i0.abs().max(1.0));
        }
    }

    #[test]
    fn bound_ratio_is_at_least_one(values in prop::collection::vec(0.1f64..10.0, 2..40)) {
        let series: Vec<(f64, f64)> = values.iter().enumerate().map(|(i, e)| (i as f64 * 1e-3, *e)).collect();
        let r = check_bound(&series, series[0].1);
        prop_assert!(r.ratio >= 1.0);
        prop_assert!(r.t_good <= series.last().unwrap().0);
        for &(t, e) in &series {
            prop_assert!(e <= r.fitted.0 + r.fitted.1 * t + 1e-9 * e);
        }
        if let Some(t) = r.first_violation_t {
            prop_assert!(t <= r.t_good + 1e-15);
        }
    }

    #[test]
    fn csv_floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }
}
