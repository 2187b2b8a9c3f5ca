//! Sine-Galerkin discretization of the linear problem for `X = ρ₀ v′`:
//!
//! `∫ X_t e_k/ρ₀ + κ ∫ [(ρ₀X)′/ρ₀] e_k′ = ∫ φ e_k′`,
//! `φ = (2/η̄′)(ρ₀/η̄′)′ = 2ρ₀′/η̄′² - 2ρ₀η̄″/η̄′³`,
//!
//! with `X = Σ λ_i e_i`, i.e. `M λ′ + κ K λ = F`.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, LU};

use super::config::Integrator;
use super::state::ETA_X_RANGE;
use crate::error::{Error, Result};
use crate::function_space::cheb::{ChebSeries, CHOP_TOL};
use crate::function_space::hardy::DIRICHLET_TOL;
use crate::function_space::{sine_mode, Grid, GridSpec, ScalarField, SineBasis, SMOOTH};
use crate::initial_data::DensityProfile;

/// Quadrature grid resolving products of the first `n_modes` sine modes.
pub fn grid_for_modes(n_modes: usize) -> Grid {
    Grid::clustered(GridSpec {
        panels: n_modes.max(32),
        ..GridSpec::default()
    })
}

#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    /// `M_{ki} = ∫ e_k e_i / ρ₀`.
    pub mass: DMatrix<f64>,
    /// `K_{ki} = ∫ [(ρ₀ e_i)′/ρ₀] e_k′`.
    pub stiffness: DMatrix<f64>,
    /// `F_k = ∫ φ e_k′` for the frozen `η̄`.
    pub forcing: DVector<f64>,
}

/// Precomputed tables for repeated forcing assembly.
#[derive(Debug, Clone)]
pub(crate) struct GalerkinOperator {
    pub grid: Arc<Grid>,
    rho: Vec<f64>,
    drho: Vec<f64>,
    /// `w_q e_k′(x_q)`, modes by nodes
    dtest: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
}

impl GalerkinOperator {
    pub fn new(density: &DensityProfile, basis: &SineBasis) -> Result<Self> {
        if density.gamma() != 2.0 {
            return Err(Error::GammaOutOfRange(density.gamma()));
        }
        let grid = basis.grid().clone();
        let nodes = grid.nodes();
        let w = grid.weights();
        let nq = nodes.len();
        let n = basis.n_modes();
        let rho_f = density.rho0();
        let rho: Vec<f64> = nodes.iter().map(|&x| rho_f.eval(x)).collect();
        let drho: Vec<f64> = nodes.iter().map(|&x| rho_f.eval_derivative(x, 1)).collect();
        if let Some(q) = rho.iter().position(|r| !(*r > 0.0)) {
            return Err(Error::NonpositiveWeight {
                node: q,
                x: nodes[q],
                value: rho[q],
            });
        }
        let e = DMatrix::from_fn(n, nq, |k, q| sine_mode(k + 1, nodes[q], 0));
        let de = DMatrix::from_fn(n, nq, |k, q| sine_mode(k + 1, nodes[q], 1));
        let e_scaled = DMatrix::from_fn(n, nq, |k, q| e[(k, q)] * w[q] / rho[q]);
        let mass = &e_scaled * e.transpose();
        let dtest = DMatrix::from_fn(n, nq, |k, q| de[(k, q)] * w[q]);
        let trial = DMatrix::from_fn(n, nq, |i, q| de[(i, q)] + drho[q] / rho[q] * e[(i, q)]);
        let stiffness = &dtest * trial.transpose();
        if mass.iter().chain(stiffness.iter()).any(|v| !v.is_finite()) {
            return Err(Error::QuadratureDegreeInsufficient {
                defect: f64::INFINITY,
                limit: 0.0,
            });
        }
        Ok(Self {
            grid,
            rho,
            drho,
            dtest,
            mass,
            stiffness,
        })
    }

    /// `F` from `η̄′`, `η̄″` at the grid nodes.
    pub fn forcing(&self, eta_x: &[f64], eta_xx: &[f64]) -> DVector<f64> {
        let phi: Vec<f64> = (0..self.rho.len())
            .map(|q| {
                let w = eta_x[q];
                2.0 * self.drho[q] / (w * w) - 2.0 * self.rho[q] * eta_xx[q] / (w * w * w)
            })
            .collect();
        &self.dtest * DVector::from_vec(phi)
    }
}

/// Assembles `M`, `K` and `F` for a frozen `η̄′`.
pub fn assemble_galerkin(
    density: &DensityProfile,
    basis: &SineBasis,
    eta_bar_x: &ScalarField,
) -> Result<GalerkinSystem> {
    let op = GalerkinOperator::new(density, basis)?;
    let nodes = op.grid.nodes();
    let wx: Vec<f64> = nodes.iter().map(|&x| eta_bar_x.eval(x)).collect();
    for (&x, &w) in nodes.iter().zip(&wx) {
        if !(w >= ETA_X_RANGE.0 && w <= ETA_X_RANGE.1) {
            return Err(Error::EtaRangeViolation { t: 0.0, x, eta_x: w });
        }
    }
    let wxx = nodes
        .iter()
        .map(|&x| eta_bar_x.eval_derivative(x, 1))
        .collect::<Vec<_>>();
    let forcing = op.forcing(&wx, &wxx);
    Ok(GalerkinSystem {
        mass: op.mass,
        stiffness: op.stiffness,
        forcing,
    })
}

fn condition_estimate(lu: &LU<f64, nalgebra::Dyn, nalgebra::Dyn>) -> f64 {
    let u = lu.u();
    let d: Vec<f64> = u.diagonal().iter().map(|v| v.abs()).collect();
    let max = d.iter().cloned().fold(0.0, f64::max);
    let min = d.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Factorized implicit rule for `M λ′ + κ K λ = F(t)`.
#[derive(Debug, Clone)]
pub(crate) struct LinearStepper {
    mass: DMatrix<f64>,
    explicit_half: DMatrix<f64>,
    trapezoid: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    bdf2: Option<LU<f64, nalgebra::Dyn, nalgebra::Dyn>>,
    dt: f64,
}

impl LinearStepper {
    pub fn new(
        mass: &DMatrix<f64>,
        stiffness: &DMatrix<f64>,
        kappa: f64,
        dt: f64,
        integrator: Integrator,
    ) -> Result<Self> {
        let half = stiffness * (0.5 * dt * kappa);
        let trapezoid = (mass + &half).lu();
        let cond = condition_estimate(&trapezoid);
        if !cond.is_finite() || cond > 1e14 {
            return Err(Error::LinearSolve { condition: cond });
        }
        let bdf2 = match integrator {
            Integrator::Bdf2 => Some((mass * 1.5 + stiffness * (dt * kappa)).lu()),
            Integrator::ImplicitTrapezoid => None,
        };
        Ok(Self {
            mass: mass.clone(),
            explicit_half: mass - half,
            trapezoid,
            bdf2,
            dt,
        })
    }

    /// Next coefficients; `prev` enables the two-step rule when configured.
    pub fn step(
        &self,
        lambda: &DVector<f64>,
        prev: Option<&DVector<f64>>,
        f_now: &DVector<f64>,
        f_next: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        let (lu, rhs) = match (&self.bdf2, prev) {
            (Some(lu), Some(p)) => (
                lu,
                &self.mass * (lambda * 2.0 - p * 0.5) + f_next * self.dt,
            ),
            _ => (
                &self.trapezoid,
                &self.explicit_half * lambda + (f_now + f_next) * (0.5 * self.dt),
            ),
        };
        lu.solve(&rhs).ok_or_else(|| Error::LinearSolve {
            condition: condition_estimate(lu),
        })
    }
}

/// One implicit-trapezoid step of `M λ′ + κ K λ = F` with `F` held fixed.
pub fn step_linear_x(
    system: &GalerkinSystem,
    lambda: &[f64],
    dt: f64,
    kappa: f64,
) -> Result<Vec<f64>> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt = {dt}")));
    }
    let stepper = LinearStepper::new(
        &system.mass,
        &system.stiffness,
        kappa,
        dt,
        Integrator::ImplicitTrapezoid,
    )?;
    let l = DVector::from_column_slice(lambda);
    Ok(stepper
        .step(&l, None, &system.forcing, &system.forcing)?
        .as_slice()
        .to_vec())
}

/// `X′(0) = Σ λ_i e_i′(0)`.
pub fn x_slope_at_left(lambda: &[f64]) -> f64 {
    lambda
        .iter()
        .enumerate()
        .map(|(i, l)| l * SQRT_2 * (i + 1) as f64 * PI)
        .sum()
}

/// `f′(t) = -2ρ₀′(0)/η̄′(t,0)² + 2κ X′(t,0)`, the division-free boundary
/// trace of the velocity equation at `x = 0`.
pub fn boundary_velocity_rate(drho0_left: f64, eta_bar_x_left: f64, x_slope_left: f64, kappa: f64) -> f64 {
    -2.0 * drho0_left / (eta_bar_x_left * eta_bar_x_left) + 2.0 * kappa * x_slope_left
}

fn check_dirichlet(x: &ScalarField) -> Result<()> {
    let scale = x.max_abs().max(1.0);
    for e in [0.0, 1.0] {
        let value = x.eval(e);
        if value.abs() > DIRICHLET_TOL * scale {
            return Err(Error::DirichletViolation { value });
        }
    }
    Ok(())
}

/// `v = f + ∫₀ˣ X/ρ₀` for a given boundary value `f = v(t, 0)`.
pub fn reconstruct_velocity(
    x: &ScalarField,
    density: &DensityProfile,
    boundary_value: f64,
) -> Result<ScalarField> {
    check_dirichlet(x)?;
    let rho = density.rho0();
    let quotient = ChebSeries::fit(|s| x.eval(s) / rho.eval(s), 0.0, 1.0, CHOP_TOL);
    let mut v = quotient.antiderivative();
    let mut coeffs = v.coeffs().to_vec();
    coeffs[0] += boundary_value;
    v = ChebSeries::new(0.0, 1.0, coeffs);
    Ok(ScalarField::from_pieces(x.grid().clone(), vec![v], SMOOTH))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::build_sine_basis;
    use crate::initial_data::{make_density, ProfileKind};

    fn setup(n: usize) -> (DensityProfile, SineBasis) {
        let grid = Arc::new(grid_for_modes(n));
        let d = make_density(&ProfileKind::Quadratic { a: 1.0 }, 2.0, grid.clone()).unwrap();
        (d, build_sine_basis(n, grid).unwrap())
    }

    #[test]
    fn forcing_for_identity_flow_has_closed_form() {
        let (d, b) = setup(16);
        let one = ScalarField::constant(b.grid().clone(), 1.0);
        let sys = assemble_galerkin(&d, &b, &one).unwrap();
        for k in 1..=16 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let exact = 4.0 * SQRT_2 * (1.0 - sign) / (k as f64 * PI);
            assert!((sys.forcing[k - 1] - exact).abs() < 1e-12, "{k}");
        }
    }

    #[test]
    fn mass_is_symmetric() {
        let (d, b) = setup(16);
        let one = ScalarField::constant(b.grid().clone(), 1.0);
        let sys = assemble_galerkin(&d, &b, &one).unwrap();
        assert!((&sys.mass - sys.mass.transpose()).amax() < 1e-12);
    }

    #[test]
    fn constant_forcing_without_viscosity_is_linear_in_time() {
        let (d, b) = setup(8);
        let one = ScalarField::constant(b.grid().clone(), 1.0);
        let sys = assemble_galerkin(&d, &b, &one).unwrap();
        let l0 = vec![0.1; 8];
        let dt = 0.01;
        let l1 = step_linear_x(&sys, &l0, dt, 0.0).unwrap();
        let rate = sys.mass.clone().lu().solve(&sys.forcing).unwrap();
        for i in 0..8 {
            assert!((l1[i] - l0[i] - dt * rate[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn reconstruction_inverts_x() {
        let (d, b) = setup(8);
        let x = b.synthesize(&[0.3, 0.0, -0.1, 0.05, 0.0, 0.0, 0.0, 0.01]);
        let v = reconstruct_velocity(&x, &d, 0.7).unwrap();
        assert!((v.eval(0.0) - 0.7).abs() < 1e-14);
        for &s in &[1e-6, 0.2, 0.5, 0.999] {
            let lhs = d.rho0().eval(s) * v.eval_derivative(s, 1);
            assert!((lhs - x.eval(s)).abs() < 1e-8);
        }
    }

    #[test]
    fn dirichlet_is_enforced() {
        let (d, b) = setup(4);
        let x = ScalarField::constant(b.grid().clone(), 1.0);
        assert!(matches!(
            reconstruct_velocity(&x, &d, 0.0),
            Err(Error::DirichletViolation { .. })
        ));
    }
}
