//! Admissible initial data `(u₀, ρ₀)`, smoothing, and the time-derivative
//! stack at `t = 0`.

mod density;
mod mollify;
mod velocity;

use std::sync::Arc;

pub use density::{
    make_density, DensityProfile, ProfileKind, ENDPOINT_ZERO_TOL, VACUUM_SLOPE_SLACK,
};
pub use mollify::{mollified_breaks, mollify_field, KERNEL_POWER, MAX_EPSILON};
pub use velocity::{make_velocity, VelocityKind};

use crate::diagnostics::{energy_snapshot, EnergySnapshot};
use crate::dynamics::{time_jets, Coefficients};
use crate::error::{Error, Result};
use crate::function_space::{sobolev_norm, ChebSpace, ScalarField};
use crate::kappa_solver::LagrangianState;

/// Deepest supported time derivative at `t = 0`.
pub const MAX_TIME_DERIVATIVE: usize = 5;

/// Default collocation degree for the stack.
pub const DEFAULT_DEGREE: usize = 64;

#[derive(Debug, Clone)]
pub struct InitialData {
    pub u0: ScalarField,
    pub density: DensityProfile,
    /// `∂_t^k v |_{t=0}` for `k = 0..=k_max`; entry 0 is `u₀` itself.
    pub time_derivs: Vec<ScalarField>,
    pub kappa_used: f64,
    space: Arc<ChebSpace>,
}

impl InitialData {
    pub fn new(
        u0: ScalarField,
        density: DensityProfile,
        kappa: f64,
        k_max: usize,
        space: Arc<ChebSpace>,
    ) -> Result<Self> {
        let time_derivs = initial_time_derivatives(&u0, &density, kappa, k_max, &space)?;
        Ok(Self {
            u0,
            density,
            time_derivs,
            kappa_used: kappa,
            space,
        })
    }

    pub fn space(&self) -> &Arc<ChebSpace> {
        &self.space
    }

    pub fn k_max(&self) -> usize {
        self.time_derivs.len() - 1
    }

    /// `u₀` at the collocation nodes.
    pub fn u0_nodal(&self) -> Vec<f64> {
        self.space.sample(|x| self.u0.eval(x))
    }

    /// State at `t = 0` (`η = x`, `η′ = 1`).
    pub fn initial_state(&self) -> LagrangianState {
        let grid = self.u0.grid().clone();
        LagrangianState {
            t: 0.0,
            v: self.u0.clone(),
            eta: ScalarField::analytic(grid.clone(), |x, k| match k {
                0 => x,
                1 => 1.0,
                _ => 0.0,
            }),
            eta_x: ScalarField::constant(grid, 1.0),
            dt_stack: self.time_derivs.clone(),
        }
    }
}

/// `[v, v_t, …, ∂_t^{k_max} v]` at `t = 0` from the evolution law.
///
/// Each level consumes two spatial derivatives of `u₀`; the degenerate
/// viscous factor is used in its expanded form `κ(ρ₀(·)″ + 2ρ₀′(·)′)`.
pub fn initial_time_derivatives(
    u0: &ScalarField,
    density: &DensityProfile,
    kappa: f64,
    k_max: usize,
    space: &ChebSpace,
) -> Result<Vec<ScalarField>> {
    if k_max > MAX_TIME_DERIVATIVE {
        return Err(Error::InvalidArgument(format!(
            "time-derivative depth {k_max} exceeds {MAX_TIME_DERIVATIVE}"
        )));
    }
    let needed = 2 * k_max;
    if u0.max_derivative() < needed {
        return Err(Error::InsufficientSmoothness {
            requested: needed,
            available: u0.max_derivative(),
        });
    }
    let coef = Coefficients::new(space, density, kappa)?;
    let v = space.sample(|x| u0.eval(x));
    let w = vec![1.0; space.len()];
    let jets = time_jets(space, &coef, &v, &w, k_max);
    let grid = u0.grid().clone();
    let mut out = vec![u0.clone()];
    out.extend(
        jets.iter()
            .skip(1)
            .map(|vals| ScalarField::from_collocation(grid.clone(), space, vals)),
    );
    Ok(out)
}

/// Smooths `u₀` and `ρ₀^{γ-1}` at width `epsilon` and rebuilds the stack.
pub fn mollify(data: &InitialData, epsilon: f64) -> Result<InitialData> {
    let gamma = data.density.gamma();
    let c = data.density.sound_speed_sq();
    let mut kinks = data.u0.breakpoints();
    kinks.extend(c.breakpoints());
    let grid = Arc::new(data.u0.grid().with_breakpoints(&mollified_breaks(&kinks, epsilon)));
    let u0 = mollify_field(&data.u0.on_grid(grid.clone()), epsilon, grid.clone())?;
    let c_m = mollify_field(&c.on_grid(grid.clone()), epsilon, grid.clone())?;
    let rho0 = if gamma == 2.0 {
        c_m.clone()
    } else {
        let m = 1.0 / (gamma - 1.0);
        let c_ref = c_m.clone();
        ScalarField::fit(grid, move |x| c_ref.eval(x).max(0.0).powf(m))
            .with_max_derivative(c_m.max_derivative())
    };
    let density = DensityProfile::from_fields(rho0, c_m, gamma)?;
    InitialData::new(
        u0,
        density,
        data.kappa_used,
        data.k_max(),
        data.space.clone(),
    )
}

/// `M₀` and `N₀` with the polynomial taken as the identity, plus summands.
#[derive(Debug, Clone)]
pub struct InitialNorms {
    pub m0: f64,
    pub n0: f64,
    pub energy: EnergySnapshot,
    pub n0_terms: Vec<(String, f64)>,
}

pub fn initial_norms(data: &InitialData) -> Result<InitialNorms> {
    let energy = energy_snapshot(&data.initial_state(), &data.density)?;
    let td = &data.time_derivs;
    if td.len() <= MAX_TIME_DERIVATIVE {
        return Err(Error::MissingDerivativeStack {
            needed: MAX_TIME_DERIVATIVE,
            available: td.len() - 1,
        });
    }
    let rho = data.density.rho0();
    let d5 = td[5].derivative(1)?;
    let weighted: Vec<f64> = d5
        .values()
        .iter()
        .zip(rho.values())
        .map(|(v, r)| r * v * v)
        .collect();
    let mut n0_terms = vec![(
        "sqrt_rho0_dt5_v_x_L2".to_string(),
        d5.grid().integrate(&weighted),
    )];
    for (k, s) in [(4usize, 1.0), (3, 2.0), (2, 2.0), (1, 2.0), (0, 2.0)] {
        let n = sobolev_norm(&td[k], s)?;
        n0_terms.push((format!("dt{k}_v_H{s}"), n * n));
    }
    let n0 = n0_terms.iter().map(|(_, v)| v).sum();
    Ok(InitialNorms {
        m0: energy.total,
        n0,
        energy,
        n0_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::Grid;

    fn setup(kind: VelocityKind, kappa: f64, k_max: usize) -> InitialData {
        let grid = Arc::new(Grid::default());
        let d = make_density(&ProfileKind::Quadratic { a: 1.0 }, 2.0, grid.clone()).unwrap();
        let u = make_velocity(&kind, grid).unwrap();
        InitialData::new(u, d, kappa, k_max, Arc::new(ChebSpace::new(32))).unwrap()
    }

    #[test]
    fn first_derivative_is_minus_two_rho_prime_without_viscosity() {
        let data = setup(
            VelocityKind::Sine {
                amplitude: 0.1,
                mode: 1,
            },
            0.0,
            2,
        );
        let vt = &data.time_derivs[1];
        for &x in &[0.0, 0.2, 0.5, 0.9] {
            assert!((vt.eval(x) + 2.0 * (1.0 - 2.0 * x)).abs() < 1e-12);
        }
        assert!(vt.eval(0.5).abs() < 1e-12);
    }

    #[test]
    fn viscous_term_vanishes_for_zero_velocity() {
        let data = setup(
            VelocityKind::Affine {
                beta: 0.0,
                delta: 0.0,
            },
            0.1,
            1,
        );
        for &x in &[0.1, 0.7] {
            assert!((data.time_derivs[1].eval(x) + 2.0 * (1.0 - 2.0 * x)).abs() < 1e-12);
        }
    }

    #[test]
    fn kinked_velocity_needs_smoothing() {
        let grid = Arc::new(Grid::default());
        let d = make_density(&ProfileKind::Quadratic { a: 1.0 }, 2.0, grid.clone()).unwrap();
        let u = make_velocity(&VelocityKind::Tent { amplitude: 0.1 }, grid).unwrap();
        let sp = Arc::new(ChebSpace::new(32));
        assert!(matches!(
            InitialData::new(u.clone(), d.clone(), 0.0, 2, sp.clone()),
            Err(Error::InsufficientSmoothness { .. })
        ));
        let raw = InitialData::new(u, d, 0.0, 0, sp).unwrap();
        let smooth = mollify(&raw, 0.05).unwrap();
        assert!(smooth.density.rho0().eval(0.0).abs() < 1e-14);
        assert!(smooth.density.rho0().eval(1.0).abs() < 1e-14);
    }
}
