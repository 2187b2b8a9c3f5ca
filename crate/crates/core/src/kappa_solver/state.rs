use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::dynamics::{time_jets, Coefficients};
use crate::error::{Error, Result};
use crate::function_space::{ChebSpace, Grid, ScalarField};

/// Allowed window for `η′` along a run.
pub const ETA_X_RANGE: (f64, f64) = (0.5, 1.5);

/// Snapshot of the Lagrangian unknowns.
#[derive(Debug, Clone)]
pub struct LagrangianState {
    pub t: f64,
    pub v: ScalarField,
    pub eta: ScalarField,
    pub eta_x: ScalarField,
    /// `∂_t^k v` for `k = 0..`, from the evolution law.
    pub dt_stack: Vec<ScalarField>,
}

impl LagrangianState {
    pub fn check_eta_range(&self) -> Result<()> {
        for (&x, &w) in self.eta_x.grid().nodes().iter().zip(self.eta_x.values()) {
            if !(w >= ETA_X_RANGE.0 && w <= ETA_X_RANGE.1) {
                return Err(Error::EtaRangeViolation {
                    t: self.t,
                    x,
                    eta_x: w,
                });
            }
        }
        Ok(())
    }
}

/// Checks `η′` nodal values against [`ETA_X_RANGE`].
pub(crate) fn check_eta_nodal(t: f64, nodes: &[f64], w: &[f64]) -> Result<()> {
    for (&x, &wi) in nodes.iter().zip(w) {
        if !(wi >= ETA_X_RANGE.0 && wi <= ETA_X_RANGE.1) {
            return Err(Error::EtaRangeViolation { t, x, eta_x: wi });
        }
    }
    Ok(())
}

/// Time history of a run, stored at the collocation nodes.
#[derive(Debug, Clone)]
pub struct Trajectory {
    space: Arc<ChebSpace>,
    grid: Arc<Grid>,
    coef: Coefficients,
    to_grid: DMatrix<f64>,
    pub times: Vec<f64>,
    pub v: Vec<Vec<f64>>,
    pub eta: Vec<Vec<f64>>,
    pub eta_x: Vec<Vec<f64>>,
    /// Cumulative `κ ∫₀ᵗ ∫ ρ₀² v′²`.
    pub dissipation: Vec<f64>,
}

impl Trajectory {
    pub(crate) fn new(space: Arc<ChebSpace>, grid: Arc<Grid>, coef: Coefficients) -> Self {
        let to_grid = space.interpolation_matrix(grid.nodes());
        Self {
            space,
            grid,
            coef,
            to_grid,
            times: Vec::new(),
            v: Vec::new(),
            eta: Vec::new(),
            eta_x: Vec::new(),
            dissipation: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, t: f64, v: Vec<f64>, eta: Vec<f64>, eta_x: Vec<f64>, diss: f64) {
        self.times.push(t);
        self.v.push(v);
        self.eta.push(eta);
        self.eta_x.push(eta_x);
        self.dissipation.push(diss);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn space(&self) -> &Arc<ChebSpace> {
        &self.space
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coef
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    pub fn v_field(&self, i: usize) -> ScalarField {
        ScalarField::from_collocation(self.grid.clone(), &self.space, &self.v[i])
    }

    /// State at record `i` with `∂_t^k v` for `k ≤ depth`.
    pub fn state(&self, i: usize, depth: usize) -> LagrangianState {
        let jets = time_jets(&self.space, &self.coef, &self.v[i], &self.eta_x[i], depth);
        let field = |vals: &[f64]| ScalarField::from_collocation(self.grid.clone(), &self.space, vals);
        LagrangianState {
            t: self.times[i],
            v: field(&self.v[i]),
            eta: field(&self.eta[i]),
            eta_x: field(&self.eta_x[i]),
            dt_stack: jets.iter().map(|j| field(j)).collect(),
        }
    }

    /// Velocity at the quadrature nodes of the trajectory grid.
    pub fn v_on_grid(&self, i: usize) -> Vec<f64> {
        (&self.to_grid * DVector::from_column_slice(&self.v[i]))
            .as_slice()
            .to_vec()
    }

    /// `∫ ρ₀v²/2 + ρ₀^γ η′^{1-γ}/(γ-1)` at record `i`.
    pub fn physical_energy(&self, i: usize) -> f64 {
        physical_energy(&self.space, &self.coef, &self.v[i], &self.eta_x[i])
    }

    /// `sup_t ‖v(t) - exact(t)‖_{L²}` over the records.
    pub fn sup_l2_error<F: Fn(f64, f64) -> f64>(&self, exact: F) -> f64 {
        (0..self.len())
            .map(|i| {
                let t = self.times[i];
                let num = self.v_on_grid(i);
                let err: Vec<f64> = num
                    .iter()
                    .zip(self.grid.nodes())
                    .map(|(v, &x)| (v - exact(t, x)).powi(2))
                    .collect();
                self.grid.integrate(&err).sqrt()
            })
            .fold(0.0, f64::max)
    }

    fn matched_records(&self, other: &Trajectory) -> Result<Vec<(usize, usize)>> {
        let tol = 1e-9 * (1.0 + self.final_time());
        let mut pairs = Vec::new();
        let mut j = 0;
        for (i, &t) in self.times.iter().enumerate() {
            while j < other.len() && other.times[j] < t - tol {
                j += 1;
            }
            if j < other.len() && (other.times[j] - t).abs() <= tol {
                pairs.push((i, j));
            }
        }
        if pairs.is_empty() {
            return Err(Error::InvalidArgument(
                "trajectories share no record times".into(),
            ));
        }
        Ok(pairs)
    }

    fn diff_l2_sq(&self, i: usize, other: &Trajectory, j: usize) -> f64 {
        let a = self.v_on_grid(i);
        let b = other.v_on_grid_at(&self.grid, j);
        let d: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).collect();
        self.grid.integrate(&d)
    }

    fn v_on_grid_at(&self, grid: &Grid, j: usize) -> Vec<f64> {
        if std::ptr::eq(grid, self.grid.as_ref()) || grid == self.grid.as_ref() {
            return self.v_on_grid(j);
        }
        self.space.interpolate(&self.v[j], grid.nodes())
    }

    /// `sup_t ‖v - w‖_{L²}` over common record times.
    pub fn sup_l2_diff(&self, other: &Trajectory) -> Result<f64> {
        Ok(self
            .matched_records(other)?
            .into_iter()
            .map(|(i, j)| self.diff_l2_sq(i, other, j).sqrt())
            .fold(0.0, f64::max))
    }

    /// `‖v - w‖_{L²(0,T; L²)}` by the trapezoid rule over common record times.
    pub fn l2l2_diff(&self, other: &Trajectory) -> Result<f64> {
        let pairs = self.matched_records(other)?;
        let vals: Vec<(f64, f64)> = pairs
            .iter()
            .map(|&(i, j)| (self.times[i], self.diff_l2_sq(i, other, j)))
            .collect();
        let total: f64 = vals
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
            .sum();
        Ok(total.sqrt())
    }
}

pub(crate) fn physical_energy(space: &ChebSpace, coef: &Coefficients, v: &[f64], w: &[f64]) -> f64 {
    let g = coef.gamma;
    let vals: Vec<f64> = (0..v.len())
        .map(|i| {
            let rho = coef.rho0[i];
            let rho_g = coef.c[i].max(0.0) * rho;
            0.5 * rho * v[i] * v[i] + rho_g * w[i].powf(1.0 - g) / (g - 1.0)
        })
        .collect();
    space.integrate(&vals)
}

/// `∫ ρ₀² v′²` on the collocation nodes.
pub(crate) fn dissipation_rate(space: &ChebSpace, coef: &Coefficients, dv: &[f64]) -> f64 {
    let vals: Vec<f64> = dv
        .iter()
        .zip(&coef.rho0)
        .map(|(d, r)| r * r * d * d)
        .collect();
    space.integrate(&vals)
}
