//! Method-of-lines collocation solver for the κ-problem and the Euler system.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::config::{Integrator, SolverConfig};
use super::state::{check_eta_nodal, dissipation_rate, LagrangianState, Trajectory};
use crate::dynamics::Coefficients;
use crate::error::{Error, Result};
use crate::function_space::{ChebSpace, ScalarField};
use crate::initial_data::{DensityProfile, InitialData};

const NEWTON_TOL: f64 = 1e-13;
/// Accepted when the iteration stagnates at round-off level.
const NEWTON_STALL_TOL: f64 = 1e-10;
const NEWTON_MAX_ITER: usize = 30;

fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(v)).as_slice().to_vec()
}

/// Right-hand side and Jacobian blocks on the collocation nodes.
struct Operator {
    coef: Coefficients,
    d1: DMatrix<f64>,
    d2: DMatrix<f64>,
    /// `κ(diag ρ₀ D² + 2 diag ρ₀′ D)`, constant in time.
    viscous: DMatrix<f64>,
}

impl Operator {
    fn new(space: &ChebSpace, coef: Coefficients) -> Self {
        let d1 = space.diff_matrix().clone();
        let d2 = &d1 * &d1;
        let n = d1.nrows();
        let viscous = DMatrix::from_fn(n, n, |i, j| {
            coef.kappa * (coef.rho0[i] * d2[(i, j)] + 2.0 * coef.drho0[i] * d1[(i, j)])
        });
        Self {
            coef,
            d1,
            d2,
            viscous,
        }
    }

    fn rate(&self, v: &[f64], w: &[f64]) -> Vec<f64> {
        let dw = mat_vec(&self.d1, w);
        let mut out = self.coef.pressure(w, &dw);
        if self.coef.kappa > 0.0 {
            for (o, s) in out.iter_mut().zip(mat_vec(&self.viscous, v)) {
                *o += s;
            }
        }
        out
    }

    /// `I - β(∂F/∂v + β ∂F/∂w D)` at `w`.
    fn newton_matrix(&self, w: &[f64], beta: f64) -> DMatrix<f64> {
        let g = self.coef.gamma;
        let a = g / (g - 1.0);
        let dw = mat_vec(&self.d1, w);
        let n = w.len();
        let (c, dc) = (&self.coef.c, &self.coef.dc);
        let diag1: Vec<f64> = (0..n)
            .map(|i| {
                a * g * dc[i] * w[i].powf(-g - 1.0)
                    - g * (g + 1.0) * c[i] * dw[i] * w[i].powf(-g - 2.0)
            })
            .collect();
        let diag2: Vec<f64> = (0..n).map(|i| g * c[i] * w[i].powf(-g - 1.0)).collect();
        // ∂F/∂w = diag1 + diag2 D, composed with ∂w/∂v = β D
        let d_w = DMatrix::from_fn(n, n, |i, j| {
            diag1[i] * self.d1[(i, j)] + diag2[i] * self.d2[(i, j)]
        });
        let mut m = -(&self.viscous + d_w * beta) * beta;
        for i in 0..n {
            m[(i, i)] += 1.0;
        }
        m
    }
}

/// Solves the κ-problem (κ ≥ 0) by Chebyshev collocation in space and an
/// implicit rule in time; `η` and `η′` follow from the same rule.
pub fn direct_mol_solve(config: &SolverConfig, data: &InitialData) -> Result<Trajectory> {
    config.validate()?;
    if data.density.gamma() != config.gamma {
        return Err(Error::config(
            "gamma",
            format!(
                "solver gamma {} differs from the density's {}",
                config.gamma,
                data.density.gamma()
            ),
        ));
    }
    let space = Arc::new(ChebSpace::new(config.collocation_degree));
    let coef = Coefficients::new(&space, &data.density, config.kappa)?;
    let op = Operator::new(&space, coef.clone());
    let grid = data.u0.grid().clone();
    let mut traj = Trajectory::new(space.clone(), grid, coef.clone());

    let nodes = space.nodes().to_vec();
    let (n_steps, h) = config.steps();
    let mut v = space.sample(|x| data.u0.eval(x));
    let mut w = vec![1.0; v.len()];
    let mut eta = nodes.clone();
    let mut diss = 0.0;
    let mut q = dissipation_rate(&space, &coef, &space.derivative(&v, 1)) * config.kappa;
    traj.push(0.0, v.clone(), eta.clone(), w.clone(), diss);
    let mut prev: Option<(Vec<f64>, Vec<f64>, Vec<f64>)> = None;

    for step in 1..=n_steps {
        let t = step as f64 * h;
        let f_n = op.rate(&v, &w);
        let use_bdf = config.time_integrator == Integrator::Bdf2 && prev.is_some();
        let (beta, a_v, a_w, a_eta) = if use_bdf {
            let (vp, wp, ep) = prev.as_ref().unwrap();
            let comb = |x: &[f64], y: &[f64]| -> Vec<f64> {
                x.iter().zip(y).map(|(a, b)| 4.0 / 3.0 * a - b / 3.0).collect()
            };
            (2.0 * h / 3.0, comb(&v, vp), comb(&w, wp), comb(&eta, ep))
        } else {
            let dv = mat_vec(&op.d1, &v);
            (
                0.5 * h,
                v.iter().zip(&f_n).map(|(a, f)| a + 0.5 * h * f).collect(),
                w.iter().zip(&dv).map(|(a, d)| a + 0.5 * h * d).collect(),
                eta.iter().zip(&v).map(|(a, b)| a + 0.5 * h * b).collect(),
            )
        };
        // explicit Euler predictor
        let mut v_new: Vec<f64> = v.iter().zip(&f_n).map(|(a, f)| a + h * f).collect();
        let w_of = |vv: &[f64]| -> Vec<f64> {
            let d = mat_vec(&op.d1, vv);
            a_w.iter().zip(&d).map(|(a, d)| a + beta * d).collect()
        };
        let mut w_new = w_of(&v_new);
        check_eta_nodal(t, &nodes, &w_new).map_err(|_| {
            Error::StepFailure(format!("predictor left the eta_x window at t = {t:.6e}"))
        })?;
        let lu = op.newton_matrix(&w_new, beta).lu();
        let mut converged = false;
        let mut last = (f64::INFINITY, 1.0);
        for _ in 0..NEWTON_MAX_ITER {
            let f = op.rate(&v_new, &w_new);
            let resid: Vec<f64> = (0..v.len())
                .map(|i| v_new[i] - a_v[i] - beta * f[i])
                .collect();
            let delta = lu
                .solve(&DVector::from_column_slice(&resid))
                .ok_or(Error::LinearSolve {
                    condition: f64::INFINITY,
                })?;
            let scale = 1.0 + v_new.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let mut step_max = 0.0f64;
            for (vi, di) in v_new.iter_mut().zip(delta.iter()) {
                *vi -= di;
                step_max = step_max.max(di.abs());
            }
            w_new = w_of(&v_new);
            last = (step_max, scale);
            if !step_max.is_finite() {
                break;
            }
            if step_max <= NEWTON_TOL * scale {
                converged = true;
                break;
            }
        }
        if !converged && !(last.0 <= NEWTON_STALL_TOL * last.1) {
            return Err(Error::StepFailure(format!(
                "Newton iteration did not converge at t = {t:.6e}"
            )));
        }
        check_eta_nodal(t, &nodes, &w_new)?;
        let eta_new: Vec<f64> = a_eta
            .iter()
            .zip(&v_new)
            .map(|(a, b)| a + beta * b)
            .collect();
        let q_new = dissipation_rate(&space, &coef, &mat_vec(&op.d1, &v_new)) * config.kappa;
        diss += 0.5 * h * (q + q_new);
        q = q_new;
        prev = Some((
            std::mem::replace(&mut v, v_new),
            std::mem::replace(&mut w, w_new),
            std::mem::replace(&mut eta, eta_new),
        ));
        traj.push(t, v.clone(), eta.clone(), w.clone(), diss);
    }
    Ok(traj)
}

/// `v_t` for general `γ` at a state, in the vacuum-regular form
/// `-(γ/(γ-1)) (ρ₀^{γ-1})′ η′^{-γ} + γ ρ₀^{γ-1} η″ η′^{-γ-1} + κ(ρ₀v″ + 2ρ₀′v′)`.
pub fn gamma_general_rhs(
    state: &LagrangianState,
    density: &DensityProfile,
    gamma: f64,
    kappa: f64,
) -> Result<ScalarField> {
    if !(gamma > 1.0) || density.gamma() != gamma {
        return Err(Error::GammaOutOfRange(gamma));
    }
    if kappa > 0.0 && gamma != 2.0 {
        return Err(Error::GammaOutOfRange(gamma));
    }
    let a = gamma / (gamma - 1.0);
    let c = density.sound_speed_sq().clone();
    let rho = density.rho0().clone();
    let w = state.eta_x.clone();
    let v = state.v.clone();
    let viscous = kappa > 0.0;
    let f = move |x: f64| {
        let wx = w.eval(x);
        let mut r = -a * c.eval_derivative(x, 1) * wx.powf(-gamma)
            + gamma * c.eval(x) * w.eval_derivative(x, 1) * wx.powf(-gamma - 1.0);
        if viscous {
            r += kappa
                * (rho.eval(x) * v.eval_derivative(x, 2)
                    + 2.0 * rho.eval_derivative(x, 1) * v.eval_derivative(x, 1));
        }
        r
    };
    Ok(ScalarField::fit(state.v.grid().clone(), f))
}
