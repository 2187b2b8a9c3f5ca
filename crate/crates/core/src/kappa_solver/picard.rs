//! Picard iteration on the linear `X`-problem: freeze `v̄`, build `η̄`,
//! solve for `X = ρ₀v′` in the sine basis, reconstruct `v`, repeat.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::config::SolverConfig;
use super::galerkin::{
    boundary_velocity_rate, grid_for_modes, x_slope_at_left, GalerkinOperator, LinearStepper,
};
use super::state::{Trajectory, ETA_X_RANGE};
use crate::dynamics::Coefficients;
use crate::error::{Error, Result};
use crate::function_space::cheb::{ChebSeries, CHOP_TOL};
use crate::function_space::{build_sine_basis, sine_mode, ChebSpace};
use crate::initial_data::{DensityProfile, InitialData};

/// Consecutive residual increases that trigger a window halving.
const GROWTH_LIMIT: usize = 3;

#[derive(Debug, Clone)]
pub struct PicardTrace {
    /// `v` at the end of the last window, per iteration, at the collocation nodes.
    pub iterates: Vec<Vec<f64>>,
    /// `‖v^{(m+1)} - v^{(m)}‖_{L²(H²)}` per iteration of the last window.
    pub residuals: Vec<f64>,
    /// Residual histories of every window attempt, in order.
    pub window_residuals: Vec<Vec<f64>>,
    pub converged: bool,
    /// Shortest window length used.
    pub t_used: f64,
    /// Number of accepted windows.
    pub windows: usize,
}

/// Values of `P_i = ∫₀ˣ e_i/ρ₀`, `Q_i = e_i/ρ₀`, `Q_i′` at a node set.
struct Tables {
    p: DMatrix<f64>,
    q: DMatrix<f64>,
    dq: DMatrix<f64>,
}

impl Tables {
    fn new(series: &[(ChebSeries, ChebSeries, ChebSeries)], nodes: &[f64]) -> Self {
        let n = series.len();
        let m = nodes.len();
        let at = |k: usize| DMatrix::from_fn(m, n, |j, i| {
            let s = match k {
                0 => &series[i].0,
                1 => &series[i].1,
                _ => &series[i].2,
            };
            s.eval(nodes[j])
        });
        Self {
            p: at(0),
            q: at(1),
            dq: at(2),
        }
    }
}

fn quotient_series(density: &DensityProfile, n_modes: usize) -> Vec<(ChebSeries, ChebSeries, ChebSeries)> {
    let rho = density.rho0();
    (0..n_modes)
        .map(|i| {
            let q = ChebSeries::fit(|s| sine_mode(i + 1, s, 0) / rho.eval(s), 0.0, 1.0, CHOP_TOL);
            (q.antiderivative(), q.derivative(), q.clone())
        })
        .map(|(p, dq, q)| (p, q, dq))
        .collect()
}

/// Values carried from one window to the next.
#[derive(Debug, Clone)]
struct WindowStart {
    t: f64,
    lambda: DVector<f64>,
    f: f64,
    /// `η′`, `η″` on the Galerkin grid
    w_grid: Vec<f64>,
    wx_grid: Vec<f64>,
    /// `η`, `η′` at the collocation nodes
    eta_col: Vec<f64>,
    w_col: Vec<f64>,
    diss: f64,
}

/// `(v, v′, v″)` at the collocation nodes and `(v′, v″)` on the grid.
#[derive(Debug, Clone)]
struct Profile {
    col: [Vec<f64>; 3],
    grid: [Vec<f64>; 2],
}

struct Solver<'a> {
    config: &'a SolverConfig,
    op: GalerkinOperator,
    col: Tables,
    grid: Tables,
    space: Arc<ChebSpace>,
    drho0_left: f64,
}

struct WindowResult {
    lambdas: Vec<DVector<f64>>,
    fs: Vec<f64>,
    profiles: Vec<Profile>,
    residuals: Vec<f64>,
    ends: Vec<Vec<f64>>,
}

fn add_trapezoid(acc: &[f64], a: &[f64], b: &[f64], h: f64) -> Vec<f64> {
    acc.iter()
        .zip(a.iter().zip(b))
        .map(|(s, (x, y))| s + 0.5 * h * (x + y))
        .collect()
}

impl Solver<'_> {
    fn profile(&self, lambda: &DVector<f64>, f: f64) -> Profile {
        let v: Vec<f64> = (&self.col.p * lambda).iter().map(|x| x + f).collect();
        let vec = |m: &DMatrix<f64>| (m * lambda).as_slice().to_vec();
        Profile {
            col: [v, vec(&self.col.q), vec(&self.col.dq)],
            grid: [vec(&self.grid.q), vec(&self.grid.dq)],
        }
    }

    fn h2_sq(&self, a: &Profile, b: &Profile) -> f64 {
        let vals: Vec<f64> = (0..a.col[0].len())
            .map(|j| (0..3).map(|k| (a.col[k][j] - b.col[k][j]).powi(2)).sum())
            .collect();
        self.space.integrate(&vals)
    }

    /// One sweep over a window of `m` steps given the frozen `v̄` profiles.
    fn sweep(
        &self,
        start: &WindowStart,
        frozen: &[Profile],
        h: f64,
    ) -> Result<(Vec<DVector<f64>>, Vec<f64>, Vec<Profile>)> {
        let stepper = LinearStepper::new(
            &self.op.mass,
            &self.op.stiffness,
            self.config.kappa,
            h,
            self.config.time_integrator,
        )?;
        let nodes = self.op.grid.nodes();
        let mut w = start.w_grid.clone();
        let mut wx = start.wx_grid.clone();
        let check = |w: &[f64], t: f64| -> Result<()> {
            for (&x, &e) in nodes.iter().zip(w) {
                if !(e >= ETA_X_RANGE.0 && e <= ETA_X_RANGE.1) {
                    return Err(Error::EtaRangeViolation { t, x, eta_x: e });
                }
            }
            Ok(())
        };
        let kappa = self.config.kappa;
        let mut f_now = self.op.forcing(&w, &wx);
        let mut r_now =
            boundary_velocity_rate(self.drho0_left, w[0], x_slope_at_left(start.lambda.as_slice()), kappa);
        let mut lambdas = vec![start.lambda.clone()];
        let mut fs = vec![start.f];
        let mut profiles = vec![self.profile(&start.lambda, start.f)];
        for n in 0..frozen.len() - 1 {
            let t = start.t + (n + 1) as f64 * h;
            w = add_trapezoid(&w, &frozen[n].grid[0], &frozen[n + 1].grid[0], h);
            wx = add_trapezoid(&wx, &frozen[n].grid[1], &frozen[n + 1].grid[1], h);
            check(&w, t)?;
            let f_next = self.op.forcing(&w, &wx);
            let prev = if n > 0 { Some(&lambdas[n - 1]) } else { None };
            let l_next = stepper.step(&lambdas[n], prev, &f_now, &f_next)?;
            let r_next = boundary_velocity_rate(
                self.drho0_left,
                w[0],
                x_slope_at_left(l_next.as_slice()),
                kappa,
            );
            let f = fs[n] + 0.5 * h * (r_now + r_next);
            profiles.push(self.profile(&l_next, f));
            lambdas.push(l_next);
            fs.push(f);
            f_now = f_next;
            r_now = r_next;
        }
        Ok((lambdas, fs, profiles))
    }

    /// Residual `‖a - b‖_{L²(t; H²)}` by the trapezoid rule in time.
    fn residual(&self, a: &[Profile], b: &[Profile], h: f64) -> f64 {
        let vals: Vec<f64> = a.iter().zip(b).map(|(x, y)| self.h2_sq(x, y)).collect();
        let inner: f64 = vals.windows(2).map(|p| 0.5 * h * (p[0] + p[1])).sum();
        inner.sqrt()
    }

    /// Iterates over one window; `None` when the residuals keep growing or
    /// the iteration budget runs out.
    fn window(
        &self,
        start: &WindowStart,
        initial: Vec<Profile>,
        h: f64,
    ) -> (Option<WindowResult>, Vec<f64>) {
        let mut frozen = initial;
        let mut residuals: Vec<f64> = Vec::new();
        let mut ends = Vec::new();
        let mut growth = 0;
        for _ in 0..self.config.picard_max_iter {
            let (lambdas, fs, profiles) = match self.sweep(start, &frozen, h) {
                Ok(r) => r,
                Err(e) => {
                    log::debug!("picard sweep failed: {e}");
                    return (None, residuals);
                }
            };
            let res = self.residual(&profiles, &frozen, h);
            if !res.is_finite() {
                return (None, residuals);
            }
            if residuals.last().is_some_and(|&r| res > r) {
                growth += 1;
            } else {
                growth = 0;
            }
            residuals.push(res);
            ends.push(profiles.last().unwrap().col[0].clone());
            if res < self.config.picard_tol {
                return (
                    Some(WindowResult {
                        lambdas,
                        fs,
                        profiles,
                        residuals: residuals.clone(),
                        ends,
                    }),
                    residuals,
                );
            }
            if growth >= GROWTH_LIMIT {
                return (None, residuals);
            }
            frozen = profiles;
        }
        (None, residuals)
    }
}

/// Solves the κ-problem (γ = 2, κ > 0) by windowed Picard iteration around
/// the linear Galerkin solver.
///
/// Each window starts from `v̄ = v(t₀)` frozen in time. When the residual
/// grows for three consecutive iterations the window is halved; once a
/// window shrinks below `dt` the run fails with `NoConvergence`.
pub fn picard_solve(config: &SolverConfig, data: &InitialData) -> Result<(Trajectory, PicardTrace)> {
    config.validate()?;
    if !(config.kappa > 0.0) {
        return Err(Error::config("kappa", "the Picard solver needs kappa > 0"));
    }
    if config.gamma != 2.0 || data.density.gamma() != 2.0 {
        return Err(Error::GammaOutOfRange(data.density.gamma()));
    }
    let density = &data.density;
    let grid = Arc::new(grid_for_modes(config.n_modes));
    let basis = build_sine_basis(config.n_modes, grid.clone())?;
    let op = GalerkinOperator::new(density, &basis)?;
    let space = Arc::new(ChebSpace::new(config.collocation_degree));
    let series = quotient_series(density, config.n_modes);
    let solver = Solver {
        config,
        col: Tables::new(&series, space.nodes()),
        grid: Tables::new(&series, grid.nodes()),
        op,
        space: space.clone(),
        drho0_left: density.rho0().eval_derivative(0.0, 1),
    };
    let coef = Coefficients::new(&space, density, config.kappa)?;
    let mut traj = Trajectory::new(space.clone(), data.u0.grid().clone(), coef);

    // λ(0) from the mass-matrix projection of ρ₀u₀′
    let nodes = grid.nodes();
    let du0: Vec<f64> = nodes.iter().map(|&x| data.u0.eval_derivative(x, 1)).collect();
    let b = DVector::from_fn(config.n_modes, |k, _| {
        let vals: Vec<f64> = nodes
            .iter()
            .zip(&du0)
            .map(|(&x, d)| d * sine_mode(k + 1, x, 0))
            .collect();
        grid.integrate(&vals)
    });
    let lambda0 = solver
        .op
        .mass
        .clone()
        .lu()
        .solve(&b)
        .ok_or(Error::LinearSolve {
            condition: f64::INFINITY,
        })?;
    let f0 = data.u0.eval(0.0);
    let p0 = solver.profile(&lambda0, f0);
    let mut start = WindowStart {
        t: 0.0,
        lambda: lambda0,
        f: f0,
        w_grid: vec![1.0; nodes.len()],
        wx_grid: vec![0.0; nodes.len()],
        eta_col: space.nodes().to_vec(),
        w_col: vec![1.0; space.len()],
        diss: 0.0,
    };
    traj.push(
        0.0,
        p0.col[0].clone(),
        start.eta_col.clone(),
        start.w_col.clone(),
        0.0,
    );
    let q_of = |x_col: &[f64]| -> f64 {
        let vals: Vec<f64> = x_col.iter().map(|x| x * x).collect();
        space.integrate(&vals)
    };
    let rho_col: Vec<f64> = space.nodes().iter().map(|&x| density.rho0().eval(x)).collect();
    let x_col = |p: &Profile| -> Vec<f64> { p.col[1].iter().zip(&rho_col).map(|(d, r)| d * r).collect() };

    let (n_total, dt) = config.steps();
    let mut steps_per_window = n_total;
    let mut done = 0usize;
    let mut trace = PicardTrace {
        iterates: Vec::new(),
        residuals: Vec::new(),
        window_residuals: Vec::new(),
        converged: false,
        t_used: config.t_final,
        windows: 0,
    };
    while done < n_total {
        let m = steps_per_window.min(n_total - done);
        let current = solver.profile(&start.lambda, start.f);
        // a fresh window freezes the start profile, with u₀ itself at t = 0
        let frozen0 = if done == 0 {
            initial_profile(data, &space, nodes)
        } else {
            current
        };
        let (result, residuals) = solver.window(&start, vec![frozen0; m + 1], dt);
        trace.window_residuals.push(residuals.clone());
        trace.t_used = trace.t_used.min(m as f64 * dt);
        let Some(res) = result else {
            if m <= 1 {
                trace.residuals = residuals;
                return Err(Error::NoConvergence(format!(
                    "Picard window fell below dt at t = {:.6e}",
                    start.t
                )));
            }
            steps_per_window = m / 2;
            log::info!(
                "Picard window halved to {} steps at t = {:.6e}",
                steps_per_window,
                start.t
            );
            continue;
        };
        // η, η′ and dissipation from the converged velocity
        let mut eta = start.eta_col.clone();
        let mut w = start.w_col.clone();
        let mut diss = start.diss;
        let mut w_grid = start.w_grid.clone();
        let mut wx_grid = start.wx_grid.clone();
        let mut q_prev = config.kappa * q_of(&x_col(&res.profiles[0]));
        for n in 0..m {
            let (a, b) = (&res.profiles[n], &res.profiles[n + 1]);
            eta = add_trapezoid(&eta, &a.col[0], &b.col[0], dt);
            w = add_trapezoid(&w, &a.col[1], &b.col[1], dt);
            w_grid = add_trapezoid(&w_grid, &a.grid[0], &b.grid[0], dt);
            wx_grid = add_trapezoid(&wx_grid, &a.grid[1], &b.grid[1], dt);
            let q = config.kappa * q_of(&x_col(b));
            diss += 0.5 * dt * (q_prev + q);
            q_prev = q;
            let t = start.t + (n + 1) as f64 * dt;
            traj.push(t, b.col[0].clone(), eta.clone(), w.clone(), diss);
        }
        done += m;
        trace.windows += 1;
        trace.iterates = res.ends;
        trace.residuals = res.residuals;
        start = WindowStart {
            t: done as f64 * dt,
            lambda: res.lambdas[m].clone(),
            f: res.fs[m],
            w_grid,
            wx_grid,
            eta_col: eta,
            w_col: w,
            diss,
        };
    }
    trace.converged = true;
    Ok((traj, trace))
}

fn initial_profile(data: &InitialData, space: &ChebSpace, grid_nodes: &[f64]) -> Profile {
    let u = &data.u0;
    let at = |nodes: &[f64], k: usize| -> Vec<f64> {
        nodes.iter().map(|&x| u.eval_derivative(x, k)).collect()
    };
    Profile {
        col: [at(space.nodes(), 0), at(space.nodes(), 1), at(space.nodes(), 2)],
        grid: [at(grid_nodes, 1), at(grid_nodes, 2)],
    }
}
