//! Higher-order energy functionals and bound checks along trajectories.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function_space::{distance_field, sobolev_norm, ScalarField};
use crate::initial_data::DensityProfile;
use crate::kappa_solver::{LagrangianState, Trajectory};

/// Time derivatives needed by [`energy_snapshot`].
pub const ENERGY_DEPTH: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct EnergySnapshot {
    pub t: f64,
    /// Named summands, in a fixed order.
    pub components: Vec<(String, f64)>,
    pub total: f64,
    /// `∫ ρ₀v²/2 + ρ₀^γ η′^{1-γ}/(γ-1)`.
    pub physical: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaEnergySnapshot {
    pub t: f64,
    pub a0: usize,
    pub components: Vec<(String, f64)>,
    pub total: f64,
}

fn need_stack(state: &LagrangianState, depth: usize) -> Result<()> {
    let available = state.dt_stack.len().saturating_sub(1);
    if state.dt_stack.len() <= depth {
        return Err(Error::MissingDerivativeStack {
            needed: depth,
            available,
        });
    }
    Ok(())
}

/// `∫ weight |∂ₓ^order f|²` on the field's grid.
fn weighted_seminorm_sq(f: &ScalarField, order: usize, weight: &[f64]) -> Result<f64> {
    let d = f.derivative_values(order)?;
    let vals: Vec<f64> = d.iter().zip(weight).map(|(v, w)| w * v * v).collect();
    Ok(f.grid().integrate(&vals))
}

fn sq(x: f64) -> f64 {
    x * x
}

/// Summands shared by both functionals with `weight` in place of `ρ₀`.
fn common_components(
    stack: &[ScalarField],
    weight: &ScalarField,
    label: &str,
) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::with_capacity(10);
    for (s, f) in stack.iter().enumerate().take(5) {
        let order = 2.0 - s as f64 / 2.0;
        out.push((format!("dt{s}_v_H{order}"), sq(sobolev_norm(f, order)?)));
    }
    for s in 0..3 {
        let order = 3.0 - s as f64;
        let f = weight.mul(&stack[2 * s]);
        out.push((
            format!("{label}_dt{}_v_H{order}", 2 * s),
            sq(sobolev_norm(&f, order)?),
        ));
    }
    let w_vals = weight.values();
    out.push((
        format!("{label}_dt1_v_xx_L2"),
        weighted_seminorm_sq(&stack[1], 2, w_vals)?,
    ));
    out.push((
        format!("{label}_dt3_v_x_L2"),
        weighted_seminorm_sq(&stack[3], 1, w_vals)?,
    ));
    Ok(out)
}

/// `∫ ρ₀v²/2 + ρ₀ c η′^{1-γ}/(γ-1)` on the state's grid.
pub fn physical_energy(state: &LagrangianState, density: &DensityProfile) -> f64 {
    let g = density.gamma();
    let grid = state.v.grid();
    let (rho, c) = (density.rho0(), density.sound_speed_sq());
    let vals: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(state.v.values())
        .zip(state.eta_x.values())
        .map(|((&x, v), w)| {
            let r = rho.eval(x);
            0.5 * r * v * v + r * c.eval(x).max(0.0) * w.powf(1.0 - g) / (g - 1.0)
        })
        .collect();
    grid.integrate(&vals)
}

/// The energy `E(t)`: `‖∂ₜˢv‖²_{2-s/2}` (s ≤ 4), `‖ρ₀∂ₜ^{2s}v‖²_{3-s}` (s ≤ 2),
/// `‖√ρ₀ ∂ₜv″‖²₀` and `‖√ρ₀ ∂ₜ³v′‖²₀`.
pub fn energy_snapshot(state: &LagrangianState, density: &DensityProfile) -> Result<EnergySnapshot> {
    need_stack(state, ENERGY_DEPTH)?;
    let rho = density.rho0().on_grid(state.v.grid().clone());
    let components = common_components(&state.dt_stack, &rho, "rho0")?;
    let total = components.iter().map(|(_, v)| v).sum();
    Ok(EnergySnapshot {
        t: state.t,
        components,
        total,
        physical: physical_energy(state, density),
    })
}

/// `a₀ = ⌈1/(γ-1)⌉ - 1`, so that `1 < 1 + 1/(γ-1) - a₀ ≤ 2`.
pub fn a0(gamma: f64) -> Result<usize> {
    if !(gamma > 1.0) || !gamma.is_finite() {
        return Err(Error::GammaOutOfRange(gamma));
    }
    let m = 1.0 / (gamma - 1.0);
    // snap to integers so that e.g. γ = 3/2 gives exactly 2
    let r = m.round();
    let m = if (m - r).abs() < 1e-12 * m.max(1.0) { r } else { m };
    Ok((m.ceil() as usize).saturating_sub(1))
}

/// `E_γ` with distance weights and the extra sum
/// `Σ_{a ≤ a₀} ‖√(d^{1+1/(γ-1)-a}) ∂ₜ^{4+a₀-a}v′‖²₀`.
pub fn energy_gamma(
    state: &LagrangianState,
    density: &DensityProfile,
    gamma: f64,
) -> Result<GammaEnergySnapshot> {
    let a0 = a0(gamma)?;
    if density.gamma() != gamma {
        return Err(Error::GammaOutOfRange(gamma));
    }
    need_stack(state, ENERGY_DEPTH + a0)?;
    let grid = state.v.grid().clone();
    let d = distance_field(grid.clone());
    let mut components = common_components(&state.dt_stack, &d, "d")?;
    let m = 1.0 / (gamma - 1.0);
    for a in 0..=a0 {
        let power = 1.0 + m - a as f64;
        let weight: Vec<f64> = d.values().iter().map(|x| x.powf(power)).collect();
        let k = 4 + a0 - a;
        components.push((
            format!("d{power}_dt{k}_v_x_L2"),
            weighted_seminorm_sq(&state.dt_stack[k], 1, &weight)?,
        ));
    }
    let total = components.iter().map(|(_, v)| v).sum();
    Ok(GammaEnergySnapshot {
        t: state.t,
        a0,
        components,
        total,
    })
}

/// Energy snapshots at every `stride`-th record (always including the last).
pub fn energy_history(
    traj: &Trajectory,
    density: &DensityProfile,
    stride: usize,
) -> Result<Vec<EnergySnapshot>> {
    let stride = stride.max(1);
    let mut idx: Vec<usize> = (0..traj.len()).step_by(stride).collect();
    if idx.last() != Some(&(traj.len() - 1)) && !traj.is_empty() {
        idx.push(traj.len() - 1);
    }
    idx.par_iter()
        .map(|&i| energy_snapshot(&traj.state(i, ENERGY_DEPTH), density))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub m0: f64,
    pub sup_e: f64,
    /// `sup E / M₀`.
    pub ratio: f64,
    /// First time with `E(t) > 2M₀`, by linear interpolation.
    pub first_violation_t: Option<f64>,
    /// Largest `T` with `sup_{[0,T]} E ≤ 2M₀`.
    pub t_good: f64,
    /// `(c₀, c₁)` of the tightest bound `E(t) ≤ c₀ + c₁ t` with least-squares slope.
    pub fitted: (f64, f64),
}

/// Checks `E(t) ≤ 2M₀` along `(t, E)` samples starting at `t = 0`.
pub fn check_bound(series: &[(f64, f64)], m0: f64) -> BoundReport {
    let limit = 2.0 * m0;
    let sup_e = series.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let mut first_violation_t = None;
    for (i, &(t, e)) in series.iter().enumerate() {
        if e > limit {
            first_violation_t = Some(if i == 0 {
                t
            } else {
                let (t0, e0) = series[i - 1];
                t0 + (limit - e0) / (e - e0) * (t - t0)
            });
            break;
        }
    }
    let t_good = first_violation_t.unwrap_or_else(|| series.last().map_or(0.0, |p| p.0));
    let n = series.len() as f64;
    let (mt, me) = series
        .iter()
        .fold((0.0, 0.0), |acc, p| (acc.0 + p.0 / n, acc.1 + p.1 / n));
    let (sxy, sxx) = series.iter().fold((0.0, 0.0), |acc, p| {
        (acc.0 + (p.0 - mt) * (p.1 - me), acc.1 + (p.0 - mt) * (p.0 - mt))
    });
    let c1 = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let c0 = series
        .iter()
        .map(|p| p.1 - c1 * p.0)
        .fold(f64::NEG_INFINITY, f64::max);
    BoundReport {
        m0,
        sup_e,
        ratio: sup_e / m0,
        first_violation_t,
        t_good,
        fitted: (c0, c1),
    }
}

/// `max |E(t_{n+1}) - E(t_n)|` over consecutive samples.
pub fn max_step_jump(series: &[(f64, f64)]) -> f64 {
    series
        .windows(2)
        .map(|w| (w[1].1 - w[0].1).abs())
        .fold(0.0, f64::max)
}

/// `sup_{[0,T]} E` over samples with `t ≤ t_max`.
pub fn sup_until(series: &[(f64, f64)], t_max: f64) -> f64 {
    series
        .iter()
        .filter(|p| p.0 <= t_max * (1.0 + 1e-12))
        .map(|p| p.1)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParabolicMonitor {
    pub sup_f: f64,
    pub f0: f64,
    pub sup_g: f64,
    /// `sup ‖f‖ ≤ max(‖f(0)‖, sup ‖g‖)(1 + tol)`.
    pub holds: bool,
}

/// Monitors `‖f‖_{L∞L²} ≤ max(‖f(0)‖, ‖g‖_{L∞L²})` for `g = f + κ f_t`,
/// with `f_t` by differences of the uniformly spaced samples `f`.
pub fn parabolic_monitor(
    times: &[f64],
    f: &[Vec<f64>],
    integrate: impl Fn(&[f64]) -> f64,
    kappa: f64,
    tol: f64,
) -> Result<ParabolicMonitor> {
    if f.len() < 2 || times.len() != f.len() {
        return Err(Error::InvalidArgument(
            "monitor needs at least two samples".into(),
        ));
    }
    let norm = |v: &[f64]| integrate(&v.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt();
    let n = f.len();
    let mut sup_g = 0.0f64;
    // second-order differences, one-sided at the ends
    let rate = |i: usize, j: usize| -> f64 {
        if n == 2 {
            return (f[1][j] - f[0][j]) / (times[1] - times[0]);
        }
        if i == 0 {
            (-3.0 * f[0][j] + 4.0 * f[1][j] - f[2][j]) / (times[2] - times[0])
        } else if i == n - 1 {
            (3.0 * f[i][j] - 4.0 * f[i - 1][j] + f[i - 2][j]) / (times[i] - times[i - 2])
        } else {
            (f[i + 1][j] - f[i - 1][j]) / (times[i + 1] - times[i - 1])
        }
    };
    for i in 0..n {
        let g: Vec<f64> = (0..f[i].len()).map(|j| f[i][j] + kappa * rate(i, j)).collect();
        sup_g = sup_g.max(norm(&g));
    }
    let f0 = norm(&f[0]);
    let sup_f = f.iter().map(|v| norm(v)).fold(0.0, f64::max);
    Ok(ParabolicMonitor {
        sup_f,
        f0,
        sup_g,
        holds: sup_f <= f0.max(sup_g) * (1.0 + tol),
    })
}

/// The field `(2/ρ₀)[ρ₀² ∂ₜ²v′]′ = 2ρ₀ ∂ₜ²v″ + 4ρ₀′ ∂ₜ²v′` at the
/// collocation nodes of record `i`.
pub fn parabolic_field(traj: &Trajectory, i: usize) -> Vec<f64> {
    let space = traj.space();
    let coef = traj.coefficients();
    let jets = crate::dynamics::time_jets(space, coef, &traj.v[i], &traj.eta_x[i], 2);
    let d1 = space.derivative(&jets[2], 1);
    let d2 = space.derivative(&jets[2], 2);
    (0..d1.len())
        .map(|j| 2.0 * coef.rho0[j] * d2[j] + 4.0 * coef.drho0[j] * d1[j])
        .collect()
}

/// Relative `L²` mismatch between the `k`-th jet at record `i` and a central
/// difference of the stored velocities.
pub fn stack_consistency(traj: &Trajectory, i: usize, k: usize) -> Result<f64> {
    // central stencils on `2·half + 1` points
    let (half, weights): (usize, &[f64]) = match k {
        1 => (1, &[-0.5, 0.0, 0.5]),
        2 => (1, &[1.0, -2.0, 1.0]),
        3 => (2, &[-0.5, 1.0, 0.0, -1.0, 0.5]),
        4 => (2, &[1.0, -4.0, 6.0, -4.0, 1.0]),
        _ => {
            return Err(Error::InvalidArgument(format!(
                "no difference stencil for order {k}"
            )))
        }
    };
    if i < half || i + half >= traj.len() {
        return Err(Error::InvalidArgument(format!(
            "record {i} too close to the ends for order {k}"
        )));
    }
    let h = traj.times[i + 1] - traj.times[i];
    let space = traj.space();
    let jets = crate::dynamics::time_jets(space, traj.coefficients(), &traj.v[i], &traj.eta_x[i], k);
    let fd: Vec<f64> = (0..traj.v[i].len())
        .map(|j| {
            weights
                .iter()
                .enumerate()
                .map(|(m, w)| w * traj.v[i + m - half][j])
                .sum::<f64>()
                / h.powi(k as i32)
        })
        .collect();
    let diff: Vec<f64> = fd.iter().zip(&jets[k]).map(|(a, b)| sq(a - b)).collect();
    let base: Vec<f64> = jets[k].iter().map(|b| sq(*b)).collect();
    let den = space.integrate(&base).sqrt();
    Ok(space.integrate(&diff).sqrt() / den.max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a0_law_examples() {
        assert_eq!(a0(2.0).unwrap(), 0);
        assert_eq!(a0(1.5).unwrap(), 1);
        assert_eq!(a0(5.0 / 3.0).unwrap(), 1);
        assert_eq!(a0(1.25).unwrap(), 3);
        assert!(a0(1.0).is_err());
    }

    #[test]
    fn constant_energy_has_unit_ratio() {
        let s: Vec<(f64, f64)> = (0..10).map(|i| (i as f64 * 0.01, 3.0)).collect();
        let r = check_bound(&s, 3.0);
        assert_eq!(r.ratio, 1.0);
        assert!(r.first_violation_t.is_none());
        assert_eq!(r.t_good, 0.09);
        assert!(r.fitted.1.abs() < 1e-12);
    }

    #[test]
    fn linear_growth_crosses_at_one_thirtieth() {
        let m0 = 2.0;
        let s: Vec<(f64, f64)> = (0..=100)
            .map(|i| {
                let t = i as f64 * 1e-3;
                (t, m0 * (1.0 + 30.0 * t))
            })
            .collect();
        let r = check_bound(&s, m0);
        assert!((r.first_violation_t.unwrap() - 1.0 / 30.0).abs() < 1e-12);
        assert!((r.fitted.1 - 60.0).abs() < 1e-9);
    }

    #[test]
    fn monitor_on_exact_decay() {
        // f = e^{-t/κ} f(0) solves f + κ f_t = 0
        let kappa = 0.1;
        let times: Vec<f64> = (0..=100).map(|i| i as f64 * 1e-3).collect();
        let f: Vec<Vec<f64>> = times
            .iter()
            .map(|t| vec![(-t / kappa).exp(); 4])
            .collect();
        let m = parabolic_monitor(&times, &f, |v| v.iter().sum::<f64>() / 4.0, kappa, 1e-9).unwrap();
        assert!(m.holds);
        assert!(m.sup_g < 1e-3);
        assert_eq!(m.f0, 1.0);
    }
}
