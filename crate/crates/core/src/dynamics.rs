//! Lagrangian evolution law on collocation values and its time jets.
//!
//! With `w = η′`, `c = ρ₀^{γ-1}`:
//!
//! `v_t = -(γ/(γ-1)) c′ w^{-γ} + γ c w′ w^{-γ-1} + κ(ρ₀ v″ + 2ρ₀′ v′)`,
//! `w_t = v′`.
//!
//! Every coefficient is finite at the vacuum endpoints, so no division by
//! `ρ₀` occurs anywhere.

use crate::error::{Error, Result};
use crate::function_space::ChebSpace;
use crate::initial_data::DensityProfile;
use crate::taylor::{factorial, pow_series};

/// Nodal coefficients of the evolution law on a collocation space.
#[derive(Debug, Clone)]
pub struct Coefficients {
    pub rho0: Vec<f64>,
    /// Zero unless `kappa > 0` (only then is `ρ₀′` bounded and needed).
    pub drho0: Vec<f64>,
    pub c: Vec<f64>,
    pub dc: Vec<f64>,
    pub gamma: f64,
    pub kappa: f64,
}

impl Coefficients {
    pub fn new(space: &ChebSpace, density: &DensityProfile, kappa: f64) -> Result<Self> {
        let gamma = density.gamma();
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::InvalidArgument(format!("kappa = {kappa}")));
        }
        let rho = density.rho0();
        let c = density.sound_speed_sq();
        let nodes = space.nodes();
        if kappa > 0.0 && gamma != 2.0 {
            // ρ₀′ is unbounded at the vacuum unless γ = 2
            return Err(Error::GammaOutOfRange(gamma));
        }
        let rho0 = nodes.iter().map(|&x| rho.eval(x)).collect();
        let drho0 = if kappa > 0.0 {
            nodes.iter().map(|&x| rho.eval_derivative(x, 1)).collect()
        } else {
            vec![0.0; nodes.len()]
        };
        Ok(Self {
            rho0,
            drho0,
            c: nodes.iter().map(|&x| c.eval(x)).collect(),
            dc: nodes.iter().map(|&x| c.eval_derivative(x, 1)).collect(),
            gamma,
            kappa,
        })
    }

    /// Pressure part of `v_t` given `w` and `w′`.
    pub fn pressure(&self, w: &[f64], dw: &[f64]) -> Vec<f64> {
        let g = self.gamma;
        let a = g / (g - 1.0);
        (0..w.len())
            .map(|i| {
                let p = w[i].powf(-g);
                -a * self.dc[i] * p + g * self.c[i] * dw[i] * p / w[i]
            })
            .collect()
    }

    /// `κ(ρ₀ v″ + 2ρ₀′ v′)`.
    pub fn viscous(&self, dv: &[f64], d2v: &[f64]) -> Vec<f64> {
        if self.kappa == 0.0 {
            return vec![0.0; dv.len()];
        }
        (0..dv.len())
            .map(|i| self.kappa * (self.rho0[i] * d2v[i] + 2.0 * self.drho0[i] * dv[i]))
            .collect()
    }

    /// `v_t` at a state.
    pub fn v_rate(&self, space: &ChebSpace, v: &[f64], w: &[f64]) -> Vec<f64> {
        let dw = space.derivative(w, 1);
        let mut out = self.pressure(w, &dw);
        if self.kappa > 0.0 {
            let dv = space.derivative(v, 1);
            let d2v = space.derivative(v, 2);
            for (o, r) in out.iter_mut().zip(self.viscous(&dv, &d2v)) {
                *o += r;
            }
        }
        out
    }
}

/// `[∂_t^k v]_{k=0..=depth}` at a state `(v, w)`, by Taylor-mode
/// differentiation of the evolution law in time.
pub fn time_jets(
    space: &ChebSpace,
    coef: &Coefficients,
    v: &[f64],
    w: &[f64],
    depth: usize,
) -> Vec<Vec<f64>> {
    let n = v.len();
    let g = coef.gamma;
    let a = g / (g - 1.0);
    // Taylor coefficients in time
    let mut vk: Vec<Vec<f64>> = vec![v.to_vec()];
    let mut wk: Vec<Vec<f64>> = vec![w.to_vec()];
    let mut dwk: Vec<Vec<f64>> = vec![space.derivative(w, 1)];
    for k in 0..depth {
        if k > 0 {
            // w_k = (v_{k-1})′ / k
            let dv = space.derivative(&vk[k - 1], 1);
            let next: Vec<f64> = dv.iter().map(|d| d / k as f64).collect();
            dwk.push(space.derivative(&next, 1));
            wk.push(next);
        }
        let mut r = vec![0.0; n];
        for i in 0..n {
            let wi: Vec<f64> = wk.iter().map(|wj| wj[i]).collect();
            let p = pow_series(&wi, -g, k + 1);
            let q = pow_series(&wi, -g - 1.0, k + 1);
            let conv: f64 = (0..=k).map(|j| dwk[j][i] * q[k - j]).sum();
            r[i] = -a * coef.dc[i] * p[k] + g * coef.c[i] * conv;
        }
        if coef.kappa > 0.0 {
            let dv = space.derivative(&vk[k], 1);
            let d2v = space.derivative(&vk[k], 2);
            for (ri, s) in r.iter_mut().zip(coef.viscous(&dv, &d2v)) {
                *ri += s;
            }
        }
        vk.push(r.iter().map(|x| x / (k + 1) as f64).collect());
    }
    vk.into_iter()
        .enumerate()
        .map(|(k, c)| {
            let f = factorial(k);
            c.into_iter().map(|x| x * f).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::Grid;
    use crate::initial_data::{make_density, ProfileKind};
    use std::sync::Arc;

    #[test]
    fn initial_acceleration_is_minus_two_rho_prime() {
        let sp = ChebSpace::new(16);
        let d = make_density(
            &ProfileKind::Quadratic { a: 1.0 },
            2.0,
            Arc::new(Grid::default()),
        )
        .unwrap();
        for kappa in [0.0, 0.1] {
            let coef = Coefficients::new(&sp, &d, kappa).unwrap();
            let v = vec![0.0; sp.len()];
            let w = vec![1.0; sp.len()];
            let jets = time_jets(&sp, &coef, &v, &w, 1);
            for (x, vt) in sp.nodes().iter().zip(&jets[1]) {
                assert!((vt + 2.0 * (1.0 - 2.0 * x)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn pressure_scales_with_power_of_eta_x() {
        let sp = ChebSpace::new(16);
        let d = make_density(&ProfileKind::PowerAdjusted, 3.0, Arc::new(Grid::default())).unwrap();
        let coef = Coefficients::new(&sp, &d, 0.0).unwrap();
        let v = vec![0.0; sp.len()];
        let base = coef.v_rate(&sp, &v, &vec![1.0; sp.len()]);
        let h = 1.3f64;
        let scaled = coef.v_rate(&sp, &v, &vec![h; sp.len()]);
        for (b, s) in base.iter().zip(&scaled) {
            assert!((s - b * h.powf(-3.0)).abs() < 1e-13);
        }
        // γ = 3, c = x(1-x), η′ = 1: v_t = -(3/2)(1 - 2x)
        for (x, b) in sp.nodes().iter().zip(&base) {
            assert!((b + 1.5 * (1.0 - 2.0 * x)).abs() < 1e-13);
        }
    }

    #[test]
    fn viscosity_needs_gamma_two() {
        let sp = ChebSpace::new(8);
        let d = make_density(&ProfileKind::PowerAdjusted, 3.0, Arc::new(Grid::default())).unwrap();
        assert!(Coefficients::new(&sp, &d, 0.1).is_err());
    }
}
