//! Exact solutions of the κ-problem for `ρ₀ = A x(1-x)`, `u₀ = βx + δ`.
//!
//! The ansatz `η(x, t) = h(t) x + g(t)` closes the equation into
//! `h″ = 4A/h² - 4κA h′`, `g″ = -2A/h² + 2κA h′` with `h(0) = 1`,
//! `h′(0) = β`, `g(0) = 0`, `g′(0) = δ`, integrated here by an adaptive
//! Dormand–Prince 5(4) pair.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function_space::{Grid, ScalarField};

const DEFAULT_RTOL: f64 = 1e-12;
const DEFAULT_ATOL: f64 = 1e-13;
const COLLAPSE_H: f64 = 1e-8;
const MAX_STEPS: usize = 10_000_000;

/// `(h, h′, g, g′)` at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineState {
    pub t: f64,
    pub h: f64,
    pub dh: f64,
    pub g: f64,
    pub dg: f64,
}

impl AffineState {
    /// `v(x, t) = h′ x + g′`.
    pub fn v(&self, x: f64) -> f64 {
        self.dh * x + self.dg
    }

    pub fn eta(&self, x: f64) -> f64 {
        self.h * x + self.g
    }

    pub fn eta_x(&self) -> f64 {
        self.h
    }

    pub fn velocity_field(&self, grid: Arc<Grid>) -> ScalarField {
        let (a, b) = (self.dh, self.dg);
        ScalarField::analytic(grid, move |x, k| match k {
            0 => a * x + b,
            1 => a,
            _ => 0.0,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineOracle {
    pub a: f64,
    pub beta: f64,
    pub delta: f64,
    pub kappa: f64,
    rtol: f64,
    atol: f64,
}

type Y = [f64; 4];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl AffineOracle {
    pub fn new(a: f64, beta: f64, delta: f64, kappa: f64) -> Result<Self> {
        if !(a > 0.0) || !(kappa >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "affine oracle needs A > 0 and kappa >= 0 (A = {a}, kappa = {kappa})"
            )));
        }
        Ok(Self {
            a,
            beta,
            delta,
            kappa,
            rtol: DEFAULT_RTOL,
            atol: DEFAULT_ATOL,
        })
    }

    /// Override the integration tolerances (relative, absolute).
    pub fn with_tolerance(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    fn rhs(&self, y: &Y) -> Y {
        let inv2 = 1.0 / (y[0] * y[0]);
        let damp = self.kappa * self.a * y[1];
        [
            y[1],
            4.0 * self.a * inv2 - 4.0 * damp,
            y[3],
            -2.0 * self.a * inv2 + 2.0 * damp,
        ]
    }

    fn trial_step(&self, y: &Y, h: f64) -> (Y, f64) {
        let mut k = [[0.0; 4]; 7];
        k[0] = self.rhs(y);
        for s in 1..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(s) {
                for i in 0..4 {
                    ys[i] += h * A[s][j] * kj[i];
                }
            }
            k[s] = self.rhs(&ys);
        }
        let mut y5 = *y;
        let mut err = 0.0f64;
        for i in 0..4 {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += h * d5;
            let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
            err = err.max((h * (d5 - d4) / sc).abs());
        }
        (y5, err)
    }

    /// Oracle states at the requested (ascending, non-negative) times.
    pub fn states(&self, times: &[f64]) -> Result<Vec<AffineState>> {
        let mut y: Y = [1.0, self.beta, 0.0, self.delta];
        let mut t: f64 = 0.0;
        let mut h: f64 = 1e-4;
        let mut steps = 0;
        let mut out = Vec::with_capacity(times.len());
        for &target in times {
            if target < t {
                return Err(Error::InvalidArgument(
                    "oracle times must be ascending and non-negative".into(),
                ));
            }
            while t < target {
                let step = h.min(target - t);
                let (y_new, err) = self.trial_step(&y, step);
                steps += 1;
                if steps > MAX_STEPS || step < 1e-15 * (1.0 + t) {
                    return Err(Error::FlowCollapse { t });
                }
                if err <= 1.0 && y_new[0] > COLLAPSE_H {
                    t = if step == target - t { target } else { t + step };
                    y = y_new;
                }
                if y_new[0] <= COLLAPSE_H && err <= 1.0 {
                    return Err(Error::FlowCollapse { t: t + step });
                }
                let fac = if err == 0.0 { 5.0 } else { 0.9 * err.powf(-0.2) };
                h = step * fac.clamp(0.2, 5.0);
            }
            out.push(AffineState {
                t,
                h: y[0],
                dh: y[1],
                g: y[2],
                dg: y[3],
            });
        }
        Ok(out)
    }

    pub fn state(&self, t: f64) -> Result<AffineState> {
        Ok(self.states(&[t])?[0])
    }

    /// Time derivatives `[h, h′, …, h^{(order)}]` and `[g, g′, …]` at a state,
    /// from the Taylor recursion of the ODE.
    pub fn jet(&self, s: &AffineState, order: usize) -> (Vec<f64>, Vec<f64>) {
        let n = order.max(1) + 1;
        let mut hc = vec![0.0; n];
        let mut gc = vec![0.0; n];
        hc[0] = s.h;
        hc[1] = s.dh;
        gc[0] = s.g;
        gc[1] = s.dg;
        // Taylor coefficients of y = h^{-2}
        let mut yc = vec![0.0; n];
        yc[0] = s.h.powi(-2);
        let pow = -2.0;
        for k in 0..n.saturating_sub(2) {
            if k > 0 {
                let acc: f64 = (1..=k)
                    .map(|j| ((pow + 1.0) * j as f64 - k as f64) * hc[j] * yc[k - j])
                    .sum();
                yc[k] = acc / (k as f64 * hc[0]);
            }
            let denom = ((k + 2) * (k + 1)) as f64;
            let damp = self.kappa * self.a * (k + 1) as f64 * hc[k + 1];
            hc[k + 2] = (4.0 * self.a * yc[k] - 4.0 * damp) / denom;
            gc[k + 2] = (-2.0 * self.a * yc[k] + 2.0 * damp) / denom;
        }
        let mut fact = 1.0;
        for k in 0..n {
            if k > 0 {
                fact *= k as f64;
            }
            hc[k] *= fact;
            gc[k] *= fact;
        }
        (hc, gc)
    }

    /// `∂_t^k v(x, t)` at a state.
    pub fn velocity_time_derivative(&self, s: &AffineState, k: usize, x: f64) -> f64 {
        let (h, g) = self.jet(s, k + 1);
        h[k + 1] * x + g[k + 1]
    }

    /// `½h′² + 4A/h`, conserved when `κ = 0`.
    pub fn first_integral(&self, s: &AffineState) -> f64 {
        0.5 * s.dh * s.dh + 4.0 * self.a / s.h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_acceleration_is_minus_two_rho_prime() {
        let o = AffineOracle::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let s0 = o.state(0.0).unwrap();
        let (h, g) = o.jet(&s0, 2);
        assert_eq!(h[2], 4.0);
        assert_eq!(g[2], -2.0);
        for &x in &[0.0, 0.25, 1.0] {
            let vt = o.velocity_time_derivative(&s0, 1, x);
            assert!((vt + 2.0 * (1.0 - 2.0 * x)).abs() < 1e-15);
        }
    }

    #[test]
    fn first_integral_is_conserved() {
        let o = AffineOracle::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.01).collect();
        for s in o.states(&times).unwrap() {
            assert!((o.first_integral(&s) - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn damping_slows_expansion() {
        let free = AffineOracle::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let damped = AffineOracle::new(1.0, 0.0, 0.0, 0.1).unwrap();
        for &t in &[0.05, 0.1, 0.2] {
            assert!(damped.state(t).unwrap().dh < free.state(t).unwrap().dh);
        }
    }

    #[test]
    fn jet_matches_finite_differences_of_trajectory() {
        let o = AffineOracle::new(1.0, 0.1, -0.05, 0.1).unwrap();
        let e = 1e-3;
        let s = o.states(&[0.1 - e, 0.1, 0.1 + e]).unwrap();
        let (h, _) = o.jet(&s[1], 3);
        let fd = (s[2].dh - 2.0 * s[1].dh + s[0].dh) / (e * e);
        assert!((fd - h[3]).abs() < 1e-5 * h[3].abs().max(1.0));
    }

    #[test]
    fn strong_compression_rebounds_before_vacuum_collapse() {
        // pressure keeps h away from zero: h_min solves 4/h = 4 + β²/2
        let o = AffineOracle::new(1.0, -50.0, 0.0, 0.0).unwrap();
        let times: Vec<f64> = (1..=100).map(|i| i as f64 * 4e-4).collect();
        let h_min = o
            .states(&times)
            .unwrap()
            .iter()
            .map(|s| s.h)
            .fold(f64::INFINITY, f64::min);
        assert!(h_min > 4.0 / 1254.0 * 0.999);
    }

    #[test]
    fn descending_times_are_rejected() {
        let o = AffineOracle::new(1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(o.states(&[0.2, 0.1]).is_err());
    }
}
