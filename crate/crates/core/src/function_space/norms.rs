//! Integer, fractional and weighted Sobolev norms.
//!
//! Fractional orders use the sine multiplier `(1 + k²π²)^s` on the part of
//! the field that vanishes at both endpoints; the linear lift through the
//! endpoint values is normed in closed form by log-convex interpolation
//! between neighbouring integer orders.

use std::f64::consts::{PI, SQRT_2};

use super::field::ScalarField;
use crate::error::{Error, Result};

const MIN_SINE_MODES: usize = 16;
const MAX_SINE_MODES: usize = 512;

/// Number of sine modes the grid can resolve for multiplier norms.
pub fn sine_modes_for(field: &ScalarField) -> usize {
    (field.grid().declared_degree() / 8).clamp(MIN_SINE_MODES, MAX_SINE_MODES)
}

fn squared_seminorm(f: &ScalarField, order: usize) -> Result<f64> {
    let d = f.derivative_values(order)?;
    Ok(f.grid().integrate(&d.iter().map(|v| v * v).collect::<Vec<_>>()))
}

fn squared_integer_norm(f: &ScalarField, s: usize) -> Result<f64> {
    (0..=s).map(|a| squared_seminorm(f, a)).sum()
}

/// Sine coefficients `√2 ∫ g sin(kπx)` of `g = f - lift`, `k = 1..=n_modes`.
pub fn sine_coefficients_vanishing_part(f: &ScalarField, n_modes: usize) -> Vec<f64> {
    let (a, b) = (f.eval(0.0), f.eval(1.0));
    let g: Vec<f64> = f
        .values()
        .iter()
        .zip(f.grid().nodes())
        .map(|(v, &x)| v - (a + (b - a) * x))
        .collect();
    let nodes = f.grid().nodes();
    let w = f.grid().weights();
    (1..=n_modes)
        .map(|k| {
            let kp = k as f64 * PI;
            SQRT_2
                * g.iter()
                    .zip(nodes)
                    .zip(w)
                    .map(|((gv, &x), w)| gv * (kp * x).sin() * w)
                    .sum::<f64>()
        })
        .collect()
}

fn squared_lift_norm(a: f64, b: f64, s: f64) -> f64 {
    let l2 = (a * a + a * b + b * b) / 3.0;
    let h1 = l2 + (b - a) * (b - a);
    let lo = if s.floor() >= 1.0 { h1 } else { l2 };
    let hi = if s.ceil() >= 1.0 { h1 } else { l2 };
    let theta = s - s.floor();
    if lo == 0.0 || hi == 0.0 {
        return 0.0;
    }
    lo.powf(1.0 - theta) * hi.powf(theta)
}

/// `‖f‖_s`: derivative integrals for integer `s`, sine multiplier otherwise.
pub fn sobolev_norm(f: &ScalarField, s: f64) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("Sobolev order {s}")));
    }
    let needed = s.ceil() as usize;
    if needed > f.max_derivative() {
        return Err(Error::InsufficientSmoothness {
            requested: needed,
            available: f.max_derivative(),
        });
    }
    if s.fract() == 0.0 {
        return Ok(squared_integer_norm(f, s as usize)?.sqrt());
    }
    Ok(squared_fractional_norm(f, s).sqrt())
}

fn squared_fractional_norm(f: &ScalarField, s: f64) -> f64 {
    let n_modes = sine_modes_for(f);
    let coeffs = sine_coefficients_vanishing_part(f, n_modes);
    let multiplier_part: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| (1.0 + ((i + 1) as f64 * PI).powi(2)).powf(s) * c * c)
        .sum();
    squared_lift_norm(f.eval(0.0), f.eval(1.0), s) + multiplier_part
}

/// `(∫ weight^power (|f|² + |Df|²))^{1/2}`.
pub fn weighted_norm(f: &ScalarField, weight: &ScalarField, power: f64) -> Result<f64> {
    if let Some((node, (&x, &value))) = weight
        .grid()
        .nodes()
        .iter()
        .zip(weight.values())
        .enumerate()
        .find(|(_, (_, &w))| !(w > 0.0))
    {
        return Err(Error::NonpositiveWeight { node, x, value });
    }
    let d = f.derivative_values(1)?;
    let integrand: Vec<f64> = f
        .values()
        .iter()
        .zip(&d)
        .zip(weight.values())
        .map(|((v, dv), w)| w.powf(power) * (v * v + dv * dv))
        .collect();
    Ok(f.grid().integrate(&integrand).sqrt())
}

/// `∫ weight^power |f|²` without the derivative term.
pub fn weighted_l2_squared(f: &ScalarField, weight: &ScalarField, power: f64) -> f64 {
    let integrand: Vec<f64> = f
        .values()
        .iter()
        .zip(weight.values())
        .map(|(v, w)| w.powf(power) * v * v)
        .collect();
    f.grid().integrate(&integrand)
}
