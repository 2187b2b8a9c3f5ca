//! Initial velocity descriptors.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function_space::cheb::{ChebSeries, CHOP_TOL};
use crate::function_space::{Grid, ScalarField, SMOOTH};

#[derive(Debug, Clone, PartialEq)]
pub enum VelocityKind {
    /// `u₀ = βx + δ`.
    Affine { beta: f64, delta: f64 },
    /// `u₀ = amplitude · sin(mode πx)`.
    Sine { amplitude: f64, mode: usize },
    /// `u₀ = amplitude · min(x, 1-x)`, kinked at `1/2`.
    Tent { amplitude: f64 },
    /// Values at the Chebyshev–Lobatto points of `[0, 1]`.
    Sampled { values: Vec<f64> },
}

pub fn make_velocity(kind: &VelocityKind, grid: Arc<Grid>) -> Result<ScalarField> {
    Ok(match *kind {
        VelocityKind::Affine { beta, delta } => ScalarField::analytic(grid, move |x, k| match k {
            0 => beta * x + delta,
            1 => beta,
            _ => 0.0,
        }),
        VelocityKind::Sine { amplitude, mode } => {
            if mode == 0 {
                return Err(Error::InvalidArgument("sine mode must be at least 1".into()));
            }
            let w = mode as f64 * PI;
            ScalarField::analytic(grid, move |x, k| {
                let amp = amplitude * w.powi(k as i32);
                match k % 4 {
                    0 => amp * (w * x).sin(),
                    1 => amp * (w * x).cos(),
                    2 => -amp * (w * x).sin(),
                    _ => -amp * (w * x).cos(),
                }
            })
        }
        VelocityKind::Tent { amplitude } => {
            let left = ChebSeries::new(0.0, 0.5, vec![0.25 * amplitude, 0.25 * amplitude]);
            let right = ChebSeries::new(0.5, 1.0, vec![0.25 * amplitude, -0.25 * amplitude]);
            ScalarField::from_pieces(grid, vec![left, right], 1)
        }
        VelocityKind::Sampled { ref values } => {
            if values.len() < 3 {
                return Err(Error::InvalidArgument(
                    "sampled velocity needs at least 3 values".into(),
                ));
            }
            let s = ChebSeries::from_lobatto_values(values, 0.0, 1.0).chopped(CHOP_TOL);
            ScalarField::from_pieces(grid, vec![s], SMOOTH)
        }
    })
}
