//! Convolution smoothing with a compactly supported polynomial bump.
//!
//! The field is extended past each endpoint by point reflection through its
//! endpoint value, `F(-y) = 2f(0) - f(y)`, which the symmetric kernel maps
//! back onto `f(0)` exactly; endpoint zeros of `ρ₀^{γ-1}` therefore survive.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function_space::cheb::{ChebSeries, CHOP_TOL};
use crate::function_space::{Grid, ScalarField, SMOOTH};

/// Kernel `(1 - z²)^KERNEL_POWER` on `[-1, 1]`, `C^{KERNEL_POWER - 1}`.
pub const KERNEL_POWER: i32 = 12;

/// Widths must leave room for the reflected extension.
pub const MAX_EPSILON: f64 = 0.25;

const PANEL_POINTS: usize = 24;

fn kernel_norm() -> f64 {
    2.0 * (1..=KERNEL_POWER).fold(1.0, |acc, k| acc * (2 * k) as f64 / (2 * k + 1) as f64)
}

struct Mollifier<'a> {
    f: &'a ScalarField,
    eps: f64,
    singular: Vec<f64>,
    rule: Grid,
    norm: f64,
    ends: (f64, f64),
}

impl Mollifier<'_> {
    fn extended(&self, y: f64) -> f64 {
        if y < 0.0 {
            2.0 * self.ends.0 - self.f.eval(-y)
        } else if y > 1.0 {
            2.0 * self.ends.1 - self.f.eval(2.0 - y)
        } else {
            self.f.eval(y)
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let mut cuts = vec![-1.0];
        cuts.extend(
            self.singular
                .iter()
                .map(|p| (x - p) / self.eps)
                .filter(|z| *z > -1.0 && *z < 1.0),
        );
        cuts.push(1.0);
        cuts.sort_by(f64::total_cmp);
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a < 1e-15 {
                continue;
            }
            for (&t, &wt) in self.rule.nodes().iter().zip(self.rule.weights()) {
                let z = a + (b - a) * t;
                let k = (1.0 - z * z).powi(KERNEL_POWER);
                total += (b - a) * wt * k * self.extended(x - self.eps * z);
            }
        }
        total / self.norm
    }
}

/// Break points of the mollified field: kinks of the extension shifted by `±ε`.
pub fn mollified_breaks(kinks: &[f64], eps: f64) -> Vec<f64> {
    let mut out: Vec<f64> = singular_set(kinks)
        .iter()
        .flat_map(|p| [p - eps, p + eps])
        .filter(|x| *x > 1e-14 && *x < 1.0 - 1e-14)
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    out
}

fn singular_set(kinks: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0, 1.0];
    for &k in kinks {
        s.extend([k, -k, 2.0 - k]);
    }
    s
}

/// `f * K_ε` as a piecewise Chebyshev field on `grid`.
pub fn mollify_field(f: &ScalarField, eps: f64, grid: Arc<Grid>) -> Result<ScalarField> {
    if !(eps > 0.0 && eps < MAX_EPSILON) {
        return Err(Error::InvalidArgument(format!(
            "mollifier width {eps} outside (0, {MAX_EPSILON})"
        )));
    }
    let kinks = f.breakpoints();
    let m = Mollifier {
        f,
        eps,
        singular: singular_set(&kinks),
        rule: Grid::gauss(PANEL_POINTS),
        norm: kernel_norm(),
        ends: (f.eval(0.0), f.eval(1.0)),
    };
    let mut breaks = vec![0.0];
    breaks.extend(mollified_breaks(&kinks, eps));
    breaks.push(1.0);
    let pieces = breaks
        .windows(2)
        .map(|w| ChebSeries::fit(|x| m.eval(x), w[0], w[1], CHOP_TOL))
        .collect();
    let max_derivative = if f.max_derivative() == SMOOTH {
        SMOOTH
    } else {
        f.max_derivative() + KERNEL_POWER as usize
    };
    Ok(ScalarField::from_pieces(grid, pieces, max_derivative))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial_data::velocity::{make_velocity, VelocityKind};

    #[test]
    fn kernel_has_unit_mass() {
        let g = Grid::gauss(40);
        let m: f64 = g
            .nodes()
            .iter()
            .zip(g.weights())
            .map(|(&t, &w)| 2.0 * w * (1.0 - (2.0 * t - 1.0).powi(2)).powi(KERNEL_POWER))
            .sum();
        assert!((m / kernel_norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn endpoint_values_and_linear_functions_are_preserved() {
        let grid = Arc::new(Grid::default());
        let f = ScalarField::analytic(grid.clone(), |x, k| match k {
            0 => 2.0 * x - 0.3,
            1 => 2.0,
            _ => 0.0,
        });
        let g = mollify_field(&f, 0.05, grid).unwrap();
        for &x in &[0.0, 0.01, 0.5, 0.97, 1.0] {
            assert!((g.eval(x) - f.eval(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn smooth_input_moves_by_order_eps_squared() {
        let grid = Arc::new(Grid::default());
        let u = make_velocity(
            &VelocityKind::Sine {
                amplitude: 1.0,
                mode: 2,
            },
            grid.clone(),
        )
        .unwrap();
        let errs: Vec<f64> = [0.04, 0.02]
            .iter()
            .map(|&e| {
                let m = mollify_field(&u, e, grid.clone()).unwrap();
                m.sub(&u).values().iter().map(|v| v * v).sum::<f64>().sqrt()
            })
            .collect();
        let rate = (errs[0] / errs[1]).log2();
        assert!((rate - 2.0).abs() < 0.1, "{rate}");
    }

    #[test]
    fn kink_is_smoothed() {
        let grid = Arc::new(Grid::default());
        let u = make_velocity(&VelocityKind::Tent { amplitude: 1.0 }, grid.clone()).unwrap();
        let m = mollify_field(&u, 0.01, grid).unwrap();
        assert!(m.max_derivative() >= 3);
        let d3 = (0..=200)
            .map(|i| m.eval_derivative(0.45 + 1e-3 * i as f64 / 2.0, 3).abs())
            .fold(0.0f64, f64::max);
        assert!(d3.is_finite() && d3 < 1e6, "{d3}");
        // second derivative integrates the unit jump in slope
        let d2 = m.eval_derivative(0.5, 2);
        assert!(d2 < -10.0, "{d2}");
    }

    #[test]
    fn width_precondition() {
        let grid = Arc::new(Grid::default());
        let u = ScalarField::constant(grid.clone(), 1.0);
        assert!(mollify_field(&u, 0.3, grid).is_err());
    }
}
