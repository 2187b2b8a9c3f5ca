//! Distance function, Hardy quotient `u/d` and the weighted embedding ratio.

use std::sync::Arc;

use super::cheb::{ChebSeries, CHOP_TOL};
use super::field::{ScalarField, SMOOTH};
use super::grid::Grid;
use super::norms::{sobolev_norm, weighted_norm};
use crate::error::{Error, Result};

/// Relative tolerance on `|u(0)|`, `|u(1)|` for membership in `H¹₀`.
pub const DIRICHLET_TOL: f64 = 1e-8;

/// Below this distance the quotient is evaluated as `(1/x) ∫₀ˣ u′`.
pub fn integral_form_threshold() -> f64 {
    10.0 * f64::EPSILON.sqrt()
}

/// `d(x) = min(x, 1 - x)`, exact and piecewise affine.
pub fn distance_field(grid: Arc<Grid>) -> ScalarField {
    ScalarField::analytic(grid, |x, k| match k {
        0 => x.min(1.0 - x),
        1 if x <= 0.5 => 1.0,
        1 => -1.0,
        _ => 0.0,
    })
}

// 3-point Gauss–Legendre on [0, 1]
const G3: [(f64, f64); 3] = [
    (0.112_701_665_379_258_3, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

/// Mean of `u′` over the segment of length `h` starting at `x0` towards `dir`.
fn mean_slope(u: &ScalarField, x0: f64, h: f64, dir: f64) -> f64 {
    G3.iter()
        .map(|&(t, w)| w * u.eval_derivative(x0 + dir * t * h, 1))
        .sum()
}

/// `u/d` as a piecewise Chebyshev field (break at `1/2`).
pub fn hardy_quotient(u: &ScalarField) -> Result<ScalarField> {
    let scale = u.max_abs().max(1.0);
    let (u0, u1) = (u.eval(0.0), u.eval(1.0));
    for (endpoint, value) in [(0.0, u0), (1.0, u1)] {
        if value.abs() > DIRICHLET_TOL * scale {
            return Err(Error::NotInH10 { endpoint, value });
        }
    }
    if u.max_derivative() < 1 {
        return Err(Error::InsufficientSmoothness {
            requested: 1,
            available: u.max_derivative(),
        });
    }
    let thresh = integral_form_threshold();
    let left = ChebSeries::fit(
        |x| {
            if x < thresh {
                mean_slope(u, 0.0, x, 1.0)
            } else {
                (u.eval(x) - u0) / x
            }
        },
        0.0,
        0.5,
        CHOP_TOL,
    );
    let right = ChebSeries::fit(
        |x| {
            let h = 1.0 - x;
            if h < thresh {
                -mean_slope(u, 1.0, h, -1.0)
            } else {
                (u.eval(x) - u1) / h
            }
        },
        0.5,
        1.0,
        CHOP_TOL,
    );
    let max_derivative = if u.max_derivative() == SMOOTH {
        SMOOTH
    } else {
        u.max_derivative() - 1
    };
    Ok(ScalarField::from_pieces(
        u.grid().clone(),
        vec![left, right],
        max_derivative,
    ))
}

/// `‖u/d‖_{s-1} / ‖u‖_s`.
pub fn check_hardy_ratio(u: &ScalarField, s: usize) -> Result<f64> {
    if s == 0 {
        return Err(Error::InvalidArgument("Hardy order must be positive".into()));
    }
    let q = hardy_quotient(u)?;
    let num = sobolev_norm(&q, (s - 1) as f64)?;
    let den = sobolev_norm(u, s as f64)?;
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(num / den)
}

/// `‖f‖²_{1-p/2} / ∫ d^p (|f|² + |Df|²)`; zero for the zero field.
pub fn check_embedding(f: &ScalarField, p: u32) -> Result<f64> {
    if !(1..=2).contains(&p) {
        return Err(Error::InvalidArgument(format!("embedding power {p}")));
    }
    let d = distance_field(f.grid().clone());
    let den = weighted_norm(f, &d, p as f64)?.powi(2);
    if den == 0.0 {
        return Ok(0.0);
    }
    let num = sobolev_norm(f, 1.0 - p as f64 / 2.0)?.powi(2);
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::basis::sine_mode;
    use std::f64::consts::PI;

    fn grid() -> Arc<Grid> {
        Arc::new(Grid::default())
    }

    #[test]
    fn sine_quotient_tends_to_pi() {
        let u = ScalarField::analytic(grid(), |x, k| sine_mode(1, x, k) / 2f64.sqrt());
        let q = hardy_quotient(&u).unwrap();
        assert!((q.eval(0.0) - PI).abs() < 1e-12);
        assert!((q.eval(1e-9) - PI).abs() < 1e-10);
        assert!((q.eval(1.0) - PI).abs() < 1e-12);
    }

    #[test]
    fn parabola_quotient_is_affine() {
        let u = ScalarField::fit(grid(), |x| x * (1.0 - x));
        let q = hardy_quotient(&u).unwrap();
        for &x in &[1e-12, 0.1, 0.3, 0.5] {
            assert!((q.eval(x) - (1.0 - x)).abs() < 1e-12);
        }
    }

    #[test]
    fn nonvanishing_field_is_rejected() {
        let u = ScalarField::constant(grid(), 1.0);
        assert!(matches!(hardy_quotient(&u), Err(Error::NotInH10 { .. })));
    }

    #[test]
    fn node_nearest_zero_matches_slope() {
        let g = grid();
        let x0 = g.nodes()[0];
        for k in 1..=5 {
            let u = ScalarField::analytic(g.clone(), move |x, o| sine_mode(k, x, o));
            let q = hardy_quotient(&u).unwrap();
            let slope = u.eval_derivative(0.0, 1);
            assert!((q.values()[0] - slope).abs() < 1e-4 * slope.abs().max(1.0));
            assert!(x0 < 1e-6);
        }
    }

    #[test]
    fn embedding_of_zero_is_zero() {
        let z = ScalarField::constant(grid(), 0.0);
        assert_eq!(check_embedding(&z, 1).unwrap(), 0.0);
        assert_eq!(check_embedding(&z, 2).unwrap(), 0.0);
    }

    #[test]
    fn embedding_of_one_with_p1() {
        let one = ScalarField::constant(grid(), 1.0);
        // ‖1‖_{1/2} = 1 under the lift convention, ∫d = 1/4
        assert!((check_embedding(&one, 1).unwrap() - 4.0).abs() < 1e-12);
    }
}
