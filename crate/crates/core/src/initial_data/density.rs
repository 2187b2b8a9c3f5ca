//! Density profiles obeying the physical vacuum condition.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::function_space::cheb::{ChebSeries, CHOP_TOL};
use crate::function_space::{Grid, ScalarField, SMOOTH};
use crate::taylor::{factorial, pow_series};

/// Slack on the unit-slope requirement `|D(ρ₀^{γ-1})| ≥ 1` near the boundary.
///
/// The canonical profile `x(1-x)` has slope `1 - 2x < 1` at every interior
/// point, so the inequality is checked as `≥ 1 - VACUUM_SLOPE_SLACK`.
pub const VACUUM_SLOPE_SLACK: f64 = 0.05;

/// Relative tolerance for the endpoint zeros of `ρ₀`.
pub const ENDPOINT_ZERO_TOL: f64 = 1e-10;

/// How the density is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileKind {
    /// `ρ₀ = A x(1-x)`.
    Quadratic { a: f64 },
    /// `ρ₀ = (x(1-x))^{1/(γ-1)}`, so that `ρ₀^{γ-1} = x(1-x)`.
    PowerAdjusted,
    /// Values at the Chebyshev–Lobatto points of `[0, 1]` (endpoints included).
    Sampled { values: Vec<f64> },
}

/// Validated `ρ₀` together with `c = ρ₀^{γ-1}`.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    rho0: ScalarField,
    c: ScalarField,
    gamma: f64,
    alpha: f64,
    floor: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 1.0) || !gamma.is_finite() {
        return Err(Error::GammaOutOfRange(gamma));
    }
    Ok(())
}

/// Taylor coefficients of `q^m` for `q` a quadratic with local coefficients
/// `[q, q′, q″/2]`; integer `m` avoids division so the endpoint `q = 0` is fine.
fn quadratic_power_derivative(q: [f64; 3], m: f64, order: usize) -> f64 {
    let n = order + 1;
    let series = if m.fract() == 0.0 && m >= 0.0 {
        let mut acc = vec![0.0; n];
        acc[0] = 1.0;
        for _ in 0..m as usize {
            let mut next = vec![0.0; n];
            for (i, a) in acc.iter().enumerate() {
                for (j, qj) in q.iter().enumerate() {
                    if i + j < n {
                        next[i + j] += a * qj;
                    }
                }
            }
            acc = next;
        }
        acc
    } else if q[0] == 0.0 {
        return if order == 0 { 0.0 } else { f64::NAN };
    } else {
        pow_series(&q, m, n)
    };
    series[order] * factorial(order)
}

/// `(A x(1-x))^m` and its derivatives.
fn quadratic_power(a: f64, m: f64) -> impl Fn(f64, usize) -> f64 + Send + Sync + 'static {
    move |x, k| {
        let q = [a * x * (1.0 - x), a * (1.0 - 2.0 * x), -a];
        quadratic_power_derivative(q, m, k)
    }
}

/// Builds and validates a profile on `grid`.
pub fn make_density(kind: &ProfileKind, gamma: f64, grid: Arc<Grid>) -> Result<DensityProfile> {
    check_gamma(gamma)?;
    let (rho0, c) = match kind {
        ProfileKind::Quadratic { a } => {
            if !(*a > 0.0) {
                return Err(Error::InvalidArgument(format!("profile amplitude A = {a}")));
            }
            (
                ScalarField::analytic(grid.clone(), quadratic_power(*a, 1.0)),
                ScalarField::analytic(grid, quadratic_power(*a, gamma - 1.0)),
            )
        }
        ProfileKind::PowerAdjusted => (
            ScalarField::analytic(grid.clone(), quadratic_power(1.0, 1.0 / (gamma - 1.0))),
            ScalarField::analytic(grid, quadratic_power(1.0, 1.0)),
        ),
        ProfileKind::Sampled { values } => {
            if values.len() < 3 {
                return Err(Error::InvalidArgument(
                    "sampled profile needs at least 3 values".into(),
                ));
            }
            let s = ChebSeries::from_lobatto_values(values, 0.0, 1.0).chopped(CHOP_TOL);
            let c = if gamma == 2.0 {
                s.clone()
            } else {
                ChebSeries::fit(|x| s.eval(x).max(0.0).powf(gamma - 1.0), 0.0, 1.0, CHOP_TOL)
            };
            (
                ScalarField::from_pieces(grid.clone(), vec![s], SMOOTH),
                ScalarField::from_pieces(grid, vec![c], SMOOTH),
            )
        }
    };
    DensityProfile::from_fields(rho0, c, gamma)
}

impl DensityProfile {
    /// Validates a pair `(ρ₀, ρ₀^{γ-1})` supplied by the caller.
    pub fn from_fields(rho0: ScalarField, c: ScalarField, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        let (alpha, floor) = validate(&rho0, &c)?;
        Ok(Self {
            rho0,
            c,
            gamma,
            alpha,
            floor,
        })
    }

    pub fn rho0(&self) -> &ScalarField {
        &self.rho0
    }

    pub fn drho0(&self) -> Result<ScalarField> {
        self.rho0.derivative(1)
    }

    pub fn d2rho0(&self) -> Result<ScalarField> {
        self.rho0.derivative(2)
    }

    pub fn d3rho0(&self) -> Result<ScalarField> {
        self.rho0.derivative(3)
    }

    /// `ρ₀^{γ-1}`, the squared sound speed divided by `γ`.
    pub fn sound_speed_sq(&self) -> &ScalarField {
        &self.c
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Largest `α` with `|D(ρ₀^{γ-1})| ≥ 1 - slack` wherever `d(x) ≤ α`.
    pub fn vacuum_slope_alpha(&self) -> f64 {
        self.alpha
    }

    /// `C_α = min ρ₀^{γ-1}` over `d(x) ≥ α`.
    pub fn interior_floor(&self) -> f64 {
        self.floor
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.rho0.grid()
    }
}

fn validate(rho0: &ScalarField, c: &ScalarField) -> Result<(f64, f64)> {
    let grid = rho0.grid();
    let nodes = grid.nodes();
    for (&x, &r) in nodes.iter().zip(rho0.values()) {
        if !(r > 0.0) {
            return Err(Error::VacuumConditionViolated {
                x,
                inequality: "rho0 > 0 in the interior".into(),
                value: r,
            });
        }
    }
    let scale = rho0.max_abs();
    for x in [0.0, 1.0] {
        let r = rho0.eval(x);
        if !(r.abs() <= ENDPOINT_ZERO_TOL * scale) {
            return Err(Error::VacuumConditionViolated {
                x,
                inequality: "rho0 = 0 at the boundary".into(),
                value: r,
            });
        }
    }
    let slope = c.derivative_values(1)?;
    let threshold = 1.0 - VACUUM_SLOPE_SLACK;
    let mut by_distance: Vec<(f64, f64, f64)> = nodes
        .iter()
        .zip(&slope)
        .map(|(&x, &s)| (x.min(1.0 - x), x, s.abs()))
        .collect();
    by_distance.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut alpha = 0.0;
    for (i, &(d, x, s)) in by_distance.iter().enumerate() {
        if !(s >= threshold) {
            if i < 2 {
                return Err(Error::VacuumConditionViolated {
                    x,
                    inequality: "|D(rho0^(gamma-1))| >= 1 near the boundary".into(),
                    value: s,
                });
            }
            break;
        }
        alpha = d;
    }
    let alpha = alpha.min(0.5 * (1.0 - 1e-12));
    let floor = nodes
        .iter()
        .zip(c.values())
        .filter(|(&x, _)| x.min(1.0 - x) >= alpha)
        .map(|(_, &v)| v)
        .fold(f64::INFINITY, f64::min);
    if !(floor > 0.0) {
        return Err(Error::VacuumConditionViolated {
            x: alpha,
            inequality: "rho0^(gamma-1) >= C_alpha away from the boundary".into(),
            value: floor,
        });
    }
    Ok((alpha, floor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_space::cheb::lobatto_points;

    fn grid() -> Arc<Grid> {
        Arc::new(Grid::default())
    }

    #[test]
    fn unit_quadratic_is_admissible() {
        let p = make_density(&ProfileKind::Quadratic { a: 1.0 }, 2.0, grid()).unwrap();
        assert!((p.drho0().unwrap().eval(0.0) - 1.0).abs() < 1e-15);
        // |1 - 2x| >= 0.95 exactly up to x = 0.025
        assert!(p.vacuum_slope_alpha() <= 0.025 && p.vacuum_slope_alpha() > 0.02);
        assert!(p.interior_floor() > 0.019);
    }

    #[test]
    fn degenerate_slope_is_rejected_at_left_endpoint() {
        let values: Vec<f64> = lobatto_points(16, 0.0, 1.0)
            .iter()
            .map(|x| x * x * (1.0 - x))
            .collect();
        let err = make_density(&ProfileKind::Sampled { values }, 2.0, grid()).unwrap_err();
        match err {
            Error::VacuumConditionViolated { x, .. } => assert!(x < 1e-3),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn power_adjusted_profile_for_gamma_three() {
        let p = make_density(&ProfileKind::PowerAdjusted, 3.0, grid()).unwrap();
        let x = 0.3f64;
        assert!((p.rho0().eval(x) - (x * (1.0 - x)).sqrt()).abs() < 1e-15);
        assert!((p.sound_speed_sq().eval(x) - x * (1.0 - x)).abs() < 1e-15);
        let exact = 0.5 * (1.0 - 2.0 * x) / (x * (1.0 - x)).sqrt();
        assert!((p.drho0().unwrap().eval(x) - exact).abs() < 1e-14);
    }

    #[test]
    fn power_adjusted_with_integer_exponent_is_polynomial() {
        // γ = 3/2: ρ₀ = (x(1-x))², evaluable at the endpoints
        let p = make_density(&ProfileKind::PowerAdjusted, 1.5, grid()).unwrap();
        assert_eq!(p.rho0().eval(0.0), 0.0);
        let x = 0.2f64;
        let exact = 2.0 * x * (1.0 - x) * (1.0 - 2.0 * x);
        assert!((p.drho0().unwrap().eval(x) - exact).abs() < 1e-15);
    }

    #[test]
    fn shallow_quadratic_fails_slope_condition() {
        assert!(matches!(
            make_density(&ProfileKind::Quadratic { a: 0.5 }, 2.0, grid()),
            Err(Error::VacuumConditionViolated { .. })
        ));
    }

    #[test]
    fn gamma_must_exceed_one() {
        assert_eq!(
            make_density(&ProfileKind::PowerAdjusted, 1.0, grid()).unwrap_err(),
            Error::GammaOutOfRange(1.0)
        );
    }
}
