//! Scalar fields on `I` sampled on a quadrature [`Grid`].

use std::fmt;
use std::sync::Arc;

use super::cheb::{ChebSeries, CHOP_TOL};
use super::collocation::ChebSpace;
use super::grid::Grid;
use crate::error::{Error, Result};

/// Closed-form field: `f(x, k)` returns the `k`-th derivative at `x`.
pub type AnalyticFn = Arc<dyn Fn(f64, usize) -> f64 + Send + Sync>;

/// Derivative orders are unlimited for analytic and spectral fields.
pub const SMOOTH: usize = usize::MAX;

const CACHED_DERIVATIVES: usize = 6;

#[derive(Clone)]
enum Repr {
    Analytic(AnalyticFn),
    /// Contiguous Chebyshev pieces covering `[0, 1]`; `derivs[p][k]` is the
    /// `k`-th derivative series of piece `p`.
    Pieces(Vec<Vec<ChebSeries>>),
    Product(Arc<Repr>, Arc<Repr>),
    Combination(Vec<(f64, Arc<Repr>)>),
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl Repr {
    fn pieces(series: Vec<ChebSeries>) -> Self {
        let derivs = series
            .into_iter()
            .map(|s| {
                let mut v = vec![s];
                for k in 1..CACHED_DERIVATIVES {
                    let next = v[k - 1].derivative();
                    v.push(next);
                }
                v
            })
            .collect();
        Repr::Pieces(derivs)
    }

    fn collect_breaks(&self, out: &mut Vec<f64>) {
        match self {
            Repr::Analytic(_) => {}
            Repr::Pieces(pieces) => {
                out.extend(pieces.iter().skip(1).map(|p| p[0].interval().0));
            }
            Repr::Product(a, b) => {
                a.collect_breaks(out);
                b.collect_breaks(out);
            }
            Repr::Combination(terms) => terms.iter().for_each(|(_, r)| r.collect_breaks(out)),
        }
    }

    fn eval(&self, x: f64, order: usize) -> f64 {
        match self {
            Repr::Analytic(f) => f(x, order),
            Repr::Pieces(pieces) => {
                let idx = pieces
                    .iter()
                    .position(|p| x <= p[0].interval().1)
                    .unwrap_or(pieces.len() - 1);
                let p = &pieces[idx];
                if order < p.len() {
                    p[order].eval(x)
                } else {
                    p[p.len() - 1]
                        .nth_derivative(order + 1 - p.len())
                        .eval(x)
                }
            }
            Repr::Product(a, b) => (0..=order)
                .map(|j| binomial(order, j) * a.eval(x, j) * b.eval(x, order - j))
                .sum(),
            Repr::Combination(terms) => terms.iter().map(|(c, r)| c * r.eval(x, order)).sum(),
        }
    }
}

/// Nodal field on a grid with derivative access through its representation.
#[derive(Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    repr: Arc<Repr>,
    values: Vec<f64>,
    max_derivative: usize,
    sine: Option<Vec<f64>>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("n_points", &self.values.len())
            .field("max_derivative", &self.max_derivative)
            .field("has_sine", &self.sine.is_some())
            .finish()
    }
}

impl ScalarField {
    fn from_repr(grid: Arc<Grid>, repr: Repr, max_derivative: usize) -> Self {
        let values = grid.nodes().iter().map(|&x| repr.eval(x, 0)).collect();
        Self {
            grid,
            repr: Arc::new(repr),
            values,
            max_derivative,
            sine: None,
        }
    }

    /// Field given by a closed form `f(x, k)` for its `k`-th derivative.
    pub fn analytic<F>(grid: Arc<Grid>, f: F) -> Self
    where
        F: Fn(f64, usize) -> f64 + Send + Sync + 'static,
    {
        Self::from_repr(grid, Repr::Analytic(Arc::new(f)), SMOOTH)
    }

    pub fn constant(grid: Arc<Grid>, c: f64) -> Self {
        Self::analytic(grid, move |_, k| if k == 0 { c } else { 0.0 })
    }

    /// Adaptive single-piece Chebyshev fit of `f`.
    pub fn fit<F: Fn(f64) -> f64>(grid: Arc<Grid>, f: F) -> Self {
        let s = ChebSeries::fit(f, 0.0, 1.0, CHOP_TOL);
        Self::from_repr(grid, Repr::pieces(vec![s]), SMOOTH)
    }

    /// Piecewise Chebyshev field; pieces must tile `[0, 1]` in order.
    pub fn from_pieces(grid: Arc<Grid>, pieces: Vec<ChebSeries>, max_derivative: usize) -> Self {
        assert!(!pieces.is_empty());
        debug_assert!(pieces[0].interval().0 == 0.0);
        debug_assert!(pieces.windows(2).all(|w| w[0].interval().1 == w[1].interval().0));
        Self::from_repr(grid, Repr::pieces(pieces), max_derivative)
    }

    /// Interpolant of nodal values held at the Lobatto points of `space`.
    pub fn from_collocation(grid: Arc<Grid>, space: &ChebSpace, values: &[f64]) -> Self {
        Self::from_repr(grid, Repr::pieces(vec![space.series(values)]), SMOOTH)
    }

    /// Attach the sine coefficients this field was synthesized from.
    pub fn with_sine_coefficients(mut self, coeffs: Vec<f64>) -> Self {
        self.sine = Some(coeffs);
        self
    }

    pub fn with_max_derivative(mut self, max_derivative: usize) -> Self {
        self.max_derivative = max_derivative;
        self
    }

    /// Interior points where the representation switches piece (kinks of
    /// piecewise fields), ascending and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.repr.collect_breaks(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        out
    }

    /// Re-sample on another grid.
    pub fn on_grid(&self, grid: Arc<Grid>) -> Self {
        let values = grid.nodes().iter().map(|&x| self.repr.eval(x, 0)).collect();
        Self {
            grid,
            repr: self.repr.clone(),
            values,
            max_derivative: self.max_derivative,
            sine: self.sine.clone(),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_derivative(&self) -> usize {
        self.max_derivative
    }

    pub fn sine_coefficients(&self) -> Option<&[f64]> {
        self.sine.as_deref()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.repr.eval(x, 0)
    }

    pub fn eval_derivative(&self, x: f64, order: usize) -> f64 {
        self.repr.eval(x, order)
    }

    fn check_order(&self, order: usize) -> Result<()> {
        if order > self.max_derivative {
            return Err(Error::InsufficientSmoothness {
                requested: order,
                available: self.max_derivative,
            });
        }
        Ok(())
    }

    /// Nodal values of the `order`-th derivative.
    pub fn derivative_values(&self, order: usize) -> Result<Vec<f64>> {
        self.check_order(order)?;
        if order == 0 {
            return Ok(self.values.clone());
        }
        Ok(self
            .grid
            .nodes()
            .iter()
            .map(|&x| self.repr.eval(x, order))
            .collect())
    }

    /// The `order`-th derivative as a field in its own right.
    pub fn derivative(&self, order: usize) -> Result<ScalarField> {
        self.check_order(order)?;
        let inner = self.repr.clone();
        let repr = Repr::Analytic(Arc::new(move |x, k| inner.eval(x, k + order)));
        Ok(Self::from_repr(
            self.grid.clone(),
            repr,
            self.max_derivative.saturating_sub(order),
        ))
    }

    pub fn mul(&self, other: &ScalarField) -> ScalarField {
        Self::from_repr(
            self.grid.clone(),
            Repr::Product(self.repr.clone(), other.repr.clone()),
            self.max_derivative.min(other.max_derivative),
        )
    }

    pub fn scale(&self, c: f64) -> ScalarField {
        let mut out = Self::from_repr(
            self.grid.clone(),
            Repr::Combination(vec![(c, self.repr.clone())]),
            self.max_derivative,
        );
        out.sine = self.sine.as_ref().map(|s| s.iter().map(|v| c * v).collect());
        out
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &ScalarField, b: f64) -> ScalarField {
        Self::from_repr(
            self.grid.clone(),
            Repr::Combination(vec![(a, self.repr.clone()), (b, other.repr.clone())]),
            self.max_derivative.min(other.max_derivative),
        )
    }

    pub fn add(&self, other: &ScalarField) -> ScalarField {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        self.combine(1.0, other, -1.0)
    }

    /// `∫_I f` by the grid rule.
    pub fn integral(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Arc<Grid> {
        Arc::new(Grid::default())
    }

    #[test]
    fn product_derivatives_follow_leibniz() {
        let g = grid();
        let a = ScalarField::analytic(g.clone(), |x, k| match k {
            0 => x * (1.0 - x),
            1 => 1.0 - 2.0 * x,
            2 => -2.0,
            _ => 0.0,
        });
        let b = ScalarField::fit(g, |x| (PI * x).sin());
        let p = a.mul(&b);
        let x = 0.3;
        let exact = |x: f64| {
            // (x - x^2) sin(pi x), third derivative by hand
            let s = (PI * x).sin();
            let c = (PI * x).cos();
            3.0 * (-2.0) * PI * c + 3.0 * (1.0 - 2.0 * x) * (-PI * PI * s)
                + (x - x * x) * (-PI.powi(3) * c)
        };
        assert!((p.eval_derivative(x, 3) - exact(x)).abs() < 1e-9);
    }

    #[test]
    fn smoothness_is_enforced() {
        let g = grid();
        let f = ScalarField::constant(g, 1.0).with_max_derivative(1);
        assert!(f.derivative_values(1).is_ok());
        assert_eq!(
            f.derivative_values(2).unwrap_err(),
            Error::InsufficientSmoothness {
                requested: 2,
                available: 1
            }
        );
    }

    #[test]
    fn piecewise_field_evaluates_each_piece() {
        let g = grid();
        let left = ChebSeries::fit(|x| x, 0.0, 0.5, CHOP_TOL);
        let right = ChebSeries::fit(|x| 1.0 - x, 0.5, 1.0, CHOP_TOL);
        let d = ScalarField::from_pieces(g, vec![left, right], SMOOTH);
        assert!((d.eval_derivative(0.2, 1) - 1.0).abs() < 1e-13);
        assert!((d.eval_derivative(0.8, 1) + 1.0).abs() < 1e-13);
        assert!((d.integral() - 0.25).abs() < 1e-14);
    }
}
