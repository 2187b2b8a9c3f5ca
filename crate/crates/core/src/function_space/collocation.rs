//! Chebyshev–Lobatto collocation on the reference interval `[0, 1]`.
//!
//! Solver states live as nodal values at the `n + 1` Lobatto points, which
//! include both vacuum endpoints. Spatial derivatives go through coefficient
//! space with chopping so that high derivative orders (time-derivative jets
//! consume up to ten) stay free of round-off amplification.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::cheb::{lobatto_points, ChebSeries, CHOP_TOL};

#[derive(Debug, Clone)]
pub struct ChebSpace {
    n: usize,
    nodes: Vec<f64>,
    /// coefficients = to_coeffs * values
    to_coeffs: DMatrix<f64>,
    /// values = to_values * coefficients
    to_values: DMatrix<f64>,
    cc_weights: Vec<f64>,
    diff: DMatrix<f64>,
}

impl ChebSpace {
    /// Space of degree-`n` polynomials on `[0, 1]`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "collocation degree must be at least 2");
        let nodes = lobatto_points(n, 0.0, 1.0);
        let nf = n as f64;
        let theta = |j: usize| PI - j as f64 * PI / nf;
        let to_values = DMatrix::from_fn(n + 1, n + 1, |j, k| (k as f64 * theta(j)).cos());
        let to_coeffs = DMatrix::from_fn(n + 1, n + 1, |k, j| {
            let wj = if j == 0 || j == n { 0.5 } else { 1.0 };
            let wk = if k == 0 || k == n { 0.5 } else { 1.0 };
            2.0 / nf * wj * wk * (k as f64 * theta(j)).cos()
        });
        let cc_weights = clenshaw_curtis_weights(n);
        let diff = lobatto_diff_matrix(&nodes);
        Self {
            n,
            nodes,
            to_coeffs,
            to_values,
            cc_weights,
            diff,
        }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Clenshaw–Curtis weights for `[0, 1]` at the Lobatto nodes.
    pub fn weights(&self) -> &[f64] {
        &self.cc_weights
    }

    /// Dense differentiation matrix (used for Jacobians).
    pub fn diff_matrix(&self) -> &DMatrix<f64> {
        &self.diff
    }

    pub fn coeffs(&self, values: &[f64]) -> Vec<f64> {
        mat_vec(&self.to_coeffs, values)
    }

    pub fn values(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut c = coeffs.to_vec();
        c.resize(self.n + 1, 0.0);
        mat_vec(&self.to_values, &c)
    }

    pub fn series(&self, values: &[f64]) -> ChebSeries {
        ChebSeries::new(0.0, 1.0, self.coeffs(values)).chopped(CHOP_TOL)
    }

    /// `order`-th derivative of the interpolant, evaluated back at the nodes.
    pub fn derivative(&self, values: &[f64], order: usize) -> Vec<f64> {
        if order == 0 {
            return values.to_vec();
        }
        let s = self.series(values).nth_derivative(order);
        self.values(s.coeffs())
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        values
            .iter()
            .zip(&self.cc_weights)
            .map(|(v, w)| v * w)
            .sum()
    }

    pub fn l2_norm(&self, values: &[f64]) -> f64 {
        values
            .iter()
            .zip(&self.cc_weights)
            .map(|(v, w)| v * v * w)
            .sum::<f64>()
            .sqrt()
    }

    /// Values of `f` at the nodes.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }

    /// Matrix mapping nodal values to interpolant values at `xs`.
    pub fn interpolation_matrix(&self, xs: &[f64]) -> DMatrix<f64> {
        let cheb = DMatrix::from_fn(xs.len(), self.n + 1, |i, k| {
            let t = (2.0 * xs[i] - 1.0).clamp(-1.0, 1.0);
            (k as f64 * t.acos()).cos()
        });
        cheb * &self.to_coeffs
    }

    /// Evaluate the interpolant of `values` at arbitrary points.
    pub fn interpolate(&self, values: &[f64], xs: &[f64]) -> Vec<f64> {
        let s = self.series(values);
        xs.iter().map(|&x| s.eval(x)).collect()
    }
}

fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(v)).as_slice().to_vec()
}

fn clenshaw_curtis_weights(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (0..=n)
        .map(|j| {
            let theta = j as f64 * PI / nf;
            let mut s = 1.0;
            for k in 1..=n / 2 {
                let b = if 2 * k == n { 1.0 } else { 2.0 };
                s -= b / (4.0 * (k * k) as f64 - 1.0) * (2.0 * k as f64 * theta).cos();
            }
            let c = if j == 0 || j == n { 1.0 } else { 2.0 };
            // factor 1/2 maps [-1, 1] onto [0, 1]
            0.5 * c / nf * s
        })
        .collect()
}

fn lobatto_diff_matrix(x: &[f64]) -> DMatrix<f64> {
    let n = x.len() - 1;
    let c = |j: usize| {
        let base = if j == 0 || j == n { 2.0 } else { 1.0 };
        if j % 2 == 0 {
            base
        } else {
            -base
        }
    };
    let mut d = DMatrix::zeros(n + 1, n + 1);
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[(i, j)] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
    }
    // negative-sum trick for the diagonal
    for i in 0..=n {
        let s: f64 = (0..=n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    d
}
