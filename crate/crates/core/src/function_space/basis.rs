//! Dirichlet Laplacian eigenfunctions `e_k(x) = √2 sin(kπx)` on `I`.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use super::cheb::{ChebSeries, CHOP_TOL};
use super::field::{ScalarField, SMOOTH};
use super::grid::Grid;
use crate::error::{Error, Result};

/// Largest tolerated `|<e_i, e_j> - δ_ij|` on the quadrature grid.
pub const ORTHONORMALITY_LIMIT: f64 = 1e-10;

/// `k`-th derivative of `e_mode` at `x`.
pub fn sine_mode(mode: usize, x: f64, order: usize) -> f64 {
    let w = mode as f64 * PI;
    let amp = SQRT_2 * w.powi(order as i32);
    match order % 4 {
        0 => amp * (w * x).sin(),
        1 => amp * (w * x).cos(),
        2 => -amp * (w * x).sin(),
        _ => -amp * (w * x).cos(),
    }
}

#[derive(Debug, Clone)]
pub struct SineBasis {
    n_modes: usize,
    grid: Arc<Grid>,
    orthonormality_defect: f64,
}

/// Builds the first `n_modes` eigenfunctions and verifies orthonormality on `grid`.
pub fn build_sine_basis(n_modes: usize, grid: Arc<Grid>) -> Result<SineBasis> {
    if n_modes == 0 {
        return Err(Error::InvalidArgument("n_modes must be at least 1".into()));
    }
    let tables: Vec<Vec<f64>> = (1..=n_modes)
        .map(|k| grid.nodes().iter().map(|&x| sine_mode(k, x, 0)).collect())
        .collect();
    let w = grid.weights();
    let mut defect = 0.0f64;
    for i in 0..n_modes {
        for j in i..n_modes {
            let ip: f64 = tables[i]
                .iter()
                .zip(&tables[j])
                .zip(w)
                .map(|((a, b), w)| a * b * w)
                .sum();
            let target = if i == j { 1.0 } else { 0.0 };
            defect = defect.max((ip - target).abs());
        }
    }
    if grid.declared_degree() < 2 * n_modes || defect > ORTHONORMALITY_LIMIT {
        return Err(Error::QuadratureDegreeInsufficient {
            defect,
            limit: ORTHONORMALITY_LIMIT,
        });
    }
    Ok(SineBasis {
        n_modes,
        grid,
        orthonormality_defect: defect,
    })
}

impl SineBasis {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Max `|<e_i, e_j> - δ_ij|` measured at construction.
    pub fn orthonormality_defect(&self) -> f64 {
        self.orthonormality_defect
    }

    /// Laplacian eigenvalue `k²π²` of mode `k` (1-based).
    pub fn eigenvalue(&self, mode: usize) -> f64 {
        (mode as f64 * PI).powi(2)
    }

    pub fn eval(&self, mode: usize, x: f64) -> f64 {
        sine_mode(mode, x, 0)
    }

    pub fn mode_field(&self, mode: usize) -> ScalarField {
        ScalarField::analytic(self.grid.clone(), move |x, k| sine_mode(mode, x, k))
    }

    /// `L²` projection coefficients `(f, e_k)` for `k = 1..=n_modes`.
    pub fn project(&self, f: &ScalarField) -> Vec<f64> {
        let nodes = self.grid.nodes();
        let w = self.grid.weights();
        (1..=self.n_modes)
            .map(|k| {
                f.values()
                    .iter()
                    .zip(nodes)
                    .zip(w)
                    .map(|((v, &x), w)| v * sine_mode(k, x, 0) * w)
                    .sum()
            })
            .collect()
    }

    /// Field `Σ c_k e_k` as a Chebyshev series carrying its sine coefficients.
    pub fn synthesize(&self, coeffs: &[f64]) -> ScalarField {
        let c = coeffs.to_vec();
        let series = ChebSeries::fit(
            |x| {
                c.iter()
                    .enumerate()
                    .map(|(i, ci)| ci * sine_mode(i + 1, x, 0))
                    .sum()
            },
            0.0,
            1.0,
            CHOP_TOL,
        );
        ScalarField::from_pieces(self.grid.clone(), vec![series], SMOOTH)
            .with_sine_coefficients(coeffs.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let basis = build_sine_basis(4, Arc::new(Grid::gauss(200))).unwrap();
        assert!((basis.eval(1, 0.5) - SQRT_2).abs() < 1e-15);
        assert!((basis.eigenvalue(3) - 9.0 * PI * PI).abs() < 1e-12);
        assert!((basis.eigenvalue(3) - 88.8264).abs() < 1e-4);
    }

    #[test]
    fn modes_are_orthogonal_on_gauss_grid() {
        let g = Arc::new(Grid::gauss(200));
        let basis = build_sine_basis(5, g.clone()).unwrap();
        let e2 = basis.mode_field(2);
        let e5 = basis.mode_field(5);
        assert!(e2.mul(&e5).integral().abs() < 1e-12);
        assert!(basis.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn modes_vanish_at_endpoints() {
        for k in 1..=20 {
            assert!(sine_mode(k, 0.0, 0).abs() < 1e-15);
            assert!(sine_mode(k, 1.0, 0).abs() < 1e-13);
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let err = build_sine_basis(40, Arc::new(Grid::gauss(30))).unwrap_err();
        assert!(matches!(err, Error::QuadratureDegreeInsufficient { .. }));
    }

    #[test]
    fn synthesized_field_keeps_coefficients_and_projects_back() {
        let g = Arc::new(Grid::default());
        let basis = build_sine_basis(8, g).unwrap();
        let coeffs = vec![0.5, 0.0, -0.25, 0.0, 0.1, 0.0, 0.0, 0.02];
        let f = basis.synthesize(&coeffs);
        assert_eq!(f.sine_coefficients().unwrap(), coeffs.as_slice());
        let back = basis.project(&f);
        for (a, b) in coeffs.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
