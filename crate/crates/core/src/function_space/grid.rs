//! Composite Gauss–Legendre quadrature on `I = (0, 1)`.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Panel layout of a clustered grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Uniform panels covering `I` before endpoint grading (rounded up to even).
    pub panels: usize,
    /// Gauss points per panel.
    pub points_per_panel: usize,
    /// Geometric refinement levels inside the two end panels.
    pub levels: usize,
    /// Geometric grading ratio.
    pub ratio: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            panels: 32,
            points_per_panel: 12,
            levels: 6,
            ratio: 0.15,
        }
    }
}

/// Quadrature nodes strictly inside `(0, 1)`; `1/2` is always a panel break.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    breaks: Vec<f64>,
    points_per_panel: usize,
    degree: usize,
    spec: Option<GridSpec>,
}

fn gauss_rule(q: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(q).expect("at least one Gauss point"));
    let mut pairs = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

impl Grid {
    /// Single-panel `n`-point Gauss–Legendre rule (exact to degree `2n - 1`).
    pub fn gauss(n: usize) -> Self {
        Self::from_breaks(vec![0.0, 1.0], n, 2 * n - 1, None)
    }

    /// Panels graded geometrically toward both endpoints.
    pub fn clustered(spec: GridSpec) -> Self {
        let panels = spec.panels.max(2).div_ceil(2) * 2;
        let h = 1.0 / panels as f64;
        let mut left = vec![0.0];
        for l in (1..=spec.levels).rev() {
            left.push(h * spec.ratio.powi(l as i32));
        }
        for k in 1..=panels / 2 {
            left.push(k as f64 * h);
        }
        let mut breaks = left.clone();
        for &x in left.iter().rev().skip(1) {
            breaks.push(1.0 - x);
        }
        // equivalent resolution of the coarsest (uniform) panels
        let degree = (2 * spec.points_per_panel - 1) * panels;
        Self::from_breaks(breaks, spec.points_per_panel, degree, Some(spec))
    }

    /// Same layout with twice as many uniform panels.
    pub fn refined(&self) -> Self {
        match self.spec {
            Some(spec) => Self::clustered(GridSpec {
                panels: 2 * spec.panels,
                levels: spec.levels + 1,
                ..spec
            }),
            None => Self::gauss(2 * self.nodes.len()),
        }
    }

    /// Split panels at extra break points (e.g. kinks of a piecewise field).
    pub fn with_breakpoints(&self, extra: &[f64]) -> Self {
        let mut breaks = self.breaks.clone();
        for &x in extra {
            if x > 0.0 && x < 1.0 && !breaks.iter().any(|b| (b - x).abs() < 1e-14) {
                breaks.push(x);
            }
        }
        breaks.sort_by(f64::total_cmp);
        Self::from_breaks(breaks, self.points_per_panel, self.degree, self.spec)
    }

    fn from_breaks(breaks: Vec<f64>, q: usize, degree: usize, spec: Option<GridSpec>) -> Self {
        let rule = gauss_rule(q);
        let mut nodes = Vec::with_capacity(q * (breaks.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            for &(t, wt) in &rule {
                nodes.push(0.5 * (a + b) + 0.5 * (b - a) * t);
                weights.push(0.5 * (b - a) * wt);
            }
        }
        Self {
            nodes,
            weights,
            breaks,
            points_per_panel: q,
            degree,
            spec,
        }
    }

    pub fn n_points(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    /// Smallest distance of a node to `{0, 1}`.
    pub fn interior_margin(&self) -> f64 {
        self.nodes
            .iter()
            .map(|&x| x.min(1.0 - x))
            .fold(f64::INFINITY, f64::min)
    }

    /// Polynomial degree resolved by the rule; for composite grids this is the
    /// degree resolved at the resolution of the coarsest panel.
    pub fn declared_degree(&self) -> usize {
        self.degree
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    pub fn integrate_fn<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, w)| f(x) * w)
            .sum()
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self::clustered(GridSpec::default())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_interior_and_increasing() {
        let g = Grid::default();
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(g.interior_margin() > 0.0);
        assert!(g.breaks().iter().any(|&b| (b - 0.5).abs() < 1e-15));
        assert!(g.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn single_panel_rule_is_exact_to_declared_degree() {
        let g = Grid::gauss(10);
        assert_eq!(g.declared_degree(), 19);
        let exact = 1.0 / 20.0;
        assert!((g.integrate_fn(|x| x.powi(19)) - exact).abs() < 1e-15);
    }

    #[test]
    fn clustered_grid_handles_endpoint_singular_weights() {
        let g = Grid::default();
        // integral of x^{-1/2} on (0, 1) is 2
        let v = g.integrate_fn(|x| x.powf(-0.5));
        assert!((v - 2.0).abs() < 1e-4, "{v}");
        let fine = g.refined().integrate_fn(|x| x.powf(-0.5));
        assert!((fine - 2.0).abs() < (v - 2.0).abs(), "{fine}");
        // distance function kink at 1/2 lies on a panel break
        let d = g.integrate_fn(|x| x.min(1.0 - x));
        assert!((d - 0.25).abs() < 1e-15);
    }

    #[test]
    fn refinement_roughly_doubles_nodes() {
        let g = Grid::default();
        let r = g.refined();
        assert!(r.n_points() > 3 * g.n_points() / 2);
    }
}
