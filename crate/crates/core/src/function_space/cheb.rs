//! Chebyshev series on a finite interval.
//!
//! Series are stored by coefficients of `T_k(t)` with `t` the affine image of
//! `[a, b]` onto `[-1, 1]`. Fitting samples at first-kind points so that
//! quotients with removable endpoint singularities can be fitted without ever
//! evaluating at an endpoint.

use std::f64::consts::PI;

/// Relative coefficient level below which trailing modes are dropped.
pub const CHOP_TOL: f64 = 1e-13;

const MAX_FIT_POINTS: usize = 1025;

#[derive(Debug, Clone, PartialEq)]
pub struct ChebSeries {
    a: f64,
    b: f64,
    coeffs: Vec<f64>,
}

/// Chebyshev–Lobatto points on `[a, b]` in ascending order (`n + 1` points).
pub fn lobatto_points(n: usize, a: f64, b: f64) -> Vec<f64> {
    if n == 0 {
        return vec![0.5 * (a + b)];
    }
    (0..=n)
        .map(|j| {
            let t = -(j as f64 * PI / n as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * t
        })
        .collect()
}

/// Chebyshev points of the first kind on `[a, b]`, ascending, endpoints excluded.
pub fn first_kind_points(n: usize, a: f64, b: f64) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let t = -((2 * j + 1) as f64 * PI / (2 * n) as f64).cos();
            0.5 * (a + b) + 0.5 * (b - a) * t
        })
        .collect()
}

impl ChebSeries {
    pub fn new(a: f64, b: f64, coeffs: Vec<f64>) -> Self {
        assert!(b > a, "empty interval [{a}, {b}]");
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        Self { a, b, coeffs }
    }

    pub fn zero(a: f64, b: f64) -> Self {
        Self::new(a, b, vec![0.0])
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Interpolant through values at the ascending Lobatto points of `[a, b]`.
    pub fn from_lobatto_values(values: &[f64], a: f64, b: f64) -> Self {
        let n = values.len() - 1;
        if n == 0 {
            return Self::new(a, b, vec![values[0]]);
        }
        let nf = n as f64;
        let coeffs = (0..=n)
            .map(|k| {
                let mut s = 0.0;
                for (j, &f) in values.iter().enumerate() {
                    // ascending x_j corresponds to theta_j = pi - j pi / n
                    let theta = PI - j as f64 * PI / nf;
                    let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                    s += w * f * (k as f64 * theta).cos();
                }
                let c = 2.0 * s / nf;
                if k == 0 || k == n {
                    0.5 * c
                } else {
                    c
                }
            })
            .collect();
        Self::new(a, b, coeffs)
    }

    /// Interpolant through values at the ascending first-kind points of `[a, b]`.
    pub fn from_first_kind_values(values: &[f64], a: f64, b: f64) -> Self {
        let n = values.len();
        let nf = n as f64;
        let coeffs = (0..n)
            .map(|k| {
                let mut s = 0.0;
                for (j, &f) in values.iter().enumerate() {
                    let theta = PI - (2 * j + 1) as f64 * PI / (2.0 * nf);
                    s += f * (k as f64 * theta).cos();
                }
                let c = 2.0 * s / nf;
                if k == 0 {
                    0.5 * c
                } else {
                    c
                }
            })
            .collect();
        Self::new(a, b, coeffs)
    }

    /// Adaptive fit: doubles the sample count until the trailing coefficients
    /// fall below `tol` relative to the largest one, then chops.
    pub fn fit<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Self {
        let mut n = 17;
        loop {
            let xs = first_kind_points(n, a, b);
            let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
            let s = Self::from_first_kind_values(&vals, a, b);
            let scale = s.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            let tail = n / 8;
            let tail_max = s.coeffs[n - tail..]
                .iter()
                .fold(0.0f64, |m, c| m.max(c.abs()));
            if scale == 0.0 || tail_max <= tol * scale || n >= MAX_FIT_POINTS {
                return s.chopped(tol);
            }
            n = 2 * n - 1;
        }
    }

    /// Drop trailing coefficients below `tol` times the largest magnitude.
    pub fn chopped(mut self, tol: f64) -> Self {
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if scale == 0.0 {
            self.coeffs.truncate(1);
            return self;
        }
        let keep = self
            .coeffs
            .iter()
            .rposition(|c| c.abs() > tol * scale)
            .map_or(1, |i| i + 1);
        self.coeffs.truncate(keep);
        self
    }

    fn to_unit(&self, x: f64) -> f64 {
        (2.0 * x - self.a - self.b) / (self.b - self.a)
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let t = self.to_unit(x);
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + 2.0 * t * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + t * b1 - b2
    }

    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        if n <= 1 {
            return Self::zero(self.a, self.b);
        }
        let mut d = vec![0.0; n - 1];
        // c'_{k-1} = c'_{k+1} + 2 k c_k
        for k in (1..n).rev() {
            let next = if k + 1 < n - 1 { d[k + 1] } else { 0.0 };
            d[k - 1] = next + 2.0 * k as f64 * self.coeffs[k];
        }
        d[0] *= 0.5;
        let scale = 2.0 / (self.b - self.a);
        for c in &mut d {
            *c *= scale;
        }
        Self::new(self.a, self.b, d)
    }

    pub fn nth_derivative(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |s, _| s.derivative())
    }

    /// Antiderivative vanishing at `a`.
    pub fn antiderivative(&self) -> Self {
        let c = &self.coeffs;
        let n = c.len();
        let get = |k: usize| if k < n { c[k] } else { 0.0 };
        let mut out = vec![0.0; n + 1];
        for (k, o) in out.iter_mut().enumerate().skip(1) {
            let lower = if k == 1 { 2.0 * get(0) } else { get(k - 1) };
            *o = (lower - get(k + 1)) / (2 * k) as f64;
        }
        out[0] = -(1..=n)
            .map(|k| if k % 2 == 0 { out[k] } else { -out[k] })
            .sum::<f64>();
        let half = 0.5 * (self.b - self.a);
        for v in &mut out {
            *v *= half;
        }
        Self::new(self.a, self.b, out)
    }

    /// Exact integral over `[a, b]`.
    pub fn integral(&self) -> f64 {
        let half = 0.5 * (self.b - self.a);
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == 0)
            .map(|(k, c)| c * 2.0 / (1.0 - (k * k) as f64))
            .sum::<f64>()
            * half
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lobatto_interpolant_reproduces_polynomial_and_derivative() {
        let xs = lobatto_points(8, 0.0, 1.0);
        let vals: Vec<f64> = xs.iter().map(|x| x * x * (1.0 - x)).collect();
        let s = ChebSeries::from_lobatto_values(&vals, 0.0, 1.0);
        let d = s.derivative();
        for &x in &[0.0, 0.13, 0.5, 0.91, 1.0] {
            assert!((s.eval(x) - x * x * (1.0 - x)).abs() < 1e-14);
            assert!((d.eval(x) - (2.0 * x - 3.0 * x * x)).abs() < 1e-13);
        }
    }

    #[test]
    fn antiderivative_inverts_derivative() {
        let s = ChebSeries::fit(|x: f64| (3.0 * x).cos(), 0.2, 1.4, CHOP_TOL);
        let a = s.antiderivative();
        for &x in &[0.2f64, 0.5, 1.4] {
            let exact = ((3.0 * x).sin() - 0.6f64.sin()) / 3.0;
            assert!((a.eval(x) - exact).abs() < 1e-14);
        }
        assert!((a.eval(1.4) - s.integral()).abs() < 1e-14);
    }

    #[test]
    fn adaptive_fit_resolves_oscillation() {
        let k = 10.0;
        let s = ChebSeries::fit(|x| (k * PI * x).sin(), 0.0, 1.0, CHOP_TOL);
        assert!(s.degree() < 120);
        let d2 = s.nth_derivative(2);
        for &x in &[0.01, 0.33, 0.77] {
            assert!((s.eval(x) - (k * PI * x).sin()).abs() < 1e-12);
            let exact = -(k * PI).powi(2) * (k * PI * x).sin();
            assert!((d2.eval(x) - exact).abs() < 1e-7 * (k * PI).powi(2));
        }
    }

    #[test]
    fn integral_matches_closed_form() {
        let s = ChebSeries::fit(|x| x.exp(), 0.0, 2.0, CHOP_TOL);
        assert!((s.integral() - (2f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn fit_on_subinterval_never_touches_endpoints() {
        // sin(pi x)/x is 0/0 at x = 0
        let s = ChebSeries::fit(|x| (PI * x).sin() / x, 0.0, 0.5, CHOP_TOL);
        assert!((s.eval(0.0) - PI).abs() < 1e-12);
    }
}
