//! Truncated Taylor-series arithmetic used for time jets.

/// Coefficients of `a(t)^p` from those of `a(t)` (`a[0] != 0`), truncated
/// to `n` terms.
pub(crate) fn pow_series(a: &[f64], p: f64, n: usize) -> Vec<f64> {
    let mut y = vec![0.0; n];
    if n == 0 {
        return y;
    }
    y[0] = a[0].powf(p);
    for k in 1..n {
        let acc: f64 = (1..=k.min(a.len() - 1))
            .map(|j| ((p + 1.0) * j as f64 - k as f64) * a[j] * y[k - j])
            .sum();
        y[k] = acc / (k as f64 * a[0]);
    }
    y
}

/// `k!` for small `k`.
pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_root_series() {
        // sqrt(1 + t) = 1 + t/2 - t²/8 + t³/16
        let y = pow_series(&[1.0, 1.0], 0.5, 4);
        let want = [1.0, 0.5, -0.125, 0.0625];
        for (a, b) in y.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn inverse_square_series() {
        // (2 + 3t)^{-2} = 1/4 - 3t/4 + 27t²/16 - …
        let y = pow_series(&[2.0, 3.0, 0.0], -2.0, 3);
        assert!((y[0] - 0.25).abs() < 1e-15);
        assert!((y[1] + 0.75).abs() < 1e-15);
        assert!((y[2] - 27.0 / 16.0).abs() < 1e-15);
    }
}
