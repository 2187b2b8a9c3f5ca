//! Hardy-ratio and embedding sweeps over a fixed family of `H¹₀` functions.

use std::sync::Arc;

use crate::error::Result;
use crate::function_space::{check_embedding, check_hardy_ratio, sine_mode, Grid, ScalarField};

/// `{e_k}_{k ≤ 10} ∪ {x(1-x), x²(1-x) + x(1-x)²}` on `grid`.
pub fn hardy_family(grid: &Arc<Grid>) -> Vec<(String, ScalarField)> {
    let mut out: Vec<(String, ScalarField)> = (1..=10)
        .map(|k| {
            (
                format!("e{k}"),
                ScalarField::analytic(grid.clone(), move |x, d| sine_mode(k, x, d)),
            )
        })
        .collect();
    out.push((
        "x(1-x)".into(),
        ScalarField::analytic(grid.clone(), |x, d| match d {
            0 => x * (1.0 - x),
            1 => 1.0 - 2.0 * x,
            2 => -2.0,
            _ => 0.0,
        }),
    ));
    out.push((
        "x^2(1-x)+x(1-x)^2".into(),
        ScalarField::analytic(grid.clone(), |x, d| {
            let y = 1.0 - x;
            match d {
                0 => x * x * y + x * y * y,
                1 => y * y - x * x,
                2 => -2.0,
                _ => 0.0,
            }
        }),
    ));
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteRow {
    pub member: String,
    /// Sobolev order `s` for Hardy rows, weight power `p` for embedding rows.
    pub order: u32,
    pub ratio: f64,
    pub refined: f64,
}

impl SuiteRow {
    pub fn relative_change(&self) -> f64 {
        (self.refined - self.ratio).abs() / self.ratio.abs().max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardySuite {
    pub hardy: Vec<SuiteRow>,
    pub embedding: Vec<SuiteRow>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

impl HardySuite {
    /// Empirical `max ‖u/d‖_{s-1}/‖u‖_s` over the family.
    pub fn max_hardy(&self, s: u32) -> f64 {
        self.hardy
            .iter()
            .filter(|r| r.order == s)
            .map(|r| r.ratio.max(r.refined))
            .fold(0.0, f64::max)
    }

    pub fn max_hardy_change(&self) -> f64 {
        self.hardy
            .iter()
            .map(SuiteRow::relative_change)
            .fold(0.0, f64::max)
    }

    pub fn max_embedding(&self, p: u32) -> f64 {
        self.embedding
            .iter()
            .filter(|r| r.order == p)
            .map(|r| r.ratio.max(r.refined))
            .fold(0.0, f64::max)
    }

    /// Largest ratio of a member to the family median, over both grids.
    pub fn max_over_median(&self, p: u32) -> f64 {
        let rows: Vec<&SuiteRow> = self.embedding.iter().filter(|r| r.order == p).collect();
        let m0 = median(rows.iter().map(|r| r.ratio).collect());
        let m1 = median(rows.iter().map(|r| r.refined).collect());
        rows.iter()
            .map(|r| (r.ratio / m0).max(r.refined / m1))
            .fold(0.0, f64::max)
    }
}

/// Hardy ratios for `s = 1, 2, 3` and embedding ratios for `p = 1, 2` on
/// `grid` and on its refinement.
pub fn hardy_suite(grid: Arc<Grid>) -> Result<HardySuite> {
    let fine = Arc::new(grid.refined());
    let coarse_family = hardy_family(&grid);
    let fine_family = hardy_family(&fine);
    let mut hardy = Vec::new();
    let mut embedding = Vec::new();
    for ((name, u), (_, uf)) in coarse_family.iter().zip(&fine_family) {
        for s in 1..=3u32 {
            hardy.push(SuiteRow {
                member: name.clone(),
                order: s,
                ratio: check_hardy_ratio(u, s as usize)?,
                refined: check_hardy_ratio(uf, s as usize)?,
            });
        }
        for p in 1..=2u32 {
            embedding.push(SuiteRow {
                member: name.clone(),
                order: p,
                ratio: check_embedding(u, p)?,
                refined: check_embedding(uf, p)?,
            });
        }
    }
    Ok(HardySuite { hardy, embedding })
}
