//! Reference solutions: the affine flow family and an adaptive quadrature.

mod affine;
mod quadrature;

pub use affine::{AffineOracle, AffineState};
pub use quadrature::quadrature_oracle;
