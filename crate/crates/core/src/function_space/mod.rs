//! Discretization of `I = (0, 1)`: quadrature grids, collocation spaces,
//! fields, the sine basis, Sobolev norms and Hardy/embedding checks.

pub mod basis;
pub mod cheb;
pub mod collocation;
pub mod field;
pub mod grid;
pub mod hardy;
pub mod norms;

pub use basis::{build_sine_basis, sine_mode, SineBasis};
pub use collocation::ChebSpace;
pub use field::{ScalarField, SMOOTH};
pub use grid::{Grid, GridSpec};
pub use hardy::{check_embedding, check_hardy_ratio, distance_field, hardy_quotient};
pub use norms::{sobolev_norm, weighted_norm};
