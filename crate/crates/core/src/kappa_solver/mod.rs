//! Solvers for the viscous κ-problem and the inviscid Euler system.

mod config;
mod galerkin;
mod mol;
mod picard;
mod state;

pub use config::{Integrator, SolverConfig};
pub use galerkin::{
    assemble_galerkin, boundary_velocity_rate, grid_for_modes, reconstruct_velocity,
    step_linear_x, x_slope_at_left, GalerkinSystem,
};
pub use mol::{direct_mol_solve, gamma_general_rhs};
pub use picard::{picard_solve, PicardTrace};
pub use state::{LagrangianState, Trajectory, ETA_X_RANGE};
