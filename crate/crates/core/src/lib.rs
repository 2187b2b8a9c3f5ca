pub mod error;
pub mod function_space;
pub mod oracles;

mod taylor;

pub mod diagnostics;
pub mod dynamics;
pub mod initial_data;
pub mod kappa_solver;

pub mod cli;

pub use error::{Error, Result};
