//! Batch front-end: scenario files in, CSV tables and a text report out.

mod csv;
mod run;
mod scenario;
mod suite;

pub use csv::{fmt_f64, CsvTable};
pub use run::{
    build_initial_data, fitted_rate, kappa_sweep, perturbation_field, run_scenario, solve,
    stability_probe, RunOutcome, RunResult, StabilityReport, SweepRow,
};
pub use scenario::{DataSpec, Experiment, Method, Perturbation, Scenario};
pub use suite::{hardy_family, hardy_suite, HardySuite, SuiteRow};

use crate::error::Error;

/// Process exit status for a failed run.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::ConfigInvalid { .. } => 2,
        _ => 3,
    }
}
