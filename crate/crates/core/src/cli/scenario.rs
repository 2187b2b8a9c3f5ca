//! Scenario files: TOML with `[data]`, `[solver]` and `[experiment]` tables.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::initial_data::{ProfileKind, VelocityKind};
use crate::kappa_solver::{Integrator, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Mol,
    Picard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataSpec {
    pub profile: ProfileKind,
    pub velocity: VelocityKind,
    /// Mollifier width; `0` leaves the data untouched.
    pub epsilon: f64,
}

/// Perturbation direction `w` of the stability probe.
#[derive(Debug, Clone, PartialEq)]
pub enum Perturbation {
    /// `16x²(1-x)²`.
    Bump,
    Sine { mode: usize },
    Affine { beta: f64, delta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    SingleRun,
    KappaSweep { kappa_list: Vec<f64> },
    PicardVsMol,
    StabilityProbe { eps: f64, perturbation: Perturbation },
    HardySuite,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::SingleRun => "single-run",
            Experiment::KappaSweep { .. } => "kappa-sweep",
            Experiment::PicardVsMol => "picard-vs-mol",
            Experiment::StabilityProbe { .. } => "stability-probe",
            Experiment::HardySuite => "hardy-suite",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub data: DataSpec,
    pub solver: SolverConfig,
    pub method: Method,
    pub experiment: Experiment,
    pub output_dir: PathBuf,
    /// Records between rows of `trajectory.csv`.
    pub output_stride: usize,
    /// Records between energy snapshots.
    pub energy_stride: usize,
    /// SHA-256 of the scenario text.
    pub hash: String,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    data: Option<RawData>,
    solver: Option<RawSolver>,
    experiment: Option<RawExperiment>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawData {
    profile: Option<String>,
    #[serde(alias = "A")]
    a: Option<f64>,
    velocity: Option<String>,
    beta: Option<f64>,
    delta: Option<f64>,
    amplitude: Option<f64>,
    mode: Option<usize>,
    epsilon: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    method: Option<String>,
    kappa: Option<f64>,
    gamma: Option<f64>,
    n_modes: Option<usize>,
    collocation_degree: Option<usize>,
    dt: Option<f64>,
    t_final: Option<f64>,
    picard_tol: Option<f64>,
    picard_max_iter: Option<usize>,
    time_integrator: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    kind: Option<String>,
    kappa_list: Option<Vec<f64>>,
    perturbation_eps: Option<f64>,
    perturbation: Option<String>,
    perturbation_beta: Option<f64>,
    perturbation_delta: Option<f64>,
    perturbation_mode: Option<usize>,
    output_dir: Option<String>,
    output_stride: Option<usize>,
    energy_stride: Option<usize>,
}

fn required<T>(value: Option<T>, field: &str) -> Result<T> {
    value.ok_or_else(|| Error::config(field, "missing"))
}

fn parse_data(raw: RawData) -> Result<DataSpec> {
    let profile = match raw.profile.as_deref().unwrap_or("quadratic") {
        "quadratic" => {
            let a = raw.a.unwrap_or(1.0);
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::config("data.A", "must be positive"));
            }
            ProfileKind::Quadratic { a }
        }
        "power-adjusted" => ProfileKind::PowerAdjusted,
        other => {
            return Err(Error::config(
                "data.profile",
                format!("unknown profile `{other}` (quadratic, power-adjusted)"),
            ))
        }
    };
    let velocity = match required(raw.velocity, "data.velocity")?.as_str() {
        "affine" => VelocityKind::Affine {
            beta: required(raw.beta, "data.beta")?,
            delta: required(raw.delta, "data.delta")?,
        },
        "sine" => VelocityKind::Sine {
            amplitude: required(raw.amplitude, "data.amplitude")?,
            mode: raw.mode.unwrap_or(1),
        },
        "tent" => VelocityKind::Tent {
            amplitude: required(raw.amplitude, "data.amplitude")?,
        },
        other => {
            return Err(Error::config(
                "data.velocity",
                format!("unknown velocity `{other}` (affine, sine, tent)"),
            ))
        }
    };
    if let VelocityKind::Sine { mode: 0, .. } = velocity {
        return Err(Error::config("data.mode", "must be at least 1"));
    }
    let epsilon = raw.epsilon.unwrap_or(0.0);
    if !(0.0..crate::initial_data::MAX_EPSILON).contains(&epsilon) {
        return Err(Error::config(
            "data.epsilon",
            format!("must lie in [0, {})", crate::initial_data::MAX_EPSILON),
        ));
    }
    Ok(DataSpec {
        profile,
        velocity,
        epsilon,
    })
}

fn parse_solver(raw: RawSolver) -> Result<(SolverConfig, Method)> {
    let d = SolverConfig::default();
    let method = match raw.method.as_deref().unwrap_or("mol") {
        "mol" => Method::Mol,
        "picard" => Method::Picard,
        other => {
            return Err(Error::config(
                "solver.method",
                format!("unknown method `{other}` (mol, picard)"),
            ))
        }
    };
    let time_integrator = match raw.time_integrator.as_deref().unwrap_or("trapezoid") {
        "trapezoid" => Integrator::ImplicitTrapezoid,
        "bdf2" => Integrator::Bdf2,
        other => {
            return Err(Error::config(
                "solver.time_integrator",
                format!("unknown integrator `{other}` (trapezoid, bdf2)"),
            ))
        }
    };
    let config = SolverConfig {
        kappa: required(raw.kappa, "kappa")?,
        gamma: raw.gamma.unwrap_or(d.gamma),
        n_modes: raw.n_modes.unwrap_or(d.n_modes),
        collocation_degree: raw.collocation_degree.unwrap_or(d.collocation_degree),
        dt: required(raw.dt, "dt")?,
        t_final: required(raw.t_final, "t_final")?,
        picard_tol: raw.picard_tol.unwrap_or(d.picard_tol),
        picard_max_iter: raw.picard_max_iter.unwrap_or(d.picard_max_iter),
        time_integrator,
    };
    config.validate()?;
    Ok((config, method))
}

fn parse_experiment(raw: &RawExperiment) -> Result<Experiment> {
    Ok(match required(raw.kind.clone(), "experiment.kind")?.as_str() {
        "single-run" => Experiment::SingleRun,
        "picard-vs-mol" => Experiment::PicardVsMol,
        "hardy-suite" => Experiment::HardySuite,
        "kappa-sweep" => {
            let kappa_list = required(raw.kappa_list.clone(), "kappa_list")?;
            if kappa_list.is_empty() || kappa_list.iter().any(|k| !(*k > 0.0) || !k.is_finite()) {
                return Err(Error::config(
                    "kappa_list",
                    "must be a non-empty list of positive numbers",
                ));
            }
            Experiment::KappaSweep { kappa_list }
        }
        "stability-probe" => {
            let eps = required(raw.perturbation_eps, "perturbation_eps")?;
            if !(eps >= 0.0) || !eps.is_finite() {
                return Err(Error::config("perturbation_eps", "must be non-negative"));
            }
            let perturbation = match raw.perturbation.as_deref().unwrap_or("bump") {
                "bump" => Perturbation::Bump,
                "sine" => Perturbation::Sine {
                    mode: raw.perturbation_mode.unwrap_or(1).max(1),
                },
                "affine" => {
                    let beta = raw.perturbation_beta.unwrap_or(0.0);
                    let delta = raw.perturbation_delta.unwrap_or(0.0);
                    if delta != 0.0 || beta + delta != 0.0 {
                        return Err(Error::config(
                            "perturbation",
                            "the perturbation must vanish at both endpoints",
                        ));
                    }
                    Perturbation::Affine { beta, delta }
                }
                other => {
                    return Err(Error::config(
                        "perturbation",
                        format!("unknown perturbation `{other}` (bump, sine, affine)"),
                    ))
                }
            };
            Experiment::StabilityProbe { eps, perturbation }
        }
        other => {
            return Err(Error::config(
                "experiment.kind",
                format!(
                    "unknown experiment `{other}` (single-run, kappa-sweep, picard-vs-mol, \
                     stability-probe, hardy-suite)"
                ),
            ))
        }
    })
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawScenario =
            toml::from_str(text).map_err(|e| Error::config("scenario", e.message().to_string()))?;
        let raw_exp = raw.experiment.unwrap_or_default();
        let experiment = parse_experiment(&raw_exp)?;
        // the Hardy suite runs no solver, so its other tables are optional
        let needs_run = experiment != Experiment::HardySuite;
        let data = match raw.data {
            Some(d) => parse_data(d)?,
            None if needs_run => return Err(Error::config("data", "missing table")),
            None => DataSpec {
                profile: ProfileKind::Quadratic { a: 1.0 },
                velocity: VelocityKind::Affine {
                    beta: 0.0,
                    delta: 0.0,
                },
                epsilon: 0.0,
            },
        };
        let (solver, method) = match raw.solver {
            Some(s) => parse_solver(s)?,
            None if needs_run => return Err(Error::config("solver", "missing table")),
            None => (SolverConfig::default(), Method::Mol),
        };
        if method == Method::Picard && needs_run && !(solver.kappa > 0.0) {
            return Err(Error::config("kappa", "the Picard solver needs kappa > 0"));
        }
        if experiment == Experiment::PicardVsMol && !(solver.kappa > 0.0) {
            return Err(Error::config("kappa", "picard-vs-mol needs kappa > 0"));
        }
        let hash = Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        Ok(Self {
            data,
            solver,
            method,
            experiment,
            output_dir: PathBuf::from(raw_exp.output_dir.unwrap_or_else(|| "output".into())),
            output_stride: raw_exp.output_stride.unwrap_or(10).max(1),
            energy_stride: raw_exp.energy_stride.unwrap_or(1).max(1),
            hash,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[data]
profile = "quadratic"
A = 1.0
velocity = "affine"
beta = 0.1
delta = -0.05

[solver]
kappa = 0.0
dt = 1e-4
t_final = 0.1

[experiment]
kind = "single-run"
"#;

    #[test]
    fn parses_base_scenario() {
        let s = Scenario::from_toml_str(BASE).unwrap();
        assert_eq!(s.experiment, Experiment::SingleRun);
        assert_eq!(s.solver.t_final, 0.1);
        assert_eq!(s.hash.len(), 64);
    }

    #[test]
    fn missing_t_final_is_named() {
        let text = BASE.replace("t_final = 0.1\n", "");
        match Scenario::from_toml_str(&text).unwrap_err() {
            Error::ConfigInvalid { field, .. } => assert_eq!(field, "t_final"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = BASE.replace("A = 1.0", "A = 1.0\nfoo = 2");
        assert!(matches!(
            Scenario::from_toml_str(&text),
            Err(Error::ConfigInvalid { .. })
        ));
    }

    #[test]
    fn perturbation_must_vanish_at_the_boundary() {
        let text = BASE.replace(
            "kind = \"single-run\"",
            "kind = \"stability-probe\"\nperturbation_eps = 1e-4\nperturbation = \"affine\"\nperturbation_delta = 1.0",
        );
        match Scenario::from_toml_str(&text).unwrap_err() {
            Error::ConfigInvalid { field, .. } => assert_eq!(field, "perturbation"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn hardy_suite_needs_no_solver() {
        let s = Scenario::from_toml_str("[experiment]\nkind = \"hardy-suite\"\n").unwrap();
        assert_eq!(s.experiment, Experiment::HardySuite);
    }
}
