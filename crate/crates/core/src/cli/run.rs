//! Experiment drivers and their on-disk artifacts.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;

use super::csv::{fmt_f64, CsvTable};
use super::scenario::{DataSpec, Experiment, Method, Perturbation, Scenario};
use super::suite::hardy_suite;
use crate::diagnostics::{check_bound, energy_history, sup_until, BoundReport, EnergySnapshot};
use crate::error::{Error, Result};
use crate::function_space::{sobolev_norm, ChebSpace, Grid, ScalarField};
use crate::initial_data::{
    initial_norms, make_density, make_velocity, mollify, InitialData, ProfileKind, VelocityKind,
    MAX_TIME_DERIVATIVE,
};
use crate::kappa_solver::{direct_mol_solve, picard_solve, PicardTrace, SolverConfig, Trajectory};
use crate::oracles::AffineOracle;

/// Files written by a run and the report text.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub report: String,
}

/// Builds validated initial data for `spec`; the stack is taken to the
/// deepest order the smoothness of `u₀` allows.
pub fn build_initial_data(
    spec: &DataSpec,
    config: &SolverConfig,
    perturbation: Option<(f64, &Perturbation)>,
) -> Result<InitialData> {
    let grid = Arc::new(Grid::default());
    let density = make_density(&spec.profile, config.gamma, grid.clone())?;
    let mut u0 = make_velocity(&spec.velocity, grid.clone())?;
    if let Some((eps, w)) = perturbation {
        u0 = u0.add(&perturbation_field(w, grid.clone())?.scale(eps));
    }
    let space = Arc::new(ChebSpace::new(config.collocation_degree));
    let depth = |u: &ScalarField| (u.max_derivative() / 2).min(MAX_TIME_DERIVATIVE);
    let mut data = InitialData::new(u0.clone(), density, config.kappa, depth(&u0), space.clone())?;
    if spec.epsilon > 0.0 {
        let smooth = mollify(&data, spec.epsilon)?;
        let k = depth(&smooth.u0);
        data = InitialData::new(smooth.u0, smooth.density, config.kappa, k, space)?;
    }
    Ok(data)
}

/// Direction `w` of the stability probe; must lie in `H¹₀`.
pub fn perturbation_field(w: &Perturbation, grid: Arc<Grid>) -> Result<ScalarField> {
    let f = match *w {
        Perturbation::Bump => ScalarField::analytic(grid, |x, k| {
            // 16 x²(1-x)² = 16(x² - 2x³ + x⁴)
            16.0 * match k {
                0 => x * x - 2.0 * x.powi(3) + x.powi(4),
                1 => 2.0 * x - 6.0 * x * x + 4.0 * x.powi(3),
                2 => 2.0 - 12.0 * x + 12.0 * x * x,
                3 => -12.0 + 24.0 * x,
                4 => 24.0,
                _ => 0.0,
            }
        }),
        Perturbation::Sine { mode } => make_velocity(
            &VelocityKind::Sine {
                amplitude: 1.0,
                mode,
            },
            grid,
        )?,
        Perturbation::Affine { beta, delta } => {
            make_velocity(&VelocityKind::Affine { beta, delta }, grid)?
        }
    };
    for e in [0.0, 1.0] {
        if f.eval(e).abs() > 1e-14 {
            return Err(Error::config(
                "perturbation",
                "the perturbation must vanish at both endpoints",
            ));
        }
    }
    Ok(f)
}

/// One solver run with its energy history.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub kappa: f64,
    pub data: InitialData,
    pub trajectory: Trajectory,
    pub picard: Option<PicardTrace>,
    pub energy: Vec<EnergySnapshot>,
    pub bound: BoundReport,
    pub oracle_error: Option<f64>,
}

impl RunResult {
    pub fn energy_series(&self) -> Vec<(f64, f64)> {
        self.energy.iter().map(|e| (e.t, e.total)).collect()
    }

    /// `sup_{[0, T_good]} E`.
    pub fn sup_energy_good(&self) -> f64 {
        sup_until(&self.energy_series(), self.bound.t_good)
    }
}

fn affine_oracle_error(spec: &DataSpec, config: &SolverConfig, traj: &Trajectory) -> Result<Option<f64>> {
    let (ProfileKind::Quadratic { a }, VelocityKind::Affine { beta, delta }) =
        (&spec.profile, &spec.velocity)
    else {
        return Ok(None);
    };
    if spec.epsilon > 0.0 || config.gamma != 2.0 {
        return Ok(None);
    }
    let oracle = AffineOracle::new(*a, *beta, *delta, config.kappa)?;
    let states = oracle.states(&traj.times)?;
    let mut worst = 0.0f64;
    let grid = traj.grid();
    for (i, s) in states.iter().enumerate() {
        let num = traj.v_on_grid(i);
        let err: Vec<f64> = num
            .iter()
            .zip(grid.nodes())
            .map(|(v, &x)| (v - s.v(x)).powi(2))
            .collect();
        worst = worst.max(grid.integrate(&err).sqrt());
    }
    Ok(Some(worst))
}

/// Runs one solver on prepared data and evaluates the energy diagnostics.
pub fn solve(
    scenario: &Scenario,
    config: &SolverConfig,
    method: Method,
    data: InitialData,
) -> Result<RunResult> {
    let (trajectory, picard) = match method {
        Method::Mol => (direct_mol_solve(config, &data)?, None),
        Method::Picard => {
            let (t, trace) = picard_solve(config, &data)?;
            (t, Some(trace))
        }
    };
    let energy = energy_history(&trajectory, &data.density, scenario.energy_stride)?;
    let series: Vec<(f64, f64)> = energy.iter().map(|e| (e.t, e.total)).collect();
    let bound = check_bound(&series, series[0].1);
    let oracle_error = affine_oracle_error(&scenario.data, config, &trajectory)?;
    Ok(RunResult {
        kappa: config.kappa,
        data,
        trajectory,
        picard,
        energy,
        bound,
        oracle_error,
    })
}

fn trajectory_csv(hash: &str, traj: &Trajectory, stride: usize) -> CsvTable {
    let mut t = CsvTable::new(hash, &["t", "x_index", "v", "eta_x"]);
    let last = traj.len().saturating_sub(1);
    for i in (0..traj.len()).filter(|i| i % stride == 0 || *i == last) {
        for j in 0..traj.v[i].len() {
            t.row(&[
                fmt_f64(traj.times[i]),
                j.to_string(),
                fmt_f64(traj.v[i][j]),
                fmt_f64(traj.eta_x[i][j]),
            ]);
        }
    }
    t
}

fn energy_csv(hash: &str, runs: &[&RunResult], with_kappa: bool) -> CsvTable {
    let names: Vec<String> = runs[0].energy[0]
        .components
        .iter()
        .map(|(n, _)| n.clone())
        .collect();
    let mut header: Vec<&str> = Vec::new();
    if with_kappa {
        header.push("kappa");
    }
    header.push("t");
    header.extend(names.iter().map(String::as_str));
    header.extend(["total", "physical", "dissipation"]);
    let mut table = CsvTable::new(hash, &header);
    for run in runs {
        let traj = &run.trajectory;
        for e in &run.energy {
            let i = traj
                .times
                .iter()
                .position(|t| *t == e.t)
                .unwrap_or(traj.len() - 1);
            let lead = if with_kappa {
                vec![fmt_f64(run.kappa)]
            } else {
                vec![]
            };
            let mut vals = vec![e.t];
            vals.extend(e.components.iter().map(|c| c.1));
            vals.extend([e.total, e.physical, traj.dissipation[i]]);
            table.row_f64(&lead, &vals);
        }
    }
    table
}

fn kv(out: &mut String, key: &str, value: f64) {
    let _ = writeln!(out, "{key} = {}", fmt_f64(value));
}

fn report_run(out: &mut String, label: &str, run: &RunResult) {
    let _ = writeln!(out, "[{label}]");
    kv(out, "kappa", run.kappa);
    kv(out, "t_final", run.trajectory.final_time());
    let _ = writeln!(out, "records = {}", run.trajectory.len());
    let b = &run.bound;
    kv(out, "M0", b.m0);
    kv(out, "sup_E", b.sup_e);
    kv(out, "sup_E_over_M0", b.ratio);
    match b.first_violation_t {
        Some(t) => kv(out, "first_violation_t", t),
        None => {
            let _ = writeln!(out, "first_violation_t = none");
        }
    }
    kv(out, "T_good", b.t_good);
    kv(out, "fitted_c0", b.fitted.0);
    kv(out, "fitted_c1", b.fitted.1);
    let traj = &run.trajectory;
    let e0 = traj.physical_energy(0);
    let last = traj.len() - 1;
    kv(
        out,
        "physical_energy_relative_drift",
        (traj.physical_energy(last) + traj.dissipation[last] - e0) / e0,
    );
    kv(out, "dissipation", traj.dissipation[last]);
    if let Some(err) = run.oracle_error {
        kv(out, "oracle_sup_L2_error", err);
    }
    if let Ok(norms) = initial_norms(&run.data) {
        kv(out, "N0", norms.n0);
        for (name, v) in &norms.n0_terms {
            kv(out, &format!("N0.{name}"), *v);
        }
    }
    if let Some(tr) = &run.picard {
        let _ = writeln!(out, "picard_converged = {}", tr.converged);
        let _ = writeln!(out, "picard_iterations = {}", tr.residuals.len());
        let _ = writeln!(out, "picard_windows = {}", tr.windows);
        kv(out, "picard_window_length", tr.t_used);
        if let Some(r) = tr.residuals.last() {
            kv(out, "picard_final_residual", *r);
        }
    }
    out.push('\n');
}

fn header(scenario: &Scenario) -> String {
    format!(
        "experiment = {}\nconfig_hash = {}\n\n",
        scenario.experiment.name(),
        scenario.hash
    )
}

struct Output<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl Output<'_> {
    fn csv(&mut self, name: &str, table: &CsvTable) -> Result<()> {
        let p = self.dir.join(name);
        table.write(&p)?;
        self.files.push(p);
        Ok(())
    }

    fn text(&mut self, name: &str, text: &str) -> Result<()> {
        let p = self.dir.join(name);
        std::fs::write(&p, text)?;
        self.files.push(p);
        Ok(())
    }
}

/// Sweep summary row.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub kappa: f64,
    pub sup_e: f64,
    pub l2_diff_to_smallest: f64,
    pub l2_diff_to_half: f64,
}

/// Least-squares slope of `log y` against `log x`.
pub fn fitted_rate(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 > 0.0 && p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Runs every `κ` of the list and its half, in parallel; results keep the
/// order of `kappas`.
pub fn kappa_sweep(scenario: &Scenario, kappas: &[f64]) -> Result<(Vec<SweepRow>, f64, Vec<RunResult>)> {
    let mut all: Vec<f64> = kappas.to_vec();
    for k in kappas {
        let half = 0.5 * k;
        if !all.iter().any(|x| (x - half).abs() <= 1e-14 * half) {
            all.push(half);
        }
    }
    let runs: Vec<RunResult> = all
        .par_iter()
        .map(|&kappa| {
            let config = SolverConfig {
                kappa,
                ..scenario.solver.clone()
            };
            let data = build_initial_data(&scenario.data, &config, None)?;
            solve(scenario, &config, scenario.method, data)
        })
        .collect::<Result<_>>()?;
    let find = |k: f64| {
        runs.iter()
            .find(|r| (r.kappa - k).abs() <= 1e-14 * k)
            .expect("every kappa was run")
    };
    let smallest = kappas.iter().cloned().fold(f64::INFINITY, f64::min);
    let base = find(smallest);
    let rows: Vec<SweepRow> = kappas
        .iter()
        .map(|&k| {
            let r = find(k);
            Ok(SweepRow {
                kappa: k,
                sup_e: r.sup_energy_good(),
                l2_diff_to_smallest: r.trajectory.l2l2_diff(&base.trajectory)?,
                l2_diff_to_half: r.trajectory.l2l2_diff(&find(0.5 * k).trajectory)?,
            })
        })
        .collect::<Result<_>>()?;
    let p = fitted_rate(&rows.iter().map(|r| (r.kappa, r.l2_diff_to_half)).collect::<Vec<_>>());
    Ok((rows, p, runs))
}

/// Sup-in-time norms of `δv` from the stability probe.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub eps: f64,
    /// `sup_t ‖δv‖_s` for `s = 0, 1, 2`.
    pub sup_norms: [f64; 3],
    /// `sup_t ‖δv‖₂ / eps`; zero when `eps = 0`.
    pub amplification: f64,
    /// `(t, ‖δv‖₀, ‖δv‖₁, ‖δv‖₂)` at sampled records.
    pub history: Vec<(f64, [f64; 3])>,
}

/// Runs `u₀` and `u₀ + eps·w` and measures the response.
pub fn stability_probe(scenario: &Scenario, eps: f64, w: &Perturbation) -> Result<StabilityReport> {
    let config = &scenario.solver;
    let (base, pert) = rayon::join(
        || {
            let d = build_initial_data(&scenario.data, config, None)?;
            run_plain(config, scenario.method, &d)
        },
        || {
            let d = build_initial_data(&scenario.data, config, Some((eps, w)))?;
            run_plain(config, scenario.method, &d)
        },
    );
    let (base, pert) = (base?, pert?);
    let stride = scenario.output_stride;
    let last = base.len() - 1;
    let idx: Vec<usize> = (0..base.len()).filter(|i| i % stride == 0 || *i == last).collect();
    let history: Vec<(f64, [f64; 3])> = idx
        .par_iter()
        .map(|&i| {
            let diff: Vec<f64> = base.v[i].iter().zip(&pert.v[i]).map(|(a, b)| b - a).collect();
            let f = ScalarField::from_collocation(base.grid().clone(), base.space(), &diff);
            Ok((
                base.times[i],
                [sobolev_norm(&f, 0.0)?, sobolev_norm(&f, 1.0)?, sobolev_norm(&f, 2.0)?],
            ))
        })
        .collect::<Result<_>>()?;
    let mut sup_norms = [0.0f64; 3];
    for (_, n) in &history {
        for k in 0..3 {
            sup_norms[k] = sup_norms[k].max(n[k]);
        }
    }
    Ok(StabilityReport {
        eps,
        sup_norms,
        amplification: if eps > 0.0 { sup_norms[2] / eps } else { 0.0 },
        history,
    })
}

fn run_plain(config: &SolverConfig, method: Method, data: &InitialData) -> Result<Trajectory> {
    match method {
        Method::Mol => direct_mol_solve(config, data),
        Method::Picard => Ok(picard_solve(config, data)?.0),
    }
}

/// Executes a scenario and writes its artifacts to `dir`.
pub fn run_scenario(scenario: &Scenario, dir: &Path) -> Result<RunOutcome> {
    std::fs::create_dir_all(dir)?;
    let mut out = Output {
        dir,
        files: Vec::new(),
    };
    let hash = scenario.hash.as_str();
    let mut report = header(scenario);
    match &scenario.experiment {
        Experiment::SingleRun => {
            let data = build_initial_data(&scenario.data, &scenario.solver, None)?;
            let run = solve(scenario, &scenario.solver, scenario.method, data)?;
            out.csv(
                "trajectory.csv",
                &trajectory_csv(hash, &run.trajectory, scenario.output_stride),
            )?;
            out.csv("energy.csv", &energy_csv(hash, &[&run], false))?;
            let label = match scenario.method {
                Method::Mol => "mol",
                Method::Picard => "picard",
            };
            report_run(&mut report, label, &run);
        }
        Experiment::PicardVsMol => {
            let data = build_initial_data(&scenario.data, &scenario.solver, None)?;
            let (mol, pic) = rayon::join(
                || solve(scenario, &scenario.solver, Method::Mol, data.clone()),
                || solve(scenario, &scenario.solver, Method::Picard, data.clone()),
            );
            let (mol, pic) = (mol?, pic?);
            out.csv(
                "trajectory.csv",
                &trajectory_csv(hash, &mol.trajectory, scenario.output_stride),
            )?;
            out.csv(
                "trajectory_picard.csv",
                &trajectory_csv(hash, &pic.trajectory, scenario.output_stride),
            )?;
            out.csv("energy.csv", &energy_csv(hash, &[&mol], false))?;
            report_run(&mut report, "mol", &mol);
            report_run(&mut report, "picard", &pic);
            let _ = writeln!(report, "[comparison]");
            kv(
                &mut report,
                "sup_L2_difference",
                mol.trajectory.sup_l2_diff(&pic.trajectory)?,
            );
        }
        Experiment::KappaSweep { kappa_list } => {
            let (rows, p, runs) = kappa_sweep(scenario, kappa_list)?;
            let mut sweep = CsvTable::new(
                hash,
                &[
                    "kappa",
                    "sup_E",
                    "L2_diff_to_smallest_kappa",
                    "L2_diff_to_half_kappa",
                    "fitted_p",
                ],
            );
            for r in &rows {
                sweep.row_f64(
                    &[],
                    &[r.kappa, r.sup_e, r.l2_diff_to_smallest, r.l2_diff_to_half, p],
                );
            }
            out.csv("sweep.csv", &sweep)?;
            let listed: Vec<&RunResult> = kappa_list
                .iter()
                .map(|k| runs.iter().find(|r| r.kappa == *k).expect("run exists"))
                .collect();
            let smallest = listed
                .iter()
                .min_by(|a, b| a.kappa.total_cmp(&b.kappa))
                .expect("non-empty list");
            out.csv(
                "trajectory.csv",
                &trajectory_csv(hash, &smallest.trajectory, scenario.output_stride),
            )?;
            out.csv("energy.csv", &energy_csv(hash, &listed, true))?;
            for r in &listed {
                report_run(&mut report, &format!("kappa {}", fmt_f64(r.kappa)), r);
            }
            let _ = writeln!(report, "[sweep]");
            kv(&mut report, "fitted_p", p);
        }
        Experiment::StabilityProbe { eps, perturbation } => {
            let s = stability_probe(scenario, *eps, perturbation)?;
            let mut table = CsvTable::new(hash, &["t", "dv_L2", "dv_H1", "dv_H2"]);
            for (t, n) in &s.history {
                table.row_f64(&[], &[*t, n[0], n[1], n[2]]);
            }
            out.csv("stability.csv", &table)?;
            let _ = writeln!(report, "[stability]");
            kv(&mut report, "eps", s.eps);
            kv(&mut report, "sup_dv_L2", s.sup_norms[0]);
            kv(&mut report, "sup_dv_H1", s.sup_norms[1]);
            kv(&mut report, "sup_dv_H2", s.sup_norms[2]);
            kv(&mut report, "amplification_H2", s.amplification);
        }
        Experiment::HardySuite => {
            let suite = hardy_suite(Arc::new(Grid::default()))?;
            let mut hardy = CsvTable::new(hash, &["member", "s", "ratio", "ratio_refined", "relative_change"]);
            for r in &suite.hardy {
                hardy.row_f64(
                    &[r.member.clone(), r.order.to_string()],
                    &[r.ratio, r.refined, r.relative_change()],
                );
            }
            out.csv("hardy.csv", &hardy)?;
            let mut emb = CsvTable::new(hash, &["member", "p", "ratio", "ratio_refined"]);
            for r in &suite.embedding {
                emb.row_f64(&[r.member.clone(), r.order.to_string()], &[r.ratio, r.refined]);
            }
            out.csv("embedding.csv", &emb)?;
            let _ = writeln!(report, "[hardy]");
            for s in 1..=3 {
                kv(&mut report, &format!("max_C_s{s}"), suite.max_hardy(s));
            }
            kv(&mut report, "max_relative_change", suite.max_hardy_change());
            let _ = writeln!(report, "\n[embedding]");
            for p in 1..=2 {
                kv(&mut report, &format!("max_ratio_p{p}"), suite.max_embedding(p));
                kv(&mut report, &format!("max_over_median_p{p}"), suite.max_over_median(p));
            }
        }
    }
    out.text("report.txt", &report)?;
    Ok(RunOutcome {
        files: out.files,
        report,
    })
}
