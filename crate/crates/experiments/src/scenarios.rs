//! The scenario runners behind `run <plan.json>`.

use std::path::Path;

use anyhow::{bail, Context, Result};
use nlslab_core::functionals::{
    commutator_norms, energy, error_density, kinetic_energy, l4_spacetime, mass, modified_energy, momentum,
    morawetz_action, power_integral, virial_terms, InteractionKernel,
};
use nlslab_core::archive::write_trajectory;
use nlslab_core::propagator::{calibrate_lambda, evolve, evolve_with, rescale, SolverConfig};
use nlslab_core::spectral::{i_operator, sobolev_norm, strichartz_norm};
use nlslab_core::symbols::{scan_bounds, RegionTag};
use nlslab_core::weights::balance_m;
use nlslab_core::{trapezoid, AdmissiblePair, Complex, Exponent, Field, Grid, Trajectory, WeightSpec64};
use rayon::prelude::*;

use crate::diagnostics::{write_diagnostics, DiagnosticsStream};
use crate::fit::fit_loglog_slope;
use crate::globalization::{admissibility_threshold, globalization_calc};
use crate::manifest::RunManifest;
use crate::plan::{Calibration, ExperimentPlan, Scenario};
use crate::report::{Cell, ResultTable, SlopeRow};

/// Default time between stored snapshots.
pub const DEFAULT_SPACING: f64 = 0.05;
/// Subdirectory of the output holding the trajectory archive.
pub const ARCHIVE_DIR: &str = "trajectory";
/// Diagnostics `(N, s)` when the plan gives no lists.
pub const DEFAULT_DIAGNOSTIC_NS: (f64, f64) = (4.0, 0.45);

#[derive(Debug)]
pub struct RunOutput {
    pub tables: Vec<ResultTable>,
    /// Rows that could not be computed (solver aborts and the like).
    pub failures: Vec<String>,
}

impl RunOutput {
    pub fn table(&self, name: &str) -> Result<&ResultTable> {
        self.tables.iter().find(|t| t.name == name).with_context(|| format!("no table `{name}`"))
    }
}

/// Validates the plan, writes the manifest, runs the scenario and writes
/// every table into `plan.output`.
pub fn run(plan: &ExperimentPlan) -> Result<RunOutput> {
    plan.validate()?;
    let dir = plan.output.as_path();
    let bridge = match plan.scenario {
        Scenario::Conservation | Scenario::Virial | Scenario::InteractionMorawetz2d | Scenario::L4TimeScaling => {
            Some(WeightSpec64::build(weight_scale(plan)?)?.describe())
        }
        _ => None,
    };
    let mut manifest = RunManifest::new(plan, bridge)?;
    manifest.write(dir)?;
    let mut failures = Vec::new();
    let tables = match plan.scenario {
        Scenario::Conservation => conservation(plan, dir, &mut failures)?,
        Scenario::Virial => virial(plan, dir, &mut failures)?,
        Scenario::InteractionMorawetz2d => interaction_morawetz(plan, dir, &mut failures)?,
        Scenario::L4TimeScaling => l4_time_scaling(plan, dir, &mut failures)?,
        Scenario::L61d => l6_1d(plan, &mut failures)?,
        Scenario::AlmostConservationSweep => almost_conservation(plan, &mut failures)?,
        Scenario::CommutatorSweep => commutator_sweep(plan, &mut failures)?,
        Scenario::SymbolScan => symbol_scan(plan, &mut failures)?,
        Scenario::StrichartzSpotCheck => strichartz_spot_check(plan)?,
        Scenario::GlobalizationCalc => globalization(plan)?,
    };
    for t in &tables {
        t.write(dir)?;
    }
    manifest.finish(dir)?;
    Ok(RunOutput { tables, failures })
}

fn diagnostic_ns(plan: &ExperimentPlan) -> (f64, f64) {
    let (n0, s0) = DEFAULT_DIAGNOSTIC_NS;
    (plan.n_list.first().copied().unwrap_or(n0), plan.s_list.first().copied().unwrap_or(s0))
}

fn weight_scale(plan: &ExperimentPlan) -> Result<f64> {
    match plan.weight_m {
        Some(m) => Ok(m),
        None => Ok(balance_m(plan.horizon()?)?),
    }
}

/// Stride giving the plan's snapshot spacing (at least one step).
fn stride(plan: &ExperimentPlan, dt: f64) -> usize {
    let h = plan.snapshot_spacing.unwrap_or(DEFAULT_SPACING);
    ((h / dt).round() as usize).max(1)
}

fn config(plan: &ExperimentPlan, grid: &Grid<f64>, dt: f64, t_end: f64) -> SolverConfig<f64> {
    SolverConfig::new(grid, dt, t_end).with_stride(stride(plan, dt))
}

/// Number of snapshots covering `[0, t]`.
fn snapshots_to(traj: &Trajectory<f64>, t: f64) -> Result<usize> {
    let h = traj.spacing();
    let k = (t / h).round() as usize;
    if ((k as f64) * h - t).abs() > 1e-9 * t.max(1.0) || k + 1 > traj.len() {
        bail!("T = {t} is not a snapshot time of the run (spacing {h}, {} snapshots)", traj.len());
    }
    Ok(k + 1)
}

fn fail_row(failures: &mut Vec<String>, what: String, e: &dyn std::fmt::Display) -> String {
    let msg = format!("{what}: {e}");
    failures.push(msg.clone());
    format!("failed: {e}")
}

struct Drifts {
    mass: f64,
    energy: f64,
    momentum: f64,
}

fn drifts_run(
    plan: &ExperimentPlan,
    grid: &Grid<f64>,
    u0: &Field<f64>,
    dt: f64,
    mut stream: Option<&mut DiagnosticsStream>,
) -> Result<Drifts> {
    let t_end = plan.t_end.context("conservation needs t_end")?;
    let (m0, e0, p0) = (mass(u0), energy(u0)?, momentum(u0));
    let pn = p0[0].hypot(p0[1]);
    let pn = if pn > 0.0 { pn } else { 1.0 };
    let mut d = Drifts { mass: 0.0, energy: 0.0, momentum: 0.0 };
    evolve_with(&config(plan, grid, dt, t_end), u0, |t, f| {
        d.mass = d.mass.max((mass(f) - m0).abs() / m0);
        d.energy = d.energy.max((energy(f)? - e0).abs() / e0.abs());
        let p = momentum(f);
        d.momentum = d.momentum.max((p[0] - p0[0]).hypot(p[1] - p0[1]) / pn);
        if let Some(s) = stream.as_deref_mut() {
            s.push(t, f)?;
        }
        Ok(())
    })?;
    Ok(d)
}

fn conservation(plan: &ExperimentPlan, dir: &Path, failures: &mut Vec<String>) -> Result<Vec<ResultTable>> {
    let grid = plan.grid()?;
    let u0 = plan.data()?.sample(&grid, plan.seed)?;
    let dt = plan.dt()?;
    let (n, s) = diagnostic_ns(plan);
    let mut stream = DiagnosticsStream::new(&u0, n, s, weight_scale(plan)?)?;
    let mut table = ResultTable::new(
        "conservation",
        &["dt", "mass_drift", "energy_drift", "momentum_drift", "energy_ratio", "status"],
    )
    .with_plot("dt", &["energy_drift"], true, true);
    let mut prev: Option<f64> = None;
    for (level, h) in [dt, dt / 2.0].into_iter().enumerate() {
        let res = drifts_run(plan, &grid, &u0, h, if level == 0 { Some(&mut stream) } else { None });
        match res {
            Ok(d) => {
                let ratio = prev.map_or(f64::NAN, |p| p / d.energy);
                prev = Some(d.energy);
                table.push(vec![h.into(), d.mass.into(), d.energy.into(), d.momentum.into(), ratio.into(), "ok".into()])?;
            }
            Err(e) => {
                let status = fail_row(failures, format!("conservation dt = {h}"), &e);
                prev = None;
                table.push(vec![h.into(), f64::NAN.into(), f64::NAN.into(), f64::NAN.into(), f64::NAN.into(), status.into()])?;
            }
        }
    }
    write_diagnostics(&dir.join("diagnostics.csv"), stream.records())?;
    Ok(vec![table])
}

fn virial(plan: &ExperimentPlan, dir: &Path, failures: &mut Vec<String>) -> Result<Vec<ResultTable>> {
    let grid = plan.grid()?;
    let u0 = plan.data()?.sample(&grid, plan.seed)?;
    let m = weight_scale(plan)?;
    let weight = WeightSpec64::build(m)?;
    let (n, s) = diagnostic_ns(plan);
    let mut stream = DiagnosticsStream::new(&u0, n, s, m)?;
    let mut rows = ResultTable::new("virial", &["t", "action", "potential", "hessian"])
        .with_plot("t", &["potential", "hessian"], false, false);
    let t_end = plan.t_end.context("virial needs t_end")?;
    let mut samples = Vec::new();
    let res = evolve_with(&config(plan, &grid, plan.dt()?, t_end), &u0, |t, f| {
        let terms = virial_terms(f, &weight)?;
        samples.push([t, morawetz_action(f, &weight)?, terms.potential, terms.hessian]);
        stream.push(t, f)
    });
    for v in samples {
        rows.push(v.iter().map(|x| Cell::Float(*x)).collect())?;
    }
    let status = match res {
        Ok(()) => "ok".to_string(),
        Err(e) => fail_row(failures, "virial run".into(), &e),
    };
    let min = |c: &str| -> Result<f64> { Ok(rows.column(c)?.into_iter().fold(f64::INFINITY, f64::min)) };
    let (min_pot, min_hess) = (min("potential")?, min("hessian")?);
    let mut summary = ResultTable::new("virial_summary", &["M", "min_potential", "min_hessian", "positive", "status"]);
    let positive = status == "ok" && min_pot >= -1e-9 && min_hess >= -1e-9;
    summary.push(vec![m.into(), min_pot.into(), min_hess.into(), positive.into(), status.into()])?;
    write_diagnostics(&dir.join("diagnostics.csv"), stream.records())?;
    Ok(vec![rows, summary])
}

/// One stored run to the largest requested time.
fn stored_run(plan: &ExperimentPlan, grid: &Grid<f64>, u0: &Field<f64>) -> Result<Trajectory<f64>> {
    let traj = evolve(&config(plan, grid, plan.dt()?, plan.horizon()?), u0)?;
    archive(plan, &traj)?;
    Ok(traj)
}

/// Snapshots are two dimensional only; 1D runs are never archived.
fn archive(plan: &ExperimentPlan, traj: &Trajectory<f64>) -> Result<()> {
    if plan.archive && traj.fields()[0].grid().dims() == 2 {
        write_trajectory(plan.output.join(ARCHIVE_DIR), traj)?;
    }
    Ok(())
}

fn write_stream(path: &Path, traj: &Trajectory<f64>, n: f64, s: f64, m: f64) -> Result<()> {
    let mut stream = DiagnosticsStream::new(&traj.fields()[0], n, s, m)?;
    for (t, f) in traj.times().iter().zip(traj.fields()) {
        stream.push(*t, f)?;
    }
    write_diagnostics(path, stream.records())
}

/// Ratio of the largest to the smallest finite positive value.
pub fn band(values: &[f64]) -> f64 {
    let v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite() && *x > 0.0).collect();
    if v.len() != values.len() || v.is_empty() {
        return f64::NAN;
    }
    v.iter().copied().fold(f64::MIN, f64::max) / v.iter().copied().fold(f64::MAX, f64::min)
}

fn interaction_morawetz(plan: &ExperimentPlan, dir: &Path, failures: &mut Vec<String>) -> Result<Vec<ResultTable>> {
    let grid = plan.grid()?;
    let u0 = plan.data()?.sample(&grid, plan.seed)?;
    let (n, s) = (plan.n_list[0], plan.s_list[0]);
    let mut table = ResultTable::new(
        "interaction_morawetz_2d",
        &["T", "M", "lhs", "rhs_main", "rhs_error", "error_term", "ratio", "status"],
    )
    .with_plot("T", &["lhs", "rhs_main", "ratio"], true, true);
    let mut summary = ResultTable::new("interaction_morawetz_2d_summary", &["N", "s", "ratio_band", "status"]);
    let traj = match stored_run(plan, &grid, &u0) {
        Ok(t) => t,
        Err(e) => {
            let status = fail_row(failures, "interaction_morawetz_2d run".into(), &e);
            summary.push(vec![n.into(), s.into(), f64::NAN.into(), status.into()])?;
            return Ok(vec![table, summary]);
        }
    };
    write_stream(&dir.join("diagnostics.csv"), &traj, n, s, weight_scale(plan)?)?;
    let h1: Vec<f64> = traj
        .fields()
        .iter()
        .map(|f| sobolev_norm(&i_operator(f, n, s)?, 1.0, true))
        .collect::<nlslab_core::Result<_>>()?;
    let l2: Vec<f64> = traj
        .fields()
        .iter()
        .map(|f| Ok(mass(&i_operator(f, n, s)?).sqrt()))
        .collect::<nlslab_core::Result<_>>()?;
    let u0_l2 = mass(&u0).sqrt();
    let mut ratios = Vec::new();
    for &t in &plan.t_list {
        let count = snapshots_to(&traj, t)?;
        let pre = traj.prefix(count)?;
        let m = balance_m(t)?;
        let kernel = InteractionKernel::new(&grid, &WeightSpec64::build(m)?)?;
        let dens = pre
            .fields()
            .iter()
            .map(|f| error_density(&kernel, f, n, s))
            .collect::<nlslab_core::Result<Vec<_>>>()?;
        let err = trapezoid(&dens, pre.spacing());
        let lhs = l4_spacetime(&pre, n, s)?;
        let sup_h1 = h1[..count].iter().copied().fold(0.0, f64::max);
        let sup_l2 = l2[..count].iter().copied().fold(0.0, f64::max);
        let c = t.cbrt();
        let rhs_main = c * (sup_h1 * sup_l2.powi(3) + u0_l2.powi(4));
        let rhs_error = c * err.abs();
        let ratio = lhs / (rhs_main + rhs_error);
        ratios.push(ratio);
        table.push(vec![
            t.into(),
            m.into(),
            lhs.into(),
            rhs_main.into(),
            rhs_error.into(),
            err.into(),
            ratio.into(),
            "ok".into(),
        ])?;
    }
    summary.push(vec![n.into(), s.into(), band(&ratios).into(), "ok".into()])?;
    Ok(vec![table, summary])
}

fn l4_time_scaling(plan: &ExperimentPlan, dir: &Path, failures: &mut Vec<String>) -> Result<Vec<ResultTable>> {
    let grid = plan.grid()?;
    let u0 = plan.data()?.sample(&grid, plan.seed)?;
    let (n, s) = (plan.n_list[0], plan.s_list[0]);
    let mut table = ResultTable::new(
        "l4_time_scaling",
        &["T", "l4acc", "budget", "within_budget", "computed_k", "status"],
    )
    .with_plot("T", &["l4acc", "budget"], true, true);
    let traj = match stored_run(plan, &grid, &u0) {
        Ok(t) => t,
        Err(e) => {
            let status = fail_row(failures, "l4_time_scaling run".into(), &e);
            for &t in &plan.t_list {
                table.push(vec![t.into(), f64::NAN.into(), f64::NAN.into(), false.into(), f64::NAN.into(), status.clone().into()])?;
            }
            return Ok(vec![table]);
        }
    };
    write_stream(&dir.join("diagnostics.csv"), &traj, n, s, weight_scale(plan)?)?;
    let h = traj.spacing();
    let dens: Vec<f64> = traj
        .fields()
        .iter()
        .map(|f| Ok(power_integral(&i_operator(f, n, s)?, 4.0)))
        .collect::<nlslab_core::Result<_>>()?;
    // running integral at every snapshot
    let mut acc = vec![0.0; dens.len()];
    for k in 1..dens.len() {
        acc[k] = acc[k - 1] + 0.5 * h * (dens[k - 1] + dens[k]);
    }
    let mut pts = Vec::new();
    for &t in &plan.t_list {
        let count = snapshots_to(&traj, t)?;
        let l4 = acc[count - 1];
        let budget = plan.k.powi(4) * n.sqrt() * t.cbrt();
        let k_needed = (1..count)
            .map(|j| acc[j].powf(0.25) / (n.powf(0.125) * traj.times()[j].powf(1.0 / 12.0)))
            .fold(0.0, f64::max);
        pts.push((t, l4));
        table.push(vec![t.into(), l4.into(), budget.into(), (l4 <= budget).into(), k_needed.into(), "ok".into()])?;
    }
    if pts.len() >= 3 {
        table.slopes.push(SlopeRow { label: "l4acc_vs_T".into(), fit: fit_loglog_slope(&pts)? });
    }
    Ok(vec![table])
}

fn l6_1d(plan: &ExperimentPlan, failures: &mut Vec<String>) -> Result<Vec<ResultTable>> {
    let grid = plan.grid()?;
    let u0 = plan.data()?.sample(&grid, plan.seed)?;
    let mut table = ResultTable::new("l6_1d", &["T", "lhs", "rhs", "ratio", "status"])
        .with_plot("T", &["lhs", "rhs", "ratio"], true, true);
    let mut summary = ResultTable::new("l6_1d_summary", &["ratio_band", "status"]);
    let traj = match stored_run(plan, &grid, &u0) {
        Ok(t) => t,
        Err(e) => {
            let status = fail_row(failures, "l6_1d run".into(), &e);
            summary.push(vec![f64::NAN.into(), status.into()])?;
            return Ok(vec![table, summary]);
        }
    };
    let l6: Vec<f64> = traj.fields().iter().map(|f| power_integral(f, 6.0)).collect();
    let l2: Vec<f64> = traj.fields().iter().map(|f| mass(f).sqrt()).collect();
    let h1: Vec<f64> = traj
        .fields()
        .iter()
        .map(|f| sobolev_norm(f, 1.0, true))
        .collect::<nlslab_core::Result<_>>()?;
    let m0 = l2[0];
    let mut ratios = Vec::new();
    for &t in &plan.t_list {
        let count = snapshots_to(&traj, t)?;
        let lhs = trapezoid(&l6[..count], traj.spacing());
        let sup_l2 = l2[..count].iter().copied().fold(0.0, f64::max);
        let sup_h1 = h1[..count].iter().copied().fold(0.0, f64::max);
        let rhs = t.cbrt() * (sup_l2.powi(5) * sup_h1 + m0.powi(6));
        ratios.push(lhs / rhs);
        table.push(vec![t.into(), lhs.into(), rhs.into(), (lhs / rhs).into(), "ok".into()])?;
    }
    summary.push(vec![band(&ratios).into(), "ok".into()])?;
    Ok(vec![table, summary])
}

/// Scale factor `a` with `E(I(a v)) = target`.
pub fn amplitude_for(v: &Field<f64>, n: f64, s: f64, target: f64) -> Result<f64> {
    let iv = i_operator(v, n, s)?;
    let k = kinetic_energy(&iv)?;
    let q = 0.25 * power_integral(&iv, 4.0);
    let a2 = if q > 0.0 { (-k + (k * k + 4.0 * q * target).sqrt()) / (2.0 * q) } else { target / k };
    if !(a2 > 0.0) || !a2.is_finite() {
        bail!("data cannot be scaled to E(Iu) = {target}");
    }
    Ok(a2.sqrt())
}

/// Initial data for one sweep tuple, with the `(λ, amplitude)` used.
fn calibrated(plan: &ExperimentPlan, grid: &Grid<f64>, n: f64, s: f64) -> Result<(Field<f64>, f64, f64)> {
    let v = plan.data()?.sample(grid, plan.seed)?;
    Ok(match plan.calibration {
        Calibration::None => (v, 1.0, 1.0),
        Calibration::Lambda => {
            let lambda = calibrate_lambda(&v, n, s)?;
            (rescale(&v, lambda)?, lambda, 1.0)
        }
        Calibration::Amplitude { target } => {
            let a = amplitude_for(&v, n, s, target)?;
            (v.scale(a), 1.0, a)
        }
    })
}

struct Increment {
    lambda: f64,
    amplitude: f64,
    e0: f64,
    sup_increment: f64,
    energy_drift: f64,
}

fn increment(plan: &ExperimentPlan, grid: &Grid<f64>, n: f64, s: f64) -> Result<Increment> {
    let (u0, lambda, amplitude) = calibrated(plan, grid, n, s)?;
    let e0 = modified_energy(&u0, n, s)?;
    let f0 = energy(&u0)?;
    let (mut sup, mut drift) = (0.0_f64, 0.0_f64);
    let t_end = plan.t_end.context("sweep needs t_end")?;
    evolve_with(&config(plan, u0.grid(), plan.dt()?, t_end), &u0, |_, f| {
        sup = sup.max((modified_energy(f, n, s)? - e0).abs());
        drift = drift.max((energy(f)? - f0).abs());
        Ok(())
    })?;
    Ok(Increment { lambda, amplitude, e0, sup_increment: sup, energy_drift: drift })
}

fn tuples(plan: &ExperimentPlan) -> Vec<(f64, f64)> {
    plan.s_list.iter().flat_map(|&s| plan.n_list.iter().map(move |&n| (s, n))).collect()
}

fn fit_per_s(table: &mut ResultTable, plan: &ExperimentPlan, y: &str, prefix: &str) -> Result<()> {
    let (si, ni, yi) = (table.column_index("s")?, table.column_index("N")?, table.column_index(y)?);
    for &s in &plan.s_list {
        let pts: Vec<(f64, f64)> = table
            .rows
            .iter()
            .filter(|r| r[si].as_f64() == Some(s))
            .filter_map(|r| Some((r[ni].as_f64()?, r[yi].as_f64()?)))
            .collect();
        if pts.len() >= 3 {
            if let Ok(fit) = fit_loglog_slope(&pts) {
                table.slopes.push(SlopeRow { label: format!("{prefix}_s={s}"), fit });
            }
        }
    }
    Ok(())
}

fn almost_conservation(plan: &ExperimentPlan, failures: &mut Vec<String>) -> Result<Vec<ResultTable>> {
    let grid = plan.grid()?;
    let jobs = tuples(plan);
    let results: Vec<Result<Increment>> = jobs.par_iter().map(|&(s, n)| increment(plan, &grid, n, s)).collect();
    let mut table = ResultTable::new(
        "almost_conservation_sweep",
        &["s", "N", "lambda", "amplitude", "e_iu0", "sup_increment", "energy_drift", "status"],
    )
    .with_plot("N", &["sup_increment"], true, true);
    for (&(s, n), r) in jobs.iter().zip(results) {
        let row: Vec<Cell> = match r {
            Ok(v) => vec![
                s.into(),
                n.into(),
                v.lambda.into(),
                v.amplitude.into(),
                v.e0.into(),
                v.sup_increment.into(),
                v.energy_drift.into(),
                "ok".into(),
            ],
            Err(e) => {
                let status = fail_row(failures, format!("almost_conservation N = {n}, s = {s}"), &e);
                let nan = || Cell::Float(f64::NAN);
                vec![s.into(), n.into(), nan(), nan(), nan(), nan(), nan(), status.into()]
            }
        };
        table.push(row)?;
    }
    fit_per_s(&mut table, plan, "sup_increment", "sup_increment_vs_N")?;
    Ok(vec![table])
}

fn commutator_sweep(plan: &ExperimentPlan, failures: &mut Vec<String>) -> Result<Vec<ResultTable>> {
    let grid = plan.grid()?;
    let u0 = plan.data()?.sample(&grid, plan.seed)?;
    let t_end = plan.t_end.context("commutator_sweep needs t_end")?;
    let mut table = ResultTable::new("commutator_sweep", &["s", "N", "c0", "c1", "status"])
        .with_plot("N", &["c0", "c1"], true, true);
    let jobs = tuples(plan);
    match evolve(&config(plan, &grid, plan.dt()?, t_end), &u0) {
        Ok(traj) => {
            archive(plan, &traj)?;
            let norms: Vec<_> = jobs.par_iter().map(|&(s, n)| commutator_norms(&traj, n, s)).collect();
            for (&(s, n), r) in jobs.iter().zip(norms) {
                match r {
                    Ok((c0, c1)) => table.push(vec![s.into(), n.into(), c0.into(), c1.into(), "ok".into()])?,
                    Err(e) => {
                        let status = fail_row(failures, format!("commutator N = {n}, s = {s}"), &e);
                        table.push(vec![s.into(), n.into(), f64::NAN.into(), f64::NAN.into(), status.into()])?
                    }
                }
            }
        }
        Err(e) => {
            let status = fail_row(failures, "commutator_sweep run".into(), &e);
            for &(s, n) in &jobs {
                table.push(vec![s.into(), n.into(), f64::NAN.into(), f64::NAN.into(), status.clone().into()])?;
            }
        }
    }
    fit_per_s(&mut table, plan, "c1", "c1_vs_N")?;
    fit_per_s(&mut table, plan, "c0", "c0_vs_N")?;
    Ok(vec![table])
}

pub const SCAN_COLUMNS: [&str; 15] = [
    "region",
    "N",
    "s",
    "samples",
    "sup_abs",
    "argmax_xi1_x",
    "argmax_xi1_y",
    "argmax_xi2_x",
    "argmax_xi2_y",
    "argmax_xi3_x",
    "argmax_xi3_y",
    "seed",
    "sup_abs_next_seed",
    "seed_spread",
    "note",
];

fn symbol_scan(plan: &ExperimentPlan, failures: &mut Vec<String>) -> Result<Vec<ResultTable>> {
    let samples = plan.samples.context("symbol_scan needs samples")?;
    let mut jobs = Vec::new();
    for region in RegionTag::ALL {
        for &n in &plan.n_list {
            for &s in &plan.s_list {
                jobs.push((region, n, s));
            }
        }
    }
    let seed = plan.seed;
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(r, n, s)| -> nlslab_core::Result<_> {
            Ok((scan_bounds(r, n, s, samples, seed)?, scan_bounds(r, n, s, samples, seed + 1)?))
        })
        .collect();
    let mut table = ResultTable::new("symbol_scan", &SCAN_COLUMNS);
    for (&(region, n, s), res) in jobs.iter().zip(results) {
        match res {
            Ok((a, b)) => {
                let mut row: Vec<Cell> = vec![region.to_string().into(), n.into(), s.into(), a.samples.into(), a.sup_abs.into()];
                match &a.argmax {
                    Some(t) => row.extend(t.xi.iter().flat_map(|v| [Cell::Float(v[0]), Cell::Float(v[1])])),
                    None => row.extend((0..6).map(|_| Cell::Float(f64::NAN))),
                }
                let top = a.sup_abs.max(b.sup_abs);
                let spread = if top > 0.0 { (a.sup_abs - b.sup_abs).abs() / top } else { 0.0 };
                row.extend([seed.into(), b.sup_abs.into(), spread.into(), a.note.clone().unwrap_or_default().into()]);
                table.push(row)?;
            }
            Err(e) => {
                let status = fail_row(failures, format!("scan {region} N = {n}, s = {s}"), &e);
                let mut row: Vec<Cell> = vec![region.to_string().into(), n.into(), s.into(), samples.into()];
                row.extend((0..7).map(|_| Cell::Float(f64::NAN)));
                row.extend([seed.into(), f64::NAN.into(), f64::NAN.into(), status.into()]);
                table.push(row)?;
            }
        }
    }
    Ok(vec![table])
}

/// `e^{itΔ} u0` by exact Fourier phases.
pub fn free_evolution(u0: &Field<f64>, t: f64) -> Result<Field<f64>> {
    let mut spec = u0.forward()?;
    let two_pi = 2.0 * std::f64::consts::PI;
    spec.multiply(|_, k| {
        let w = two_pi * two_pi * (k[0] * k[0] + k[1] * k[1]);
        Complex::from_polar(1.0, -w * t)
    });
    Ok(spec.inverse()?)
}

fn strichartz_spot_check(plan: &ExperimentPlan) -> Result<Vec<ResultTable>> {
    let grid = plan.grid()?;
    let samples = plan.samples.context("strichartz_spot_check needs samples")?;
    let t_max = plan.horizon()?;
    let h = plan.snapshot_spacing.unwrap_or(DEFAULT_SPACING);
    let steps = (t_max / h).round() as usize;
    let pair = AdmissiblePair::new(Exponent::int(4), Exponent::int(4))?;
    let mut table = ResultTable::new("strichartz_spot_check", &["sample", "seed", "l2", "l4_tx", "ratio"]);
    let rows: Vec<Result<(u64, f64, f64)>> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let seed = plan.seed + k;
            let u0 = plan.data()?.sample(&grid, seed)?;
            let fields = (0..=steps)
                .map(|j| free_evolution(&u0, j as f64 * h))
                .collect::<Result<Vec<_>>>()?;
            let traj = Trajectory::from_snapshots(0.0, h, fields)?;
            Ok((seed, mass(&u0).sqrt(), strichartz_norm(&traj, &pair)?))
        })
        .collect();
    let mut worst = 0.0_f64;
    for (k, r) in rows.into_iter().enumerate() {
        let (seed, l2, l4) = r?;
        worst = worst.max(l4 / l2);
        table.push(vec![k.into(), seed.into(), l2.into(), l4.into(), (l4 / l2).into()])?;
    }
    let mut summary = ResultTable::new("strichartz_spot_check_summary", &["T", "samples", "constant"]);
    summary.push(vec![t_max.into(), samples.into(), worst.into()])?;
    Ok(vec![table, summary])
}

fn globalization(plan: &ExperimentPlan) -> Result<Vec<ResultTable>> {
    let mut table = ResultTable::new(
        "globalization_calc",
        &["s", "T0", "N", "lambda", "intervals", "budget", "exponent", "admissible"],
    );
    let mut thresholds = ResultTable::new("globalization_threshold", &["s", "T0", "threshold_N"]);
    for &s in &plan.s_list {
        for &t0 in &plan.t_list {
            for &n in &plan.n_list {
                let g = globalization_calc(s, n, t0, plan.k, plan.mu0)?;
                table.push(vec![
                    s.into(),
                    t0.into(),
                    n.into(),
                    g.lambda.into(),
                    g.intervals.into(),
                    g.budget.into(),
                    g.exponent.into(),
                    g.admissible.into(),
                ])?;
            }
            let th = admissibility_threshold(s, t0, plan.k, plan.mu0)?;
            thresholds.push(vec![s.into(), t0.into(), th.unwrap_or(f64::INFINITY).into()])?;
        }
    }
    Ok(vec![table, thresholds])
}

/// `(r, f, f', Δa, regular part of -ΔΔa)` on `count` log-spaced radii.
pub fn weight_dump(m: f64, count: usize) -> Result<ResultTable> {
    let w = WeightSpec64::build(m)?;
    let mut table = ResultTable::new("weight_dump", &["r", "f", "fp", "laplacian", "neg_bilaplacian_regular"])
        .with_plot("r", &["f", "fp"], true, true);
    for r in nlslab_core::weights::log_samples(m * 1e-3, m * 1e2, count) {
        let c = w.calculus(r)?;
        table.push(vec![
            r.into(),
            w.f(r).into(),
            w.fp(r).into(),
            c.laplacian.unwrap_or(f64::NAN).into(),
            w.regular_density(r).into(),
        ])?;
    }
    Ok(table)
}
