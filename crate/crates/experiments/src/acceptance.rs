//! Acceptance suites run by `nlslab check <suite>`.
//!
//! Every criterion writes its own directory with a `checks.csv`
//! (`check, value, threshold, pass`) plus whatever scenario tables it used.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use nlslab_core::data::{plane_wave, random_band_limited, Gaussian};
use nlslab_core::functionals::{
    commutator, commutator_l2, interaction_action, local_momentum_identity_residual,
};
use nlslab_core::propagator::{evolve, evolve_with, strang_step, SolverConfig};
use nlslab_core::spectral::{gradient, i_symbol};
use nlslab_core::symbols::RegionTag;
use nlslab_core::weights::{log_samples, Weight, OUTER_SLOPE};
use nlslab_core::{Complex, Field, Grid, WeightSpec64};

use crate::globalization::{admissibility_threshold, growth_exponent};
use crate::plan::{Calibration, DataSpec, ExperimentPlan, GridSpec, Scenario};
use crate::report::{format_float, ResultTable};
use crate::scenarios::{self, weight_dump};

pub const CRITERIA: [(u8, &str); 13] = [
    (1, "plane_waves"),
    (2, "conservation"),
    (3, "momentum_identity"),
    (4, "virial_positivity"),
    (5, "interaction_oracle"),
    (6, "weight_certification"),
    (7, "commutator"),
    (8, "almost_conservation"),
    (9, "interaction_morawetz"),
    (10, "l6_1d"),
    (11, "symbol_scans"),
    (12, "globalization"),
    (13, "determinism"),
];

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: String,
    pub pass: bool,
}

fn check(name: &str, value: f64, threshold: &str, pass: bool) -> Check {
    Check { name: name.into(), value, threshold: threshold.into(), pass: pass && !value.is_nan() }
}

fn at_most(name: &str, value: f64, limit: f64) -> Check {
    check(name, value, &format!("<= {}", format_float(limit)), value <= limit)
}

fn at_least(name: &str, value: f64, limit: f64) -> Check {
    check(name, value, &format!(">= {}", format_float(limit)), value >= limit)
}

fn within(name: &str, value: f64, lo: f64, hi: f64) -> Check {
    check(name, value, &format!("in [{}, {}]", format_float(lo), format_float(hi)), (lo..=hi).contains(&value))
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub seconds: f64,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.error.is_none() && !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    /// One human readable line: verdict, criterion and the failing checks.
    pub fn line(&self) -> String {
        let verdict = if self.pass() { "PASS" } else { "FAIL" };
        let mut s = format!("[{verdict}] {:>2} {:<22} ({:.1}s)", self.id, self.name, self.seconds);
        if let Some(e) = &self.error {
            s.push_str(&format!(" error: {e}"));
        }
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{} = {} (want {})", c.name, format_float(c.value), c.threshold))
            .collect();
        if !failed.is_empty() {
            s.push_str(&format!(" failing: {}", failed.join(", ")));
        }
        s
    }
}

pub fn criterion_dir(out: &Path, id: u8) -> PathBuf {
    let name = CRITERIA[(id - 1) as usize].1;
    out.join(format!("{id:02}_{name}"))
}

/// Resolves a suite name: `all` (criteria 1-12), `determinism` (13), a
/// criterion number or a criterion name.
pub fn suite_members(suite: &str) -> Result<Vec<u8>> {
    if suite == "all" {
        return Ok((1..=12).collect());
    }
    if let Ok(id) = suite.parse::<u8>() {
        if (1..=13).contains(&id) {
            return Ok(vec![id]);
        }
    }
    match CRITERIA.iter().find(|(_, n)| *n == suite || n.replace('_', "-") == suite) {
        Some((id, _)) => Ok(vec![*id]),
        None => {
            let names: Vec<&str> = CRITERIA.iter().map(|c| c.1).collect();
            bail!("unknown suite `{suite}`; use all, 1-13 or one of {}", names.join(", "))
        }
    }
}

/// Runs a suite into `out`, writing `acceptance.csv`; `report` sees each
/// outcome as soon as it is known.
pub fn run_suite(suite: &str, out: &Path, mut report: impl FnMut(&Outcome)) -> Result<Vec<Outcome>> {
    let mut outcomes = Vec::new();
    for id in suite_members(suite)? {
        let o = run_criterion(id, out);
        report(&o);
        outcomes.push(o);
    }
    write_summary(out, &outcomes)?;
    Ok(outcomes)
}

pub fn run_criterion(id: u8, out: &Path) -> Outcome {
    let dir = criterion_dir(out, id);
    let start = Instant::now();
    if dir.exists() {
        let _ = std::fs::remove_dir_all(&dir);
    }
    let result = std::fs::create_dir_all(&dir).map_err(anyhow::Error::from).and_then(|_| match id {
        1 => plane_waves(&dir),
        2 => conservation(&dir),
        3 => momentum_identity(&dir),
        4 => virial_positivity(&dir),
        5 => interaction_oracle(&dir),
        6 => weight_certification(&dir),
        7 => commutator_checks(&dir),
        8 => almost_conservation(&dir),
        9 => interaction_morawetz(&dir),
        10 => l6_1d(&dir),
        11 => symbol_scans(&dir),
        12 => globalization(&dir),
        13 => determinism(&dir),
        _ => bail!("no criterion {id}"),
    });
    let (checks, error) = match result {
        Ok(c) => (c, None),
        Err(e) => (Vec::new(), Some(format!("{e:#}"))),
    };
    if error.is_none() {
        let _ = write_checks(&dir, &checks);
    }
    Outcome {
        id,
        name: CRITERIA[(id - 1) as usize].1,
        checks,
        error,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn write_checks(dir: &Path, checks: &[Check]) -> Result<()> {
    let mut w = csv::Writer::from_path(dir.join("checks.csv"))?;
    w.write_record(["check", "value", "threshold", "pass"])?;
    for c in checks {
        w.write_record([c.name.clone(), format_float(c.value), c.threshold.clone(), c.pass.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary(out: &Path, outcomes: &[Outcome]) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let mut w = csv::Writer::from_path(out.join("acceptance.csv"))?;
    w.write_record(["id", "criterion", "pass", "checks", "failed", "error"])?;
    for o in outcomes {
        let failed: Vec<&str> = o.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        w.write_record([
            o.id.to_string(),
            o.name.to_string(),
            o.pass().to_string(),
            o.checks.len().to_string(),
            failed.join(" "),
            o.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn gaussian(amplitude: f64, width: f64, velocity: [f64; 2]) -> DataSpec {
    DataSpec::Gaussian { amplitude, width, velocity, center: [0.0, 0.0], chirp: 0.0 }
}

fn grid2(n: usize, length: f64) -> Option<GridSpec> {
    Some(GridSpec { n, length, dims: 2 })
}

// 1

fn plane_waves(_dir: &Path) -> Result<Vec<Check>> {
    let g = Grid::new_2d(32, 2.0)?;
    let (a, k) = (0.8, [1.0, -0.5]);
    let u = plane_wave(&g, a, k)?;
    let omega = |t: f64| {
        let w = 4.0 * std::f64::consts::PI.powi(2) * (k[0] * k[0] + k[1] * k[1]) + a * a;
        Complex::from_polar(1.0, -w * t)
    };
    let dt = 1e-3;
    let one = strang_step(&u, dt)?;
    let want = u.map(|v| v * omega(dt))?;
    let mut last = u.clone();
    evolve_with(&SolverConfig::new(&g, dt, 1.0).with_stride(1000), &u, |_, f| {
        last = f.clone();
        Ok(())
    })?;
    let want_t = u.map(|v| v * omega(1.0))?;
    Ok(vec![
        at_most("one_step_error", one.max_abs_diff(&want), 1e-12),
        at_most("unit_time_error", last.max_abs_diff(&want_t), 1e-10),
    ])
}

// 2

fn conservation(dir: &Path) -> Result<Vec<Check>> {
    let mut plan = ExperimentPlan::new(Scenario::Conservation, dir);
    plan.grid = grid2(128, 24.0);
    plan.data = Some(gaussian(1.5, 1.0, [0.2, -0.1]));
    plan.dt = Some(1e-2);
    plan.t_end = Some(1.0);
    let out = scenarios::run(&plan)?;
    let t = out.table("conservation")?;
    let worst = |c: &str| -> Result<f64> { Ok(t.column(c)?.into_iter().fold(0.0, f64::max)) };
    let ratio = t.column("energy_ratio")?[1];
    Ok(vec![
        at_most("mass_drift_relative", worst("mass_drift")?, 1e-11),
        within("energy_drift_ratio", ratio, 3.5, 4.5),
        at_most("momentum_drift_relative", worst("momentum_drift")?, 1e-8),
    ])
}

// 3

/// Residual at the middle of three snapshots `h` apart, with `dt = h / 10`.
fn momentum_residual(h: f64) -> Result<f64> {
    let g = Grid::new_2d(64, 16.0)?;
    let u0 = Gaussian::new(1.0, 1.0).with_velocity([0.2, 0.0]).sample(&g)?;
    let tr = evolve(&SolverConfig::new(&g, h / 10.0, 2.0 * h).with_stride(10), &u0)?;
    Ok(local_momentum_identity_residual(&tr, 1)?)
}

fn momentum_identity(dir: &Path) -> Result<Vec<Check>> {
    let levels = [4e-3, 2e-3, 1e-3];
    let res = levels.iter().map(|&h| momentum_residual(h)).collect::<Result<Vec<_>>>()?;
    let mut t = ResultTable::new("momentum_identity", &["spacing", "dt", "residual"])
        .with_plot("spacing", &["residual"], true, true);
    for (h, r) in levels.iter().zip(&res) {
        t.push(vec![(*h).into(), (h / 10.0).into(), (*r).into()])?;
    }
    t.write(dir)?;
    Ok(res
        .windows(2)
        .enumerate()
        .map(|(k, w)| at_least(&format!("reduction_{}", k + 1), w[0] / w[1], 3.5))
        .collect())
}

// 4

fn virial_positivity(dir: &Path) -> Result<Vec<Check>> {
    let mut plan = ExperimentPlan::new(Scenario::Virial, dir);
    plan.grid = grid2(128, 24.0);
    plan.data = Some(gaussian(1.2, 1.0, [0.3, 0.0]));
    plan.dt = Some(5e-3);
    plan.t_end = Some(1.0);
    plan.weight_m = Some(2.0);
    let out = scenarios::run(&plan)?;
    let s = out.table("virial_summary")?;
    let snapshots = out.table("virial")?.rows.len();
    Ok(vec![
        at_least("snapshots", snapshots as f64, 21.0),
        at_least("min_potential", s.column("min_potential")?[0], -1e-9),
        at_least("min_hessian", s.column("min_hessian")?[0], -1e-9),
    ])
}

// 5

fn current(u: &Field<f64>) -> Result<Vec<[f64; 2]>> {
    let gu = gradient(u)?;
    Ok(u.values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let c = v.conj();
            [(c * gu[0].values()[i]).im, (c * gu[1].values()[i]).im]
        })
        .collect())
}

/// Direct double sum over all pairs of grid points.
pub fn brute_interaction(u1: &Field<f64>, u2: &Field<f64>, w: &WeightSpec64) -> Result<f64> {
    let g = u1.grid();
    let (p1, p2) = (current(u1)?, current(u2)?);
    let (r1, r2) = (u1.density(), u2.density());
    let mut s = 0.0;
    for x in 0..g.len() {
        for y in 0..g.len() {
            let (a, b) = (g.position(x), g.position(y));
            let k = w.gradient([a[0] - b[0], a[1] - b[1]]);
            s += (p1[x][0] * k[0] + p1[x][1] * k[1]) * r2[y];
            s -= (p2[y][0] * k[0] + p2[y][1] * k[1]) * r1[x];
        }
    }
    Ok(2.0 * s * g.cell_measure() * g.cell_measure())
}

fn interaction_oracle(dir: &Path) -> Result<Vec<Check>> {
    let g = Grid::new_2d(16, 8.0)?;
    let w = WeightSpec64::build(2.0)?;
    let mut t = ResultTable::new("interaction_oracle", &["pair", "fft", "direct", "relative_error"]);
    let mut worst = 0.0_f64;
    for seed in 0..10u64 {
        let u1 = random_band_limited(&g, 0.6, seed)?;
        let u2 = random_band_limited(&g, 0.6, seed + 100)?;
        let fast = interaction_action(&u1, &u2, &w)?;
        let slow = brute_interaction(&u1, &u2, &w)?;
        let rel = (fast - slow).abs() / slow.abs();
        worst = worst.max(rel);
        t.push(vec![seed.into(), fast.into(), slow.into(), rel.into()])?;
    }
    t.write(dir)?;
    Ok(vec![at_most("max_relative_error", worst, 1e-9)])
}

// 6

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, k: usize) -> f64 {
    let n = 2 * k;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `∫ a(x) (-ΔΔ φ)(x) dx` for `φ = exp(-α|x|^2)`, split at the weight's junctions.
fn mollified_delta(w: &WeightSpec64, alpha: f64) -> f64 {
    let bilap = |r: f64| {
        let r2 = r * r;
        16.0 * alpha * alpha * (alpha * alpha * r2 * r2 - 4.0 * alpha * r2 + 2.0) * (-alpha * r2).exp()
    };
    let outer = 12.0 / alpha.sqrt();
    let integrand = |r: f64| -w.f(r) * bilap(r) * 2.0 * std::f64::consts::PI * r;
    let cuts = [0.0, w.r_inner().min(outer), w.r_outer().min(outer), outer];
    cuts.windows(2).filter(|c| c[1] > c[0]).map(|c| simpson(integrand, c[0], c[1], 20_000)).sum()
}

fn weight_certification(dir: &Path) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut t = ResultTable::new(
        "weight_certification",
        &["M", "junction_mismatch", "min_fpp", "delta_recovered", "delta_exact", "max_outer_density"],
    );
    for m in [1.0, 2.0, 4.0] {
        let w = WeightSpec64::build(m)?;
        let mismatch = w.junction_mismatch();
        let mut min_fpp = f64::INFINITY;
        let mut min_fp = f64::INFINITY;
        for r in log_samples(m * 1e-4, m * 1e3, 10_000) {
            let d = w.derivatives(r);
            min_fp = min_fp.min(d[1]);
            min_fpp = min_fpp.min(d[2]);
        }
        let exact = 4.0 * std::f64::consts::PI / m;
        let got = mollified_delta(&w, 400.0 / (m * m));
        let outer = log_samples(m * (1.0 + 1e-9), m * 1e3, 10_000)
            .into_iter()
            .map(|r| w.regular_density(r).abs())
            .fold(0.0, f64::max);
        let tag = |s: &str| format!("{s}_M={m}");
        checks.push(at_most(&tag("junction_mismatch"), mismatch, 1e-10));
        checks.push(at_least(&tag("min_fp"), min_fp, 0.0));
        checks.push(at_least(&tag("min_fpp"), min_fpp, -1e-10));
        checks.push(at_most(&tag("delta_relative_error"), ((got - exact) / exact).abs(), 0.02));
        checks.push(at_most(&tag("outer_density_times_m3"), outer * m.powi(3), OUTER_SLOPE));
        t.push(vec![m.into(), mismatch.into(), min_fpp.into(), got.into(), exact.into(), outer.into()])?;
    }
    t.write(dir)?;
    weight_dump(2.0, 400)?.write(dir)?;
    Ok(checks)
}

// 7

fn signed(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

fn naive_dft(values: &[Complex<f64>], n: usize, sign: f64) -> Vec<Complex<f64>> {
    let mut out = vec![Complex::new(0.0, 0.0); n * n];
    for k1 in 0..n {
        for k2 in 0..n {
            let mut s = Complex::new(0.0, 0.0);
            for j1 in 0..n {
                for j2 in 0..n {
                    let ph = sign * 2.0 * std::f64::consts::PI * ((k1 * j1 + k2 * j2) % n) as f64 / n as f64;
                    s += values[j1 * n + j2] * Complex::from_polar(1.0, ph);
                }
            }
            out[k1 * n + k2] = s;
        }
    }
    out
}

/// `I(|u|^2 u) - |Iu|^2 Iu` by direct DFTs and cyclic triple sums over
/// the 2/3-rule band.
pub fn triple_convolution_commutator(u: &Field<f64>, nn: f64, s: f64) -> Result<Vec<Complex<f64>>> {
    let g = u.grid();
    let (n, l) = (g.n(), g.box_length());
    if g.dims() != 2 {
        bail!("the triple-sum oracle is two dimensional");
    }
    let a: Vec<Complex<f64>> = naive_dft(u.values(), n, -1.0).into_iter().map(|c| c / (n * n) as f64).collect();
    let m = |k: usize| {
        let (i, j) = (signed(k / n, n) as f64, signed(k % n, n) as f64);
        i_symbol(i.hypot(j) / l, nn, s)
    };
    let ma: Vec<Complex<f64>> = (0..n * n).map(|k| a[k] * m(k)).collect();
    let idx = |i: i64, j: i64| (i.rem_euclid(n as i64) * n as i64 + j.rem_euclid(n as i64)) as usize;
    let triple = |c: &[Complex<f64>], target: usize| {
        let (ti, tj) = ((target / n) as i64, (target % n) as i64);
        let mut sum = Complex::new(0.0, 0.0);
        for k1 in 0..n * n {
            let (i1, j1) = ((k1 / n) as i64, (k1 % n) as i64);
            for k2 in 0..n * n {
                let (i2, j2) = ((k2 / n) as i64, (k2 % n) as i64);
                sum += c[k1] * c[k2].conj() * c[idx(ti - i1 + i2, tj - j1 + j2)];
            }
        }
        sum
    };
    let keep = |k: usize| 3 * signed(k / n, n).unsigned_abs() < n as u64 && 3 * signed(k % n, n).unsigned_abs() < n as u64;
    let want: Vec<Complex<f64>> = (0..n * n)
        .map(|k| if keep(k) { triple(&a, k) * m(k) - triple(&ma, k) } else { Complex::new(0.0, 0.0) })
        .collect();
    Ok(naive_dft(&want, n, 1.0))
}

pub const SWEEP_N: [f64; 4] = [4.0, 8.0, 16.0, 32.0];

fn commutator_checks(dir: &Path) -> Result<Vec<Check>> {
    // spectrum inside |ξ| < N/3 keeps every product below N
    let g = Grid::new_2d(64, 8.0)?;
    let nn = 8.0;
    let low = random_band_limited(&g, nn / 3.0 - 0.2, 5)?.scale(4.0);
    let c = commutator(&low, nn, 0.45)?;
    let (_, grad_low) = commutator_l2(&low, nn, 0.45)?;
    let mut checks = vec![
        at_most("low_band_max_abs", c.max_abs(), 1e-12),
        at_most("low_band_gradient_l2", grad_low, 1e-12),
    ];

    let g16 = Grid::new_2d(16, 4.0)?;
    let u = random_band_limited(&g16, 1.5, 11)?.scale(3.0);
    let want = triple_convolution_commutator(&u, 0.5, 0.5)?;
    let got = commutator(&u, 0.5, 0.5)?;
    let scale = got.max_abs();
    let err = got.values().iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    checks.push(at_most("oracle_relative_error", err / scale, 1e-9));

    let mut plan = ExperimentPlan::new(Scenario::CommutatorSweep, dir);
    plan.grid = grid2(256, 1.2);
    plan.data = Some(gaussian(2.0, 0.02, [0.0, 0.0]));
    plan.dt = Some(1e-3);
    plan.t_end = Some(1.0);
    plan.snapshot_spacing = Some(0.02);
    plan.n_list = SWEEP_N.to_vec();
    plan.s_list = vec![0.45];
    let out = scenarios::run(&plan)?;
    let t = out.table("commutator_sweep")?;
    let slope = t.slope("c1_vs_N_s=0.45").map_or(f64::NAN, |f| f.slope);
    checks.push(at_most("c1_slope", slope, -0.8));
    Ok(checks)
}

// 8

/// Sweep time step; the integrator's own energy drift at `dt = 1e-3`
/// is comparable to the increments at the largest `N`.
pub const SWEEP_DT: f64 = 1.25e-4;

fn almost_conservation(dir: &Path) -> Result<Vec<Check>> {
    let mut plan = ExperimentPlan::new(Scenario::AlmostConservationSweep, dir);
    plan.grid = grid2(256, 1.2);
    plan.data = Some(DataSpec::PowerLaw { decay: 1.5, radius: 60.0 });
    plan.calibration = Calibration::Amplitude { target: 0.75 };
    plan.seed = 7;
    plan.dt = Some(SWEEP_DT);
    plan.t_end = Some(1.0);
    plan.n_list = SWEEP_N.to_vec();
    plan.s_list = vec![0.45];
    let out = scenarios::run(&plan)?;
    let t = out.table("almost_conservation_sweep")?;
    let e0 = t.column("e_iu0")?;
    let slope = t.slope("sup_increment_vs_N_s=0.45").map_or(f64::NAN, |f| f.slope);
    let mut checks = vec![check("failed_rows", out.failures.len() as f64, "= 0", out.failures.is_empty())];
    for (n, e) in SWEEP_N.iter().zip(&e0) {
        checks.push(within(&format!("e_iu0_N={n}"), *e, 0.5, 1.0));
    }
    checks.push(at_most("increment_slope", slope, -1.0));
    Ok(checks)
}

// 9

fn interaction_morawetz(dir: &Path) -> Result<Vec<Check>> {
    let mut plan = ExperimentPlan::new(Scenario::InteractionMorawetz2d, dir);
    plan.grid = grid2(256, 100.0);
    plan.data = Some(gaussian(1.0, 2.0, [0.0, 0.0]));
    plan.dt = Some(1e-2);
    plan.snapshot_spacing = Some(0.1);
    plan.t_list = vec![1.0, 2.0, 4.0, 8.0];
    plan.n_list = vec![0.125];
    plan.s_list = vec![0.45];
    let out = scenarios::run(&plan)?;
    let band = out.table("interaction_morawetz_2d_summary")?.column("ratio_band")?[0];
    Ok(vec![
        check("failed_rows", out.failures.len() as f64, "= 0", out.failures.is_empty()),
        at_most("ratio_band", band, 3.0),
    ])
}

// 10

fn l6_1d(dir: &Path) -> Result<Vec<Check>> {
    let mut plan = ExperimentPlan::new(Scenario::L61d, dir);
    plan.grid = Some(GridSpec { n: 1024, length: 200.0, dims: 1 });
    plan.data = Some(gaussian(1.0, 1.5, [0.2, 0.0]));
    plan.dt = Some(1e-3);
    plan.snapshot_spacing = Some(0.01);
    plan.t_list = vec![1.0, 2.0, 4.0, 8.0];
    let out = scenarios::run(&plan)?;
    let band = out.table("l6_1d_summary")?.column("ratio_band")?[0];
    Ok(vec![
        check("failed_rows", out.failures.len() as f64, "= 0", out.failures.is_empty()),
        at_most("ratio_band", band, 3.0),
    ])
}

// 11

fn symbol_scans(dir: &Path) -> Result<Vec<Check>> {
    let mut plan = ExperimentPlan::new(Scenario::SymbolScan, dir);
    plan.n_list = vec![8.0, 32.0];
    plan.s_list = vec![0.3, 0.45];
    plan.samples = Some(100_000);
    plan.seed = 1;
    let out = scenarios::run(&plan)?;
    let t = out.table("symbol_scan")?;
    let (ri, ni, si) = (t.column_index("region")?, t.column_index("N")?, t.column_index("s")?);
    let (vi, spi) = (t.column_index("sup_abs")?, t.column_index("seed_spread")?);
    let mut checks = vec![check("failed_rows", out.failures.len() as f64, "= 0", out.failures.is_empty())];
    for row in &t.rows {
        let region = row[ri].render();
        let tag = format!("{region}_N={}_s={}", row[ni].as_f64().unwrap_or(f64::NAN), row[si].as_f64().unwrap_or(f64::NAN));
        let sup = row[vi].as_f64().unwrap_or(f64::NAN);
        if region == RegionTag::Omega1.to_string() {
            checks.push(check(&format!("sup_{tag}"), sup, "= 0", sup == 0.0));
        } else {
            checks.push(at_most(&format!("sup_{tag}"), sup, 10.0));
            checks.push(at_most(&format!("seed_spread_{tag}"), row[spi].as_f64().unwrap_or(f64::NAN), 0.2));
        }
    }
    Ok(checks)
}

// 12

fn globalization(dir: &Path) -> Result<Vec<Check>> {
    let mut plan = ExperimentPlan::new(Scenario::GlobalizationCalc, dir);
    plan.s_list = vec![0.45, 0.5, 0.75];
    plan.n_list = (4..=10).map(|j| 2f64.powi(j)).collect();
    plan.t_list = vec![1.0, 2.0, 4.0, 8.0];
    scenarios::run(&plan)?;
    let mut checks = vec![within("exponent_at_half", growth_exponent(0.5), 0.75 - 1e-15, 0.75 + 1e-15)];
    let approach: Vec<f64> = (1..=8).map(|k| growth_exponent(0.4 + 10f64.powi(-k))).collect();
    let increasing = approach.windows(2).all(|w| w[1] > w[0]);
    checks.push(check("exponent_grows_toward_two_fifths", approach[7], "increasing, > 1e6", increasing && approach[7] > 1e6));
    checks.push(check("exponent_at_two_fifths", growth_exponent(0.4), "= inf", growth_exponent(0.4).is_infinite()));
    let mut prev = 0.0;
    let mut monotone = true;
    let mut all_exist = true;
    for &t0 in &plan.t_list {
        let th = admissibility_threshold(0.45, t0, 1.0, 0.1)?;
        all_exist &= th.is_some();
        let v = th.unwrap_or(f64::INFINITY);
        monotone &= v >= prev;
        prev = v;
        checks.push(check(&format!("threshold_T0={t0}"), v, "finite", th.is_some()));
    }
    checks.push(check("threshold_monotone_in_T0", prev, "nondecreasing", monotone && all_exist));
    Ok(checks)
}

// 13

/// Every CSV under `dir`, keyed by its path relative to `dir`.
pub fn collect_csv(dir: &Path) -> Result<BTreeMap<PathBuf, Vec<u8>>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).with_context(|| format!("reading {}", d.display()))? {
            let p = entry?.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|e| e == "csv") {
                let rel = p.strip_prefix(dir)?.to_path_buf();
                out.insert(rel, std::fs::read(&p)?);
            }
        }
    }
    Ok(out)
}

/// Compares the CSV trees of two runs byte for byte.
pub fn compare_runs(a: &Path, b: &Path) -> Result<Vec<Check>> {
    let (ca, cb) = (collect_csv(a)?, collect_csv(b)?);
    let same_set = ca.keys().eq(cb.keys());
    let differing: Vec<&PathBuf> = ca.iter().filter(|(k, v)| cb.get(*k) != Some(*v)).map(|(k, _)| k).collect();
    Ok(vec![
        at_least("csv_files", ca.len() as f64, 1.0),
        check("same_file_set", cb.len() as f64, &format!("= {}", ca.len()), same_set),
        check(
            "differing_files",
            differing.len() as f64,
            "= 0",
            differing.is_empty(),
        ),
    ])
}

fn determinism(dir: &Path) -> Result<Vec<Check>> {
    let (a, b) = (dir.join("run_a"), dir.join("run_b"));
    run_suite("all", &a, |_| {})?;
    run_suite("all", &b, |_| {})?;
    compare_runs(&a, &b)
}
