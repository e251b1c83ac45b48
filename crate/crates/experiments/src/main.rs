use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use nlslab_experiments::acceptance::{self, criterion_dir};
use nlslab_experiments::scenarios::{self, weight_dump};
use nlslab_experiments::{configure_threads, ExperimentPlan, Scenario};

/// Numerical laboratory for the cubic defocusing NLS.
#[derive(Parser)]
#[command(name = "nlslab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment plan.
    Run { plan: PathBuf },
    /// Run an acceptance suite: all, determinism, a criterion number or name.
    Check {
        suite: String,
        #[arg(long, default_value = "acceptance_out")]
        out: PathBuf,
    },
    /// Write a plan for a scenario with the given sweep axes, e.g. `--grid N=4,8,16 --grid s=0.45`.
    Sweep {
        #[arg(long)]
        scenario: Scenario,
        /// AXIS=v1,v2,... with AXIS one of N, s, T.
        #[arg(long = "grid", value_name = "AXIS=LIST")]
        grid: Vec<String>,
        /// Start from this plan instead of the scenario template.
        #[arg(long)]
        base: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory recorded in the plan.
        #[arg(long, default_value = "sweep_out")]
        output: PathBuf,
        /// Where to write the plan; stdout if absent.
        #[arg(long)]
        write: Option<PathBuf>,
        /// Run the plan after writing it.
        #[arg(long)]
        run: bool,
    },
    /// Weight utilities.
    Weights {
        #[command(subcommand)]
        command: WeightsCommand,
    },
}

#[derive(Subcommand)]
enum WeightsCommand {
    /// Tabulate f, f', Δa and the regular part of -ΔΔa on a log grid.
    Dump {
        #[arg(long = "M")]
        m: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn parse_axis(spec: &str) -> Result<(String, Vec<f64>)> {
    let (axis, list) = spec.split_once('=').with_context(|| format!("`{spec}` is not AXIS=LIST"))?;
    let values = list
        .split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad number `{v}` in `{spec}`")))
        .collect::<Result<Vec<_>>>()?;
    Ok((axis.trim().to_string(), values))
}

fn run_plan(plan: &ExperimentPlan) -> Result<bool> {
    let out = scenarios::run(plan)?;
    for t in &out.tables {
        println!("wrote {}", plan.output.join(format!("{}.csv", t.name)).display());
    }
    for f in &out.failures {
        eprintln!("failed: {f}");
    }
    Ok(out.failures.is_empty())
}

fn main_inner() -> Result<bool> {
    let cli = Cli::parse();
    configure_threads()?;
    match cli.command {
        Command::Run { plan } => run_plan(&ExperimentPlan::load(&plan)?),
        Command::Check { suite, out } => {
            let outcomes = acceptance::run_suite(&suite, &out, |o| println!("{}", o.line()))?;
            let passed = outcomes.iter().filter(|o| o.pass()).count();
            println!("{passed}/{} criteria passed; details under {}", outcomes.len(), out.display());
            if let [only] = outcomes.as_slice() {
                println!("checks: {}", criterion_dir(&out, only.id).join("checks.csv").display());
            }
            Ok(passed == outcomes.len())
        }
        Command::Sweep { scenario, grid, base, dt, seed, output, write, run } => {
            let mut plan = match base {
                Some(p) => ExperimentPlan::load(p)?,
                None => ExperimentPlan::template(scenario, &output),
            };
            plan.scenario = scenario;
            plan.output = output;
            for g in &grid {
                let (axis, values) = parse_axis(g)?;
                plan.set_axis(&axis, values)?;
            }
            if dt.is_some() {
                plan.dt = dt;
            }
            if let Some(s) = seed {
                plan.seed = s;
            }
            plan.validate()?;
            let json = serde_json::to_string_pretty(&plan)? + "\n";
            match &write {
                Some(path) => std::fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{json}"),
            }
            if run {
                run_plan(&plan)
            } else {
                Ok(true)
            }
        }
        Command::Weights { command: WeightsCommand::Dump { m, points, out } } => {
            for p in weight_dump(m, points)?.write(&out)? {
                println!("wrote {}", p.display());
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
