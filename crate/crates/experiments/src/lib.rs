//! Scenario harness for nlslab: experiment plans, sweeps, slope fits,
//! result tables and the acceptance suites behind the `nlslab` binary.

pub mod acceptance;
pub mod diagnostics;
pub mod fit;
pub mod globalization;
pub mod manifest;
pub mod plan;
pub mod report;
pub mod scenarios;

pub use fit::{fit_loglog_slope, SlopeFit};
pub use plan::{Calibration, DataSpec, ExperimentPlan, GridSpec, Scenario};
pub use report::{Cell, ResultTable};

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "NLSLAB_THREADS";

/// Sizes the global rayon pool from `NLSLAB_THREADS` (if set). Safe to call
/// more than once; later calls are no-ops.
pub fn configure_threads() -> anyhow::Result<Option<usize>> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| anyhow::anyhow!("{THREADS_ENV} = `{v}` is not a positive integer"))?;
    if n == 0 {
        anyhow::bail!("{THREADS_ENV} must be at least 1");
    }
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(Some(n))
}
