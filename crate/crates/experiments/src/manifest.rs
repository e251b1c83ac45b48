//! Run manifests.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Result;
use serde::{Deserialize, Serialize};

use crate::plan::ExperimentPlan;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub plan_hash: String,
    pub code_version: String,
    pub seed: u64,
    /// Littlewood-Paley bump and I-multiplier transition.
    pub bump: String,
    /// Construction of the Morawetz weight.
    pub bridge: String,
    pub started_unix: u64,
    pub finished_unix: Option<u64>,
    pub plan: ExperimentPlan,
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub const BUMP: &str = "eta = 1 - step(r - 1) with step(t) = e^(-1/t) / (e^(-1/t) + e^(-1/(1-t))); \
                        m_(N,s) = 1 below N, (r/N)^(s-1) above 2N, blended by step((r - N)/N)";

/// Generic weight description used when a run builds no weight.
pub const BRIDGE: &str = "f = r^2 (1 - ln(r/M)) / (2M) up to M/sqrt(e), quintic Hermite bridge, 100 r - c outside";

impl RunManifest {
    pub fn new(plan: &ExperimentPlan, bridge: Option<String>) -> Result<Self> {
        Ok(Self {
            plan_hash: plan.hash()?,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: plan.seed,
            bump: BUMP.into(),
            bridge: bridge.unwrap_or_else(|| BRIDGE.into()),
            started_unix: unix_now(),
            finished_unix: None,
            plan: plan.clone(),
        })
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(MANIFEST_FILE), serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn finish(&mut self, dir: &Path) -> Result<()> {
        self.finished_unix = Some(unix_now());
        self.write(dir)
    }
}
