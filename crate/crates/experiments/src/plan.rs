//! Experiment plans (JSON, schema version [`PLAN_VERSION`]).

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nlslab_core::data::{plane_wave, power_law, random_band_limited, Gaussian};
use nlslab_core::{Field, Grid};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const PLAN_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Conservation,
    Virial,
    #[serde(rename = "interaction_morawetz_2d")]
    InteractionMorawetz2d,
    L4TimeScaling,
    #[serde(rename = "l6_1d")]
    L61d,
    AlmostConservationSweep,
    CommutatorSweep,
    SymbolScan,
    StrichartzSpotCheck,
    GlobalizationCalc,
}

impl Scenario {
    pub const ALL: [Scenario; 10] = [
        Self::Conservation,
        Self::Virial,
        Self::InteractionMorawetz2d,
        Self::L4TimeScaling,
        Self::L61d,
        Self::AlmostConservationSweep,
        Self::CommutatorSweep,
        Self::SymbolScan,
        Self::StrichartzSpotCheck,
        Self::GlobalizationCalc,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Conservation => "conservation",
            Self::Virial => "virial",
            Self::InteractionMorawetz2d => "interaction_morawetz_2d",
            Self::L4TimeScaling => "l4_time_scaling",
            Self::L61d => "l6_1d",
            Self::AlmostConservationSweep => "almost_conservation_sweep",
            Self::CommutatorSweep => "commutator_sweep",
            Self::SymbolScan => "symbol_scan",
            Self::StrichartzSpotCheck => "strichartz_spot_check",
            Self::GlobalizationCalc => "globalization_calc",
        }
    }

    /// Scenarios that evolve a field and therefore need grid, data and dt.
    pub fn evolves(&self) -> bool {
        !matches!(self, Self::SymbolScan | Self::GlobalizationCalc)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scenario {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .with_context(|| format!("unknown scenario `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    pub length: f64,
    #[serde(default = "two")]
    pub dims: usize,
}

fn two() -> usize {
    2
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid<f64>> {
        Ok(match self.dims {
            1 => Grid::new_1d(self.n, self.length)?,
            2 => Grid::new_2d(self.n, self.length)?,
            d => bail!("grid dimension {d} is not 1 or 2"),
        })
    }
}

/// Initial data descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSpec {
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        velocity: [f64; 2],
        #[serde(default)]
        center: [f64; 2],
        #[serde(default)]
        chirp: f64,
    },
    /// Random phases, `|û| ∝ (1+|ξ|)^-decay` up to `radius`, unit mass.
    PowerLaw { decay: f64, radius: f64 },
    /// Random coefficients up to `radius`, unit mass.
    BandLimited { radius: f64 },
    PlaneWave { amplitude: f64, k: [f64; 2] },
}

impl DataSpec {
    /// Samples the data; `seed` drives the random families only.
    pub fn sample(&self, grid: &Grid<f64>, seed: u64) -> Result<Field<f64>> {
        Ok(match *self {
            Self::Gaussian { amplitude, width, velocity, center, chirp } => Gaussian::new(amplitude, width)
                .with_velocity(velocity)
                .with_center(center)
                .with_chirp(chirp)
                .sample(grid)?,
            Self::PowerLaw { decay, radius } => power_law(grid, decay, radius, seed)?,
            Self::BandLimited { radius } => random_band_limited(grid, radius, seed)?,
            Self::PlaneWave { amplitude, k } => plane_wave(grid, amplitude, k)?,
        })
    }
}

/// How sweep data are normalised before each run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum Calibration {
    /// Use the data as sampled.
    #[default]
    None,
    /// Rescale by `λ` from `calibrate_lambda`, so the box grows by `λ`.
    Lambda,
    /// Scale the amplitude on the fixed grid so that `E(I u0) = target`.
    Amplitude { target: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    #[serde(default = "plan_version")]
    pub version: u32,
    pub scenario: Scenario,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub data: Option<DataSpec>,
    #[serde(default)]
    pub calibration: Calibration,
    #[serde(default)]
    pub dt: Option<f64>,
    /// Final time for scenarios without a T-list.
    #[serde(default)]
    pub t_end: Option<f64>,
    /// Time between stored snapshots.
    #[serde(default)]
    pub snapshot_spacing: Option<f64>,
    #[serde(default)]
    pub n_list: Vec<f64>,
    #[serde(default)]
    pub s_list: Vec<f64>,
    #[serde(default)]
    pub t_list: Vec<f64>,
    /// Weight scale for `ma` and `ma2`; defaults to `balance_m(t_end)`.
    #[serde(default)]
    pub weight_m: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default = "one")]
    pub k: f64,
    #[serde(default = "default_mu0")]
    pub mu0: f64,
    /// Save the stored trajectory of 2D runs under `output/trajectory`.
    #[serde(default)]
    pub archive: bool,
    pub output: PathBuf,
}

fn plan_version() -> u32 {
    PLAN_VERSION
}

fn one() -> f64 {
    1.0
}

fn default_mu0() -> f64 {
    0.1
}

impl ExperimentPlan {
    /// A plan with only the scenario and output set.
    pub fn new(scenario: Scenario, output: impl Into<PathBuf>) -> Self {
        Self {
            version: PLAN_VERSION,
            scenario,
            grid: None,
            data: None,
            calibration: Calibration::None,
            dt: None,
            t_end: None,
            snapshot_spacing: None,
            n_list: Vec::new(),
            s_list: Vec::new(),
            t_list: Vec::new(),
            weight_m: None,
            seed: 0,
            samples: None,
            k: 1.0,
            mu0: 0.1,
            archive: false,
            output: output.into(),
        }
    }

    /// A runnable desk-sized plan for `scenario`, the starting point of `sweep`.
    pub fn template(scenario: Scenario, output: impl Into<PathBuf>) -> Self {
        let mut p = Self::new(scenario, output);
        let gauss = |amplitude, width| DataSpec::Gaussian {
            amplitude,
            width,
            velocity: [0.0, 0.0],
            center: [0.0, 0.0],
            chirp: 0.0,
        };
        if scenario.evolves() {
            p.grid = Some(GridSpec { n: 128, length: 24.0, dims: 2 });
            p.data = Some(gauss(1.5, 1.0));
            p.dt = Some(1e-2);
        }
        match scenario {
            Scenario::Conservation | Scenario::Virial => p.t_end = Some(1.0),
            Scenario::InteractionMorawetz2d | Scenario::L4TimeScaling => {
                p.t_list = vec![1.0, 2.0, 4.0];
                p.n_list = vec![4.0];
                p.s_list = vec![0.45];
            }
            Scenario::L61d => {
                p.grid = Some(GridSpec { n: 1024, length: 200.0, dims: 1 });
                p.t_list = vec![1.0, 2.0, 4.0];
            }
            Scenario::AlmostConservationSweep | Scenario::CommutatorSweep => {
                p.grid = Some(GridSpec { n: 256, length: 1.2, dims: 2 });
                p.data = Some(DataSpec::PowerLaw { decay: 1.5, radius: 60.0 });
                p.calibration = Calibration::Amplitude { target: 0.75 };
                p.dt = Some(1e-3);
                p.t_end = Some(1.0);
                p.n_list = vec![4.0, 8.0, 16.0, 32.0];
                p.s_list = vec![0.45];
            }
            Scenario::SymbolScan => {
                p.n_list = vec![8.0, 32.0];
                p.s_list = vec![0.3, 0.45];
                p.samples = Some(100_000);
            }
            Scenario::StrichartzSpotCheck => {
                p.data = Some(DataSpec::BandLimited { radius: 1.0 });
                p.samples = Some(8);
                p.t_list = vec![1.0];
            }
            Scenario::GlobalizationCalc => {
                p.n_list = (4..=10).map(|j| 2f64.powi(j)).collect();
                p.s_list = vec![0.45, 0.5, 0.75];
                p.t_list = vec![1.0, 2.0, 4.0, 8.0];
            }
        }
        p
    }

    /// Replaces one sweep axis: `N`, `s` or `T`.
    pub fn set_axis(&mut self, axis: &str, values: Vec<f64>) -> Result<()> {
        match axis {
            "N" | "n" => self.n_list = values,
            "s" => self.s_list = values,
            "T" | "t" => self.t_list = values,
            _ => bail!("unknown sweep axis `{axis}` (use N, s or T)"),
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let plan: Self = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        plan.validate()?;
        Ok(plan)
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> Result<String> {
        let bytes = serde_json::to_vec(self)?;
        Ok(hex::encode(Sha256::digest(&bytes)))
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != PLAN_VERSION {
            bail!("plan version {} is not supported (expected {PLAN_VERSION})", self.version);
        }
        let sc = self.scenario;
        let positive = |name: &str, v: f64| -> Result<()> {
            if !(v > 0.0) || !v.is_finite() {
                bail!("{sc}: {name} = {v} must be positive");
            }
            Ok(())
        };
        if sc.evolves() {
            let grid = self.grid.with_context(|| format!("{sc}: `grid` is required"))?;
            grid.build()?;
            let want = if sc == Scenario::L61d { 1 } else { 2 };
            if grid.dims != want {
                bail!("{sc}: needs a {want}D grid, got dims = {}", grid.dims);
            }
            if self.data.is_none() {
                bail!("{sc}: `data` is required");
            }
            if sc != Scenario::StrichartzSpotCheck {
                positive("dt", self.dt.with_context(|| format!("{sc}: `dt` is required"))?)?;
            }
        }
        for &n in &self.n_list {
            positive("N", n)?;
        }
        for &s in &self.s_list {
            if !(s > 0.0 && s <= 1.0) {
                bail!("{sc}: s = {s} must lie in (0, 1]");
            }
        }
        for &t in &self.t_list {
            positive("T", t)?;
        }
        if let Some(t) = self.t_end {
            positive("t_end", t)?;
        }
        if let Some(h) = self.snapshot_spacing {
            positive("snapshot_spacing", h)?;
        }
        if let Some(m) = self.weight_m {
            positive("weight_m", m)?;
        }
        if let Calibration::Amplitude { target } = self.calibration {
            positive("calibration target", target)?;
        }
        positive("K", self.k)?;
        positive("mu0", self.mu0)?;
        let need = |field: &str, ok: bool| -> Result<()> {
            if !ok {
                bail!("{sc}: `{field}` must be nonempty");
            }
            Ok(())
        };
        match sc {
            Scenario::Conservation | Scenario::Virial => {
                positive("t_end", self.t_end.with_context(|| format!("{sc}: `t_end` is required"))?)?;
            }
            Scenario::InteractionMorawetz2d | Scenario::L4TimeScaling => {
                need("t_list", !self.t_list.is_empty())?;
                need("n_list", !self.n_list.is_empty())?;
                need("s_list", !self.s_list.is_empty())?;
            }
            Scenario::L61d => need("t_list", !self.t_list.is_empty())?,
            Scenario::AlmostConservationSweep | Scenario::CommutatorSweep => {
                need("n_list", !self.n_list.is_empty())?;
                need("s_list", !self.s_list.is_empty())?;
                positive("t_end", self.t_end.with_context(|| format!("{sc}: `t_end` is required"))?)?;
            }
            Scenario::SymbolScan => {
                need("n_list", !self.n_list.is_empty())?;
                need("s_list", !self.s_list.is_empty())?;
                if self.samples.unwrap_or(0) == 0 {
                    bail!("{sc}: `samples` must be positive");
                }
            }
            Scenario::StrichartzSpotCheck => {
                if self.samples.unwrap_or(0) == 0 {
                    bail!("{sc}: `samples` must be positive");
                }
                need("t_list", !self.t_list.is_empty())?;
            }
            Scenario::GlobalizationCalc => {
                need("n_list", !self.n_list.is_empty())?;
                need("s_list", !self.s_list.is_empty())?;
                need("t_list", !self.t_list.is_empty())?;
            }
        }
        Ok(())
    }

    pub(crate) fn grid(&self) -> Result<Grid<f64>> {
        self.grid.context("plan has no grid")?.build()
    }

    pub(crate) fn data(&self) -> Result<&DataSpec> {
        self.data.as_ref().context("plan has no data")
    }

    pub(crate) fn dt(&self) -> Result<f64> {
        self.dt.context("plan has no dt")
    }

    /// Largest time the scenario needs.
    pub(crate) fn horizon(&self) -> Result<f64> {
        let t = self.t_list.iter().copied().fold(self.t_end.unwrap_or(0.0), f64::max);
        if t > 0.0 {
            Ok(t)
        } else {
            bail!("{}: no time horizon", self.scenario)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            let json = serde_json::to_string(&s).unwrap();
            assert_eq!(json, format!("\"{}\"", s.name()));
            assert_eq!(s.name().parse::<Scenario>().unwrap(), s);
        }
        assert!("nope".parse::<Scenario>().is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentPlan::new(Scenario::GlobalizationCalc, "out");
        let mut b = a.clone();
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.seed = 1;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
        assert_eq!(a.hash().unwrap().len(), 64);
    }

    #[test]
    fn templates_validate() {
        for s in Scenario::ALL {
            ExperimentPlan::template(s, "out").validate().unwrap();
        }
    }
}
