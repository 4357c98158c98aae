//! JSON scenario configuration shared by all commands.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DistributionState, PhaseGrid, XBoundary};
use crate::init::{init_prepared, init_rectangle, Preparation, Profile};
use crate::solver::{max_stable_dt, ModelParams, RunSettings, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub v_max: f64,
    pub nx: usize,
    pub nv: usize,
}

impl GridConfig {
    pub fn build(&self) -> Result<PhaseGrid> {
        PhaseGrid::new(self.x_min, self.x_max, self.v_max, self.nx, self.nv)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialData {
    Zero,
    Rectangle {
        x_box: (f64, f64),
        v_box: (f64, f64),
        #[serde(default = "one")]
        height: f64,
    },
    /// Near-monokinetic data around `(ρ₀, u₀)` at scale `eps`. In a sweep
    /// `eps` is replaced by each swept value.
    WellPrepared {
        rho0: Profile,
        u0: Profile,
        #[serde(default)]
        eps: Option<f64>,
        #[serde(default)]
        preparation: Preparation,
    },
}

fn one() -> f64 {
    1.0
}

impl InitialData {
    pub fn build(&self, grid: &PhaseGrid, eps_override: Option<f64>) -> Result<DistributionState> {
        match *self {
            InitialData::Zero => Ok(DistributionState::zeros(*grid)),
            InitialData::Rectangle { x_box, v_box, height } => init_rectangle(grid, x_box, v_box, height),
            InitialData::WellPrepared { rho0, u0, eps, preparation } => {
                let eps = eps_override.or(eps).ok_or_else(|| {
                    Error::Config("well_prepared initial data need an eps (or a sweep)".into())
                })?;
                init_prepared(grid, &rho0, &u0, eps, &preparation)
            }
        }
    }

    pub fn macroscopic(&self) -> Option<(Profile, Profile)> {
        match *self {
            InitialData::WellPrepared { rho0, u0, .. } => Some((rho0, u0)),
            _ => None,
        }
    }
}

/// Assertion tolerances; defaults are the acceptance levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub mass_rel: f64,
    pub energy_rel: f64,
    pub w1_slope: (f64, f64),
    pub re_slope: (f64, f64),
    /// Multiple of `Δx` allowed between sticky and finite-volume densities.
    pub euler_w1_dx: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { mass_rel: 1e-8, energy_rel: 1e-3, w1_slope: (0.3, 0.8), re_slope: (0.7, 1.3), euler_w1_dx: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EulerReference {
    #[default]
    Fv,
    Sticky,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub eps_values: Vec<f64>,
    #[serde(default)]
    pub euler_reference: EulerReference,
    #[serde(default = "default_per_cell")]
    pub sticky_per_cell: usize,
    /// Build every initial datum at this fixed scale instead of the swept one,
    /// making the initial mismatch independent of `ε`.
    #[serde(default)]
    pub ill_prepared_eps: Option<f64>,
}

fn default_per_cell() -> usize {
    8
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardConfig {
    pub n_iters: usize,
    /// First index of the trace that must be non-increasing.
    #[serde(default = "two")]
    pub monotone_from: usize,
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareMode {
    /// Grid solver against the particle solver.
    Kinetic,
    /// Finite volumes against sticky particles.
    Euler,
    /// Grid solver against itself.
    SelfCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub mode: CompareMode,
    #[serde(default = "default_particles")]
    pub n_particles: usize,
    /// Bound on the density W1 gap in kinetic mode.
    #[serde(default)]
    pub w1_bound: Option<f64>,
    #[serde(default = "default_per_cell")]
    pub sticky_per_cell: usize,
}

fn default_particles() -> usize {
    100_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub grid: GridConfig,
    #[serde(default)]
    pub boundary: XBoundary,
    pub initial: InitialData,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default)]
    pub eps_reg: Option<f64>,
    #[serde(default)]
    pub eps_scale: Option<f64>,
    #[serde(default)]
    pub moll_width: Option<f64>,
    pub t_final: f64,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_reports")]
    pub n_reports: usize,
    /// Write a snapshot every this many reports; 0 writes only the final state.
    #[serde(default)]
    pub snapshot_every: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub picard: Option<PicardConfig>,
    #[serde(default)]
    pub compare: Option<CompareConfig>,
}

fn default_cfl() -> f64 {
    0.5
}

fn default_reports() -> usize {
    50
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Config(format!("cannot parse config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid.build()?;
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::Config(format!("t_final must be positive, got {}", self.t_final)));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::Config(format!("cfl must lie in (0, 1], got {}", self.cfl)));
        }
        let bound = self.cfl * grid.dx() / grid.v_max;
        if let Some(dt) = self.dt {
            if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
                return Err(Error::Cfl { dt, bound });
            }
        }
        if self.sweep.is_none() {
            self.model(None)?.validate()?;
        }
        Ok(())
    }

    /// Model parameters, with `eps_scale` overridden in a sweep.
    pub fn model(&self, eps_scale: Option<f64>) -> Result<ModelParams> {
        let p = ModelParams {
            variant: self.variant,
            eps_reg: self.eps_reg.unwrap_or(0.0),
            eps_scale: eps_scale.or(self.eps_scale).unwrap_or(0.0),
            moll_width: self.moll_width,
            boundary: self.boundary,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn run_settings(&self, grid: &PhaseGrid) -> Result<RunSettings> {
        let probe = DistributionState::zeros(*grid);
        let dt = self.dt.unwrap_or(self.cfl * max_stable_dt(&probe));
        RunSettings::new(self.t_final, dt, self.n_reports)
    }
}
