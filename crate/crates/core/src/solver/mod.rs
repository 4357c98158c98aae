//! Time integration of the kinetic equation on the phase grid.
//!
//! One step is a Strang splitting: half a step of free transport in x, a full
//! step of the local velocity dynamics with coefficients frozen per x-cell,
//! and another half step of transport.

pub mod checks;
mod local;
pub mod particles;
pub mod picard;
mod transport;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{diagnostics, DiagnosticsReport};
use crate::error::{Error, Result};
use crate::grid::{DistributionState, XBoundary};
use crate::moments::{compute_moments, MacroFields};
use crate::mollifier::MollifierSpec;
use crate::operators::mollified_velocity;

pub use local::LocalCoefficients;

/// Which form of the collision operator drives the velocity dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `∂_t f + v ∂_x f = Q_r(f) + Q_i(f)`
    #[default]
    Unscaled,
    /// Mollified relaxation target and damped interaction, parameter `eps_reg`.
    Regularized,
    /// Collision operator multiplied by `1 / eps_scale`.
    Scaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub variant: Variant,
    #[serde(default)]
    pub eps_reg: f64,
    #[serde(default)]
    pub eps_scale: f64,
    /// Mollifier width for the regularized variant; defaults to `eps_reg`.
    #[serde(default)]
    pub moll_width: Option<f64>,
    #[serde(default)]
    pub boundary: XBoundary,
}

impl ModelParams {
    pub fn unscaled(boundary: XBoundary) -> Self {
        Self { variant: Variant::Unscaled, eps_reg: 0.0, eps_scale: 0.0, moll_width: None, boundary }
    }

    pub fn regularized(eps_reg: f64, boundary: XBoundary) -> Self {
        Self { variant: Variant::Regularized, eps_reg, eps_scale: 0.0, moll_width: None, boundary }
    }

    pub fn scaled(eps_scale: f64, boundary: XBoundary) -> Self {
        Self { variant: Variant::Scaled, eps_reg: 0.0, eps_scale, moll_width: None, boundary }
    }

    pub fn validate(&self) -> Result<()> {
        match self.variant {
            Variant::Unscaled => {}
            Variant::Regularized => {
                if !(self.eps_reg > 0.0) {
                    return Err(Error::Config(format!("regularized variant needs eps_reg > 0, got {}", self.eps_reg)));
                }
                if let Some(w) = self.moll_width {
                    if !(w > 0.0) {
                        return Err(Error::Config(format!("moll_width must be positive, got {w}")));
                    }
                }
            }
            Variant::Scaled => {
                if !(self.eps_scale > 0.0) {
                    return Err(Error::Config(format!(
                        "scaled variant needs eps_scale > 0, got {}",
                        self.eps_scale
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn kappa(&self) -> f64 {
        match self.variant {
            Variant::Scaled => 1.0 / self.eps_scale,
            _ => 1.0,
        }
    }

    pub fn mollifier(&self) -> MollifierSpec {
        MollifierSpec::new(self.moll_width.unwrap_or(self.eps_reg))
    }
}

/// Frozen local coefficients for every x-cell of `f`.
pub fn local_coefficients(f: &DistributionState, params: &ModelParams) -> Vec<LocalCoefficients> {
    let mf = compute_moments(f);
    coefficients_from_moments(&mf, f.grid.dx(), params)
}

fn coefficients_from_moments(mf: &MacroFields, dx: f64, params: &ModelParams) -> Vec<LocalCoefficients> {
    let kappa = params.kappa();
    match params.variant {
        Variant::Unscaled | Variant::Scaled => (0..mf.len())
            .map(|i| {
                if mf.vacuum[i] {
                    LocalCoefficients::IDLE
                } else {
                    let (rho, u) = (mf.rho[i], mf.velocity[i]);
                    LocalCoefficients { drift: u, rho, u, denom: 1.0, kappa }
                }
            })
            .collect(),
        Variant::Regularized => {
            let drift = mollified_velocity(mf, &params.mollifier(), params.eps_reg, dx, params.boundary);
            (0..mf.len())
                .map(|i| {
                    // the drift acts in vacuum too; the interaction does not
                    let (rho, u) = if mf.vacuum[i] { (0.0, 0.0) } else { (mf.rho[i], mf.velocity[i]) };
                    LocalCoefficients {
                        drift: drift[i],
                        rho,
                        u,
                        denom: 1.0 + params.eps_reg * rho * (1.0 + u),
                        kappa,
                    }
                })
                .collect()
        }
    }
}

/// Largest stable time step of the upwind transport, `dx / v_max`.
pub fn max_stable_dt(f: &DistributionState) -> f64 {
    f.grid.dx() / f.grid.v_max
}

/// Strang step with coefficients supplied by `coeffs`, which sees the state
/// after the first transport half step. Returns the coefficients used.
pub(crate) fn strang_step_with(
    f: &mut DistributionState,
    dt: f64,
    boundary: XBoundary,
    conserve: bool,
    coeffs: impl FnOnce(&DistributionState) -> Vec<LocalCoefficients>,
) -> Vec<LocalCoefficients> {
    transport::transport(f, 0.5 * dt, boundary);
    let c = coeffs(f);
    let nv = f.grid.nv;
    let dv = f.grid.dv();
    f.values.par_chunks_mut(nv).zip(c.par_iter()).for_each_init(
        || vec![0.0; nv],
        |scratch, (row, ci)| local::local_step(row, scratch, ci, dt, dv, conserve),
    );
    transport::transport(f, 0.5 * dt, boundary);
    f.t += dt;
    c
}

fn ensure_finite(before: &DistributionState, after: &DistributionState) -> Result<()> {
    if let Some(k) = after.values.iter().position(|v| !v.is_finite()) {
        let (i, j) = (k / after.grid.nv, k % after.grid.nv);
        return Err(Error::Numerical {
            t: after.t,
            detail: format!(
                "non-finite value at cell (i = {i}, j = {j}); last finite state: {}",
                diagnostics(before).csv_row()
            ),
        });
    }
    Ok(())
}

/// Advance `f` by one step of size `dt`.
pub fn step(f: &DistributionState, dt: f64, params: &ModelParams) -> Result<DistributionState> {
    let bound = max_stable_dt(f);
    if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt, bound });
    }
    let mut next = f.clone();
    strang_step_with(&mut next, dt, params.boundary, true, |g| local_coefficients(g, params));
    ensure_finite(f, &next)?;
    Ok(next)
}

/// Time horizon and reporting cadence of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub t_final: f64,
    pub n_steps: usize,
    /// Number of reports after the initial one; clamped to `n_steps`.
    pub n_reports: usize,
}

impl RunSettings {
    /// Uniform steps no longer than `dt_max` reaching `t_final` exactly.
    pub fn new(t_final: f64, dt_max: f64, n_reports: usize) -> Result<Self> {
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::Config(format!("t_final must be positive, got {t_final}")));
        }
        if !(dt_max > 0.0) {
            return Err(Error::Config(format!("time step must be positive, got {dt_max}")));
        }
        let n_steps = ((t_final / dt_max) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        Ok(Self { t_final, n_steps, n_reports: n_reports.max(1) })
    }

    pub fn dt(&self) -> f64 {
        self.t_final / self.n_steps as f64
    }

    /// Step indices (1-based, after the step) at which reports are taken.
    pub fn report_steps(&self) -> Vec<usize> {
        let k = self.n_reports.min(self.n_steps);
        let mut out: Vec<usize> =
            (1..=k).map(|r| ((r as f64 * self.n_steps as f64 / k as f64).round() as usize).max(1)).collect();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub final_state: DistributionState,
    /// Initial report followed by one per reporting time.
    pub reports: Vec<DiagnosticsReport>,
}

pub fn run(f0: &DistributionState, params: &ModelParams, settings: &RunSettings) -> Result<RunOutput> {
    run_with_observer(f0, params, settings, |_| Ok(()))
}

/// Like [`run`], calling `observer` on the initial state and at every
/// reporting time.
pub fn run_with_observer(
    f0: &DistributionState,
    params: &ModelParams,
    settings: &RunSettings,
    mut observer: impl FnMut(&DistributionState) -> Result<()>,
) -> Result<RunOutput> {
    params.validate()?;
    let dt = settings.dt();
    let mut f = f0.clone();
    let mut reports = vec![diagnostics(&f)];
    observer(&f)?;
    let report_at = settings.report_steps();
    let mut next_report = 0;
    for n in 1..=settings.n_steps {
        f = step(&f, dt, params)?;
        if next_report < report_at.len() && report_at[next_report] == n {
            if n == settings.n_steps {
                f.t = settings.t_final;
            }
            reports.push(diagnostics(&f));
            observer(&f)?;
            next_report += 1;
        }
    }
    f.t = settings.t_final;
    Ok(RunOutput { final_state: f, reports })
}
