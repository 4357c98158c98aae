//! Pressureless Euler system `∂_t ρ + ∂_x(ρu) = 0`, `∂_t(ρu) + ∂_x(ρu²) = 0`.
//!
//! Two independent solvers: event-driven sticky particles and a first-order
//! finite-volume scheme for the smooth window before characteristics cross.

pub mod fv;
pub mod sticky;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::XBoundary;
use crate::init::Profile;

pub use fv::{fv_run, FvState};
pub use sticky::{sticky_run, StickyParticles};

/// Uniform grid on `[x_min, x_max]` with `nx` cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    #[serde(default)]
    pub boundary: XBoundary,
}

impl LineGrid {
    pub fn new(x_min: f64, x_max: f64, nx: usize, boundary: XBoundary) -> Result<Self> {
        if nx < 2 || !(x_max > x_min) {
            return Err(Error::InvalidGrid(format!("line grid needs nx >= 2 and x_max > x_min, got {nx}, [{x_min}, {x_max}]")));
        }
        Ok(Self { x_min, x_max, nx, boundary })
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    pub fn x_centers(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }
}

/// Solution carrier of either solver at one time.
#[derive(Debug, Clone, PartialEq)]
pub enum EulerState {
    Sticky(StickyParticles),
    Fv(FvState),
}

impl EulerState {
    pub fn t(&self) -> f64 {
        match self {
            EulerState::Sticky(p) => p.t,
            EulerState::Fv(s) => s.t,
        }
    }

    /// Cell density and velocity on `grid`.
    pub fn on_grid(&self, grid: &LineGrid) -> (Vec<f64>, Vec<f64>) {
        match self {
            EulerState::Sticky(p) => p.on_grid(grid),
            EulerState::Fv(s) => {
                debug_assert_eq!(s.grid.nx, grid.nx);
                (s.rho.clone(), s.velocity())
            }
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            EulerState::Sticky(p) => p.m.iter().sum(),
            EulerState::Fv(s) => s.total_mass(),
        }
    }

    pub fn total_momentum(&self) -> f64 {
        match self {
            EulerState::Sticky(p) => p.m.iter().zip(&p.v).map(|(m, v)| m * v).sum(),
            EulerState::Fv(s) => s.total_momentum(),
        }
    }
}

/// First time characteristics of `u₀` cross, `1 / max(−u₀′)`, sampled on
/// `[x_min, x_max]`; infinite if `u₀` is nondecreasing.
pub fn crossing_time(u0: &Profile, x_min: f64, x_max: f64) -> f64 {
    let n = 20_000;
    let h = (x_max - x_min) / n as f64;
    let worst = (0..=n).map(|k| -u0.derivative(x_min + k as f64 * h)).fold(0.0_f64, f64::max);
    if worst > 0.0 {
        1.0 / worst
    } else {
        f64::INFINITY
    }
}
