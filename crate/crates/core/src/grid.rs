//! Phase-space discretization and the distribution carried on it.
//!
//! Positions live on `[x_min, x_max]`, velocities on `[0, v_max]`. Both axes
//! are split into uniform cells and values are stored as cell averages,
//! x-major: the velocity row of x-cell `i` is `values[i * nv..(i + 1) * nv]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Treatment of the x-boundary during transport and mollification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum XBoundary {
    /// Zero inflow at `x_min`, free outflow at `x_max`.
    #[default]
    FreeFlow,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub v_max: f64,
    pub nx: usize,
    pub nv: usize,
}

#[allow(clippy::len_without_is_empty)]
impl PhaseGrid {
    pub fn new(x_min: f64, x_max: f64, v_max: f64, nx: usize, nv: usize) -> Result<Self> {
        if nx < 2 || nv < 2 {
            return Err(Error::InvalidGrid(format!(
                "cell counts must be at least 2, got nx = {nx}, nv = {nv}"
            )));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need x_max > x_min, got [{x_min}, {x_max}]"
            )));
        }
        if !(v_max > 0.0) || !v_max.is_finite() {
            return Err(Error::InvalidGrid(format!("v_max must be positive, got {v_max}")));
        }
        Ok(Self { x_min, x_max, v_max, nx, nv })
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    #[inline]
    pub fn dv(&self) -> f64 {
        self.v_max / self.nv as f64
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    #[inline]
    pub fn v(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dv()
    }

    pub fn x_centers(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn v_centers(&self) -> Vec<f64> {
        (0..self.nv).map(|j| self.v(j)).collect()
    }

    pub fn x_edges(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..=self.nx).map(|i| self.x_min + i as f64 * dx).collect()
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dv()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nx * self.nv
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    /// Index of the x-cell containing `x`, if any.
    pub fn x_cell(&self, x: f64) -> Option<usize> {
        if x < self.x_min || x >= self.x_max {
            return None;
        }
        Some((((x - self.x_min) / self.dx()) as usize).min(self.nx - 1))
    }
}

/// Cell-averaged vehicle distribution `f(x, v)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionState {
    pub grid: PhaseGrid,
    pub values: Vec<f64>,
    pub t: f64,
}

impl DistributionState {
    pub fn zeros(grid: PhaseGrid) -> Self {
        Self { grid, values: vec![0.0; grid.len()], t: 0.0 }
    }

    pub fn from_values(grid: PhaseGrid, values: Vec<f64>, t: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInitialData(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidInitialData(format!(
                "values must be finite and nonnegative, found {bad}"
            )));
        }
        Ok(Self { grid, values, t })
    }

    /// Build a state by evaluating `f` at every cell center.
    pub fn from_fn(grid: PhaseGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nx {
            let x = grid.x(i);
            for j in 0..grid.nv {
                values.push(f(x, grid.v(j)));
            }
        }
        Self::from_values(grid, values, 0.0)
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let nv = self.grid.nv;
        &self.values[i * nv..(i + 1) * nv]
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, &b| a.max(b))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Sup-norm distance between two states on the same grid.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |a, (p, q)| a.max((p - q).abs()))
    }
}
