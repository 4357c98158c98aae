//! One-dimensional Wasserstein-1 distance `∫ |F₁ − F₂| dx`.
//!
//! Both measures are normalized to unit mass. Each CDF is piecewise linear
//! with jumps at atoms, so on every interval of the merged breakpoint set
//! the difference is linear and its absolute value integrates exactly.

use crate::error::{Error, Result};

/// Normalized CDF: right-limit values and slopes at sorted breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure1d {
    breaks: Vec<f64>,
    value: Vec<f64>,
    slope: Vec<f64>,
    mass: f64,
}

impl Measure1d {
    /// Point masses `w_k` at `x_k` (any order, repeats allowed).
    pub fn atoms(x: &[f64], w: &[f64]) -> Result<Self> {
        if x.len() != w.len() {
            return Err(Error::Metric("atom positions and weights differ in length".into()));
        }
        if w.iter().any(|&v| !(v >= 0.0)) || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Metric("atoms need finite positions and nonnegative weights".into()));
        }
        let mass: f64 = w.iter().sum();
        if !(mass > 0.0) {
            return Err(Error::Metric("zero-mass measure".into()));
        }
        let mut idx: Vec<usize> = (0..x.len()).filter(|&k| w[k] > 0.0).collect();
        idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
        let mut breaks = Vec::with_capacity(idx.len());
        let mut value = Vec::with_capacity(idx.len());
        let mut cum = 0.0;
        for k in idx {
            cum += w[k];
            if breaks.last() == Some(&x[k]) {
                *value.last_mut().unwrap() = cum / mass;
            } else {
                breaks.push(x[k]);
                value.push(cum / mass);
            }
        }
        let slope = vec![0.0; breaks.len()];
        Ok(Self { breaks, value, slope, mass })
    }

    /// Piecewise-constant density on cells `[x0 + i dx, x0 + (i+1) dx)`.
    pub fn histogram(x0: f64, dx: f64, density: &[f64]) -> Result<Self> {
        if !(dx > 0.0) || density.iter().any(|&v| !(v >= 0.0)) {
            return Err(Error::Metric("histogram needs dx > 0 and nonnegative densities".into()));
        }
        let mass: f64 = density.iter().sum::<f64>() * dx;
        if !(mass > 0.0) {
            return Err(Error::Metric("zero-mass measure".into()));
        }
        let n = density.len();
        let mut breaks = Vec::with_capacity(n + 1);
        let mut value = Vec::with_capacity(n + 1);
        let mut slope = Vec::with_capacity(n + 1);
        let mut cum = 0.0;
        for (i, &d) in density.iter().enumerate() {
            breaks.push(x0 + i as f64 * dx);
            value.push(cum / mass);
            slope.push(d / mass);
            cum += d * dx;
        }
        breaks.push(x0 + n as f64 * dx);
        value.push(1.0);
        slope.push(0.0);
        Ok(Self { breaks, value, slope, mass })
    }

    /// Total mass before normalization.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `F(x+)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.breaks.partition_point(|&b| b <= x);
        if k == 0 {
            0.0
        } else {
            (self.value[k - 1] + self.slope[k - 1] * (x - self.breaks[k - 1])).min(1.0)
        }
    }

    /// `F` on `[a, b)` as `(F(a+), F(b−))`, valid when no breakpoint lies in `(a, b)`.
    fn ends(&self, a: f64, b: f64) -> (f64, f64) {
        let k = self.breaks.partition_point(|&p| p <= a);
        if k == 0 {
            return (0.0, 0.0);
        }
        let (v, s, p) = (self.value[k - 1], self.slope[k - 1], self.breaks[k - 1]);
        (v + s * (a - p), v + s * (b - p))
    }
}

/// `∫ |d|` for `d` linear on an interval of length `h` with end values `da`, `db`.
fn abs_linear_integral(da: f64, db: f64, h: f64) -> f64 {
    if da * db >= 0.0 {
        0.5 * (da.abs() + db.abs()) * h
    } else {
        0.5 * (da * da + db * db) / (da.abs() + db.abs()) * h
    }
}

pub fn wasserstein1_1d(a: &Measure1d, b: &Measure1d) -> Result<f64> {
    let mut pts: Vec<f64> = a.breaks.iter().chain(&b.breaks).copied().collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut total = 0.0;
    for w in pts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let (a0, a1) = a.ends(lo, hi);
        let (b0, b1) = b.ends(lo, hi);
        total += abs_linear_integral(a0 - b0, a1 - b1, hi - lo);
    }
    Ok(total)
}
