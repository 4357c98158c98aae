//! First-order finite volumes with kinetic flux-vector splitting,
//! `F = U_L max(u_L, 0) + U_R min(u_R, 0)` for `U = (ρ, m)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::LineGrid;
use crate::error::{Error, Result};
use crate::grid::XBoundary;
use crate::init::Profile;
use crate::moments::VACUUM_FLOOR_REL;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FvState {
    pub grid: LineGrid,
    pub rho: Vec<f64>,
    pub m: Vec<f64>,
    pub t: f64,
    /// End of the smooth window, the crossing time of the initial velocity.
    pub window_end: f64,
    /// Set once `t` passes `window_end` or a compressive jump concentrates in
    /// a single cell; the solution is no longer trusted from then on.
    pub shock_detected: bool,
}

impl FvState {
    pub fn from_profiles(rho0: &Profile, u0: &Profile, grid: &LineGrid) -> Result<Self> {
        let dx = grid.dx();
        let mut rho = Vec::with_capacity(grid.nx);
        let mut m = Vec::with_capacity(grid.nx);
        for i in 0..grid.nx {
            let a = grid.x_min + i as f64 * dx;
            let r = rho0.cell_average(a, a + dx);
            if r < 0.0 {
                return Err(Error::InvalidInitialData(format!("rho0 negative near x = {}", grid.x(i))));
            }
            rho.push(r);
            m.push(r * u0.eval(grid.x(i)));
        }
        let window_end = super::crossing_time(u0, grid.x_min, grid.x_max);
        Ok(Self { grid: *grid, rho, m, t: 0.0, window_end, shock_detected: false })
    }

    fn floor(&self) -> f64 {
        VACUUM_FLOOR_REL * self.total_mass() / self.grid.length()
    }

    /// `m / ρ` above the vacuum floor, 0 below.
    pub fn velocity(&self) -> Vec<f64> {
        let floor = self.floor();
        self.rho.iter().zip(&self.m).map(|(&r, &m)| if r > floor { m / r } else { 0.0 }).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.grid.dx()
    }

    pub fn total_momentum(&self) -> f64 {
        self.m.iter().sum::<f64>() * self.grid.dx()
    }

    fn steepened(&self, u: &[f64]) -> bool {
        let occupied: Vec<usize> = (0..u.len()).filter(|&i| self.rho[i] > self.floor()).collect();
        if occupied.len() < 2 {
            return false;
        }
        let (lo, hi) = occupied.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &i| (a.min(u[i]), b.max(u[i])));
        let range = hi - lo;
        if range <= 0.0 {
            return false;
        }
        let jump = occupied.windows(2).filter(|w| w[1] == w[0] + 1).map(|w| u[w[0]] - u[w[1]]).fold(0.0, f64::max);
        jump > 0.5 * range
    }

    fn step(&mut self, dt: f64) {
        let n = self.grid.nx;
        let lam = dt / self.grid.dx();
        let u = self.velocity();
        let periodic = self.grid.boundary == XBoundary::Periodic;
        // interface k sits between cells k-1 and k, k = 0..=n
        let cell = |k: isize| -> (f64, f64, f64) {
            if (0..n as isize).contains(&k) {
                let i = k as usize;
                (self.rho[i], self.m[i], u[i])
            } else if periodic {
                let i = k.rem_euclid(n as isize) as usize;
                (self.rho[i], self.m[i], u[i])
            } else if k < 0 {
                (0.0, 0.0, 0.0)
            } else {
                (self.rho[n - 1], self.m[n - 1], u[n - 1])
            }
        };
        let flux: Vec<(f64, f64)> = (0..=n as isize)
            .into_par_iter()
            .map(|k| {
                let (rl, ml, ul) = cell(k - 1);
                let (rr, mr, ur) = cell(k);
                let (pl, nr) = (ul.max(0.0), ur.min(0.0));
                (rl * pl + rr * nr, ml * pl + mr * nr)
            })
            .collect();
        self.rho.par_iter_mut().zip(self.m.par_iter_mut()).enumerate().for_each(|(i, (r, m))| {
            *r -= lam * (flux[i + 1].0 - flux[i].0);
            *m -= lam * (flux[i + 1].1 - flux[i].1);
            if *r <= 0.0 {
                // roundoff below zero in vacuum
                *r = r.max(0.0);
                *m = 0.0;
            }
        });
        self.t += dt;
        if !self.shock_detected {
            let u = self.velocity();
            self.shock_detected = self.t > self.window_end || self.steepened(&u);
        }
    }
}

/// Evolve `(ρ₀, u₀)` on `grid` and return the states at `times`.
pub fn fv_run(rho0: &Profile, u0: &Profile, grid: &LineGrid, times: &[f64], cfl: f64) -> Result<Vec<FvState>> {
    if !(cfl > 0.0 && cfl <= 1.0) {
        return Err(Error::Config(format!("cfl must lie in (0, 1], got {cfl}")));
    }
    if times.windows(2).any(|w| w[1] < w[0]) || times.iter().any(|&t| t < 0.0) {
        return Err(Error::Config("snapshot times must be nonnegative and nondecreasing".into()));
    }
    let mut s = FvState::from_profiles(rho0, u0, grid)?;
    let dx = grid.dx();
    let mut out = Vec::with_capacity(times.len());
    for &ts in times {
        while s.t < ts * (1.0 - 1e-14) {
            let umax = s.velocity().iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
            let mut dt = ts - s.t;
            if umax > 0.0 {
                dt = dt.min(cfl * dx / umax);
            }
            s.step(dt);
            if s.rho.iter().chain(&s.m).any(|v| !v.is_finite()) {
                return Err(Error::Numerical { t: s.t, detail: "non-finite finite-volume state".into() });
            }
        }
        s.t = ts;
        out.push(s.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::sticky::{sticky_run, StickyParticles};
    use crate::metrics::wasserstein::{wasserstein1_1d, Measure1d};

    fn sine(mean: f64, amplitude: f64) -> Profile {
        Profile::Sine { mean, amplitude, period: 1.0, phase: 0.0 }
    }

    #[test]
    fn uniform_state_is_stationary() {
        let g = LineGrid::new(0.0, 1.0, 32, XBoundary::Periodic).unwrap();
        let c = Profile::Constant { value: 1.0 };
        let out = fv_run(&c, &c, &g, &[0.3], 0.5).unwrap();
        assert!(out[0].rho.iter().all(|&r| (r - 1.0).abs() < 1e-14));
        assert!(out[0].m.iter().all(|&m| (m - 1.0).abs() < 1e-14));
    }

    #[test]
    fn periodic_totals_are_conserved() {
        let g = LineGrid::new(0.0, 1.0, 128, XBoundary::Periodic).unwrap();
        let (r0, u0) = (sine(1.0, 0.2), sine(1.0, 0.1));
        let out = fv_run(&r0, &u0, &g, &[0.0, 0.2], 0.5).unwrap();
        let (m0, p0) = (out[0].total_mass(), out[0].total_momentum());
        assert!(((out[1].total_mass() - m0) / m0).abs() < 1e-10);
        assert!(((out[1].total_momentum() - p0) / p0).abs() < 1e-10);
        assert!(!out[1].shock_detected);
    }

    #[test]
    fn smooth_window_agrees_with_sticky_particles() {
        let g = LineGrid::new(0.0, 1.0, 128, XBoundary::Periodic).unwrap();
        let (r0, u0) = (sine(1.0, 0.2), sine(1.0, 0.1));
        let fv = fv_run(&r0, &u0, &g, &[0.2], 0.5).unwrap();
        let p = StickyParticles::from_profiles(&r0, &u0, &g, 8).unwrap();
        let st = sticky_run(&p, &g, &[0.2]).unwrap();
        let a = Measure1d::histogram(g.x_min, g.dx(), &fv[0].rho).unwrap();
        let b = Measure1d::atoms(&st[0].x, &st[0].m).unwrap();
        let w = wasserstein1_1d(&a, &b).unwrap();
        assert!(w <= 2.0 * g.dx(), "W1 = {w}");
    }

    #[test]
    fn crossing_data_raise_the_shock_flag() {
        let g = LineGrid::new(0.0, 1.0, 128, XBoundary::Periodic).unwrap();
        let (r0, u0) = (Profile::Constant { value: 1.0 }, sine(1.0, 0.5));
        let tc = crate::euler::crossing_time(&u0, 0.0, 1.0);
        let out = fv_run(&r0, &u0, &g, &[0.5 * tc, 3.0 * tc], 0.5).unwrap();
        assert!(!out[0].shock_detected);
        assert!(out[1].shock_detected);
    }
}
