//! Weighted-particle solver built on the characteristic formulation.
//!
//! Particles move with `dX/ds = V`, relax with `dV/ds = κ(ū(X) − V)` and carry
//! masses obeying `dw/ds = κ ρ(X)(u(X) − V) w / D`. The fields are
//! reconstructed from the particles by cloud-in-cell deposition followed by
//! mollification of width at least two cells.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{LocalCoefficients, ModelParams, RunSettings, Variant};
use crate::diagnostics::{diagnostics, DiagnosticsReport};
use crate::error::{Error, Result};
use crate::grid::{DistributionState, PhaseGrid, XBoundary};
use crate::moments::{vacuum_floor, MacroFields};
use crate::mollifier::{mollify, MollifierSpec};
use crate::operators::mollified_velocity;

/// Particles per deposition chunk; fixed so results do not depend on the
/// number of worker threads.
const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleEnsemble {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub t: f64,
}

impl ParticleEnsemble {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.w.iter().sum()
    }

    /// Stratified sample of `f0`: systematic sampling of the cell masses with
    /// one random offset, then a uniform position inside each chosen cell.
    pub fn sample(f0: &DistributionState, n: usize, rng: &mut ChaCha8Rng) -> Result<Self> {
        let g = &f0.grid;
        let mass = f0.mass();
        if n == 0 {
            return Err(Error::Config("particle count must be positive".into()));
        }
        if !(mass > 0.0) {
            return Ok(Self { x: vec![], v: vec![], w: vec![], t: f0.t });
        }
        let area = g.cell_area();
        let (dx, dv) = (g.dx(), g.dv());
        let w = mass / n as f64;
        let offset: f64 = rng.gen();
        let mut x = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        let mut cum = 0.0;
        let mut next = offset;
        for (k, &val) in f0.values.iter().enumerate() {
            cum += val * area / w;
            while next < cum && x.len() < n {
                let (i, j) = (k / g.nv, k % g.nv);
                x.push(g.x_min + (i as f64 + rng.gen::<f64>()) * dx);
                v.push((j as f64 + rng.gen::<f64>()) * dv);
                next += 1.0;
            }
        }
        let count = x.len();
        Ok(Self { x, v, w: vec![mass / count as f64; count], t: f0.t })
    }

    /// Nearest-cell histogram of the particles on `grid`; particles outside
    /// the grid are dropped.
    pub fn to_state(&self, grid: &PhaseGrid) -> DistributionState {
        let mut f = DistributionState::zeros(*grid);
        let area = grid.cell_area();
        let dv = grid.dv();
        for k in 0..self.len() {
            let Some(i) = grid.x_cell(self.x[k]) else { continue };
            let j = (self.v[k] / dv) as usize;
            if self.v[k] < 0.0 || j >= grid.nv {
                continue;
            }
            f.values[grid.index(i, j)] += self.w[k] / area;
        }
        f.t = self.t;
        f
    }
}

/// Linear-interpolation stencil at `x` on the cell centers: `(i0, i1, θ)`
/// with weight `1 − θ` on `i0`. Indices are `None` off a free-flow grid.
fn cic(grid: &PhaseGrid, boundary: XBoundary, x: f64) -> (Option<usize>, Option<usize>, f64) {
    let s = (x - grid.x_min) / grid.dx() - 0.5;
    let lo = s.floor();
    let theta = s - lo;
    let n = grid.nx as i64;
    let wrap = |k: i64| -> Option<usize> {
        match boundary {
            XBoundary::Periodic => Some(k.rem_euclid(n) as usize),
            XBoundary::FreeFlow => (0..n).contains(&k).then_some(k as usize),
        }
    };
    (wrap(lo as i64), wrap(lo as i64 + 1), theta)
}

fn interpolate(field: &[f64], stencil: (Option<usize>, Option<usize>, f64)) -> f64 {
    let (a, b, th) = stencil;
    a.map_or(0.0, |i| (1.0 - th) * field[i]) + b.map_or(0.0, |i| th * field[i])
}

/// Cloud-in-cell deposition of `(ρ, m)`, summed chunk by chunk in a fixed order.
fn deposit(p: &ParticleEnsemble, grid: &PhaseGrid, boundary: XBoundary) -> (Vec<f64>, Vec<f64>) {
    let nx = grid.nx;
    let dx = grid.dx();
    let partials: Vec<Vec<f64>> = p
        .x
        .par_chunks(CHUNK)
        .zip(p.v.par_chunks(CHUNK))
        .zip(p.w.par_chunks(CHUNK))
        .map(|((xs, vs), ws)| {
            let mut acc = vec![0.0; 2 * nx];
            for ((&x, &v), &w) in xs.iter().zip(vs).zip(ws) {
                let (a, b, th) = cic(grid, boundary, x);
                if let Some(i) = a {
                    acc[i] += (1.0 - th) * w;
                    acc[nx + i] += (1.0 - th) * w * v;
                }
                if let Some(i) = b {
                    acc[i] += th * w;
                    acc[nx + i] += th * w * v;
                }
            }
            acc
        })
        .collect();
    let mut rho = vec![0.0; nx];
    let mut m = vec![0.0; nx];
    for acc in &partials {
        for i in 0..nx {
            rho[i] += acc[i] / dx;
            m[i] += acc[nx + i] / dx;
        }
    }
    (rho, m)
}

/// Smoothed `(ρ, u, ū)` on the x-grid: mollified density, mollified velocity
/// for the interaction, and the relaxation target.
fn reconstruct(
    rho: &[f64],
    m: &[f64],
    grid: &PhaseGrid,
    params: &ModelParams,
    moll: &MollifierSpec,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let dx = grid.dx();
    let mass: f64 = rho.iter().sum::<f64>() * dx;
    let fields = MacroFields {
        rho: rho.to_vec(),
        momentum: m.to_vec(),
        velocity: vec![0.0; rho.len()],
        energy_density: vec![0.0; rho.len()],
        vacuum: vec![false; rho.len()],
        floor: vacuum_floor(mass, grid.length()),
    };
    let rho_s = mollify(rho, moll, dx, params.boundary);
    let u_s = mollified_velocity(&fields, moll, 0.0, dx, params.boundary);
    let drift = match params.variant {
        Variant::Regularized => mollified_velocity(&fields, moll, params.eps_reg, dx, params.boundary),
        _ => u_s.clone(),
    };
    (rho_s, u_s, drift)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleSettings {
    pub n_particles: usize,
    pub seed: u64,
    /// Mollifier width for the field reconstruction; raised to `2 Δx` if smaller.
    pub moll_width: Option<f64>,
    /// When false, masses are frozen and only the relaxation acts.
    pub interaction: bool,
}

impl ParticleSettings {
    pub fn new(n_particles: usize, seed: u64) -> Self {
        Self { n_particles, seed, moll_width: None, interaction: true }
    }
}

#[derive(Debug, Clone)]
pub struct ParticleRun {
    pub final_ensemble: ParticleEnsemble,
    /// Diagnostics of the particle histogram at the reporting times.
    pub reports: Vec<DiagnosticsReport>,
}

pub fn particle_run(
    f0: &DistributionState,
    params: &ModelParams,
    run: &RunSettings,
    opts: &ParticleSettings,
) -> Result<ParticleRun> {
    params.validate()?;
    if opts.n_particles < 1000 {
        return Err(Error::Config(format!("need at least 1000 particles, got {}", opts.n_particles)));
    }
    let grid = f0.grid;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut p = ParticleEnsemble::sample(f0, opts.n_particles, &mut rng)?;
    let mass0 = p.total_weight();
    let width = opts.moll_width.or(params.moll_width).unwrap_or(params.eps_reg).max(2.0 * grid.dx());
    let moll = MollifierSpec::new(width);
    let kappa = params.kappa();
    let dt = run.dt();
    let mut reports = vec![diagnostics(&p.to_state(&grid))];
    let report_at = run.report_steps();
    let mut next_report = 0;
    for n in 1..=run.n_steps {
        p.x.par_iter_mut().zip(p.v.par_iter()).for_each(|(x, &v)| *x += 0.5 * dt * v);
        let (rho, m) = deposit(&p, &grid, params.boundary);
        let (rho_s, u_s, drift) = reconstruct(&rho, &m, &grid, params, &moll);
        let boundary = params.boundary;
        let interaction = opts.interaction;
        let eps_reg = if params.variant == Variant::Regularized { params.eps_reg } else { 0.0 };
        p.x.par_iter()
            .zip(p.v.par_iter_mut())
            .zip(p.w.par_iter_mut())
            .for_each(|((&x, v), w)| {
                let st = cic(&grid, boundary, x);
                let (r, u) = if interaction { (interpolate(&rho_s, st), interpolate(&u_s, st)) } else { (0.0, 0.0) };
                let c = LocalCoefficients {
                    drift: interpolate(&drift, st),
                    rho: r,
                    u,
                    denom: 1.0 + eps_reg * r * (1.0 + u),
                    kappa,
                };
                *w *= c.log_weight(*v, dt).exp();
                *v = c.advance_velocity(*v, dt);
            });
        if interaction {
            let total = p.total_weight();
            if !(total > 0.0) || !total.is_finite() {
                return Err(Error::Numerical { t: p.t + dt, detail: "particle weights collapsed".into() });
            }
            let s = mass0 / total;
            p.w.par_iter_mut().for_each(|w| *w *= s);
        }
        p.x.par_iter_mut().zip(p.v.par_iter()).for_each(|(x, &v)| *x += 0.5 * dt * v);
        p.t = n as f64 * dt;
        if next_report < report_at.len() && report_at[next_report] == n {
            reports.push(diagnostics(&p.to_state(&grid)));
            next_report += 1;
        }
    }
    p.t = run.t_final;
    Ok(ParticleRun { final_ensemble: p, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::init::init_rectangle;

    fn rect() -> DistributionState {
        let g = PhaseGrid::new(-0.5, 3.0, 2.4, 64, 64).unwrap();
        init_rectangle(&g, (0.0, 1.0), (1.0, 2.0), 1.0).unwrap()
    }

    #[test]
    fn frozen_drift_closed_form() {
        let c = LocalCoefficients { drift: 1.0, rho: 0.0, u: 0.0, denom: 1.0, kappa: 1.0 };
        assert!((c.advance_velocity(2.0, std::f64::consts::LN_2) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn stratified_sample_matches_mass_and_cells() {
        let f = rect();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = ParticleEnsemble::sample(&f, 10_000, &mut rng).unwrap();
        assert_eq!(p.len(), 10_000);
        assert!((p.total_weight() - 1.0).abs() < 1e-12);
        // partially covered boundary cells are sampled uniformly
        let dx = f.grid.dx();
        assert!(p.x.iter().all(|&x| (-dx..=1.0 + dx).contains(&x)));
        let dv = f.grid.dv();
        assert!(p.v.iter().all(|&v| (1.0 - dv..=2.0 + dv).contains(&v)));
    }

    #[test]
    fn weights_frozen_without_interaction() {
        let f = rect();
        let s = RunSettings::new(0.2, 0.01, 4).unwrap();
        let mut opts = ParticleSettings::new(2000, 1);
        opts.interaction = false;
        let out = particle_run(&f, &ModelParams::unscaled(XBoundary::FreeFlow), &s, &opts).unwrap();
        let total = out.final_ensemble.total_weight();
        assert!(((total - 1.0) / 1.0).abs() < 1e-12);
    }

    #[test]
    fn velocities_stay_positive_and_bounded() {
        let f = rect();
        let s = RunSettings::new(0.5, 0.01, 5).unwrap();
        let out = particle_run(&f, &ModelParams::unscaled(XBoundary::FreeFlow), &s, &ParticleSettings::new(5000, 3))
            .unwrap();
        let p = &out.final_ensemble;
        assert!(p.v.iter().all(|&v| v > 0.0 && v <= 2.0 + f.grid.dv()));
        assert!(((p.total_weight() - 1.0) / 1.0).abs() < 1e-12);
    }

    #[test]
    fn same_seed_is_reproducible() {
        let f = rect();
        let s = RunSettings::new(0.1, 0.01, 2).unwrap();
        let p = ModelParams::unscaled(XBoundary::FreeFlow);
        let a = particle_run(&f, &p, &s, &ParticleSettings::new(3000, 11)).unwrap();
        let b = particle_run(&f, &p, &s, &ParticleSettings::new(3000, 11)).unwrap();
        assert_eq!(a.final_ensemble, b.final_ensemble);
    }
}
