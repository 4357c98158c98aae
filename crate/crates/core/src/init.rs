//! Initial-data families: boxes in phase space and well-prepared
//! near-monokinetic states built from macroscopic profiles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{DistributionState, PhaseGrid};

/// Scalar profile of position used for `ρ₀` and `u₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Constant { value: f64 },
    /// `mean + amplitude * sin(2π x / period + phase)`
    Sine {
        mean: f64,
        amplitude: f64,
        period: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `value` on `[lo, hi]`, zero elsewhere.
    Box { lo: f64, hi: f64, value: f64 },
}

impl Profile {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Profile::Constant { value } => value,
            Profile::Sine { mean, amplitude, period, phase } => {
                mean + amplitude * (std::f64::consts::TAU * x / period + phase).sin()
            }
            Profile::Box { lo, hi, value } => {
                if (lo..=hi).contains(&x) {
                    value
                } else {
                    0.0
                }
            }
        }
    }

    /// Exact derivative where it exists (zero on the flat parts of a box).
    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Profile::Constant { .. } | Profile::Box { .. } => 0.0,
            Profile::Sine { amplitude, period, phase, .. } => {
                let k = std::f64::consts::TAU / period;
                amplitude * k * (k * x + phase).cos()
            }
        }
    }

    /// Average over `[a, b]`; exact for every variant.
    pub fn cell_average(&self, a: f64, b: f64) -> f64 {
        let h = b - a;
        match *self {
            Profile::Constant { value } => value,
            Profile::Sine { mean, amplitude, period, phase } => {
                let k = std::f64::consts::TAU / period;
                mean + amplitude * ((k * a + phase).cos() - (k * b + phase).cos()) / (k * h)
            }
            Profile::Box { lo, hi, value } => {
                let overlap = (b.min(hi) - a.max(lo)).max(0.0);
                value * overlap / h
            }
        }
    }

    pub fn sample(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}

/// `f = height` on `x_box × v_box`, with partially covered cells holding the
/// covered fraction so the mass is exactly `height * area`.
pub fn init_rectangle(
    grid: &PhaseGrid,
    x_box: (f64, f64),
    v_box: (f64, f64),
    height: f64,
) -> Result<DistributionState> {
    let (x0, x1) = x_box;
    let (v0, v1) = v_box;
    if !(height >= 0.0) || !height.is_finite() {
        return Err(Error::InvalidInitialData(format!("height must be nonnegative, got {height}")));
    }
    if !(v0 > 0.0) {
        return Err(Error::InvalidInitialData(format!(
            "velocity box must stay away from v = 0 (f0(x, 0) = 0), got lower edge {v0}"
        )));
    }
    if !(x0 < x1 && v0 < v1) {
        return Err(Error::InvalidInitialData("box edges must be increasing".into()));
    }
    if x0 < grid.x_min || x1 > grid.x_max || v1 > grid.v_max {
        return Err(Error::InvalidInitialData(format!(
            "box [{x0}, {x1}] x [{v0}, {v1}] lies outside the grid [{}, {}] x [0, {}]",
            grid.x_min, grid.x_max, grid.v_max
        )));
    }
    let dx = grid.dx();
    let dv = grid.dv();
    let mut state = DistributionState::zeros(*grid);
    for i in 0..grid.nx {
        let xa = grid.x_min + i as f64 * dx;
        let fx = ((xa + dx).min(x1) - xa.max(x0)).max(0.0) / dx;
        if fx == 0.0 {
            continue;
        }
        for j in 0..grid.nv {
            let va = j as f64 * dv;
            let fv = ((va + dv).min(v1) - va.max(v0)).max(0.0) / dv;
            state.values[grid.index(i, j)] = height * fx * fv;
        }
    }
    Ok(state)
}

/// Symmetric quartic (biweight) velocity bump with standard deviation `σ`,
/// supported on `[−√7 σ, √7 σ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticBump {
    pub sigma: f64,
}

impl QuarticBump {
    /// Half-width of the unit-variance profile, `√7`.
    pub const UNIT_HALF_WIDTH: f64 = 2.645_751_311_064_590_6;

    pub fn half_width(&self) -> f64 {
        Self::UNIT_HALF_WIDTH * self.sigma
    }

    /// Cumulative distribution of the velocity offset `w = v − center`.
    pub fn cdf(&self, w: f64) -> f64 {
        let h = self.half_width();
        if w <= -h {
            return 0.0;
        }
        if w >= h {
            return 1.0;
        }
        let z = w / h;
        0.5 + 15.0 / 16.0 * (z - 2.0 * z.powi(3) / 3.0 + z.powi(5) / 5.0)
    }

    pub fn density(&self, w: f64) -> f64 {
        let h = self.half_width();
        let z = w / h;
        if z.abs() >= 1.0 {
            0.0
        } else {
            15.0 / (16.0 * h) * (1.0 - z * z).powi(2)
        }
    }
}

/// Shape of an `ε`-family of near-monokinetic data around `(ρ₀, u₀)`.
///
/// Velocities are spread with standard deviation `spread · √ε` about the
/// center `u₀(x) + √ε · offset(x)`. An offset with `∫ ρ₀ u₀ offset dx = 0`
/// keeps both the velocity and the energy mismatch of order `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Preparation {
    #[serde(default = "Preparation::default_spread")]
    pub spread: f64,
    #[serde(default)]
    pub offset: Option<Profile>,
}

impl Preparation {
    fn default_spread() -> f64 {
        1.0
    }
}

impl Default for Preparation {
    fn default() -> Self {
        Self { spread: 1.0, offset: None }
    }
}

/// `f₀(x, v) = ρ₀(x) g_σ(v − c(x))` as exact cell averages of the bump, with
/// `ρ₀` averaged over each x-cell and the center `c` taken at cell centers.
pub fn init_monokinetic_bump(
    grid: &PhaseGrid,
    rho0: &Profile,
    center: impl Fn(f64) -> f64,
    sigma: f64,
) -> Result<DistributionState> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidInitialData(format!("spread must be positive, got {sigma}")));
    }
    let bump = QuarticBump { sigma };
    let h = bump.half_width();
    let dx = grid.dx();
    let dv = grid.dv();
    let mut state = DistributionState::zeros(*grid);
    for i in 0..grid.nx {
        let xa = grid.x_min + i as f64 * dx;
        let rho = rho0.cell_average(xa, xa + dx);
        if rho < 0.0 {
            return Err(Error::InvalidInitialData(format!("rho0 negative near x = {}", grid.x(i))));
        }
        if rho == 0.0 {
            continue;
        }
        let c = center(grid.x(i));
        if c - h <= dv {
            return Err(Error::InvalidInitialData(format!(
                "velocity bump would leak past v = 0 (center {c}, half-width {h} at x = {})",
                grid.x(i)
            )));
        }
        if c + h > grid.v_max - dv {
            return Err(Error::InvalidInitialData(format!(
                "velocity bump would leak past v_max = {} (center {c}, half-width {h})",
                grid.v_max
            )));
        }
        for j in 0..grid.nv {
            let va = j as f64 * dv;
            let p = bump.cdf(va + dv - c) - bump.cdf(va - c);
            state.values[grid.index(i, j)] = rho * p / dv;
        }
    }
    Ok(state)
}

/// Well-prepared family with the default shape: spread `√ε_scale`, no offset.
pub fn init_well_prepared(
    grid: &PhaseGrid,
    rho0: &Profile,
    u0: &Profile,
    eps_scale: f64,
) -> Result<DistributionState> {
    init_prepared(grid, rho0, u0, eps_scale, &Preparation::default())
}

pub fn init_prepared(
    grid: &PhaseGrid,
    rho0: &Profile,
    u0: &Profile,
    eps_scale: f64,
    prep: &Preparation,
) -> Result<DistributionState> {
    if !(eps_scale > 0.0) {
        return Err(Error::InvalidInitialData(format!("eps_scale must be positive, got {eps_scale}")));
    }
    let root = eps_scale.sqrt();
    let offset = prep.offset;
    init_monokinetic_bump(
        grid,
        rho0,
        |x| u0.eval(x) + offset.map_or(0.0, |o| root * o.eval(x)),
        prep.spread * root,
    )
}

/// Measured initial mismatches against the macroscopic data `(ρ₀, u₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparationMismatch {
    /// `∫ ρ₀^ε (u₀ − u₀^ε)² dx`
    pub velocity: f64,
    /// `∫ (∫ v² f₀^ε dv − ρ₀ u₀²) dx`
    pub energy: f64,
    /// `∫∫ |v − u₀(x)| f₀^ε dx dv`
    pub monokinetic: f64,
}

pub fn preparation_mismatch(f0: &DistributionState, rho0: &Profile, u0: &Profile) -> PreparationMismatch {
    let g = &f0.grid;
    let dx = g.dx();
    let dv = g.dv();
    let mut velocity = 0.0;
    let mut energy = 0.0;
    let mut monokinetic = 0.0;
    for i in 0..g.nx {
        let xa = g.x_min + i as f64 * dx;
        let u = u0.eval(g.x(i));
        let rho_ref = rho0.cell_average(xa, xa + dx);
        let row = f0.row(i);
        let (mut rho, mut m, mut e, mut dev) = (0.0, 0.0, 0.0, 0.0);
        for (j, &f) in row.iter().enumerate() {
            let v = g.v(j);
            rho += f;
            m += v * f;
            e += v * v * f;
            dev += (v - u).abs() * f;
        }
        rho *= dv;
        m *= dv;
        e *= dv;
        dev *= dv;
        if rho > 0.0 {
            let ueps = m / rho;
            velocity += rho * (u - ueps).powi(2);
        }
        energy += e - rho_ref * u * u;
        monokinetic += dev;
    }
    PreparationMismatch { velocity: velocity * dx, energy: energy * dx, monokinetic: monokinetic * dx }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_resolved_box_has_unit_mass() {
        let g = PhaseGrid::new(0.0, 2.0, 3.0, 40, 60).unwrap();
        let f = init_rectangle(&g, (0.0, 1.0), (1.0, 2.0), 1.0).unwrap();
        assert!((f.mass() - 1.0).abs() < 1e-13);
        assert!((f.linf() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn clipped_box_keeps_exact_mass() {
        let g = PhaseGrid::new(-0.5, 4.5, 2.4, 128, 128).unwrap();
        let f = init_rectangle(&g, (0.0, 1.0), (1.0, 2.0), 1.0).unwrap();
        assert!((f.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_height_gives_zero_state() {
        let g = PhaseGrid::new(0.0, 2.0, 3.0, 8, 8).unwrap();
        let f = init_rectangle(&g, (0.0, 1.0), (1.0, 2.0), 0.0).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn box_touching_zero_velocity_is_rejected() {
        let g = PhaseGrid::new(0.0, 2.0, 3.0, 8, 8).unwrap();
        assert!(init_rectangle(&g, (0.0, 1.0), (0.0, 2.0), 1.0).is_err());
        assert!(init_rectangle(&g, (0.0, 3.0), (1.0, 2.0), 1.0).is_err());
    }

    #[test]
    fn quartic_unit_profile_moments() {
        // quadrature oracle on a fine grid
        let b = QuarticBump { sigma: 1.0 };
        let h = b.half_width();
        let n = 200_000;
        let step = 2.0 * h / n as f64;
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for k in 0..n {
            let s = -h + (k as f64 + 0.5) * step;
            let d = b.density(s) * step;
            m0 += d;
            m1 += s * d;
            m2 += s * s * d;
        }
        assert!((m0 - 1.0).abs() < 1e-9);
        assert!(m1.abs() < 1e-12);
        assert!((m2 - 1.0).abs() < 1e-9);
        assert_eq!(b.cdf(h), 1.0);
        assert_eq!(b.cdf(-h), 0.0);
        assert!((b.cdf(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn well_prepared_constant_profile() {
        let g = PhaseGrid::new(0.0, 1.0, 2.5, 16, 500).unwrap();
        let rho0 = Profile::Constant { value: 1.0 };
        let u0 = Profile::Constant { value: 1.0 };
        let eps = 0.04;
        let f = init_well_prepared(&g, &rho0, &u0, eps).unwrap();
        assert!((f.mass() - 1.0).abs() < 1e-12);
        let mm = preparation_mismatch(&f, &rho0, &u0);
        // unit-variance bump: C_g = 1 bounds both mismatches
        let dv2 = g.dv() * g.dv();
        assert!(mm.velocity <= eps);
        assert!(mm.velocity < 1e-20);
        // midpoint moments of exact cell averages add dv²/12
        assert!((mm.energy - (eps + dv2 / 12.0)).abs() < 1e-6 * eps, "{}", mm.energy);
        // marginal is centered at 1 with spread 0.2
        let row = f.row(3);
        let mean: f64 = row.iter().enumerate().map(|(j, &v)| g.v(j) * v).sum::<f64>() * g.dv();
        assert!((mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn energy_mismatch_scales_linearly() {
        let g = PhaseGrid::new(0.0, 1.0, 2.5, 16, 2000).unwrap();
        let rho0 = Profile::Sine { mean: 1.0, amplitude: 0.2, period: 1.0, phase: 0.0 };
        let u0 = Profile::Sine { mean: 1.0, amplitude: 0.1, period: 1.0, phase: 0.0 };
        let e: Vec<f64> = [0.04, 0.01]
            .iter()
            .map(|&eps| preparation_mismatch(&init_well_prepared(&g, &rho0, &u0, eps).unwrap(), &rho0, &u0).energy)
            .collect();
        let slope = (e[0] / e[1]).ln() / 4f64.ln();
        assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn offset_preparation_keeps_mismatches_of_order_eps() {
        let g = PhaseGrid::new(0.0, 1.0, 2.5, 64, 1000).unwrap();
        let rho0 = Profile::Sine { mean: 1.0, amplitude: 0.2, period: 1.0, phase: 0.0 };
        let u0 = Profile::Sine { mean: 1.0, amplitude: 0.1, period: 1.0, phase: 0.0 };
        let prep = Preparation {
            spread: 0.5,
            offset: Some(Profile::Sine { mean: 0.0, amplitude: 0.5, period: 1.0, phase: std::f64::consts::FRAC_PI_2 }),
        };
        for eps in [0.2, 0.05, 0.0125] {
            let f = init_prepared(&g, &rho0, &u0, eps, &prep).unwrap();
            let mm = preparation_mismatch(&f, &rho0, &u0);
            // ∫ρ₀ (0.5 cos)² = 0.125 and the cross term vanishes
            assert!((mm.velocity / eps - 0.125).abs() < 0.01, "{}", mm.velocity / eps);
            assert!((mm.energy / eps - (0.125 + 0.25)).abs() < 0.01, "{}", mm.energy / eps);
            assert!(mm.monokinetic / eps.sqrt() < 1.0);
        }
    }

    #[test]
    fn monokinetic_deviation_scales_like_root_eps() {
        let g = PhaseGrid::new(0.0, 1.0, 2.5, 32, 2000).unwrap();
        let rho0 = Profile::Constant { value: 1.0 };
        let u0 = Profile::Sine { mean: 1.0, amplitude: 0.1, period: 1.0, phase: 0.0 };
        let d: Vec<f64> = [0.04, 0.01]
            .iter()
            .map(|&eps| preparation_mismatch(&init_well_prepared(&g, &rho0, &u0, eps).unwrap(), &rho0, &u0).monokinetic)
            .collect();
        let slope = (d[0] / d[1]).ln() / 4f64.ln();
        assert!((slope - 0.5).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn bump_leaking_past_vmax_is_rejected() {
        let g = PhaseGrid::new(0.0, 1.0, 1.5, 16, 64).unwrap();
        let rho0 = Profile::Constant { value: 1.0 };
        let u0 = Profile::Constant { value: 1.0 };
        assert!(init_well_prepared(&g, &rho0, &u0, 0.2).is_err());
        assert!(init_well_prepared(&g, &rho0, &u0, 0.1).is_err());
    }

    #[test]
    fn sine_cell_average_matches_quadrature() {
        let p = Profile::Sine { mean: 1.0, amplitude: 0.2, period: 1.0, phase: 0.3 };
        let (a, b) = (0.1, 0.17);
        let n = 10_000;
        let h = (b - a) / n as f64;
        let q: f64 = (0..n).map(|k| p.eval(a + (k as f64 + 0.5) * h)).sum::<f64>() / n as f64;
        assert!((p.cell_average(a, b) - q).abs() < 1e-10);
    }
}
