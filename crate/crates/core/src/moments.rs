//! Velocity moments of a distribution: density, momentum, mean velocity, energy.

use crate::grid::DistributionState;

/// Macroscopic fields on the x-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroFields {
    pub rho: Vec<f64>,
    pub momentum: Vec<f64>,
    /// `m / ρ` above the vacuum floor, 0 in vacuum.
    pub velocity: Vec<f64>,
    /// `∫ v² f dv` per x-cell.
    pub energy_density: Vec<f64>,
    pub vacuum: Vec<bool>,
    pub floor: f64,
}

impl MacroFields {
    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn rho_max(&self) -> f64 {
        self.rho.iter().fold(0.0_f64, |a, &b| a.max(b))
    }
}

/// Relative vacuum floor: `ρ ≤ 1e-12 · mass / length` counts as vacuum.
pub const VACUUM_FLOOR_REL: f64 = 1e-12;

pub fn vacuum_floor(total_mass: f64, length: f64) -> f64 {
    VACUUM_FLOOR_REL * total_mass / length
}

/// Midpoint-rule moments `∫(1, v, v²) f dv` per x-cell.
pub fn compute_moments(f: &DistributionState) -> MacroFields {
    let g = &f.grid;
    let dv = g.dv();
    let vs = g.v_centers();
    let mut rho = vec![0.0; g.nx];
    let mut momentum = vec![0.0; g.nx];
    let mut energy_density = vec![0.0; g.nx];
    for i in 0..g.nx {
        let (mut r, mut m, mut e) = (0.0, 0.0, 0.0);
        for (fv, v) in f.row(i).iter().zip(&vs) {
            r += fv;
            m += v * fv;
            e += v * v * fv;
        }
        rho[i] = r * dv;
        momentum[i] = m * dv;
        energy_density[i] = e * dv;
    }
    let mass: f64 = rho.iter().sum::<f64>() * g.dx();
    let floor = vacuum_floor(mass, g.length());
    let mut velocity = vec![0.0; g.nx];
    let mut vacuum = vec![false; g.nx];
    for i in 0..g.nx {
        if rho[i] <= floor {
            vacuum[i] = true;
            momentum[i] = if rho[i] == 0.0 { 0.0 } else { momentum[i] };
        } else {
            velocity[i] = momentum[i] / rho[i];
        }
    }
    MacroFields { rho, momentum, velocity, energy_density, vacuum, floor }
}
