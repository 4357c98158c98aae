//! Relative entropy and relative flux between kinetic moments `U^ε = (ρ^ε, ρ^ε u^ε)`
//! and a pressureless Euler state `U = (ρ, ρu)` on a common x-grid.

use serde::{Deserialize, Serialize};

use super::wasserstein::{wasserstein1_1d, Measure1d};
use crate::error::{Error, Result};
use crate::grid::DistributionState;
use crate::moments::MacroFields;

fn weighted_square_gap(ueps: &MacroFields, rho: &[f64], u: &[f64], dx: f64) -> Result<f64> {
    if rho.len() != ueps.len() || u.len() != ueps.len() {
        return Err(Error::Metric("kinetic and Euler fields live on different grids".into()));
    }
    let mut total = 0.0;
    for i in 0..ueps.len() {
        if ueps.vacuum[i] {
            continue;
        }
        if !(rho[i] > 0.0) {
            return Err(Error::Metric(format!(
                "Euler density vanishes in cell {i} where the kinetic density is {}",
                ueps.rho[i]
            )));
        }
        total += ueps.rho[i] * (ueps.velocity[i] - u[i]).powi(2);
    }
    Ok(total * dx)
}

/// `∫ ρ^ε (u^ε − u)² / 2 dx`.
pub fn relative_entropy(ueps: &MacroFields, rho: &[f64], u: &[f64], dx: f64) -> Result<f64> {
    Ok(0.5 * weighted_square_gap(ueps, rho, u, dx)?)
}

/// `∫ |A(U^ε | U)| dx = ∫ ρ^ε (u^ε − u)² dx`.
pub fn relative_flux_norm(ueps: &MacroFields, rho: &[f64], u: &[f64], dx: f64) -> Result<f64> {
    weighted_square_gap(ueps, rho, u, dx)
}

/// `E(Ū) − E(U) − DE(U)(Ū − U)` with `E(ρ, m) = m² / (2ρ)`, pointwise.
pub fn relative_entropy_density(rho_bar: f64, m_bar: f64, rho: f64, m: f64) -> f64 {
    let u = m / rho;
    let e = |r: f64, q: f64| if r > 0.0 { 0.5 * q * q / r } else { 0.0 };
    e(rho_bar, m_bar) - e(rho, m) - (-0.5 * u * u * (rho_bar - rho) + u * (m_bar - m))
}

/// Components of `A(Ū) − A(U) − DA(U)(Ū − U)` with `A(ρ, m) = (m, m²/ρ)`.
pub fn relative_flux_components(rho_bar: f64, m_bar: f64, rho: f64, m: f64) -> [f64; 2] {
    let u = m / rho;
    let a2 = |r: f64, q: f64| if r > 0.0 { q * q / r } else { 0.0 };
    let (dr, dm) = (rho_bar - rho, m_bar - m);
    [m_bar - m - dm, a2(rho_bar, m_bar) - a2(rho, m) - (-u * u * dr + 2.0 * u * dm)]
}

/// Upper-bound decomposition of the distance from `f^ε` to `ρ ⊗ δ_u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonokineticDeviation {
    /// `∫∫ |v − u(x)| f^ε dx dv / ∫∫ f^ε`
    pub term1: f64,
    /// `W1(ρ^ε, ρ)` after normalization
    pub term2: f64,
    /// `term1 + (1 + Lip u) term2`
    pub bound: f64,
    pub lip_u: f64,
}

/// Largest difference quotient of `u` between adjacent occupied cells.
pub fn lipschitz_constant(u: &[f64], rho: &[f64], dx: f64) -> f64 {
    (0..u.len().saturating_sub(1))
        .filter(|&i| rho[i] > 0.0 && rho[i + 1] > 0.0)
        .map(|i| (u[i + 1] - u[i]).abs() / dx)
        .fold(0.0, f64::max)
}

pub fn monokinetic_deviation(feps: &DistributionState, rho: &[f64], u: &[f64]) -> Result<MonokineticDeviation> {
    let g = &feps.grid;
    if rho.len() != g.nx || u.len() != g.nx {
        return Err(Error::Metric("Euler fields do not match the phase grid".into()));
    }
    let mass = feps.mass();
    if !(mass > 0.0) {
        return Err(Error::Metric("zero-mass kinetic state".into()));
    }
    let mut dev = 0.0;
    let mut rho_eps = vec![0.0; g.nx];
    for i in 0..g.nx {
        for (j, &f) in feps.row(i).iter().enumerate() {
            dev += (g.v(j) - u[i]).abs() * f;
            rho_eps[i] += f;
        }
        rho_eps[i] *= g.dv();
    }
    let term1 = dev * g.cell_area() / mass;
    let dx = g.dx();
    let term2 = wasserstein1_1d(&Measure1d::histogram(g.x_min, dx, &rho_eps)?, &Measure1d::histogram(g.x_min, dx, rho)?)?;
    let lip_u = lipschitz_constant(u, rho, dx);
    Ok(MonokineticDeviation { term1, term2, bound: term1 + (1.0 + lip_u) * term2, lip_u })
}
