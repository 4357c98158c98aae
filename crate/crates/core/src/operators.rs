//! Collision operators of the model: the interaction operator in its
//! gain/loss and reformulated forms, the relaxation flux divergence, and the
//! mollified velocity used by the regularized dynamics.

use crate::grid::{DistributionState, XBoundary};
use crate::moments::MacroFields;
use crate::mollifier::{mollify, MollifierSpec};

/// Pointwise `ρ(x) (u(x) − v) f(x, v)`, zero in vacuum cells.
pub fn interaction_term(f: &DistributionState, macro_fields: &MacroFields) -> Vec<f64> {
    let g = &f.grid;
    let mut out = vec![0.0; g.len()];
    for i in 0..g.nx {
        if macro_fields.vacuum[i] {
            continue;
        }
        let rho = macro_fields.rho[i];
        let u = macro_fields.velocity[i];
        for j in 0..g.nv {
            let k = g.index(i, j);
            out[k] = rho * (u - g.v(j)) * f.values[k];
        }
    }
    out
}

/// Gain `f ∫_v^∞ (v* − v) f dv*` and loss `f ∫_0^v (v − v*) f dv*`, integrated
/// exactly against the piecewise-constant reconstruction of `f`.
pub fn interaction_gain_loss(f: &DistributionState) -> (Vec<f64>, Vec<f64>) {
    let g = &f.grid;
    let dv = g.dv();
    let self_part = dv * dv / 8.0;
    let mut gain = vec![0.0; g.len()];
    let mut loss = vec![0.0; g.len()];
    for i in 0..g.nx {
        let row = f.row(i);
        let total0: f64 = row.iter().sum();
        let total1: f64 = row.iter().enumerate().map(|(j, &v)| g.v(j) * v).sum();
        // running sums over cells strictly below j
        let (mut below0, mut below1) = (0.0, 0.0);
        for (j, &fj) in row.iter().enumerate() {
            let v = g.v(j);
            let above0 = total0 - below0 - fj;
            let above1 = total1 - below1 - v * fj;
            let k = g.index(i, j);
            gain[k] = fj * ((above1 - v * above0) * dv + fj * self_part);
            loss[k] = fj * ((v * below0 - below1) * dv + fj * self_part);
            below0 += fj;
            below1 += v * fj;
        }
    }
    for v in gain.iter_mut().chain(loss.iter_mut()) {
        // roundoff in the running sums can dip just below zero
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    (gain, loss)
}

/// Regularized velocity `((ρu) ⋆ θ_ε) / (ε_reg + ρ ⋆ θ_ε)`.
pub fn mollified_velocity(
    macro_fields: &MacroFields,
    moll: &MollifierSpec,
    eps_reg: f64,
    dx: f64,
    boundary: XBoundary,
) -> Vec<f64> {
    let m_s = mollify(&macro_fields.momentum, moll, dx, boundary);
    let r_s = mollify(&macro_fields.rho, moll, dx, boundary);
    m_s.iter()
        .zip(&r_s)
        .map(|(&m, &r)| {
            let den = eps_reg + r;
            if m <= 0.0 || den <= 0.0 {
                0.0
            } else {
                m / den
            }
        })
        .collect()
}

/// Conservative upwind discretization of `∂_v((v − u) f)` with zero flux at
/// both velocity edges.
pub fn relaxation_divergence(f: &DistributionState, u_field: &[f64]) -> Vec<f64> {
    let g = &f.grid;
    let dv = g.dv();
    let mut out = vec![0.0; g.len()];
    let mut flux = vec![0.0; g.nv + 1];
    for i in 0..g.nx {
        let u = u_field[i];
        let row = f.row(i);
        for j in 0..g.nv - 1 {
            let v_face = (j + 1) as f64 * dv;
            // advection speed of f in v is (u − v); flux of Q_r is −(u − v) f
            let a = u - v_face;
            let upwind = if a > 0.0 {
                row[j]
            } else if a < 0.0 {
                row[j + 1]
            } else {
                0.5 * (row[j] + row[j + 1])
            };
            flux[j + 1] = -a * upwind;
        }
        for j in 0..g.nv {
            out[g.index(i, j)] = (flux[j + 1] - flux[j]) / dv;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PhaseGrid;
    use crate::init::init_rectangle;
    use crate::moments::compute_moments;

    fn rect() -> DistributionState {
        let g = PhaseGrid::new(0.0, 2.0, 3.0, 4, 300).unwrap();
        init_rectangle(&g, (0.0, 1.0), (1.0, 2.0), 1.0).unwrap()
    }

    #[test]
    fn single_velocity_cell_has_no_interaction() {
        let g = PhaseGrid::new(0.0, 1.0, 2.0, 4, 16).unwrap();
        let mut f = DistributionState::zeros(g);
        for i in 0..4 {
            f.values[g.index(i, 7)] = 3.0;
        }
        let q = interaction_term(&f, &compute_moments(&f));
        assert!(q.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn rectangle_interaction_closed_form() {
        let f = rect();
        let g = f.grid;
        let q = interaction_term(&f, &compute_moments(&f));
        for j in 0..g.nv {
            let v = g.v(j);
            if v > 1.0 && v < 2.0 {
                assert!((q[g.index(0, j)] - (1.5 - v)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rectangle_gain_loss_at_edges() {
        let f = rect();
        let g = f.grid;
        let (gain, loss) = interaction_gain_loss(&f);
        let dv = g.dv();
        // first and last occupied cells sit half a cell inside [1, 2]
        let j_lo = (1.0 / dv) as usize;
        let j_hi = (2.0 / dv) as usize - 1;
        let vl = g.v(j_lo);
        let vh = g.v(j_hi);
        let gain_lo_exact = (2.0 - vl).powi(2) / 2.0;
        let loss_hi_exact = (vh - 1.0).powi(2) / 2.0;
        assert!((gain[g.index(0, j_lo)] - gain_lo_exact).abs() < 1e-12);
        assert!((loss[g.index(0, j_hi)] - loss_hi_exact).abs() < 1e-12);
        // continuum values at the box edges: 0.5 and 0.5
        assert!((gain[g.index(0, j_lo)] - 0.5).abs() < dv);
        assert!((loss[g.index(0, j_hi)] - 0.5).abs() < dv);
        assert!(loss[g.index(0, j_lo)] < dv * dv);
        assert!(gain[g.index(0, j_hi)] < dv * dv);
    }

    #[test]
    fn constants_pass_through_mollified_velocity() {
        let mf = MacroFields {
            rho: vec![1.0; 64],
            momentum: vec![1.0; 64],
            velocity: vec![1.0; 64],
            energy_density: vec![1.0; 64],
            vacuum: vec![false; 64],
            floor: 0.0,
        };
        let u = mollified_velocity(&mf, &MollifierSpec::new(0.1), 0.1, 1.0 / 64.0, XBoundary::Periodic);
        for v in u {
            assert!((v - 1.0 / 1.1).abs() < 1e-13);
        }
    }

    #[test]
    fn mollified_velocity_bounded_by_support() {
        let f = rect();
        let mf = compute_moments(&f);
        let u = mollified_velocity(&mf, &MollifierSpec::new(0.3), 1e-3, f.grid.dx(), XBoundary::FreeFlow);
        assert!(u.iter().all(|&v| (0.0..=2.0).contains(&v)));
    }

    #[test]
    fn relaxation_of_zero_is_zero() {
        let g = PhaseGrid::new(0.0, 1.0, 2.0, 4, 16).unwrap();
        let f = DistributionState::zeros(g);
        assert!(relaxation_divergence(&f, &[1.0; 4]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn relaxation_matches_analytic_first_order() {
        let u = 1.1;
        let prof = |_x: f64, v: f64| (-(v - 1.0f64).powi(2) / 0.1).exp();
        let exact = |v: f64| {
            let f = prof(0.0, v);
            f + (v - u) * f * (-2.0 * (v - 1.0) / 0.1)
        };
        let errs: Vec<f64> = [200usize, 400, 800]
            .iter()
            .map(|&nv| {
                let g = PhaseGrid::new(0.0, 1.0, 2.5, 2, nv).unwrap();
                let f = DistributionState::from_fn(g, prof).unwrap();
                let q = relaxation_divergence(&f, &[u, u]);
                (1..nv - 1).map(|j| (q[g.index(0, j)] - exact(g.v(j))).abs()).fold(0.0, f64::max)
            })
            .collect();
        assert!(errs[1] < 0.6 * errs[0] && errs[2] < 0.6 * errs[1], "{errs:?}");
        assert!(errs[2] < 0.2);
    }
}
