//! First-order upwind free transport `∂_t f + v ∂_x f = 0` along x.
//!
//! All velocities are positive, so the upwind neighbour is always `i − 1`.

use crate::grid::{DistributionState, XBoundary};

pub(crate) fn transport(f: &mut DistributionState, dt: f64, boundary: XBoundary) {
    let g = f.grid;
    let nv = g.nv;
    let nx = g.nx;
    let lam = dt / g.dx();
    let courant: Vec<f64> = (0..nv).map(|j| g.v(j) * lam).collect();
    let vals = &mut f.values;
    // inflow row for i = 0, captured before the sweep overwrites it
    let inflow: Vec<f64> = match boundary {
        XBoundary::Periodic => vals[(nx - 1) * nv..nx * nv].to_vec(),
        XBoundary::FreeFlow => vec![0.0; nv],
    };
    for i in (1..nx).rev() {
        let (lo, hi) = vals.split_at_mut(i * nv);
        let left = &lo[(i - 1) * nv..];
        let cur = &mut hi[..nv];
        for j in 0..nv {
            cur[j] -= courant[j] * (cur[j] - left[j]);
        }
    }
    let first = &mut vals[..nv];
    for j in 0..nv {
        first[j] -= courant[j] * (first[j] - inflow[j]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PhaseGrid;

    #[test]
    fn periodic_transport_conserves_mass() {
        let g = PhaseGrid::new(0.0, 1.0, 2.0, 32, 8).unwrap();
        let mut f = DistributionState::from_fn(g, |x, v| (1.0 + (6.0 * x).sin()).max(0.0) * v).unwrap();
        let m0 = f.mass();
        for _ in 0..100 {
            transport(&mut f, 0.4 * g.dx() / g.v_max, XBoundary::Periodic);
        }
        assert!(((f.mass() - m0) / m0).abs() < 1e-13);
        assert!(f.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn courant_one_shifts_exactly() {
        let g = PhaseGrid::new(0.0, 1.0, 2.0, 16, 2).unwrap();
        let mut f = DistributionState::zeros(g);
        f.values[g.index(3, 1)] = 1.0;
        // v_1 = 1.5, dt chosen so that v_1 dt = dx
        transport(&mut f, g.dx() / 1.5, XBoundary::FreeFlow);
        assert!((f.at(4, 1) - 1.0).abs() < 1e-14);
        assert!(f.at(3, 1).abs() < 1e-14);
    }
}
