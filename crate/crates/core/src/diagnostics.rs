//! Conserved and dissipated functionals of a distribution.

use serde::{Deserialize, Serialize};

use crate::grid::DistributionState;
use crate::moments::compute_moments;

/// Cells with `f > SUPPORT_THRESHOLD_REL · ‖f‖_∞` count as support.
pub const SUPPORT_THRESHOLD_REL: f64 = 1e-10;

/// Bounding box of the (thresholded) support, reported with cell edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportBox {
    pub x_min: f64,
    pub x_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub t: f64,
    pub mass: f64,
    pub momentum: f64,
    /// `½ ∫∫ v² f`
    pub energy: f64,
    pub linf: f64,
    /// `None` for the zero state.
    pub support: Option<SupportBox>,
    /// `∫∫ ρ (u − v)² f`
    pub dissipation_qi: f64,
    /// `∫∫ (u − v)² f`
    pub dissipation_qr: f64,
}

impl DiagnosticsReport {
    pub const CSV_HEADER: &'static str =
        "t,mass,momentum,energy,linf,rX_min,rX_max,rV_min,rV_max,diss_Qi,diss_Qr";

    pub fn csv_row(&self) -> String {
        let s = self.support.unwrap_or(SupportBox { x_min: 0.0, x_max: 0.0, v_min: 0.0, v_max: 0.0 });
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.t,
            self.mass,
            self.momentum,
            self.energy,
            self.linf,
            s.x_min,
            s.x_max,
            s.v_min,
            s.v_max,
            self.dissipation_qi,
            self.dissipation_qr
        )
    }
}

pub fn support_box(f: &DistributionState) -> Option<SupportBox> {
    let g = &f.grid;
    let linf = f.linf();
    if linf <= 0.0 {
        return None;
    }
    let thr = SUPPORT_THRESHOLD_REL * linf;
    let (mut i_lo, mut i_hi, mut j_lo, mut j_hi) = (usize::MAX, 0, usize::MAX, 0);
    for i in 0..g.nx {
        for (j, &v) in f.row(i).iter().enumerate() {
            if v > thr {
                i_lo = i_lo.min(i);
                i_hi = i_hi.max(i);
                j_lo = j_lo.min(j);
                j_hi = j_hi.max(j);
            }
        }
    }
    let dx = g.dx();
    let dv = g.dv();
    Some(SupportBox {
        x_min: g.x_min + i_lo as f64 * dx,
        x_max: g.x_min + (i_hi + 1) as f64 * dx,
        v_min: j_lo as f64 * dv,
        v_max: (j_hi + 1) as f64 * dv,
    })
}

pub fn diagnostics(f: &DistributionState) -> DiagnosticsReport {
    let g = &f.grid;
    let area = g.cell_area();
    let mf = compute_moments(f);
    let (mut mass, mut momentum, mut energy, mut d_qi, mut d_qr) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..g.nx {
        let vacuum = mf.vacuum[i];
        let (rho, u) = (mf.rho[i], mf.velocity[i]);
        for (j, &fv) in f.row(i).iter().enumerate() {
            let v = g.v(j);
            mass += fv;
            momentum += v * fv;
            energy += v * v * fv;
            if !vacuum {
                let w = (u - v) * (u - v) * fv;
                d_qr += w;
                d_qi += rho * w;
            }
        }
    }
    DiagnosticsReport {
        t: f.t,
        mass: mass * area,
        momentum: momentum * area,
        energy: 0.5 * energy * area,
        linf: f.linf(),
        support: support_box(f),
        dissipation_qi: d_qi * area,
        dissipation_qr: d_qr * area,
    }
}
