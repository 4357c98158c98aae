//! Run-level invariants evaluated on a sequence of diagnostics reports.

use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticsReport;

/// Outcome of one assertion, as recorded in manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

impl Check {
    fn new(name: &str, value: f64, limit: f64, passed: bool, detail: String) -> Self {
        Self { name: name.to_string(), passed, value, limit, detail }
    }

    /// Passes iff `value <= limit`.
    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self::new(name, value, limit, value <= limit, String::new())
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }
}

/// `ρ_max`-free constant of the frozen `‖f‖_∞` regression bound.
pub const LINF_CONSTANT: f64 = 2.0;

/// Largest relative deviation of the mass from its initial value.
pub fn mass_drift(reports: &[DiagnosticsReport]) -> f64 {
    let m0 = reports[0].mass;
    if m0 == 0.0 {
        return reports.iter().fold(0.0_f64, |a, r| a.max(r.mass.abs()));
    }
    reports.iter().fold(0.0_f64, |a, r| a.max(((r.mass - m0) / m0).abs()))
}

pub fn check_mass(reports: &[DiagnosticsReport], rel_tol: f64) -> Check {
    Check::at_most("mass_conservation", mass_drift(reports), rel_tol)
}

/// Largest energy increase between consecutive reports, relative to the
/// initial energy.
pub fn energy_increase(reports: &[DiagnosticsReport]) -> f64 {
    let e0 = reports[0].energy;
    let worst = reports.windows(2).fold(0.0_f64, |a, w| a.max(w[1].energy - w[0].energy));
    if e0 > 0.0 {
        worst / e0
    } else {
        worst
    }
}

pub fn check_energy(reports: &[DiagnosticsReport], rel_tol: f64) -> Check {
    Check::at_most("energy_nonincreasing", energy_increase(reports), rel_tol)
}

/// `R_V(t) ≤ R_V(0) + Δv` and `r_V(t) ≥ e^{−κt} r_V(0) − Δv` on every row.
/// The reported value is the worst violation (negative when satisfied).
pub fn check_velocity_envelope(reports: &[DiagnosticsReport], dv: f64, kappa: f64) -> Check {
    let Some(s0) = reports[0].support else {
        let ok = reports.iter().all(|r| r.support.is_none());
        return Check::new("velocity_support_envelope", 0.0, 0.0, ok, String::new());
    };
    let mut worst = f64::NEG_INFINITY;
    let mut where_t = 0.0;
    for r in reports {
        let Some(s) = r.support else { continue };
        let over = s.v_max - (s0.v_max + dv);
        let under = ((-kappa * r.t).exp() * s0.v_min - dv) - s.v_min;
        let v = over.max(under);
        if v > worst {
            worst = v;
            where_t = r.t;
        }
    }
    Check::new(
        "velocity_support_envelope",
        worst,
        0.0,
        worst <= 1e-12,
        format!("worst margin at t = {where_t}"),
    )
}

/// Upwind transport smears the x-support by a diffusive tail; the slack is
/// seven standard deviations of that tail plus one cell.
pub fn x_envelope_slack(dx: f64, t: f64, dt: f64) -> f64 {
    let half_steps = if dt > 0.0 { 2.0 * (t / dt).ceil() } else { 0.0 };
    dx * (1.0 + 7.0 * (half_steps / 4.0).sqrt())
}

/// `r_X(t) ≥ r_X(0)` and `R_X(t) ≤ R_X(0) + t R_V(0)` up to the transport slack.
/// Only meaningful on free-flow domains.
pub fn check_x_envelope(reports: &[DiagnosticsReport], dx: f64, dt: f64) -> Check {
    let Some(s0) = reports[0].support else {
        return Check::new("x_support_envelope", 0.0, 0.0, true, String::new());
    };
    let mut worst = f64::NEG_INFINITY;
    for r in reports {
        let Some(s) = r.support else { continue };
        let under = s0.x_min - s.x_min;
        let over = s.x_max - (s0.x_max + r.t * s0.v_max + x_envelope_slack(dx, r.t, dt));
        worst = worst.max(under).max(over);
    }
    Check::new("x_support_envelope", worst, 0.0, worst <= 1e-12, String::new())
}

/// `‖f(t)‖_∞ ≤ C (‖f₀‖_∞ + ∫∫(1 + v²) f₀)`.
pub fn check_linf(reports: &[DiagnosticsReport]) -> Check {
    let r0 = &reports[0];
    let reference = r0.linf + r0.mass + 2.0 * r0.energy;
    let worst = reports.iter().fold(0.0_f64, |a, r| a.max(r.linf));
    let ratio = if reference > 0.0 { worst / reference } else { 0.0 };
    Check::at_most("linf_bound", ratio, LINF_CONSTANT)
}

/// Worst `|Δmomentum/Δt + ⟨dissipation_Qi⟩|` over reporting intervals, with the
/// dissipation averaged by the trapezoidal rule.
pub fn momentum_identity_residual(reports: &[DiagnosticsReport]) -> f64 {
    reports
        .windows(2)
        .filter(|w| w[1].t > w[0].t)
        .map(|w| {
            let rate = (w[1].momentum - w[0].momentum) / (w[1].t - w[0].t);
            (rate + 0.5 * (w[0].dissipation_qi + w[1].dissipation_qi)).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::SupportBox;

    fn report(t: f64, mass: f64, energy: f64, v: (f64, f64)) -> DiagnosticsReport {
        DiagnosticsReport {
            t,
            mass,
            momentum: 0.0,
            energy,
            linf: 1.0,
            support: Some(SupportBox { x_min: 0.0, x_max: 1.0, v_min: v.0, v_max: v.1 }),
            dissipation_qi: 0.0,
            dissipation_qr: 0.0,
        }
    }

    #[test]
    fn energy_check_flags_increase() {
        let ok = vec![report(0.0, 1.0, 1.0, (1.0, 2.0)), report(0.1, 1.0, 0.9, (1.0, 2.0))];
        assert!(check_energy(&ok, 1e-3).passed);
        let bad = vec![report(0.0, 1.0, 1.0, (1.0, 2.0)), report(0.1, 1.0, 1.01, (1.0, 2.0))];
        assert!(!check_energy(&bad, 1e-3).passed);
    }

    #[test]
    fn mass_check_uses_relative_drift() {
        let r = vec![report(0.0, 2.0, 1.0, (1.0, 2.0)), report(0.1, 2.0 + 1e-9, 1.0, (1.0, 2.0))];
        assert!((mass_drift(&r) - 5e-10).abs() < 1e-15);
        assert!(check_mass(&r, 1e-8).passed);
    }

    #[test]
    fn velocity_envelope_allows_exponential_contraction_only() {
        let dv = 0.01;
        let base = report(0.0, 1.0, 1.0, (1.0, 2.0));
        let fine = report(1.0, 1.0, 1.0, (0.4, 2.0));
        assert!(check_velocity_envelope(&[base, fine], dv, 1.0).passed);
        let too_low = report(1.0, 1.0, 1.0, (0.3, 2.0));
        assert!(!check_velocity_envelope(&[base, too_low], dv, 1.0).passed);
        let too_high = report(0.5, 1.0, 1.0, (1.0, 2.02));
        assert!(!check_velocity_envelope(&[base, too_high], dv, 1.0).passed);
    }
}
