//! Spatially local velocity dynamics with frozen coefficients.
//!
//! Per x-cell we solve
//!
//! ```text
//! ∂_t f + κ ∂_v((a − v) f) = κ ρ (u − v) / D · f
//! ```
//!
//! with drift target `a`, interaction data `(ρ, u)` and denominator `D`
//! frozen over the substep. Each velocity cell moves along the exact
//! characteristic `v(s) = a + (v₀ − a) e^{−κs}` and its mass is multiplied by
//! `exp(∫ κ ρ (u − v(s)) / D ds)`; the Jacobian of the contraction cancels
//! the `+f` term of the density form. Masses are then deposited linearly onto
//! the two bracketing cell centers.

/// Frozen coefficients for one x-cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCoefficients {
    /// Relaxation target (`u`, or the mollified `u_ε^ε`).
    pub drift: f64,
    pub rho: f64,
    pub u: f64,
    /// `1` for the unregularized operator, `1 + ε ρ (1 + u)` otherwise.
    pub denom: f64,
    /// Collision frequency: `1`, or `1/ε` under Euler scaling.
    pub kappa: f64,
}

impl LocalCoefficients {
    /// Coefficients that leave a row untouched.
    pub const IDLE: Self = Self { drift: 0.0, rho: 0.0, u: 0.0, denom: 1.0, kappa: 0.0 };

    pub fn is_idle(&self) -> bool {
        self.kappa == 0.0
    }

    /// Log of the mass multiplier for a particle starting at `v0`.
    #[inline]
    pub fn log_weight(&self, v0: f64, dt: f64) -> f64 {
        let decay = (-self.kappa * dt).exp();
        (self.rho / self.denom)
            * (self.kappa * (self.u - self.drift) * dt - (v0 - self.drift) * (1.0 - decay))
    }

    #[inline]
    pub fn advance_velocity(&self, v0: f64, dt: f64) -> f64 {
        self.drift + (v0 - self.drift) * (-self.kappa * dt).exp()
    }
}

/// Advance one velocity row. `out` is scratch of the same length.
/// With `conserve`, the row is rescaled so its sum is unchanged.
pub(crate) fn local_step(
    row: &mut [f64],
    out: &mut [f64],
    c: &LocalCoefficients,
    dt: f64,
    dv: f64,
    conserve: bool,
) {
    if c.is_idle() {
        return;
    }
    let nv = row.len();
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut before = 0.0;
    let mut after = 0.0;
    for (j, &fj) in row.iter().enumerate() {
        if fj == 0.0 {
            continue;
        }
        before += fj;
        let v0 = (j as f64 + 0.5) * dv;
        let v1 = c.advance_velocity(v0, dt);
        let m = fj * c.log_weight(v0, dt).exp();
        after += m;
        let s = v1 / dv - 0.5;
        if s <= 0.0 {
            out[0] += m;
        } else if s >= (nv - 1) as f64 {
            out[nv - 1] += m;
        } else {
            let lo = s.floor();
            let frac = s - lo;
            let lo = lo as usize;
            out[lo] += (1.0 - frac) * m;
            out[lo + 1] += frac * m;
        }
    }
    let scale = if conserve && after > 0.0 { before / after } else { 1.0 };
    for (r, o) in row.iter_mut().zip(out.iter()) {
        *r = o * scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(drift: f64, rho: f64, u: f64, kappa: f64) -> LocalCoefficients {
        LocalCoefficients { drift, rho, u, denom: 1.0, kappa }
    }

    #[test]
    fn frozen_characteristic_closed_form() {
        // u frozen at 1, start at v = 2, t = ln 2  ->  V = 1.5
        let c = coeffs(1.0, 0.0, 1.0, 1.0);
        let v = c.advance_velocity(2.0, std::f64::consts::LN_2);
        assert!((v - 1.5).abs() < 1e-15);
    }

    #[test]
    fn conserving_step_keeps_row_sum_and_positivity() {
        let dv = 0.01;
        let mut row: Vec<f64> = (0..300).map(|j| if (100..200).contains(&j) { 1.0 } else { 0.0 }).collect();
        let sum0: f64 = row.iter().sum();
        let mut out = vec![0.0; row.len()];
        let c = coeffs(1.5, 1.0, 1.5, 20.0);
        for _ in 0..50 {
            local_step(&mut row, &mut out, &c, 0.01, dv, true);
        }
        let sum1: f64 = row.iter().sum();
        assert!(((sum1 - sum0) / sum0).abs() < 1e-13);
        assert!(row.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn contraction_never_widens_support() {
        let dv = 0.05;
        let mut row = vec![0.0; 60];
        for j in 20..40 {
            row[j] = 1.0;
        }
        let mut out = vec![0.0; 60];
        let c = coeffs(1.5, 1.0, 1.5, 1.0);
        for _ in 0..100 {
            local_step(&mut row, &mut out, &c, 0.02, dv, true);
            let first = row.iter().position(|&v| v > 0.0).unwrap();
            let last = row.iter().rposition(|&v| v > 0.0).unwrap();
            assert!(first >= 20 && last <= 39);
        }
    }

    #[test]
    fn idle_coefficients_are_a_no_op() {
        let mut row = vec![0.5, 1.0, 0.25];
        let mut out = vec![0.0; 3];
        local_step(&mut row, &mut out, &LocalCoefficients::IDLE, 1.0, 0.1, true);
        assert_eq!(row, vec![0.5, 1.0, 0.25]);
    }
}
