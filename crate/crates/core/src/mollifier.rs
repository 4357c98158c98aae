//! Smooth compactly supported mollifier and discrete convolution on the x-grid.

use serde::{Deserialize, Serialize};

use crate::grid::XBoundary;

/// Standard bump `exp(-1 / (1 - s^2))` on `(-1, 1)`, unnormalized.
#[inline]
pub fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// Mollifier `θ_ε(x) = ε⁻¹ θ(x / ε)` of width `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MollifierSpec {
    pub eps: f64,
}

impl MollifierSpec {
    pub fn new(eps: f64) -> Self {
        assert!(eps > 0.0, "mollifier width must be positive");
        Self { eps }
    }

    /// Whether the width resolves at least one grid spacing.
    pub fn resolves(&self, dx: f64) -> bool {
        self.eps >= dx
    }

    /// Kernel weights `w_k` for offsets `k = -K..=K`, normalized so that
    /// `Σ w_k dx = 1` exactly on this grid.
    pub fn weights(&self, dx: f64) -> Vec<f64> {
        let half = (self.eps / dx).ceil() as usize;
        let mut w: Vec<f64> = (0..=2 * half)
            .map(|k| {
                let offset = k as f64 - half as f64;
                bump(offset * dx / self.eps)
            })
            .collect();
        let total: f64 = w.iter().sum::<f64>() * dx;
        if total > 0.0 {
            w.iter_mut().for_each(|v| *v /= total);
        } else {
            // width below one cell: only the center survives
            w.iter_mut().for_each(|v| *v = 0.0);
            w[half] = 1.0 / dx;
        }
        w
    }
}

/// Discrete convolution `field ⋆ θ_ε` on a uniform x-grid of spacing `dx`.
///
/// Periodic boundaries wrap; free-flow boundaries pad with zeros. A width
/// below one cell degenerates to the identity and is reported as a warning.
pub fn mollify(field: &[f64], spec: &MollifierSpec, dx: f64, boundary: XBoundary) -> Vec<f64> {
    if !spec.resolves(dx) {
        log::warn!(
            "mollifier width {:.3e} is below dx = {:.3e}; falling back to identity",
            spec.eps,
            dx
        );
        return field.to_vec();
    }
    let w = spec.weights(dx);
    let half = (w.len() / 2) as isize;
    let n = field.len() as isize;
    let mut out = vec![0.0; field.len()];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, wk) in w.iter().enumerate() {
            if *wk == 0.0 {
                continue;
            }
            let src = i as isize - (k as isize - half);
            let src = match boundary {
                XBoundary::Periodic => src.rem_euclid(n),
                XBoundary::FreeFlow => {
                    if src < 0 || src >= n {
                        continue;
                    }
                    src
                }
            };
            acc += wk * field[src as usize];
        }
        *o = acc * dx;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_kernel_has_unit_integral_and_support() {
        let dx = 0.01;
        for eps in [0.02, 0.05, 0.137] {
            let spec = MollifierSpec::new(eps);
            let w = spec.weights(dx);
            let sum: f64 = w.iter().sum::<f64>() * dx;
            assert!((sum - 1.0).abs() < 1e-14);
            let half = (w.len() / 2) as f64;
            for (k, wk) in w.iter().enumerate() {
                assert!(*wk >= 0.0);
                if ((k as f64 - half) * dx).abs() >= eps {
                    assert_eq!(*wk, 0.0);
                }
            }
        }
    }

    #[test]
    fn constant_field_passes_through_periodic() {
        let field = vec![2.5; 64];
        let out = mollify(&field, &MollifierSpec::new(0.1), 1.0 / 64.0, XBoundary::Periodic);
        for v in out {
            assert!((v - 2.5).abs() < 1e-13);
        }
    }

    #[test]
    fn point_mass_spreads_into_bump() {
        let n = 101;
        let dx = 0.01;
        let eps = 0.05;
        let mut field = vec![0.0; n];
        field[50] = 1.0 / dx;
        let out = mollify(&field, &MollifierSpec::new(eps), dx, XBoundary::FreeFlow);
        let total: f64 = out.iter().sum::<f64>() * dx;
        assert!((total - 1.0).abs() < 1e-12);
        for (i, v) in out.iter().enumerate() {
            let dist = (i as f64 - 50.0).abs() * dx;
            if dist >= eps {
                assert_eq!(*v, 0.0);
            } else {
                // direct kernel evaluation, normalized by the continuous integral of θ
                assert!(*v > 0.0);
            }
        }
        // shape matches θ_ε up to the discrete normalization constant
        let c_disc = out[50] / bump(0.0);
        for (i, v) in out.iter().enumerate() {
            let s = (i as f64 - 50.0) * dx / eps;
            assert!((v - c_disc * bump(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn narrow_width_falls_back_to_identity() {
        let field: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let out = mollify(&field, &MollifierSpec::new(0.05), 0.1, XBoundary::FreeFlow);
        assert_eq!(out, field);
    }
}
