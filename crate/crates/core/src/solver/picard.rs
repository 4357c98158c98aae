//! Picard iteration for the regularized equation.
//!
//! Iterate `n + 1` solves the linear equation whose drift, density and
//! velocity are frozen from iterate `n` at the same time level; the first
//! iterate is the initial datum held constant in time. Each iterate is
//! computed with the same splitting as the nonlinear solver, but without the
//! mass rescaling, so it solves the linear problem as posed.

use serde::{Deserialize, Serialize};

use super::{local_coefficients, strang_step_with, LocalCoefficients, ModelParams, RunSettings};
use crate::error::Result;
use crate::grid::DistributionState;

/// Relative level below which successive differences count as converged.
const ROUNDOFF_REL: f64 = 1e-13;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PicardTrace {
    /// `d[n] = sup_t ‖f^{n+1}(t) − f^n(t)‖_∞`
    pub d: Vec<f64>,
    /// `d` grew for three consecutive iterates.
    pub diverged: bool,
    #[serde(skip)]
    pub final_state: Option<DistributionState>,
}

impl PicardTrace {
    /// Whether `d[n]` is non-increasing for all `n ≥ from`, ignoring
    /// fluctuations at roundoff level.
    pub fn tail_monotone(&self, from: usize, scale: f64) -> bool {
        let floor = ROUNDOFF_REL * scale.max(f64::MIN_POSITIVE);
        self.d.iter().skip(from).collect::<Vec<_>>().windows(2).all(|w| *w[1] <= *w[0] || *w[1] <= floor)
    }
}

fn growth_streak(d: &[f64]) -> bool {
    d.windows(4).any(|w| w[1] > w[0] && w[2] > w[1] && w[3] > w[2])
}

/// Run `n_iters` Picard iterates on `[0, t_final]`.
pub fn picard_run(
    f0: &DistributionState,
    params: &ModelParams,
    n_iters: usize,
    settings: &RunSettings,
) -> Result<PicardTrace> {
    params.validate()?;
    let dt = settings.dt();
    let n_steps = settings.n_steps;
    // iterate 0: constant in time
    let c0 = local_coefficients(f0, params);
    let mut frozen: Vec<Vec<LocalCoefficients>> = vec![c0; n_steps];
    let mut prev_states: Vec<DistributionState> = vec![f0.clone(); n_steps];
    let mut d = Vec::with_capacity(n_iters);
    let mut last = f0.clone();
    for _ in 0..n_iters {
        let mut f = f0.clone();
        let mut own = Vec::with_capacity(n_steps);
        let mut states = Vec::with_capacity(n_steps);
        let mut diff = 0.0_f64;
        for (k, ck) in frozen.iter().enumerate() {
            strang_step_with(&mut f, dt, params.boundary, false, |mid| {
                own.push(local_coefficients(mid, params));
                ck.clone()
            });
            super::ensure_finite(&prev_states[k], &f)?;
            diff = diff.max(f.sup_distance(&prev_states[k]));
            states.push(f.clone());
        }
        d.push(diff);
        frozen = own;
        prev_states = states;
        last = f;
    }
    last.t = settings.t_final;
    let diverged = growth_streak(&d);
    Ok(PicardTrace { d, diverged, final_state: Some(last) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{PhaseGrid, XBoundary};
    use crate::init::init_rectangle;

    #[test]
    fn zero_data_gives_zero_trace() {
        let g = PhaseGrid::new(0.0, 1.0, 2.0, 8, 8).unwrap();
        let f = DistributionState::zeros(g);
        let s = RunSettings::new(0.1, 0.02, 5).unwrap();
        let tr = picard_run(&f, &ModelParams::regularized(0.1, XBoundary::FreeFlow), 4, &s).unwrap();
        assert_eq!(tr.d, vec![0.0; 4]);
        assert!(tr.tail_monotone(0, 0.0));
        assert!(!tr.diverged);
    }

    #[test]
    fn short_horizon_contracts() {
        let g = PhaseGrid::new(-0.5, 2.0, 2.4, 32, 32).unwrap();
        let f = init_rectangle(&g, (0.0, 1.0), (1.0, 2.0), 1.0).unwrap();
        let s = RunSettings::new(0.25, 0.5 * g.dx() / g.v_max, 10).unwrap();
        let tr = picard_run(&f, &ModelParams::regularized(0.1, XBoundary::FreeFlow), 6, &s).unwrap();
        assert!(tr.tail_monotone(2, f.linf()), "{:?}", tr.d);
        assert!(tr.d[5] < 1e-2 * tr.d[1], "{:?}", tr.d);
    }

    #[test]
    fn growth_streak_detection() {
        assert!(growth_streak(&[1.0, 2.0, 3.0, 4.0]));
        assert!(!growth_streak(&[1.0, 2.0, 3.0, 2.0, 5.0]));
    }
}
