#![allow(dead_code)]

use std::path::PathBuf;

use kinetic_traffic::config::ScenarioConfig;
use kinetic_traffic::diagnostics::DiagnosticsReport;
use kinetic_traffic::grid::PhaseGrid;
use kinetic_traffic::solver::{run, ModelParams};

pub const SCENARIOS: &[&str] = &[
    "compare_particles",
    "euler_smooth",
    "picard_rectangle",
    "rectangle",
    "rectangle_regularized",
    "sine_scaled",
    "sine_sweep",
    "sine_sweep_ill_prepared",
    "zero",
];

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.json"))
}

pub fn scenario(name: &str) -> ScenarioConfig {
    ScenarioConfig::load(&scenario_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// One grid run of the kinetic solver.
pub struct KineticRun {
    pub label: String,
    pub grid: PhaseGrid,
    pub params: ModelParams,
    pub dt: f64,
    pub reports: Vec<DiagnosticsReport>,
}

/// Every grid kinetic run a scenario implies: one per swept ε, one otherwise.
pub fn kinetic_runs(name: &str) -> Vec<KineticRun> {
    let config = scenario(name);
    let grid = config.grid.build().unwrap();
    let settings = config.run_settings(&grid).unwrap();
    let cases: Vec<(String, Option<f64>, Option<f64>)> = match &config.sweep {
        Some(s) => s
            .eps_values
            .iter()
            .map(|&e| (format!("{name} eps={e}"), Some(e), Some(s.ill_prepared_eps.unwrap_or(e))))
            .collect(),
        None => vec![(name.to_string(), None, None)],
    };
    cases
        .into_iter()
        .map(|(label, eps_scale, eps_init)| {
            let params = config.model(eps_scale).unwrap();
            let f0 = config.initial.build(&grid, eps_init).unwrap();
            let out = run(&f0, &params, &settings).unwrap();
            KineticRun { label, grid, params, dt: settings.dt(), reports: out.reports }
        })
        .collect()
}
