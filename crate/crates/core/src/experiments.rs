//! The four commands of the command-line tool. Each writes its CSV outputs
//! and a `manifest.json` into the output directory and maps its outcome to
//! an exit code.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{CompareMode, EulerReference, InitialData, ScenarioConfig, Tolerances};
use crate::diagnostics::DiagnosticsReport;
use crate::error::{Error, Result};
use crate::euler::{crossing_time, fv_run, sticky_run, LineGrid, StickyParticles};
use crate::grid::{DistributionState, PhaseGrid, XBoundary};
use crate::init::preparation_mismatch;
use crate::io;
use crate::metrics::{
    monokinetic_deviation, relative_entropy, wasserstein1_1d, ConvergenceRecord, ConvergenceRow, Measure1d,
};
use crate::moments::{compute_moments, VACUUM_FLOOR_REL};
use crate::solver::checks::{self, Check};
use crate::solver::particles::{particle_run, ParticleSettings};
use crate::solver::picard::picard_run;
use crate::solver::{run, run_with_observer, ModelParams, Variant};

pub const SCHEME_VERSION: &str = "strang-upwind-exact-local/1";
pub const RNG_NAME: &str = "ChaCha8Rng";

/// Constant of the frozen grid-vs-particle bound `C (Δx + Δv + N^{-1/2})`.
pub const PARTICLE_W1_CONSTANT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Sweep,
    Picard,
    Compare,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Picard => "picard",
            Command::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RngRecord {
    pub generator: &'static str,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentManifest {
    pub command: Command,
    pub config: Option<ScenarioConfig>,
    pub code_version: &'static str,
    pub scheme_version: &'static str,
    pub tolerances: Tolerances,
    pub vacuum_floor_rel: f64,
    pub rng: Option<RngRecord>,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
    pub assertions: Vec<Check>,
    pub metrics: Map<String, Value>,
    pub error: Option<String>,
    pub exit_code: i32,
}

impl ExperimentManifest {
    fn new(command: Command) -> Self {
        Self {
            command,
            config: None,
            code_version: env!("CARGO_PKG_VERSION"),
            scheme_version: SCHEME_VERSION,
            tolerances: Tolerances::default(),
            vacuum_floor_rel: VACUUM_FLOOR_REL,
            rng: None,
            wall_time_s: 0.0,
            outputs: vec![],
            assertions: vec![],
            metrics: Map::new(),
            error: None,
            exit_code: 0,
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.assertions.iter().all(|c| c.passed)
    }

    fn metric(&mut self, key: &str, value: impl Serialize) {
        self.metrics.insert(key.to_string(), json!(value));
    }
}

/// Output directory plus the list of files written into it.
struct Out<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl Out<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Cfl { .. } | Error::InvalidGrid(_) | Error::InvalidInitialData(_) | Error::Json(_) => 2,
        Error::Io(_) => 2,
        Error::Numerical { .. } | Error::Metric(_) => 3,
    }
}

/// Run `command` and write its manifest. Returns the manifest, whose
/// `exit_code` is 0 on pass, 1 on a failed assertion, 2 on a configuration
/// error and 3 on a numerical failure.
pub fn execute(command: Command, config_path: &Path, out_dir: &Path, seed: Option<u64>) -> ExperimentManifest {
    let start = Instant::now();
    let mut manifest = ExperimentManifest::new(command);
    let result = std::fs::create_dir_all(out_dir)
        .map_err(Error::from)
        .and_then(|_| ScenarioConfig::load(config_path))
        .and_then(|config| {
            manifest.tolerances = config.tolerances;
            manifest.config = Some(config.clone());
            let mut out = Out { dir: out_dir, files: vec![] };
            let r = match command {
                Command::Simulate => cmd_simulate(&config, &mut out, &mut manifest),
                Command::Sweep => cmd_sweep(&config, &mut out, &mut manifest),
                Command::Picard => cmd_picard(&config, &mut out, &mut manifest),
                Command::Compare => cmd_compare(&config, &mut out, &mut manifest, seed.unwrap_or(0)),
            };
            manifest.outputs = out.files;
            r
        });
    manifest.exit_code = match &result {
        Ok(()) if manifest.passed() => 0,
        Ok(()) => 1,
        Err(e) => {
            log::error!("{e}");
            manifest.error = Some(e.to_string());
            exit_code_for(e)
        }
    };
    manifest.wall_time_s = start.elapsed().as_secs_f64();
    if out_dir.is_dir() {
        manifest.outputs.push("manifest.json".into());
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        if let Err(e) = std::fs::write(out_dir.join("manifest.json"), text) {
            log::error!("cannot write manifest: {e}");
        }
    }
    manifest
}

/// Mass, energy and support checks for one run. The frozen L∞ constant only
/// applies at `κ = 1`; under Euler scaling the bound grows with `1/ε`.
pub fn run_level_checks(
    reports: &[DiagnosticsReport],
    grid: &PhaseGrid,
    params: &ModelParams,
    dt: f64,
    tol: &Tolerances,
) -> Vec<Check> {
    let mut out = vec![
        checks::check_mass(reports, tol.mass_rel),
        checks::check_energy(reports, tol.energy_rel),
        checks::check_velocity_envelope(reports, grid.dv(), params.kappa()),
    ];
    if params.variant != Variant::Scaled {
        out.push(checks::check_linf(reports));
    }
    if params.boundary == XBoundary::FreeFlow {
        out.push(checks::check_x_envelope(reports, grid.dx(), dt));
    }
    out
}

fn cmd_simulate(config: &ScenarioConfig, out: &mut Out, manifest: &mut ExperimentManifest) -> Result<()> {
    let grid = config.grid.build()?;
    let params = config.model(None)?;
    let settings = config.run_settings(&grid)?;
    let f0 = config.initial.build(&grid, None)?;
    let every = config.snapshot_every;
    let mut k = 0usize;
    let mut snapshot_names = vec![];
    let dir = out.dir.to_path_buf();
    let result = run_with_observer(&f0, &params, &settings, |f| {
        let last = k == settings.report_steps().len();
        if (every > 0 && k.is_multiple_of(every)) || last {
            let name = format!("snapshot_{k:04}.csv");
            io::write_snapshot(&dir.join(&name), f)?;
            snapshot_names.push(name);
        }
        k += 1;
        Ok(())
    })?;
    out.files.extend(snapshot_names);
    io::write_diagnostics(&out.path("diagnostics.csv"), &result.reports)?;
    manifest.assertions =
        run_level_checks(&result.reports, &grid, &params, settings.dt(), &config.tolerances);
    manifest.metric("n_steps", settings.n_steps);
    manifest.metric("dt", settings.dt());
    manifest.metric("mass_drift_rel", checks::mass_drift(&result.reports));
    manifest.metric("energy_increase_rel", checks::energy_increase(&result.reports));
    manifest.metric("linf_ratio", checks::check_linf(&result.reports).value);
    manifest.metric("momentum_identity_residual", checks::momentum_identity_residual(&result.reports));
    Ok(())
}

/// Kinetic and hydrodynamic errors over one run, maximized over reports.
struct SweepErrors {
    w1: f64,
    re: f64,
    mono: f64,
}

fn cmd_sweep(config: &ScenarioConfig, out: &mut Out, manifest: &mut ExperimentManifest) -> Result<()> {
    let sweep = config.sweep.as_ref().ok_or_else(|| Error::Config("sweep command needs a `sweep` section".into()))?;
    if sweep.eps_values.len() < 4 {
        return Err(Error::Config(format!(
            "a sweep needs at least 4 eps values to fit a slope, got {}",
            sweep.eps_values.len()
        )));
    }
    if sweep.eps_values.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Config("sweep eps values must be positive".into()));
    }
    if config.variant != Variant::Scaled {
        return Err(Error::Config("a sweep runs the scaled variant".into()));
    }
    let Some((rho0, u0)) = config.initial.macroscopic() else {
        return Err(Error::Config("a sweep needs well_prepared initial data".into()));
    };
    let grid = config.grid.build()?;
    let window = crossing_time(&u0, grid.x_min, grid.x_max);
    manifest.metric("smooth_window_end", window);
    manifest.metric("smooth_window_note", "crossing time of u0; heuristic stand-in for the strong-solution horizon");
    if !(config.t_final < window) {
        return Err(Error::Config(format!("t_final = {} is not inside the smooth window (crossing time {window})", config.t_final)));
    }
    let mut eps_values = sweep.eps_values.clone();
    eps_values.sort_by(|a, b| b.total_cmp(a));
    eps_values.dedup();
    let settings = config.run_settings(&grid)?;
    let mut times = vec![0.0];
    times.extend(settings.report_steps().iter().map(|&k| k as f64 * settings.dt()));
    *times.last_mut().unwrap() = settings.t_final;

    let line = LineGrid::new(grid.x_min, grid.x_max, grid.nx, config.boundary)?;
    let reference: Vec<(Vec<f64>, Vec<f64>)> = match sweep.euler_reference {
        EulerReference::Fv => fv_run(&rho0, &u0, &line, &times, config.cfl)?
            .into_iter()
            .map(|s| {
                let u = s.velocity();
                (s.rho, u)
            })
            .collect(),
        EulerReference::Sticky => {
            let p = StickyParticles::from_profiles(&rho0, &u0, &line, sweep.sticky_per_cell)?;
            sticky_run(&p, &line, &times)?.iter().map(|s| s.on_grid(&line)).collect()
        }
    };
    let frames: Vec<(f64, Vec<f64>, Vec<f64>)> =
        times.iter().zip(&reference).map(|(&t, (r, u))| (t, r.clone(), u.clone())).collect();
    io::write_euler_trajectory(&out.path("euler_reference.csv"), &line, &frames)?;

    let mut rows = vec![];
    let mut per_eps = vec![];
    for &eps in &eps_values {
        let f0 = config.initial.build(&grid, Some(sweep.ill_prepared_eps.unwrap_or(eps)))?;
        let mismatch = preparation_mismatch(&f0, &rho0, &u0);
        let params = config.model(Some(eps))?;
        let mut k = 0;
        let mut errs = SweepErrors { w1: 0.0, re: 0.0, mono: 0.0 };
        let result = run_with_observer(&f0, &params, &settings, |f| {
            let (rho, u) = &reference[k];
            let mf = compute_moments(f);
            errs.re = errs.re.max(relative_entropy(&mf, rho, u, grid.dx())?);
            let d = monokinetic_deviation(f, rho, u)?;
            errs.w1 = errs.w1.max(d.term2);
            errs.mono = errs.mono.max(d.bound);
            k += 1;
            Ok(())
        })?;
        io::write_diagnostics(&out.path(&format!("diagnostics_eps_{eps}.csv")), &result.reports)?;
        log::info!("eps = {eps}: w1 = {:.4e}, re = {:.4e}, mono = {:.4e}", errs.w1, errs.re, errs.mono);
        per_eps.push(json!({
            "eps": eps,
            "initial_velocity_mismatch": mismatch.velocity,
            "initial_energy_mismatch": mismatch.energy,
            "initial_monokinetic_deviation": mismatch.monokinetic,
            "mass_drift_rel": checks::mass_drift(&result.reports),
            "energy_increase_rel": checks::energy_increase(&result.reports),
        }));
        rows.push(ConvergenceRow { eps, w1_sup: errs.w1, re_sup: errs.re, mono_sup: errs.mono });
    }
    let record = ConvergenceRecord::new(rows)?;
    io::write_text(&out.path("convergence.csv"), &record.to_csv())?;
    let tol = &config.tolerances;
    let in_window = |s: f64, w: (f64, f64)| s >= w.0 && s <= w.1;
    let summary = json!({
        "w1": {"slope": record.w1_fit.slope, "residual": record.w1_fit.residual, "window": tol.w1_slope},
        "relative_entropy": {"slope": record.re_fit.slope, "residual": record.re_fit.residual, "window": tol.re_slope},
        "monokinetic_bound": {"slope": record.mono_fit.slope, "residual": record.mono_fit.residual},
        "rows": record.rows,
    });
    io::write_text(&out.path("convergence_summary.json"), &serde_json::to_string_pretty(&summary)?)?;
    let slope_check = |name: &str, s: f64, w: (f64, f64)| Check {
        name: name.to_string(),
        passed: in_window(s, w),
        value: s,
        limit: if s < w.0 { w.0 } else { w.1 },
        detail: format!("window [{}, {}]", w.0, w.1),
    };
    manifest.assertions = vec![
        slope_check("w1_slope", record.w1_fit.slope, tol.w1_slope),
        slope_check("relative_entropy_slope", record.re_fit.slope, tol.re_slope),
    ];
    manifest.metric("per_eps", per_eps);
    manifest.metric("monokinetic_slope", record.mono_fit.slope);
    Ok(())
}

fn cmd_picard(config: &ScenarioConfig, out: &mut Out, manifest: &mut ExperimentManifest) -> Result<()> {
    let pc = config.picard.ok_or_else(|| Error::Config("picard command needs a `picard` section".into()))?;
    if pc.n_iters < 2 {
        return Err(Error::Config(format!("picard needs n_iters >= 2, got {}", pc.n_iters)));
    }
    let grid = config.grid.build()?;
    let params = config.model(None)?;
    let settings = config.run_settings(&grid)?;
    let f0 = config.initial.build(&grid, None)?;
    let trace = picard_run(&f0, &params, pc.n_iters, &settings)?;
    io::write_picard_trace(&out.path("picard_trace.csv"), &trace.d)?;
    let monotone = trace.tail_monotone(pc.monotone_from, f0.linf());
    let tail_growth = trace
        .d
        .iter()
        .skip(pc.monotone_from)
        .collect::<Vec<_>>()
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    manifest.assertions = vec![Check {
        name: "picard_tail_monotone".into(),
        passed: monotone,
        value: tail_growth,
        limit: 0.0,
        detail: format!("d_n non-increasing for n >= {}", pc.monotone_from),
    }];
    manifest.metric("d", &trace.d);
    manifest.metric("diverged", trace.diverged);
    if let Some(last) = &trace.final_state {
        let direct = run(&f0, &params, &settings)?.final_state;
        manifest.metric("final_iterate_vs_direct_sup", last.sup_distance(&direct));
        manifest.metric("dt", settings.dt());
    }
    Ok(())
}

fn density_histogram(f: &DistributionState) -> Result<Measure1d> {
    let mf = compute_moments(f);
    Measure1d::histogram(f.grid.x_min, f.grid.dx(), &mf.rho)
}

fn cmd_compare(config: &ScenarioConfig, out: &mut Out, manifest: &mut ExperimentManifest, seed: u64) -> Result<()> {
    let cc = config.compare.ok_or_else(|| Error::Config("compare command needs a `compare` section".into()))?;
    let grid = config.grid.build()?;
    let settings = config.run_settings(&grid)?;
    match cc.mode {
        CompareMode::Kinetic | CompareMode::SelfCheck => {
            let params = config.model(None)?;
            let f0 = config.initial.build(&grid, None)?;
            let a = run(&f0, &params, &settings)?;
            io::write_diagnostics(&out.path("diagnostics_grid.csv"), &a.reports)?;
            let ha = density_histogram(&a.final_state)?;
            let (w1, bound) = if cc.mode == CompareMode::SelfCheck {
                let b = run(&f0, &params, &settings)?;
                io::write_diagnostics(&out.path("diagnostics_grid_repeat.csv"), &b.reports)?;
                (wasserstein1_1d(&ha, &density_histogram(&b.final_state)?)?, 0.0)
            } else {
                manifest.rng = Some(RngRecord { generator: RNG_NAME, seed });
                let opts = ParticleSettings::new(cc.n_particles, seed);
                let p = particle_run(&f0, &params, &settings, &opts)?;
                io::write_diagnostics(&out.path("diagnostics_particles.csv"), &p.reports)?;
                let e = &p.final_ensemble;
                let hb = Measure1d::atoms(&e.x, &e.w)?;
                let scale = grid.dx() + grid.dv() + (cc.n_particles as f64).powf(-0.5);
                let bound = cc.w1_bound.unwrap_or(PARTICLE_W1_CONSTANT * scale);
                manifest.metric("w1_over_scale", wasserstein1_1d(&ha, &hb)? / scale);
                manifest.metric("mass_particles", hb.mass());
                (wasserstein1_1d(&ha, &hb)?, bound)
            };
            manifest.metric("w1", w1);
            manifest.metric("mass_grid", ha.mass());
            manifest.assertions = vec![Check::at_most("density_w1_agreement", w1, bound)];
        }
        CompareMode::Euler => {
            let InitialData::WellPrepared { rho0, u0, .. } = config.initial else {
                return Err(Error::Config("euler comparison needs rho0 and u0 (well_prepared initial data)".into()));
            };
            let window = crossing_time(&u0, grid.x_min, grid.x_max);
            if !(config.t_final < window) {
                return Err(Error::Config(format!(
                    "t_final = {} is not inside the smooth window (crossing time {window})",
                    config.t_final
                )));
            }
            let line = LineGrid::new(grid.x_min, grid.x_max, grid.nx, config.boundary)?;
            let mut times = vec![0.0];
            times.extend(settings.report_steps().iter().map(|&k| k as f64 * settings.dt()));
            *times.last_mut().unwrap() = settings.t_final;
            let fv = fv_run(&rho0, &u0, &line, &times, config.cfl)?;
            let p0 = StickyParticles::from_profiles(&rho0, &u0, &line, cc.sticky_per_cell)?;
            let st = sticky_run(&p0, &line, &times)?;
            let mut w1 = 0.0_f64;
            manifest.metric("mass_fv", fv[0].total_mass());
            manifest.metric("mass_sticky", p0.m.iter().sum::<f64>());
            for (a, b) in fv.iter().zip(&st) {
                let ha = Measure1d::histogram(line.x_min, line.dx(), &a.rho)?;
                let hb = Measure1d::atoms(&b.x, &b.m)?;
                w1 = w1.max(wasserstein1_1d(&ha, &hb)?);
            }
            let frames: Vec<(f64, Vec<f64>, Vec<f64>)> = fv.iter().map(|s| (s.t, s.rho.clone(), s.velocity())).collect();
            io::write_euler_trajectory(&out.path("euler_fv.csv"), &line, &frames)?;
            io::write_particle_dump(&out.path("euler_sticky_particles.csv"), &st)?;
            manifest.metric("w1", w1);
            manifest.metric("smooth_window_end", window);
            manifest.metric("shock_detected", fv.iter().any(|s| s.shock_detected));
            manifest.assertions =
                vec![Check::at_most("sticky_vs_fv_w1", w1, config.tolerances.euler_w1_dx * line.dx())];
        }
    }
    Ok(())
}
