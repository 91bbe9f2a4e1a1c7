//! Run orchestration: warm-up plus measured periods, artifact emission and
//! parameter sweeps.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::diagnostics::{fluid_accel_profile, CycleStats, Recorder, CYCLE};
use crate::error::{DiagnosticsError, RunError};
use crate::field::FlowField;
use crate::geometry::WallState;
use crate::output::{create_dir, sci, write_text, Table};
use crate::params::{DimensionlessParams, NumericalParams};
use crate::solver::{stability_limit, Simulation};

/// Phases within the last measured cycle at which throat profiles are kept.
pub const PROFILE_PHASES: [f64; 4] = [0.0, 0.5 * PI, PI, 1.5 * PI];

pub const PROFILES_CSV: &str = "profiles.csv";
pub const TIMESERIES_CSV: &str = "timeseries.csv";
pub const AXIAL_CSV: &str = "axial.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const REPORT_TXT: &str = "report.txt";
pub const CONFIG_ECHO: &str = "config.resolved";
pub const SWEEP_SUMMARY_CSV: &str = "sweep_summary.csv";

/// Radial profiles at the probe node at one phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    pub phase: f64,
    pub t: f64,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub theta: Vec<f64>,
    pub accel: Vec<f64>,
}

/// Everything a periodic run produces in memory.
#[derive(Debug, Clone)]
pub struct PeriodicRun {
    pub params: DimensionlessParams,
    pub numerics: NumericalParams,
    /// Axial node nearest the throat.
    pub probe: usize,
    pub recorder: Recorder,
    pub profiles: Vec<PhaseProfile>,
    pub final_state: FlowField,
    pub final_walls: Vec<WallState>,
    pub stability_limit: f64,
    pub steps: u64,
    pub elapsed: Duration,
}

impl PeriodicRun {
    pub fn last_cycle(&self) -> Result<&CycleStats, DiagnosticsError> {
        self.recorder.last_cycle()
    }

    /// Profile captured at `phase` (one of [`PROFILE_PHASES`]).
    pub fn profile(&self, phase: f64) -> Option<&PhaseProfile> {
        self.profiles.iter().find(|p| (p.phase - phase).abs() < 1e-12)
    }
}

fn capture_profile(sim: &Simulation, probe: usize, phase: f64) -> PhaseProfile {
    let s = sim.state();
    let accel = if sim.step_count() == 0 {
        vec![0.0; sim.numerics().radial_nodes()]
    } else {
        fluid_accel_profile(sim.previous(), s, sim.previous_walls(), sim.numerics(), probe)
    };
    PhaseProfile {
        phase,
        t: s.t,
        u: s.u.row(probe).to_vec(),
        w: s.w.row(probe).to_vec(),
        theta: s.theta.row(probe).to_vec(),
        accel,
    }
}

/// Marches `warmup_periods + measure_periods` forcing cycles from rest,
/// keeping every cycle's statistics, a time series from the end of warm-up
/// every `cadence` steps, and throat profiles at [`PROFILE_PHASES`] of the
/// last cycle.
pub fn run_periodic(p: &DimensionlessParams, n: &NumericalParams, cadence: u64) -> Result<PeriodicRun, RunError> {
    let start = Instant::now();
    let mut sim = Simulation::new(*p, *n)?;
    let probe = n.nearest_node(p.shape.throat());
    let warmup = n.warmup_periods as f64 * CYCLE;
    let total = (n.warmup_periods + n.measure_periods) as f64;
    let end = total * CYCLE;
    let last_start = (total - 1.0) * CYCLE;
    let mut recorder = Recorder::new(p, n, probe, cadence).store_from(warmup);
    let mut profiles = Vec::with_capacity(PROFILE_PHASES.len());
    let mut next_phase = 0;
    let half = 0.5 * n.dt;
    let take_profiles = |sim: &Simulation, next: &mut usize, out: &mut Vec<PhaseProfile>| {
        while *next < PROFILE_PHASES.len() && sim.time() >= last_start + PROFILE_PHASES[*next] - half {
            out.push(capture_profile(sim, probe, PROFILE_PHASES[*next]));
            *next += 1;
        }
    };
    take_profiles(&sim, &mut next_phase, &mut profiles);
    while sim.time() < end - 1e-9 * n.dt {
        sim.advance()?;
        recorder.collect(&sim);
        take_profiles(&sim, &mut next_phase, &mut profiles);
    }
    recorder.finish(sim.time());
    Ok(PeriodicRun {
        params: *p,
        numerics: *n,
        probe,
        recorder,
        profiles,
        final_state: sim.state().clone(),
        final_walls: sim.walls().to_vec(),
        stability_limit: stability_limit(p, n),
        steps: sim.step_count(),
        elapsed: start.elapsed(),
    })
}

/// Throat profiles in long form: one row per `(phase, xi)`.
pub fn profiles_table(run: &PeriodicRun) -> Table {
    let mut t = Table::new(&["phase", "t", "xi", "u", "w", "theta", "F"]);
    for pr in &run.profiles {
        for j in 0..pr.u.len() {
            t.push_numbers(&[
                pr.phase,
                pr.t,
                run.numerics.xi(j),
                pr.u[j],
                pr.w[j],
                pr.theta[j],
                pr.accel[j],
            ]);
        }
    }
    t
}

/// Probe-node time series over the measured periods.
pub fn timeseries_table(run: &PeriodicRun) -> Table {
    let mut t = Table::new(&["T", "t", "Q", "tau_w", "lambda"]);
    for s in run.recorder.series() {
        t.push_numbers(&[s.report_time, s.t, s.q[run.probe], s.tau_w[run.probe], s.lambda_inst]);
    }
    t
}

/// Axial distributions over the last cycle.
pub fn axial_table(run: &PeriodicRun) -> Result<Table, RunError> {
    let c = run.last_cycle()?;
    let mut t = Table::new(&["z", "R", "tau_w", "Nu"]);
    for i in 0..run.numerics.axial_nodes() {
        t.push_numbers(&[
            run.numerics.z(i),
            run.final_walls[i].radius,
            c.tau_peak_axial[i],
            c.nu_mean_axial[i],
        ]);
    }
    Ok(t)
}

/// One row per completed cycle.
pub fn summary_table(run: &PeriodicRun) -> Table {
    let mut t = Table::new(&[
        "cycle",
        "Q_mean",
        "Q_max",
        "Q_min",
        "lambda_cycle",
        "tau_peak",
        "tau_min",
        "tau_amplitude",
        "tau_peak_z",
        "Nu_max",
        "F_peak",
        "periodicity_defect",
    ]);
    for c in run.recorder.cycles() {
        t.push_numbers(&[
            c.index as f64,
            c.q_mean,
            c.q_max,
            c.q_min,
            c.lambda_cycle,
            c.peak_tau,
            c.min_tau,
            c.tau_amplitude(),
            c.peak_tau_over_z(),
            c.max_nu(),
            c.peak_accel,
            c.periodicity_defect,
        ]);
    }
    t
}

fn report_text(run: &PeriodicRun) -> Result<String, RunError> {
    let c = run.last_cycle()?;
    let dt = run.numerics.dt;
    Ok(format!(
        "periodicity_defect = {}\n\
         stability_limit = {}\n\
         dt = {}\n\
         stability_margin = {}\n\
         steps = {}\n\
         Q_mean = {}\n\
         lambda_cycle = {}\n\
         wall_clock_s = {:.3}\n",
        sci(c.periodicity_defect),
        sci(run.stability_limit),
        sci(dt),
        sci(dt / run.stability_limit),
        run.steps,
        sci(c.q_mean),
        sci(c.lambda_cycle),
        run.elapsed.as_secs_f64(),
    ))
}

/// Writes the four CSVs and the report for a finished run.
pub fn write_artifacts(run: &PeriodicRun, out: &Path) -> Result<(), RunError> {
    create_dir(out)?;
    profiles_table(run).write(&out.join(PROFILES_CSV))?;
    timeseries_table(run).write(&out.join(TIMESERIES_CSV))?;
    axial_table(run)?.write(&out.join(AXIAL_CSV))?;
    summary_table(run).write(&out.join(SUMMARY_CSV))?;
    write_text(&out.join(REPORT_TXT), &report_text(run)?)
}

/// Runs a single configuration and writes its artifact set to `out`.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<PeriodicRun, RunError> {
    create_dir(out)?;
    write_text(&out.join(CONFIG_ECHO), &cfg.echo())?;
    let result = run_periodic(&cfg.params, &cfg.numerics, cfg.cadence)?;
    write_artifacts(&result, out)?;
    log::info!(
        "{}: {} steps in {:.2} s",
        out.display(),
        result.steps,
        result.elapsed.as_secs_f64()
    );
    Ok(result)
}

/// Scalar results of one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub q_mean: f64,
    pub lambda_cycle: f64,
    pub peak_tau: f64,
    pub max_nu: f64,
    pub centerline_u: f64,
}

impl PointSummary {
    fn of(run: &PeriodicRun) -> Result<Self, RunError> {
        let c = run.last_cycle()?;
        Ok(Self {
            q_mean: c.q_mean,
            lambda_cycle: c.lambda_cycle,
            peak_tau: c.peak_tau,
            max_nu: c.max_nu(),
            centerline_u: run.profile(0.0).map_or(f64::NAN, |p| p.u[0]),
        })
    }
}

#[derive(Debug)]
pub struct SweepPoint {
    pub assignments: Vec<(String, f64)>,
    pub dir: PathBuf,
    pub result: Result<PointSummary, RunError>,
}

/// Runs every sweep point in its own subdirectory, at most `workers` at a
/// time, and writes `sweep_summary.csv`. Failed points are recorded, not
/// fatal. Without sweep axes this is [`run`] on `out`.
pub fn sweep(cfg: &RunConfig, out: &Path, workers: usize) -> Result<Vec<SweepPoint>, RunError> {
    if cfg.sweep.is_empty() {
        let r = run(cfg, out)?;
        return Ok(vec![SweepPoint {
            assignments: Vec::new(),
            dir: out.to_path_buf(),
            result: PointSummary::of(&r),
        }]);
    }
    create_dir(out)?;
    write_text(&out.join(CONFIG_ECHO), &cfg.echo())?;
    let points = cfg.sweep_points()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| RunError::io(out, std::io::Error::other(e)))?;
    let results: Vec<SweepPoint> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(k, (assign, point))| {
                let dir = out.join(format!("point_{k:03}"));
                let result = run(point, &dir).and_then(|r| PointSummary::of(&r));
                if let Err(e) = &result {
                    log::warn!("{}: {e}", dir.display());
                }
                SweepPoint {
                    assignments: assign.clone(),
                    dir,
                    result,
                }
            })
            .collect()
    });
    sweep_table(cfg, &results).write(&out.join(SWEEP_SUMMARY_CSV))?;
    Ok(results)
}

fn sweep_table(cfg: &RunConfig, points: &[SweepPoint]) -> Table {
    let mut header: Vec<&str> = vec!["point"];
    header.extend(cfg.sweep.iter().map(|a| a.key.as_str()));
    header.extend(["status", "Q_mean", "lambda_cycle", "tau_peak", "Nu_max", "u_center"]);
    let mut t = Table::new(&header);
    for p in points {
        let mut row = vec![p
            .dir
            .file_name()
            .map_or(String::new(), |f| f.to_string_lossy().into_owned())];
        row.extend(p.assignments.iter().map(|(_, v)| sci(*v)));
        match &p.result {
            Ok(s) => {
                row.push("ok".into());
                row.extend([s.q_mean, s.lambda_cycle, s.peak_tau, s.max_nu, s.centerline_u].map(sci));
            }
            Err(e) => {
                row.push(format!("failed: {e}"));
                row.extend(vec![sci(f64::NAN); 5]);
            }
        }
        t.push(row);
    }
    t
}
