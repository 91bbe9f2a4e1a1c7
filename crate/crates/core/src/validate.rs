//! Release gate: oracle comparisons and module invariants in one report.

use std::fmt;

use crate::config::{parse_config, RunConfig};
use crate::error::SolverError;
use crate::oracles::{bessel_i0, bessel_i0_terms, hartmann_pipe, poiseuille, stable_dt, steady_limit, steady_runner};
use crate::params::{DimensionlessParams, NumericalParams};
use crate::solver::{boundary_violations, stability_limit, Simulation};

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn record(&mut self, name: &'static str, passed: bool, detail: String) {
        log::debug!("{name}: {passed}");
        self.checks.push(Check { name, passed, detail });
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

/// Steady-oracle grid: the reference radial spacing on a short axial grid
/// (the rigid straight tube is uniform in `z`).
fn steady_grid(p: &DimensionlessParams) -> NumericalParams {
    let mut n = NumericalParams::new(p.shape.tube_length, p.shape.tube_length / 4.0, 0.025, 1.0)
        .expect("reference spacing divides the unit interval");
    n.dt = stable_dt(&steady_limit(p), &n, 0.9);
    n
}

fn steady_check(report: &mut Report, name: &'static str, p: DimensionlessParams, tol: f64) -> Option<f64> {
    let n = steady_grid(&p);
    match steady_runner(&p, &n, 2_000_000) {
        Ok(run) => {
            let exact = hartmann_pipe(p.forcing.mean_gradient, p.hartmann, &run.profile.xi);
            let err = run.profile.max_rel_error(&exact);
            report.record(
                name,
                err < tol,
                format!("max-norm error {err:.3e} (limit {tol}) after {} steps", run.steps),
            );
            Some(run.profile.centerline())
        }
        Err(e) => {
            report.record(name, false, e.to_string());
            None
        }
    }
}

/// Runs every check; never panics on a failed check.
pub fn validate() -> Report {
    let mut r = Report::default();

    let i0 = bessel_i0(2.0);
    r.record(
        "bessel_i0",
        bessel_i0(0.0) == 1.0 && (i0 - 2.279_585_302_336_067).abs() < 1e-12 && bessel_i0_terms(10.0) <= 40,
        format!("I0(2) = {i0:.15}, {} terms at x = 10", bessel_i0_terms(10.0)),
    );

    let pz = poiseuille(7.30, &[0.0, 0.5, 1.0]).u;
    let hz = hartmann_pipe(7.30, 2.0, &[0.0, 1.0]).u;
    r.record(
        "analytic_profiles",
        (pz[0] - 1.825).abs() < 1e-12 && (pz[1] - 1.36875).abs() < 1e-12 && pz[2] == 0.0 && hz[1] == 0.0,
        format!("poiseuille(0) = {}, hartmann(0) = {:.6}", pz[0], hz[0]),
    );

    let newtonian = DimensionlessParams {
        viscosity_ratio: 0.0,
        hartmann: 0.0,
        ..DimensionlessParams::default()
    };
    let u_newton = steady_check(&mut r, "steady_poiseuille", newtonian, 0.005);
    steady_check(
        &mut r,
        "steady_hartmann",
        DimensionlessParams {
            hartmann: 2.0,
            ..newtonian
        },
        0.01,
    );
    let micropolar = DimensionlessParams {
        viscosity_ratio: 0.1,
        ..newtonian
    };
    match (
        u_newton,
        steady_runner(&micropolar, &steady_grid(&micropolar), 2_000_000),
    ) {
        (Some(u0), Ok(run)) => {
            let u = run.profile.centerline();
            r.record(
                "micropolar_slows_flow",
                u < u0,
                format!("centreline {u:.6} vs Newtonian {u0:.6}"),
            );
        }
        (_, Err(e)) => r.record("micropolar_slows_flow", false, e.to_string()),
        (None, _) => r.record("micropolar_slows_flow", false, "no Newtonian reference".into()),
    }

    let p = DimensionlessParams::default();
    let mut n = NumericalParams::default();
    n.dt = 4.0 * stability_limit(&p, &n);
    let rejected = matches!(Simulation::new(p, n), Err(SolverError::Params(_)));
    let diverged = Simulation::with_unchecked_dt(p, n)
        .ok()
        .and_then(|mut sim| (0..20_000).find_map(|_| sim.advance().err()));
    r.record(
        "divergence_probe",
        rejected && matches!(diverged, Some(SolverError::Diverged { .. })),
        match &diverged {
            Some(e) => format!("expected failure observed: {e}"),
            None => "no divergence detected at 4x the stability limit".into(),
        },
    );

    let n = NumericalParams::default();
    let mut violations = 0;
    let mut steps = 0;
    if let Ok(mut sim) = Simulation::new(p, n) {
        for _ in 0..500 {
            if sim.advance().is_err() {
                violations += 1;
                break;
            }
            violations += boundary_violations(sim.state(), sim.walls());
            steps += 1;
        }
    }
    r.record(
        "boundary_conditions",
        violations == 0 && steps == 500,
        format!("{violations} violations over {steps} steps"),
    );

    let shape = p.shape;
    let floor = shape.min_radius();
    let mut lowest = f64::INFINITY;
    for k in 0..=100 {
        for s in 0..=16 {
            let z = shape.tube_length * k as f64 / 100.0;
            let t = std::f64::consts::TAU * s as f64 / 16.0;
            lowest = lowest.min(shape.radius(z, t).unwrap_or(f64::NAN));
        }
    }
    r.record(
        "geometry_bounds",
        lowest >= floor - 1e-12 && (lowest - floor).abs() < 1e-9,
        format!("sampled minimum radius {lowest:.9} vs bound {floor:.9}"),
    );

    let cfg = RunConfig::default();
    let echo_ok = parse_config(&cfg.echo()).map(|c| c == cfg).unwrap_or(false);
    let dt_err = parse_config("dt = 0.01")
        .err()
        .map(|e| e.to_string())
        .unwrap_or_default();
    r.record(
        "config_round_trip",
        echo_ok && dt_err.contains("stability limit"),
        format!("echo round-trips: {echo_ok}; oversized dt: {dt_err}"),
    );

    let short = |p: &DimensionlessParams| -> Option<Vec<f64>> {
        let mut sim = Simulation::new(*p, NumericalParams::default()).ok()?;
        for _ in 0..200 {
            sim.advance().ok()?;
        }
        Some(sim.state().u.as_slice().to_vec())
    };
    let (a, b) = (short(&p), short(&p));
    r.record(
        "determinism",
        a.is_some() && a == b,
        "two identical short runs compared bitwise".into(),
    );

    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pristine_build_validates() {
        let report = validate();
        assert!(report.passed(), "{report}");
        assert!(report.checks.iter().any(|c| c.name == "divergence_probe" && c.passed));
    }
}
