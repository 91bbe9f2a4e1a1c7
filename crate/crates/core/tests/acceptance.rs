//! Acceptance suite. Prints one PASS/FAIL line per criterion (with indented
//! detail lines) and exits nonzero if any criterion fails.

use std::collections::HashMap;
use std::fs;
use std::process::ExitCode;
use std::rc::Rc;
use std::time::Instant;

use stenoflow_core::diagnostics::CYCLE;
use stenoflow_core::oracles::{hartmann_pipe, observed_order_exact, poiseuille, steady_runner};
use stenoflow_core::runner::{write_artifacts, AXIAL_CSV, PROFILES_CSV, SUMMARY_CSV, TIMESERIES_CSV};
use stenoflow_core::solver::{boundary_violations, continuity_residual};
use stenoflow_core::{
    run_periodic, stability_limit, DimensionlessParams, NumericalParams, PeriodicRun, Simulation, SolverError,
};

const CADENCE: u64 = 25;

/// Periodic runs shared between criteria (the reference point recurs in
/// every trend family).
#[derive(Default)]
struct Runs {
    cache: HashMap<String, Rc<PeriodicRun>>,
}

impl Runs {
    fn get(&mut self, p: DimensionlessParams, n: NumericalParams) -> Rc<PeriodicRun> {
        let key = format!("{p:?}|{n:?}");
        if let Some(r) = self.cache.get(&key) {
            return Rc::clone(r);
        }
        let r = Rc::new(run_periodic(&p, &n, CADENCE).expect("trend run completes"));
        self.cache.insert(key, Rc::clone(&r));
        r
    }

    fn reference(&mut self, edit: impl FnOnce(&mut DimensionlessParams)) -> Rc<PeriodicRun> {
        let mut p = DimensionlessParams::default();
        edit(&mut p);
        self.get(p, NumericalParams::default())
    }
}

/// One criterion's verdict: a headline plus sub-checks.
struct Verdict {
    name: &'static str,
    checks: Vec<(bool, String)>,
}

impl Verdict {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checks: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, text: String) {
        self.checks.push((ok, text));
    }

    fn passed(&self) -> bool {
        self.checks.iter().all(|(ok, _)| *ok)
    }

    fn print(&self) {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        println!("[{tag}] {}", self.name);
        for (ok, text) in &self.checks {
            println!("    {} {text}", if *ok { "ok  " } else { "FAIL" });
        }
    }
}

fn strictly(values: &[f64], increasing: bool) -> bool {
    values
        .windows(2)
        .all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
}

fn list(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(", ")
}

fn trend(v: &mut Verdict, what: &str, param: &str, xs: &[f64], ys: &[f64], increasing: bool) {
    let dir = if increasing { "increasing" } else { "decreasing" };
    v.check(
        strictly(ys, increasing),
        format!("{what} strictly {dir} in {param} {xs:?}: [{}]", list(ys)),
    );
}

fn centerline_u(r: &PeriodicRun) -> f64 {
    r.profile(0.0).expect("phase-0 profile").u[0]
}

fn centerline_theta(r: &PeriodicRun) -> f64 {
    r.profile(0.0).expect("phase-0 profile").theta[0]
}

fn max_w(r: &PeriodicRun) -> f64 {
    r.profile(0.0)
        .expect("phase-0 profile")
        .w
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

fn steady_limit_case(name: &'static str, hartmann: f64, tol: f64, centre: f64) -> Verdict {
    let mut v = Verdict::new(name);
    let p = DimensionlessParams {
        viscosity_ratio: 0.0,
        hartmann,
        ..DimensionlessParams::default()
    };
    let n = NumericalParams::default();
    let start = Instant::now();
    match steady_runner(&p, &n, 2_000_000) {
        Ok(run) => {
            let secs = start.elapsed().as_secs_f64();
            let exact = if hartmann > 0.0 {
                hartmann_pipe(7.30, hartmann, &run.profile.xi)
            } else {
                poiseuille(7.30, &run.profile.xi)
            };
            let u0 = run.profile.centerline();
            let centre_err = (u0 - centre).abs() / centre;
            let err = run.profile.max_rel_error(&exact);
            v.check(
                centre_err < tol,
                format!("centreline u {u0:.6} vs {centre} (relative error {centre_err:.2e}, limit {tol})"),
            );
            v.check(err < tol, format!("profile max-norm error {err:.2e} (limit {tol})"));
            v.check(
                secs < 10.0,
                format!("runtime {secs:.2} s (limit 10 s, {} steps)", run.steps),
            );
        }
        Err(e) => v.check(false, format!("steady run failed: {e}")),
    }
    v
}

fn hartmann_trends(runs: &mut Runs) -> Verdict {
    let mut v = Verdict::new("hartmann_trends");
    let hs = [0.0, 2.0, 4.0];
    let rs: Vec<_> = hs.iter().map(|&h| runs.reference(|p| p.hartmann = h)).collect();
    let cycles: Vec<_> = rs
        .iter()
        .map(|r| r.last_cycle().expect("measured cycle").clone())
        .collect();
    trend(
        &mut v,
        "phase-0 centreline u",
        "H",
        &hs,
        &rs.iter().map(|r| centerline_u(r)).collect::<Vec<_>>(),
        false,
    );
    trend(
        &mut v,
        "cycle-mean Q",
        "H",
        &hs,
        &cycles.iter().map(|c| c.q_mean).collect::<Vec<_>>(),
        false,
    );
    trend(
        &mut v,
        "cycle-peak wall shear",
        "H",
        &hs,
        &cycles.iter().map(|c| c.peak_tau).collect::<Vec<_>>(),
        false,
    );
    trend(
        &mut v,
        "throat centreline theta",
        "H",
        &hs,
        &rs.iter().map(|r| centerline_theta(r)).collect::<Vec<_>>(),
        true,
    );
    v
}

fn micropolar_trends(runs: &mut Runs) -> Verdict {
    let mut v = Verdict::new("micropolar_trends");
    let ks = [0.0, 0.1, 0.2, 0.3];
    let rs: Vec<_> = ks.iter().map(|&k| runs.reference(|p| p.viscosity_ratio = k)).collect();
    trend(
        &mut v,
        "phase-0 centreline u",
        "K",
        &ks,
        &rs.iter().map(|r| centerline_u(r)).collect::<Vec<_>>(),
        false,
    );
    trend(
        &mut v,
        "max w over xi",
        "K",
        &ks,
        &rs.iter().map(|r| max_w(r)).collect::<Vec<_>>(),
        true,
    );
    let lam: Vec<f64> = rs.iter().map(|r| r.last_cycle().expect("cycle").lambda_cycle).collect();
    trend(&mut v, "cycle resistance", "K", &ks, &lam, true);
    let ms = [0.1, 0.01, 0.001];
    let rs: Vec<_> = ms
        .iter()
        .map(|&m| runs.reference(|p| p.material_constant = m))
        .collect();
    trend(
        &mut v,
        "max w over xi (m decreasing)",
        "m",
        &ms,
        &rs.iter().map(|r| max_w(r)).collect::<Vec<_>>(),
        true,
    );
    v
}

fn body_acceleration_trends(runs: &mut Runs) -> Verdict {
    let mut v = Verdict::new("body_acceleration_trends");
    let a0s = [0.0, 1.0, 2.0, 3.0];
    let rs: Vec<_> = a0s
        .iter()
        .map(|&a| runs.reference(|p| p.forcing.body_amplitude = a))
        .collect();
    let cycles: Vec<_> = rs.iter().map(|r| r.last_cycle().expect("cycle").clone()).collect();
    trend(
        &mut v,
        "phase-0 centreline u",
        "a0",
        &a0s,
        &rs.iter().map(|r| centerline_u(r)).collect::<Vec<_>>(),
        true,
    );
    trend(
        &mut v,
        "cycle-peak Q",
        "a0",
        &a0s,
        &cycles.iter().map(|c| c.q_max).collect::<Vec<_>>(),
        true,
    );
    trend(
        &mut v,
        "cycle-peak |F|",
        "a0",
        &a0s,
        &cycles.iter().map(|c| c.peak_accel).collect::<Vec<_>>(),
        true,
    );
    trend(
        &mut v,
        "wall shear amplitude",
        "a0",
        &a0s,
        &cycles.iter().map(|c| c.tau_amplitude()).collect::<Vec<_>>(),
        true,
    );
    trend(
        &mut v,
        "cycle resistance",
        "a0",
        &a0s,
        &cycles.iter().map(|c| c.lambda_cycle).collect::<Vec<_>>(),
        false,
    );
    v
}

fn stenosis_trends(runs: &mut Runs) -> Verdict {
    let mut v = Verdict::new("stenosis_trends");
    let ds = [0.1, 0.25, 0.5];
    // The reference step exceeds the stability limit at delta = 0.5, so the
    // whole family uses a halved step.
    let n = NumericalParams {
        dt: 0.0005,
        ..NumericalParams::default()
    };
    let rs: Vec<_> = ds
        .iter()
        .map(|&d| {
            let p = DimensionlessParams {
                shape: stenoflow_core::StenosisShape {
                    depth: d,
                    ..Default::default()
                },
                ..Default::default()
            };
            runs.get(p, n)
        })
        .collect();
    let cycles: Vec<_> = rs.iter().map(|r| r.last_cycle().expect("cycle").clone()).collect();
    trend(
        &mut v,
        "peak wall shear over z",
        "delta",
        &ds,
        &cycles.iter().map(|c| c.peak_tau_over_z()).collect::<Vec<_>>(),
        true,
    );
    let lam: Vec<f64> = cycles.iter().map(|c| c.lambda_cycle).collect();
    trend(&mut v, "cycle resistance", "delta", &ds, &lam, true);
    let (d1, d2) = (lam[1] - lam[0], lam[2] - lam[1]);
    v.check(
        d1 < d2,
        format!("resistance increments {d1:.4} (0.1 to 0.25) < {d2:.4} (0.25 to 0.5)"),
    );
    trend(
        &mut v,
        "max w over xi",
        "delta",
        &ds,
        &rs.iter().map(|r| max_w(r)).collect::<Vec<_>>(),
        true,
    );
    v
}

/// Marches until `max |theta - 1| < tol` or the time budget runs out.
fn theta_relaxation(p: DimensionlessParams, tol: f64, cycles: f64) -> (bool, f64, f64) {
    let n = NumericalParams::default();
    let mut sim = Simulation::new(p, n).expect("stable");
    let end = cycles * CYCLE;
    let gap = |s: &Simulation| {
        s.state()
            .theta
            .as_slice()
            .iter()
            .fold(0.0_f64, |m, t| m.max((t - 1.0).abs()))
    };
    let mut g = gap(&sim);
    while sim.time() < end {
        for _ in 0..100 {
            sim.advance().expect("bounded");
        }
        g = gap(&sim);
        if g < tol {
            return (true, sim.time(), g);
        }
    }
    (false, sim.time(), g)
}

fn heat_transfer(runs: &mut Runs) -> Verdict {
    let mut v = Verdict::new("heat_transfer");
    let prs = [7.0, 14.0, 21.0];
    let rs: Vec<_> = prs.iter().map(|&pr| runs.reference(|p| p.prandtl = pr)).collect();
    trend(
        &mut v,
        "throat centreline theta",
        "Pr",
        &prs,
        &rs.iter().map(|r| centerline_theta(r)).collect::<Vec<_>>(),
        false,
    );

    let r = runs.reference(|_| {});
    let c = r.last_cycle().expect("cycle");
    let nu = &c.nu_mean_axial;
    let argmax = (0..nu.len()).max_by(|&a, &b| nu[a].total_cmp(&nu[b])).expect("nodes");
    v.check(
        argmax == r.probe,
        format!("cycle-mean Nu maximal at node {argmax} (throat node {})", r.probe),
    );
    let shape = r.params.shape;
    let n = r.numerics;
    let mean = |sel: &dyn Fn(f64) -> bool| {
        let xs: Vec<f64> = (0..n.axial_nodes()).filter(|&i| sel(n.z(i))).map(|i| nu[i]).collect();
        xs.iter().sum::<f64>() / xs.len() as f64
    };
    let up = mean(&|z| z < shape.offset);
    let down = mean(&|z| z > shape.offset + shape.length);
    v.check(
        down < up,
        format!("downstream mean Nu {down:.6} below upstream mean Nu {up:.6} (minimum downstream)"),
    );

    for (label, p) in [
        (
            "Ec = 0",
            DimensionlessParams {
                eckert: 0.0,
                ..Default::default()
            },
        ),
        (
            "H = 0",
            DimensionlessParams {
                hartmann: 0.0,
                ..Default::default()
            },
        ),
    ] {
        let (ok, t, gap) = theta_relaxation(p, 1e-3, 60.0);
        v.check(
            ok,
            format!("{label}: max |theta - 1| = {gap:.2e} at t = {t:.1} (target 1e-3)"),
        );
    }
    v
}

fn residual_norm(p: &DimensionlessParams, n: NumericalParams, t_end: f64) -> f64 {
    let mut sim = Simulation::new(*p, n).expect("stable");
    while sim.time() < t_end - 0.5 * n.dt {
        sim.advance().expect("bounded");
    }
    continuity_residual(sim.state(), sim.walls(), &n).max_abs()
}

fn numerical_quality(runs: &mut Runs) -> Verdict {
    let mut v = Verdict::new("numerical_quality");
    let p = DimensionlessParams::default();

    let mut sim = Simulation::new(p, NumericalParams::default()).expect("stable");
    let mut bad = 0;
    let steps = (CYCLE / sim.numerics().dt).ceil() as u64;
    for _ in 0..steps {
        sim.advance().expect("bounded");
        bad += boundary_violations(sim.state(), sim.walls());
    }
    v.check(
        bad == 0,
        format!("boundary conditions exact after each of {steps} steps ({bad} violations)"),
    );

    let coarse = NumericalParams::new(5.0, 0.1, 0.05, 0.004).expect("grid");
    let mid = coarse.refined(5.0).expect("grid");
    let fine = mid.refined(5.0).expect("grid");
    let res: Vec<f64> = [coarse, mid, fine].iter().map(|n| residual_norm(&p, *n, 1.0)).collect();
    let orders: Vec<Option<f64>> = res.windows(2).map(|w| observed_order_exact(w[0], w[1], 2.0)).collect();
    let ok = orders.iter().all(|o| o.is_some_and(|o| o >= 1.8));
    v.check(
        ok,
        format!(
            "continuity residual max-norm at t = 1: [{}], observed orders {orders:.3?} (need >= 1.8)",
            list(&res)
        ),
    );

    let base = runs.reference(|_| {});
    let refined = runs.get(p, NumericalParams::default().refined(5.0).expect("grid"));
    let (q0, q1) = (
        base.last_cycle().expect("cycle").q_mean,
        refined.last_cycle().expect("cycle").q_mean,
    );
    let change = (q1 - q0).abs() / q0.abs();
    v.check(
        change < 0.01,
        format!("Q_mean {q0:.6} vs {q1:.6} with halved spacings: relative change {change:.2e} (limit 1e-2)"),
    );

    let mut n = NumericalParams::default();
    n.dt = 4.0 * stability_limit(&p, &n);
    let rejected = Simulation::new(p, n).is_err();
    let mut sim = Simulation::with_unchecked_dt(p, n).expect("params valid");
    let err = (0..20_000).find_map(|_| sim.advance().err());
    v.check(
        rejected && matches!(err, Some(SolverError::Diverged { .. })),
        format!(
            "dt = 4x limit: rejected by the checked constructor = {rejected}, unchecked run: {}",
            err.map_or("no divergence".to_string(), |e| e.to_string())
        ),
    );

    let a = tempfile::tempdir().expect("tempdir");
    let b = tempfile::tempdir().expect("tempdir");
    let again = run_periodic(&p, &NumericalParams::default(), CADENCE).expect("rerun");
    write_artifacts(&base, a.path()).expect("write");
    write_artifacts(&again, b.path()).expect("write");
    let identical = [PROFILES_CSV, TIMESERIES_CSV, AXIAL_CSV, SUMMARY_CSV]
        .iter()
        .all(|f| fs::read(a.path().join(f)).ok() == fs::read(b.path().join(f)).ok());
    v.check(
        identical,
        "rerun of the reference configuration gives byte-identical CSVs".into(),
    );
    v
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut runs = Runs::default();
    let mut verdicts = Vec::new();
    let mut emit = |v: Verdict| {
        v.print();
        verdicts.push(v.passed());
    };
    emit(steady_limit_case("steady_newtonian_limit", 0.0, 0.005, 1.825));
    emit(steady_limit_case(
        "steady_mhd_limit",
        2.0,
        0.01,
        7.30 / 4.0 * (1.0 - 1.0 / 2.279_585_302_336_067),
    ));
    emit(hartmann_trends(&mut runs));
    emit(micropolar_trends(&mut runs));
    emit(body_acceleration_trends(&mut runs));
    emit(stenosis_trends(&mut runs));
    emit(heat_transfer(&mut runs));
    emit(numerical_quality(&mut runs));
    let failed = verdicts.iter().filter(|ok| !**ok).count();
    let secs = start.elapsed().as_secs_f64();
    println!(
        "acceptance: {} criteria, {failed} failed, {secs:.1} s (suite limit 900 s: {})",
        verdicts.len(),
        if secs < 900.0 { "met" } else { "exceeded" }
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
