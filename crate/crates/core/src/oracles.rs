//! Analytic reference profiles, a steady-state driver for the time-marching
//! solver, and grid-refinement order estimates.

use crate::diagnostics::{flow_rate, CYCLE};
use crate::error::{RunError, SolverError};
use crate::field::Field;
use crate::forcing::ForcingParams;
use crate::geometry::StenosisShape;
use crate::params::{DimensionlessParams, NumericalParams};
use crate::solver::{stability_limit, Simulation};

/// Relative tolerance at which the `I0` power series is truncated.
const SERIES_TOL: f64 = 1e-12;
const SERIES_MAX_TERMS: usize = 200;

/// `I0(x) - 1` by its power series `sum_{k>=1} (x^2/4)^k / (k!)^2`.
///
/// Returned separately from [`bessel_i0`] so that small arguments keep full
/// relative precision.
pub fn bessel_i0_minus_one(x: f64) -> f64 {
    bessel_i0_series(x).0
}

/// Modified Bessel function of the first kind, order zero.
pub fn bessel_i0(x: f64) -> f64 {
    1.0 + bessel_i0_minus_one(x)
}

/// Number of series terms [`bessel_i0`] needs at `x`.
pub fn bessel_i0_terms(x: f64) -> usize {
    bessel_i0_series(x).1
}

fn bessel_i0_series(x: f64) -> (f64, usize) {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut terms = 1;
    for k in 1..=SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= q / (kf * kf);
        sum += term;
        terms += 1;
        if term <= SERIES_TOL * (1.0 + sum) {
            break;
        }
    }
    (sum, terms)
}

/// An axial-velocity profile sampled on radial points.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyProfile {
    pub xi: Vec<f64>,
    pub u: Vec<f64>,
    pub mean_gradient: f64,
    pub hartmann: f64,
}

impl SteadyProfile {
    pub fn centerline(&self) -> f64 {
        self.u.first().copied().unwrap_or(f64::NAN)
    }

    /// `max |u - other| / max |other|` over shared sample points.
    pub fn max_rel_error(&self, reference: &SteadyProfile) -> f64 {
        let scale = reference.u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let diff = self
            .u
            .iter()
            .zip(&reference.u)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        diff / scale
    }
}

/// Newtonian rigid-tube profile `u = (Kbar / 4)(1 - xi^2)`.
pub fn poiseuille(mean_gradient: f64, xi: &[f64]) -> SteadyProfile {
    SteadyProfile {
        xi: xi.to_vec(),
        u: xi.iter().map(|x| 0.25 * mean_gradient * (1.0 - x * x)).collect(),
        mean_gradient,
        hartmann: 0.0,
    }
}

/// Magnetised rigid-tube profile `u = (Kbar / H^2)(1 - I0(H xi) / I0(H))`.
/// Falls back to [`poiseuille`] for `H <= 0`.
pub fn hartmann_pipe(mean_gradient: f64, hartmann: f64, xi: &[f64]) -> SteadyProfile {
    if hartmann <= 0.0 {
        return poiseuille(mean_gradient, xi);
    }
    let h2 = hartmann * hartmann;
    let wall = bessel_i0_minus_one(hartmann);
    let denom = 1.0 + wall;
    let u = xi
        .iter()
        .map(|&x| mean_gradient / h2 * (wall - bessel_i0_minus_one(hartmann * x)) / denom)
        .collect();
    SteadyProfile {
        xi: xi.to_vec(),
        u,
        mean_gradient,
        hartmann,
    }
}

/// `p` with the forcing reduced to its constant mean gradient inside a rigid
/// straight tube of the same length and radius.
pub fn steady_limit(p: &DimensionlessParams) -> DimensionlessParams {
    DimensionlessParams {
        shape: StenosisShape {
            depth: 0.0,
            wall_amplitude: 0.0,
            ..p.shape
        },
        forcing: ForcingParams {
            body_amplitude: 0.0,
            pulsatile_gradient: 0.0,
            ..p.forcing
        },
        ..*p
    }
}

/// Outcome of [`steady_runner`].
#[derive(Debug, Clone)]
pub struct SteadyRun {
    /// Mid-tube axial-velocity profile.
    pub profile: SteadyProfile,
    pub steps: u64,
    /// Final `max |u^{k+1} - u^k|`.
    pub last_change: f64,
    pub sim: Simulation,
}

/// Per-step change below which [`steady_runner`] declares convergence.
pub const STEADY_TOL: f64 = 1e-10;

/// Marches `steady_limit(p)` from rest until the per-step change of `u` drops
/// below [`STEADY_TOL`] in max norm, or fails after `max_steps`.
pub fn steady_runner(p: &DimensionlessParams, n: &NumericalParams, max_steps: u64) -> Result<SteadyRun, SolverError> {
    let params = steady_limit(p);
    let mut sim = Simulation::new(params, *n)?;
    let mut last_u = Field::for_grid(n);
    let mut last_change = f64::INFINITY;
    while sim.step_count() < max_steps {
        last_u.copy_from(&sim.state().u);
        sim.advance()?;
        last_change = sim.state().u.max_abs_diff(&last_u);
        if last_change < STEADY_TOL {
            let mid = n.nearest_node(0.5 * params.shape.tube_length);
            let xi: Vec<f64> = (0..n.radial_nodes()).map(|j| n.xi(j)).collect();
            let profile = SteadyProfile {
                u: sim.state().u.row(mid).to_vec(),
                xi,
                mean_gradient: params.forcing.mean_gradient,
                hartmann: params.hartmann,
            };
            return Ok(SteadyRun {
                profile,
                steps: sim.step_count(),
                last_change,
                sim,
            });
        }
    }
    Err(SolverError::NotConverged {
        steps: sim.step_count(),
        last_change,
    })
}

/// Observed order from three solutions on grids refined by `ratio`:
/// `log(|f1 - f2| / |f2 - f3|) / log(ratio)`. `None` when a difference
/// vanishes or the result is not finite.
pub fn observed_order(coarse: f64, mid: f64, fine: f64, ratio: f64) -> Option<f64> {
    let d1 = (coarse - mid).abs();
    let d2 = (mid - fine).abs();
    if d1 == 0.0 || d2 == 0.0 {
        return None;
    }
    let order = (d1 / d2).ln() / ratio.ln();
    order.is_finite().then_some(order)
}

/// Observed order from errors against a known exact value.
pub fn observed_order_exact(coarse_error: f64, fine_error: f64, ratio: f64) -> Option<f64> {
    let (a, b) = (coarse_error.abs(), fine_error.abs());
    if a == 0.0 || b == 0.0 {
        return None;
    }
    let order = (a / b).ln() / ratio.ln();
    order.is_finite().then_some(order)
}

/// What a refinement study halves between levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    /// `dz` and `dxi` halved, `dt` quartered (steady runs only compare space).
    Space,
    /// `dt` halved on a fixed grid.
    Time,
}

/// Per-level results and the orders observed between consecutive triples.
#[derive(Debug, Clone)]
pub struct RefinementStudy {
    pub levels: Vec<NumericalParams>,
    /// Cycle-mean flow rate at the throat, or the steady mid-tube flow rate.
    pub q_mean: Vec<f64>,
    /// Centreline axial velocity at the throat (mid-tube when steady).
    pub centerline_u: Vec<f64>,
    pub q_orders: Vec<Option<f64>>,
    pub u_orders: Vec<Option<f64>>,
}

fn refine_once(n: &NumericalParams, tube_length: f64, kind: Refinement) -> Result<NumericalParams, RunError> {
    match kind {
        Refinement::Space => Ok(n.refined(tube_length).map_err(SolverError::from)?),
        Refinement::Time => Ok(NumericalParams { dt: 0.5 * n.dt, ..*n }),
    }
}

/// Last time level, common to `base` and every refinement of it, not after
/// the end of the final measured cycle.
fn common_end(base: &NumericalParams) -> f64 {
    let end = (base.warmup_periods + base.measure_periods) as f64 * CYCLE;
    (end / base.dt + 1e-9).floor() * base.dt
}

/// Cycle-mean flow rate at the throat over the last measured cycle, by
/// trapezoidal integration with the cycle ends interpolated between steps,
/// and the throat centreline velocity at time `t_u`.
fn periodic_level(p: &DimensionlessParams, n: &NumericalParams, t_u: f64) -> Result<(f64, f64), RunError> {
    let mut sim = Simulation::new(*p, *n)?;
    let probe = n.nearest_node(p.shape.throat());
    let total = (n.warmup_periods + n.measure_periods) as f64;
    let (a, b) = ((total - 1.0) * CYCLE, total * CYCLE);
    let q_of = |sim: &Simulation| flow_rate(sim.state(), &sim.walls()[probe], probe, n);
    let mut prev = (sim.time(), q_of(&sim));
    let mut integral = 0.0;
    let mut u_at = f64::NAN;
    while sim.time() < b.max(t_u) - 1e-9 * n.dt {
        sim.advance()?;
        let cur = (sim.time(), q_of(&sim));
        let (lo, hi) = (prev.0.max(a), cur.0.min(b));
        if hi > lo {
            let lerp = |t: f64| prev.1 + (cur.1 - prev.1) * (t - prev.0) / (cur.0 - prev.0);
            integral += 0.5 * (lerp(lo) + lerp(hi)) * (hi - lo);
        }
        if (cur.0 - t_u).abs() < 0.25 * n.dt {
            u_at = sim.state().u.get(probe, 0);
        }
        prev = cur;
    }
    Ok((integral / (b - a), u_at))
}

/// Runs `levels` successively refined copies of `base` and estimates orders.
///
/// With `steady = true` each level is a [`steady_runner`] solve of
/// `steady_limit(p)`. Otherwise each level is a periodic run of `p`. Its
/// flow rate is integrated over the last measured cycle, and its centreline
/// velocity is taken at a time level shared by all levels.
pub fn refine_compare(
    p: &DimensionlessParams,
    base: &NumericalParams,
    levels: usize,
    kind: Refinement,
    steady: bool,
) -> Result<RefinementStudy, RunError> {
    let mut grids = vec![*base];
    while grids.len() < levels {
        let next = refine_once(grids.last().expect("non-empty"), p.shape.tube_length, kind)?;
        grids.push(next);
    }
    let mut q_mean = Vec::with_capacity(levels);
    let mut centerline_u = Vec::with_capacity(levels);
    for n in &grids {
        if steady {
            let budget = (200.0 / n.dt).ceil() as u64;
            let run = steady_runner(p, n, budget)?;
            let mid = n.nearest_node(0.5 * p.shape.tube_length);
            let sim = &run.sim;
            q_mean.push(flow_rate(sim.state(), &sim.walls()[mid], mid, n));
            centerline_u.push(run.profile.centerline());
        } else {
            let (q, u) = periodic_level(p, n, common_end(base))?;
            q_mean.push(q);
            centerline_u.push(u);
        }
    }
    let ratio = 2.0;
    let orders =
        |v: &[f64]| -> Vec<Option<f64>> { v.windows(3).map(|w| observed_order(w[0], w[1], w[2], ratio)).collect() };
    Ok(RefinementStudy {
        q_orders: orders(&q_mean),
        u_orders: orders(&centerline_u),
        levels: grids,
        q_mean,
        centerline_u,
    })
}

/// Largest stable step, backed off by `fraction`, rounded down to 3
/// significant digits.
pub fn stable_dt(p: &DimensionlessParams, n: &NumericalParams, fraction: f64) -> f64 {
    let raw = fraction * stability_limit(p, n);
    let scale = 10f64.powf(raw.log10().floor() - 2.0);
    (raw / scale).floor() * scale
}
