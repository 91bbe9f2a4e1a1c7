//! Derived quantities (flow rate, wall shear, Nusselt number, fluid
//! acceleration, flow resistance) and their per-cycle accumulation.

use std::f64::consts::PI;

use crate::error::DiagnosticsError;
use crate::field::FlowField;
use crate::geometry::WallState;
use crate::params::{DimensionlessParams, NumericalParams};
use crate::solver::Simulation;

/// Length of one forcing cycle in dimensionless time.
pub const CYCLE: f64 = 2.0 * PI;

/// `Q = 2 pi R^2 \int_0^1 xi u dxi`, trapezoidal in `xi`.
pub fn flow_rate(state: &FlowField, wall: &WallState, i: usize, n: &NumericalParams) -> f64 {
    let u = state.u.row(i);
    let last = n.radial_intervals;
    let inner: f64 = (1..last).map(|j| n.xi(j) * u[j]).sum();
    let integral = n.dxi * (inner + 0.5 * u[last]);
    2.0 * PI * wall.radius * wall.radius * integral
}

/// Wall shear stress `-(1 + K) (1/R) du/dxi` at `xi = 1`, with a
/// second-order one-sided difference. Positive for forward flow.
pub fn wall_shear(state: &FlowField, wall: &WallState, p: &DimensionlessParams, i: usize, n: &NumericalParams) -> f64 {
    let u = state.u.row(i);
    let last = n.radial_intervals;
    let slope = (3.0 * u[last] - 4.0 * u[last - 1] + u[last - 2]) / (2.0 * n.dxi);
    -(1.0 + p.viscosity_ratio) * slope / wall.radius
}

/// `Nu = (theta_N - theta_{N-1}) / (dxi R^2)`: a first-order wall difference.
pub fn nusselt(state: &FlowField, wall: &WallState, i: usize, n: &NumericalParams) -> f64 {
    let th = state.theta.row(i);
    let last = n.radial_intervals;
    (th[last] - th[last - 1]) / (n.dxi * wall.radius * wall.radius)
}

/// Fluid acceleration between two consecutive levels:
/// `(u' - u)/dt + u du/dz - (xi / R)(R_t + u R_z) du/dxi`, all spatial
/// terms at the earlier level with `walls` belonging to it.
///
/// End rows use one-sided axial differences; the wall node uses a
/// second-order one-sided radial difference.
pub fn fluid_accel(
    prev: &FlowField,
    state: &FlowField,
    walls: &[WallState],
    n: &NumericalParams,
    i: usize,
    j: usize,
) -> f64 {
    let u = &prev.u;
    let m = n.axial_intervals;
    let last = n.radial_intervals;
    let local = (state.u.get(i, j) - u.get(i, j)) / n.dt;
    let du_dz = if i == 0 {
        (u.get(1, j) - u.get(0, j)) / n.dz
    } else if i == m {
        (u.get(m, j) - u.get(m - 1, j)) / n.dz
    } else {
        (u.get(i + 1, j) - u.get(i - 1, j)) / (2.0 * n.dz)
    };
    let xi = n.xi(j);
    let du_dxi = if j == 0 {
        0.0
    } else if j == last {
        (3.0 * u.get(i, last) - 4.0 * u.get(i, last - 1) + u.get(i, last - 2)) / (2.0 * n.dxi)
    } else {
        (u.get(i, j + 1) - u.get(i, j - 1)) / (2.0 * n.dxi)
    };
    let wall = walls[i];
    let uk = u.get(i, j);
    local + uk * du_dz - xi / wall.radius * (wall.dr_dt + uk * wall.dr_dz) * du_dxi
}

/// Radial profile of [`fluid_accel`] at axial node `i`.
pub fn fluid_accel_profile(
    prev: &FlowField,
    state: &FlowField,
    walls: &[WallState],
    n: &NumericalParams,
    i: usize,
) -> Vec<f64> {
    (0..n.radial_nodes())
        .map(|j| fluid_accel(prev, state, walls, n, i, j))
        .collect()
}

/// Instantaneous resistance `|L dp/dz| / Q`; infinite when `Q` is zero.
pub fn instantaneous_resistance(p: &DimensionlessParams, t: f64, q: f64) -> f64 {
    (p.shape.tube_length * p.forcing.pressure_gradient(t)).abs() / q
}

/// Cycle resistance `L Kbar / Q_mean`.
pub fn flow_resistance_cycle(stats: &CycleStats, p: &DimensionlessParams) -> Result<f64, DiagnosticsError> {
    if stats.q_mean > 0.0 && stats.q_mean.is_finite() {
        Ok(p.shape.tube_length * p.forcing.mean_gradient / stats.q_mean)
    } else {
        Err(DiagnosticsError::DegenerateCycle { q_mean: stats.q_mean })
    }
}

/// Snapshot of the diagnostics at one time level.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsSample {
    pub t: f64,
    /// `t / (2 pi f_p)`.
    pub report_time: f64,
    pub q: Vec<f64>,
    pub tau_w: Vec<f64>,
    pub nu: Vec<f64>,
    /// Instantaneous resistance at the probe node.
    pub lambda_inst: f64,
    /// Fluid-acceleration profile at the probe node, when requested.
    pub accel: Option<Vec<f64>>,
}

impl DiagnosticsSample {
    pub fn capture(sim: &Simulation, probe: usize, with_accel: bool) -> Self {
        let p = sim.params();
        let n = sim.numerics();
        let state = sim.state();
        let walls = sim.walls();
        let q: Vec<f64> = (0..n.axial_nodes())
            .map(|i| flow_rate(state, &walls[i], i, n))
            .collect();
        let tau_w = (0..n.axial_nodes())
            .map(|i| wall_shear(state, &walls[i], p, i, n))
            .collect();
        let nu = (0..n.axial_nodes()).map(|i| nusselt(state, &walls[i], i, n)).collect();
        let accel = with_accel.then(|| fluid_accel_profile(sim.previous(), state, sim.previous_walls(), n, probe));
        Self {
            t: state.t,
            report_time: p.report_time(state.t),
            lambda_inst: instantaneous_resistance(p, state.t, q[probe]),
            q,
            tau_w,
            nu,
            accel,
        }
    }
}

/// Statistics over one closed forcing cycle `[c 2 pi, (c + 1) 2 pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleStats {
    pub index: usize,
    pub samples: usize,
    /// Cycle-mean flow rate at the probe node.
    pub q_mean: f64,
    pub q_max: f64,
    pub q_min: f64,
    /// `L Kbar / q_mean`, NaN when the cycle is degenerate.
    pub lambda_cycle: f64,
    /// Extremes of wall shear at the probe node.
    pub peak_tau: f64,
    pub min_tau: f64,
    /// Largest `|F|` at the probe node over the cycle.
    pub peak_accel: f64,
    /// Per-axial-node maximum of wall shear over the cycle.
    pub tau_peak_axial: Vec<f64>,
    /// Per-axial-node cycle mean of the Nusselt number.
    pub nu_mean_axial: Vec<f64>,
    /// Per-radial-node maximum of `|F|` at the probe node.
    pub accel_peak_radial: Vec<f64>,
    /// Largest relative change of the scalar statistics against the
    /// previous cycle; infinite for the first cycle.
    pub periodicity_defect: f64,
}

impl CycleStats {
    pub fn tau_amplitude(&self) -> f64 {
        0.5 * (self.peak_tau - self.min_tau)
    }

    pub fn peak_tau_over_z(&self) -> f64 {
        self.tau_peak_axial.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_nu(&self) -> f64 {
        self.nu_mean_axial.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    fn defect_against(&self, prev: &CycleStats) -> f64 {
        let flow_scale = self.q_max.abs().max(self.q_min.abs()).max(f64::MIN_POSITIVE);
        let shear_scale = self.peak_tau.abs().max(self.min_tau.abs()).max(f64::MIN_POSITIVE);
        let accel_scale = self.peak_accel.abs().max(f64::MIN_POSITIVE);
        [
            ((self.q_mean - prev.q_mean) / flow_scale).abs(),
            ((self.q_max - prev.q_max) / flow_scale).abs(),
            ((self.q_min - prev.q_min) / flow_scale).abs(),
            ((self.peak_tau - prev.peak_tau) / shear_scale).abs(),
            ((self.min_tau - prev.min_tau) / shear_scale).abs(),
            ((self.peak_accel - prev.peak_accel) / accel_scale).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
struct CycleAccumulator {
    index: usize,
    samples: usize,
    q_sum: f64,
    q_max: f64,
    q_min: f64,
    tau_max: f64,
    tau_min: f64,
    accel_peak: f64,
    tau_peak_axial: Vec<f64>,
    nu_sum_axial: Vec<f64>,
    accel_peak_radial: Vec<f64>,
}

impl CycleAccumulator {
    fn new(index: usize, axial: usize, radial: usize) -> Self {
        Self {
            index,
            samples: 0,
            q_sum: 0.0,
            q_max: f64::NEG_INFINITY,
            q_min: f64::INFINITY,
            tau_max: f64::NEG_INFINITY,
            tau_min: f64::INFINITY,
            accel_peak: 0.0,
            tau_peak_axial: vec![f64::NEG_INFINITY; axial],
            nu_sum_axial: vec![0.0; axial],
            accel_peak_radial: vec![0.0; radial],
        }
    }

    fn add(&mut self, sample: &DiagnosticsSample, probe: usize) {
        self.samples += 1;
        let q = sample.q[probe];
        self.q_sum += q;
        self.q_max = self.q_max.max(q);
        self.q_min = self.q_min.min(q);
        let tau = sample.tau_w[probe];
        self.tau_max = self.tau_max.max(tau);
        self.tau_min = self.tau_min.min(tau);
        for (peak, &t) in self.tau_peak_axial.iter_mut().zip(&sample.tau_w) {
            *peak = peak.max(t);
        }
        for (sum, &nu) in self.nu_sum_axial.iter_mut().zip(&sample.nu) {
            *sum += nu;
        }
        if let Some(accel) = &sample.accel {
            for (peak, &f) in self.accel_peak_radial.iter_mut().zip(accel) {
                *peak = peak.max(f.abs());
                self.accel_peak = self.accel_peak.max(f.abs());
            }
        }
    }

    fn finish(self, p: &DimensionlessParams, prev: Option<&CycleStats>) -> CycleStats {
        let count = self.samples.max(1) as f64;
        let q_mean = self.q_sum / count;
        let mut stats = CycleStats {
            index: self.index,
            samples: self.samples,
            q_mean,
            q_max: self.q_max,
            q_min: self.q_min,
            lambda_cycle: f64::NAN,
            peak_tau: self.tau_max,
            min_tau: self.tau_min,
            peak_accel: self.accel_peak,
            tau_peak_axial: self.tau_peak_axial,
            nu_mean_axial: self.nu_sum_axial.into_iter().map(|s| s / count).collect(),
            accel_peak_radial: self.accel_peak_radial,
            periodicity_defect: f64::INFINITY,
        };
        stats.lambda_cycle = flow_resistance_cycle(&stats, p).unwrap_or(f64::NAN);
        if let Some(prev) = prev {
            stats.periodicity_defect = stats.defect_against(prev);
        }
        stats
    }
}

/// Accumulates per-step diagnostics into cycle statistics and keeps a
/// sampled time series.
#[derive(Debug, Clone)]
pub struct Recorder {
    params: DimensionlessParams,
    probe: usize,
    cadence: u64,
    /// Samples before this time are folded into cycle statistics but not stored.
    store_from: f64,
    series: Vec<DiagnosticsSample>,
    cycles: Vec<CycleStats>,
    current: CycleAccumulator,
}

impl Recorder {
    /// `probe` is the axial node whose flow rate, shear and acceleration feed
    /// the scalar cycle statistics. `cadence` is clamped to at least 1.
    pub fn new(params: &DimensionlessParams, numerics: &NumericalParams, probe: usize, cadence: u64) -> Self {
        Self {
            params: *params,
            probe,
            cadence: cadence.max(1),
            store_from: 0.0,
            series: Vec::new(),
            cycles: Vec::new(),
            current: CycleAccumulator::new(0, numerics.axial_nodes(), numerics.radial_nodes()),
        }
    }

    pub fn store_from(mut self, t: f64) -> Self {
        self.store_from = t;
        self
    }

    pub fn probe(&self) -> usize {
        self.probe
    }

    /// Call once after every [`Simulation::advance`].
    pub fn collect(&mut self, sim: &Simulation) {
        let sample = DiagnosticsSample::capture(sim, self.probe, true);
        let cycle = cycle_index(sample.t);
        if cycle > self.current.index {
            let axial = self.current.tau_peak_axial.len();
            let radial = self.current.accel_peak_radial.len();
            let done = std::mem::replace(&mut self.current, CycleAccumulator::new(cycle, axial, radial));
            let stats = done.finish(&self.params, self.cycles.last());
            self.cycles.push(stats);
        }
        self.current.add(&sample, self.probe);
        if sim.step_count().is_multiple_of(self.cadence) && sample.t >= self.store_from - 1e-12 {
            self.series.push(sample);
        }
    }

    /// Closes the running cycle if it has covered its full period.
    pub fn finish(&mut self, t: f64) {
        if self.current.samples > 0 && cycle_index(t + 1e-9) > self.current.index {
            let axial = self.current.tau_peak_axial.len();
            let radial = self.current.accel_peak_radial.len();
            let next = self.current.index + 1;
            let done = std::mem::replace(&mut self.current, CycleAccumulator::new(next, axial, radial));
            let stats = done.finish(&self.params, self.cycles.last());
            self.cycles.push(stats);
        }
    }

    pub fn series(&self) -> &[DiagnosticsSample] {
        &self.series
    }

    pub fn cycles(&self) -> &[CycleStats] {
        &self.cycles
    }

    pub fn last_cycle(&self) -> Result<&CycleStats, DiagnosticsError> {
        self.cycles.last().ok_or(DiagnosticsError::NoCycle)
    }
}

/// Index of the forcing cycle containing time `t`.
pub fn cycle_index(t: f64) -> usize {
    (t / CYCLE).floor().max(0.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::geometry::StenosisShape;

    fn unit_wall() -> WallState {
        WallState {
            radius: 1.0,
            dr_dz: 0.0,
            dr_dt: 0.0,
        }
    }

    fn with_u(n: &NumericalParams, f: impl Fn(f64) -> f64) -> FlowField {
        let mut s = FlowField::zeros(n);
        s.u = Field::from_fn(n.axial_nodes(), n.radial_nodes(), |_, j| f(n.xi(j)));
        s
    }

    fn with_theta(n: &NumericalParams, f: impl Fn(f64) -> f64) -> FlowField {
        let mut s = FlowField::zeros(n);
        s.theta = Field::from_fn(n.axial_nodes(), n.radial_nodes(), |_, j| f(n.xi(j)));
        s
    }

    #[test]
    fn flow_rate_of_poiseuille_profile() {
        let n = NumericalParams::default();
        let s = with_u(&n, |xi| 7.30 / 4.0 * (1.0 - xi * xi));
        let q = flow_rate(&s, &unit_wall(), 3, &n);
        let exact = PI * 7.30 / 8.0;
        assert!((exact - 2.8667).abs() < 1e-4);
        assert!(((q - exact) / exact).abs() < 1e-3);

        assert_eq!(flow_rate(&FlowField::zeros(&n), &unit_wall(), 3, &n), 0.0);
        let scaled = with_u(&n, |xi| 3.0 * 7.30 / 4.0 * (1.0 - xi * xi));
        assert!((flow_rate(&scaled, &unit_wall(), 3, &n) - 3.0 * q).abs() < 1e-14);
    }

    #[test]
    fn flow_rate_quadrature_is_second_order() {
        let exact = PI / 2.0; // 2 pi \int xi (1 - xi^2)
        let errors: Vec<f64> = [0.05, 0.025, 0.0125]
            .iter()
            .map(|&dxi| {
                let n = NumericalParams::new(5.0, 0.05, dxi, 0.001).unwrap();
                let s = with_u(&n, |xi| 1.0 - xi * xi);
                (flow_rate(&s, &unit_wall(), 0, &n) - exact).abs()
            })
            .collect();
        for pair in errors.windows(2) {
            assert!(((pair[0] / pair[1]).log2() - 2.0).abs() < 0.05);
        }
    }

    #[test]
    fn wall_shear_examples() {
        let n = NumericalParams::default();
        let newtonian = DimensionlessParams {
            viscosity_ratio: 0.0,
            ..DimensionlessParams::default()
        };
        let s = with_u(&n, |xi| 7.30 / 4.0 * (1.0 - xi * xi));
        let tau = wall_shear(&s, &unit_wall(), &newtonian, 7, &n);
        assert!(((tau - 3.65) / 3.65).abs() < 5e-3);
        assert_eq!(wall_shear(&FlowField::zeros(&n), &unit_wall(), &newtonian, 7, &n), 0.0);
        let micropolar = DimensionlessParams {
            viscosity_ratio: 0.1,
            ..newtonian
        };
        let ratio = wall_shear(&s, &unit_wall(), &micropolar, 7, &n) / tau;
        assert!((ratio - 1.1).abs() < 1e-14);
    }

    #[test]
    fn nusselt_examples() {
        let n = NumericalParams::default();
        let linear = with_theta(&n, |xi| xi);
        assert!((nusselt(&linear, &unit_wall(), 0, &n) - 1.0).abs() < 1e-12);
        let flat = with_theta(&n, |_| 1.0);
        assert_eq!(nusselt(&flat, &unit_wall(), 0, &n), 0.0);
        let quadratic = with_theta(&n, |xi| xi * xi);
        assert!((nusselt(&quadratic, &unit_wall(), 0, &n) - 1.975).abs() < 1e-12);
    }

    #[test]
    fn resistance_examples() {
        let p = DimensionlessParams::default();
        let mut stats = CycleStats {
            index: 0,
            samples: 1,
            q_mean: 2.8667,
            q_max: 2.8667,
            q_min: 2.8667,
            lambda_cycle: f64::NAN,
            peak_tau: 0.0,
            min_tau: 0.0,
            peak_accel: 0.0,
            tau_peak_axial: vec![],
            nu_mean_axial: vec![],
            accel_peak_radial: vec![],
            periodicity_defect: f64::INFINITY,
        };
        let lambda = flow_resistance_cycle(&stats, &p).unwrap();
        assert!(((lambda - 12.73) / 12.73).abs() < 0.01);

        // steady Newtonian limit: Q is linear in Kbar, so lambda is unchanged
        let doubled = DimensionlessParams {
            forcing: crate::forcing::ForcingParams::steady(14.6),
            ..p
        };
        stats.q_mean *= 2.0;
        assert!((flow_resistance_cycle(&stats, &doubled).unwrap() - lambda).abs() < 1e-12);

        stats.q_mean = 0.0;
        assert_eq!(
            flow_resistance_cycle(&stats, &p),
            Err(DiagnosticsError::DegenerateCycle { q_mean: 0.0 })
        );
    }

    #[test]
    fn first_step_acceleration_from_rest() {
        let p = DimensionlessParams {
            shape: StenosisShape {
                wall_amplitude: 0.0,
                ..StenosisShape::default()
            },
            ..DimensionlessParams::default()
        };
        let mut sim = Simulation::new(p, NumericalParams::default()).unwrap();
        sim.advance().unwrap();
        let n = *sim.numerics();
        for j in 1..n.radial_intervals {
            let f = fluid_accel(sim.previous(), sim.state(), sim.previous_walls(), &n, 50, j);
            assert!((f - 9.76 / 9.0).abs() < 1e-9, "{f}");
            assert!((f - 1.084).abs() < 1e-3);
        }
        let wall = fluid_accel(
            sim.previous(),
            sim.state(),
            sim.previous_walls(),
            &n,
            50,
            n.radial_intervals,
        );
        assert_eq!(wall, 0.0);
    }

    #[test]
    fn cadence_one_stores_every_step() {
        let p = DimensionlessParams::default();
        let n = NumericalParams::default();
        let mut sim = Simulation::new(p, n).unwrap();
        let mut rec = Recorder::new(&p, &n, 50, 1);
        for _ in 0..25 {
            sim.advance().unwrap();
            rec.collect(&sim);
        }
        assert_eq!(rec.series().len(), 25);
        assert!(rec.cycles().is_empty());
        assert_eq!(rec.series()[24].q.len(), 101);
    }

    #[test]
    fn cycle_index_boundaries() {
        assert_eq!(cycle_index(0.0), 0);
        assert_eq!(cycle_index(CYCLE - 1e-9), 0);
        assert_eq!(cycle_index(CYCLE), 1);
    }
}
