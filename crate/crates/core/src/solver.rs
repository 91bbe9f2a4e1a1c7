//! Explicit finite-difference marching of the transformed system.
//!
//! The radial coordinate is mapped to `xi = r / R(z, t)` so the moving,
//! constricted wall always sits at `xi = 1`. Each step updates `u`, `w` and
//! `theta` at interior nodes from level-`k` data only (forward Euler with
//! central differences), then closes the axial ends, the axis and the wall,
//! and finally recovers `v` from the integrated continuity closure
//! `v = xi [u dR/dz + (2 - xi^2) dR/dt]`.

use rayon::prelude::*;

use crate::error::{FieldKind, ParamError, SolverError};
use crate::field::{Field, FlowField};
use crate::geometry::WallState;
use crate::params::{DimensionlessParams, NumericalParams};

/// Magnitude above which a field value is treated as numerical blow-up.
pub const OVERFLOW_GUARD: f64 = 1e6;

/// Grids at least this large are updated row-parallel.
const PARALLEL_MIN_NODES: usize = 16_384;

/// Largest stable time step for the axial-momentum diffusion operator at the
/// narrowest cross-section the wall ever reaches.
pub fn stability_limit(p: &DimensionlessParams, n: &NumericalParams) -> f64 {
    let r = p.shape.min_radius();
    p.womersley * p.womersley * r * r * n.dxi * n.dxi / (2.0 * (1.0 + p.viscosity_ratio))
}

/// Rest start with `theta = xi^2`, which meets the axis and wall conditions.
pub fn init_state(_p: &DimensionlessParams, n: &NumericalParams) -> FlowField {
    let mut state = FlowField::zeros(n);
    state.theta = Field::from_fn(n.axial_nodes(), n.radial_nodes(), |_, j| {
        let xi = n.xi(j);
        xi * xi
    });
    state
}

/// Level-`k` inputs shared by the three field updates of one step.
#[derive(Debug, Clone, Copy)]
pub struct StepInputs<'a> {
    pub params: &'a DimensionlessParams,
    pub numerics: &'a NumericalParams,
    /// Wall state at every axial node at `time`.
    pub walls: &'a [WallState],
    pub time: f64,
    pub step: u64,
}

/// Precomputed stencil factors.
struct Stencil {
    half_inv_dxi: f64,
    inv_dxi2: f64,
    half_inv_dz: f64,
    n: usize,
}

impl Stencil {
    fn new(n: &NumericalParams) -> Self {
        Self {
            half_inv_dxi: 0.5 / n.dxi,
            inv_dxi2: 1.0 / (n.dxi * n.dxi),
            half_inv_dz: 0.5 / n.dz,
            n: n.radial_intervals,
        }
    }

    #[inline]
    fn xi(&self, j: usize) -> f64 {
        j as f64 / self.n as f64
    }
}

/// Copies `src` into `out`, then overwrites every interior row
/// `1..axial_intervals` with `kernel(i, row)`.
fn update_interior_rows<F>(out: &mut Field, src: &Field, kernel: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    out.copy_from(src);
    let cols = out.cols();
    let rows = out.rows();
    let parallel = rows * cols >= PARALLEL_MIN_NODES && rayon::current_num_threads() > 1;
    let interior = &mut out.as_mut_slice()[cols..(rows - 1) * cols];
    if parallel {
        interior
            .par_chunks_mut(cols)
            .enumerate()
            .for_each(|(k, row)| kernel(k + 1, row));
    } else {
        interior
            .chunks_mut(cols)
            .enumerate()
            .for_each(|(k, row)| kernel(k + 1, row));
    }
}

fn guard(field: &Field, kind: FieldKind, inputs: &StepInputs<'_>) -> Result<(), SolverError> {
    match field.find_overflow(OVERFLOW_GUARD) {
        None => Ok(()),
        Some((i, j, value)) => Err(SolverError::Diverged {
            step: inputs.step,
            time: inputs.time,
            field: kind,
            i,
            j,
            value,
        }),
    }
}

/// Axial momentum at interior nodes.
pub fn step_axial(state: &FlowField, inputs: &StepInputs<'_>, out: &mut Field) -> Result<(), SolverError> {
    let p = inputs.params;
    let dt = inputs.numerics.dt;
    let s = Stencil::new(inputs.numerics);
    let inv_a2 = 1.0 / (p.womersley * p.womersley);
    let k = p.viscosity_ratio;
    let h2 = p.hartmann * p.hartmann;
    let drive = p.forcing.body_accel(inputs.time) + p.forcing.pressure_gradient(inputs.time);

    update_interior_rows(out, &state.u, |i, row| {
        let wall = inputs.walls[i];
        let r = wall.radius;
        let diffusion = (1.0 + k) * inv_a2 / (r * r);
        let coupling = k * inv_a2 / r;
        let u = state.u.row(i);
        let u_up = state.u.row(i + 1);
        let u_dn = state.u.row(i - 1);
        let v = state.v.row(i);
        let w = state.w.row(i);
        for j in 1..s.n {
            let xi = s.xi(j);
            let du_dxi = (u[j + 1] - u[j - 1]) * s.half_inv_dxi;
            let d2u = (u[j + 1] - 2.0 * u[j] + u[j - 1]) * s.inv_dxi2;
            let du_dz = (u_up[j] - u_dn[j]) * s.half_inv_dz;
            let drift = (xi * (wall.dr_dt + u[j] * wall.dr_dz) - v[j]) / r;
            let mut rhs =
                du_dxi * drift - u[j] * du_dz + diffusion * (d2u + du_dxi / xi) + inv_a2 * (drive - h2 * u[j]);
            if k != 0.0 {
                let dw_dxi = (w[j + 1] - w[j - 1]) * s.half_inv_dxi;
                rhs += coupling * (dw_dxi + w[j] / xi);
            }
            row[j] = u[j] + dt * rhs;
        }
    });
    guard(out, FieldKind::Axial, inputs)
}

/// Microrotation at interior nodes.
pub fn step_microrotation(state: &FlowField, inputs: &StepInputs<'_>, out: &mut Field) -> Result<(), SolverError> {
    let p = inputs.params;
    let dt = inputs.numerics.dt;
    let s = Stencil::new(inputs.numerics);
    let inv_a2 = 1.0 / (p.womersley * p.womersley);
    let k = p.viscosity_ratio;
    let vortex = k * inv_a2 / p.gyration;
    let spin = p.material_constant * inv_a2 / p.gyration;

    update_interior_rows(out, &state.w, |i, row| {
        let wall = inputs.walls[i];
        let r = wall.radius;
        let u = state.u.row(i);
        let v = state.v.row(i);
        let v_up = state.v.row(i + 1);
        let v_dn = state.v.row(i - 1);
        let w = state.w.row(i);
        let w_up = state.w.row(i + 1);
        let w_dn = state.w.row(i - 1);
        for j in 1..s.n {
            let xi = s.xi(j);
            let dw_dxi = (w[j + 1] - w[j - 1]) * s.half_inv_dxi;
            let d2w = (w[j + 1] - 2.0 * w[j] + w[j - 1]) * s.inv_dxi2;
            let dw_dz = (w_up[j] - w_dn[j]) * s.half_inv_dz;
            let dv_dz = (v_up[j] - v_dn[j]) * s.half_inv_dz;
            let dv_dxi = (v[j + 1] - v[j - 1]) * s.half_inv_dxi;
            let du_dxi = (u[j + 1] - u[j - 1]) * s.half_inv_dxi;
            let drift = (xi * (wall.dr_dt + u[j] * wall.dr_dz) - v[j]) / r;
            let rhs = dw_dxi * drift
                - u[j] * dw_dz
                - vortex * (2.0 * w[j] - dv_dz)
                - vortex / r * (du_dxi + xi * wall.dr_dz * dv_dxi)
                + spin / (r * r) * (d2w + dw_dxi / xi - w[j] / (xi * xi));
            row[j] = w[j] + dt * rhs;
        }
    });
    guard(out, FieldKind::Microrotation, inputs)
}

/// Energy equation at interior nodes, with Joule heating `Ec H^2 u^2 / alpha^2`.
pub fn step_temperature(state: &FlowField, inputs: &StepInputs<'_>, out: &mut Field) -> Result<(), SolverError> {
    let p = inputs.params;
    let dt = inputs.numerics.dt;
    let s = Stencil::new(inputs.numerics);
    let inv_a2 = 1.0 / (p.womersley * p.womersley);
    let conduction = inv_a2 / p.prandtl;
    let joule = p.eckert * p.hartmann * p.hartmann * inv_a2;

    update_interior_rows(out, &state.theta, |i, row| {
        let wall = inputs.walls[i];
        let r = wall.radius;
        let u = state.u.row(i);
        let v = state.v.row(i);
        let th = state.theta.row(i);
        let th_up = state.theta.row(i + 1);
        let th_dn = state.theta.row(i - 1);
        for j in 1..s.n {
            let xi = s.xi(j);
            let dth_dxi = (th[j + 1] - th[j - 1]) * s.half_inv_dxi;
            let d2th = (th[j + 1] - 2.0 * th[j] + th[j - 1]) * s.inv_dxi2;
            let dth_dz = (th_up[j] - th_dn[j]) * s.half_inv_dz;
            let drift = (xi * (wall.dr_dt + u[j] * wall.dr_dz) - v[j]) / r;
            let rhs =
                dth_dxi * drift - u[j] * dth_dz + conduction / (r * r) * (d2th + dth_dxi / xi) + joule * u[j] * u[j];
            row[j] = th[j] + dt * rhs;
        }
    });
    guard(out, FieldKind::Temperature, inputs)
}

/// Radial velocity from the continuity closure, at every node.
pub fn update_radial(state: &mut FlowField, walls: &[WallState], n: &NumericalParams) {
    for (i, wall) in walls.iter().enumerate().take(n.axial_nodes()) {
        let u = state.u.row(i);
        let mut v_row = vec![0.0; n.radial_nodes()];
        for (j, v) in v_row.iter_mut().enumerate() {
            let xi = n.xi(j);
            *v = xi * (u[j] * wall.dr_dz + (2.0 - xi * xi) * wall.dr_dt);
        }
        state.v.row_mut(i).copy_from_slice(&v_row);
    }
}

/// Axis conditions: `v = w = 0` and zero radial slope of `u` and `theta`
/// through the second-order three-point formula.
pub fn apply_axis_bc(state: &mut FlowField) {
    for i in 0..state.u.rows() {
        state.v.set(i, 0, 0.0);
        state.w.set(i, 0, 0.0);
        for f in [&mut state.u, &mut state.theta] {
            let value = (4.0 * f.get(i, 1) - f.get(i, 2)) / 3.0;
            f.set(i, 0, value);
        }
    }
}

/// Wall conditions: no slip, no spin, unit temperature, wall-following `v`.
pub fn apply_wall_bc(state: &mut FlowField, walls: &[WallState]) {
    let last = state.u.cols() - 1;
    for (i, wall) in walls.iter().enumerate().take(state.u.rows()) {
        state.u.set(i, last, 0.0);
        state.w.set(i, last, 0.0);
        state.theta.set(i, last, 1.0);
        state.v.set(i, last, wall.dr_dt);
    }
}

/// Zero axial gradient at inlet and outlet: the end rows of `u`, `w` and
/// `theta` copy their interior neighbours. `v` is left to the closure.
pub fn axial_boundary_policy(state: &mut FlowField) {
    let last = state.u.rows() - 1;
    for f in [&mut state.u, &mut state.w, &mut state.theta] {
        let first_inner = f.row(1).to_vec();
        f.row_mut(0).copy_from_slice(&first_inner);
        let last_inner = f.row(last - 1).to_vec();
        f.row_mut(last).copy_from_slice(&last_inner);
    }
}

/// Number of nodes at which an axis or wall condition does not hold
/// exactly (bitwise).
pub fn boundary_violations(s: &FlowField, walls: &[WallState]) -> usize {
    let last = s.u.cols() - 1;
    let axis = |f: &Field, i: usize| (4.0 * f.get(i, 1) - f.get(i, 2)) / 3.0;
    walls
        .iter()
        .enumerate()
        .take(s.u.rows())
        .map(|(i, wall)| {
            [
                s.u.get(i, last) == 0.0,
                s.w.get(i, last) == 0.0,
                s.theta.get(i, last) == 1.0,
                s.v.get(i, last) == wall.dr_dt,
                s.v.get(i, 0) == 0.0,
                s.w.get(i, 0) == 0.0,
                s.u.get(i, 0) == axis(&s.u, i),
                s.theta.get(i, 0) == axis(&s.theta, i),
            ]
            .iter()
            .filter(|ok| !**ok)
            .count()
        })
        .sum()
}

/// Residual of the pointwise continuity closure
/// `du/dz - 4 (xi^2 - 1) R_t / R + 2 R_z u / R`.
///
/// Interior rows use central differences in `z`; the end rows use
/// second-order one-sided differences.
pub fn continuity_residual(state: &FlowField, walls: &[WallState], n: &NumericalParams) -> Field {
    let m = n.axial_intervals;
    let inv_dz = 1.0 / n.dz;
    Field::from_fn(n.axial_nodes(), n.radial_nodes(), |i, j| {
        let u = &state.u;
        let du_dz = if i == 0 {
            (-3.0 * u.get(0, j) + 4.0 * u.get(1, j) - u.get(2, j)) * 0.5 * inv_dz
        } else if i == m {
            (3.0 * u.get(m, j) - 4.0 * u.get(m - 1, j) + u.get(m - 2, j)) * 0.5 * inv_dz
        } else {
            (u.get(i + 1, j) - u.get(i - 1, j)) * 0.5 * inv_dz
        };
        let xi = n.xi(j);
        let wall = walls[i];
        du_dz - 4.0 * (xi * xi - 1.0) * wall.dr_dt / wall.radius + 2.0 * wall.dr_dz * u.get(i, j) / wall.radius
    })
}

/// Advances `state` (level `k`, with `walls` at its time) into `next`,
/// with `walls_next` evaluated at the new time.
fn advance_into(
    state: &FlowField,
    next: &mut FlowField,
    inputs: &StepInputs<'_>,
    walls_next: &[WallState],
) -> Result<(), SolverError> {
    step_axial(state, inputs, &mut next.u)?;
    step_microrotation(state, inputs, &mut next.w)?;
    step_temperature(state, inputs, &mut next.theta)?;
    next.t = (inputs.step + 1) as f64 * inputs.numerics.dt;

    axial_boundary_policy(next);
    apply_axis_bc(next);
    apply_wall_bc(next, walls_next);
    update_radial(next, walls_next, inputs.numerics);
    let after = StepInputs {
        time: next.t,
        ..*inputs
    };
    guard(&next.v, FieldKind::Radial, &after)
}

/// One time step without any parameter validation. `step` is the index of
/// the level held in `state`, so `state.t` should equal `step * dt`.
pub fn advance(
    state: &FlowField,
    p: &DimensionlessParams,
    n: &NumericalParams,
    step: u64,
) -> Result<FlowField, SolverError> {
    let mut walls = Vec::new();
    let mut walls_next = Vec::new();
    p.shape.wall_states(n.axial_intervals, n.dz, state.t, &mut walls);
    let t_next = (step + 1) as f64 * n.dt;
    p.shape.wall_states(n.axial_intervals, n.dz, t_next, &mut walls_next);
    let inputs = StepInputs {
        params: p,
        numerics: n,
        walls: &walls,
        time: state.t,
        step,
    };
    let mut next = state.clone();
    advance_into(state, &mut next, &inputs, &walls_next)?;
    Ok(next)
}

/// A single simulation run: owns the current and previous levels and the
/// wall states that belong to them.
#[derive(Debug, Clone)]
pub struct Simulation {
    params: DimensionlessParams,
    numerics: NumericalParams,
    state: FlowField,
    previous: FlowField,
    walls: Vec<WallState>,
    previous_walls: Vec<WallState>,
    step: u64,
}

impl Simulation {
    /// Validates the parameters and the time step against [`stability_limit`].
    pub fn new(params: DimensionlessParams, numerics: NumericalParams) -> Result<Self, SolverError> {
        let limit = stability_limit(&params, &numerics);
        if numerics.dt > limit {
            return Err(ParamError::Unstable { dt: numerics.dt, limit }.into());
        }
        Self::with_unchecked_dt(params, numerics)
    }

    /// Like [`Simulation::new`] but accepts any positive time step. Used to
    /// probe the divergence guard.
    pub fn with_unchecked_dt(params: DimensionlessParams, numerics: NumericalParams) -> Result<Self, SolverError> {
        params.validate()?;
        if (numerics.axial_intervals as f64 * numerics.dz - params.shape.tube_length).abs() > 1e-12 {
            return Err(ParamError::Inconsistent(format!(
                "axial grid covers {} but the tube length is {}",
                numerics.axial_intervals as f64 * numerics.dz,
                params.shape.tube_length
            ))
            .into());
        }
        let state = init_state(&params, &numerics);
        let mut walls = Vec::new();
        params
            .shape
            .wall_states(numerics.axial_intervals, numerics.dz, 0.0, &mut walls);
        Ok(Self {
            previous: state.clone(),
            previous_walls: walls.clone(),
            params,
            numerics,
            state,
            walls,
            step: 0,
        })
    }

    pub fn params(&self) -> &DimensionlessParams {
        &self.params
    }

    pub fn numerics(&self) -> &NumericalParams {
        &self.numerics
    }

    pub fn state(&self) -> &FlowField {
        &self.state
    }

    /// Replaces the current level, e.g. to start from a prescribed profile.
    pub fn set_state(&mut self, state: FlowField) {
        self.step = (state.t / self.numerics.dt).round() as u64;
        self.params.shape.wall_states(
            self.numerics.axial_intervals,
            self.numerics.dz,
            state.t,
            &mut self.walls,
        );
        self.previous = state.clone();
        self.previous_walls = self.walls.clone();
        self.state = state;
    }

    /// The level before the most recent step (equal to the current one before any step).
    pub fn previous(&self) -> &FlowField {
        &self.previous
    }

    pub fn walls(&self) -> &[WallState] {
        &self.walls
    }

    pub fn previous_walls(&self) -> &[WallState] {
        &self.previous_walls
    }

    pub fn time(&self) -> f64 {
        self.state.t
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn advance(&mut self) -> Result<(), SolverError> {
        let t_next = (self.step + 1) as f64 * self.numerics.dt;
        self.params.shape.wall_states(
            self.numerics.axial_intervals,
            self.numerics.dz,
            t_next,
            &mut self.previous_walls,
        );
        let inputs = StepInputs {
            params: &self.params,
            numerics: &self.numerics,
            walls: &self.walls,
            time: self.state.t,
            step: self.step,
        };
        // `previous` is scratch here; after the swap it holds level k.
        advance_into(&self.state, &mut self.previous, &inputs, &self.previous_walls)?;
        std::mem::swap(&mut self.state, &mut self.previous);
        std::mem::swap(&mut self.walls, &mut self.previous_walls);
        self.step += 1;
        Ok(())
    }
}
