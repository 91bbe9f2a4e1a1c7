//! Dimensionless model parameters and discretisation settings.

use crate::error::ParamError;
use crate::forcing::ForcingParams;
use crate::geometry::{check_param, StenosisShape};

/// Physical dimensionless groups plus the geometry and forcing they act on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams {
    /// Rotational to dynamic viscosity ratio `K = k / mu`. Zero gives a Newtonian fluid.
    pub viscosity_ratio: f64,
    /// Spin-gradient material constant `m`.
    pub material_constant: f64,
    /// Micro-gyration parameter `J`.
    pub gyration: f64,
    pub womersley: f64,
    pub hartmann: f64,
    pub prandtl: f64,
    pub eckert: f64,
    /// Pulse frequency used only to report `T = t / (2 pi f_p)`.
    pub pulse_frequency: f64,
    pub shape: StenosisShape,
    pub forcing: ForcingParams,
}

impl Default for DimensionlessParams {
    fn default() -> Self {
        Self {
            viscosity_ratio: 0.1,
            material_constant: 0.1,
            gyration: 0.1,
            womersley: 3.0,
            hartmann: 2.0,
            prandtl: 21.0,
            eckert: 0.0002,
            pulse_frequency: 1.2,
            shape: StenosisShape::default(),
            forcing: ForcingParams::default(),
        }
    }
}

impl DimensionlessParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        check_param(self.womersley > 0.0, "alpha", "> 0", self.womersley)?;
        check_param(self.hartmann >= 0.0, "H", "≥ 0", self.hartmann)?;
        check_param(self.prandtl > 0.0, "Pr", "> 0", self.prandtl)?;
        check_param(self.eckert >= 0.0, "Ec", "≥ 0", self.eckert)?;
        check_param(self.viscosity_ratio >= 0.0, "K", "≥ 0", self.viscosity_ratio)?;
        check_param(self.gyration > 0.0, "J", "> 0", self.gyration)?;
        check_param(self.material_constant >= 0.0, "m", "≥ 0", self.material_constant)?;
        if self.viscosity_ratio > 0.0 {
            check_param(
                self.material_constant > 0.0,
                "m",
                "> 0 when K > 0",
                self.material_constant,
            )?;
        }
        check_param(self.pulse_frequency > 0.0, "f_p", "> 0", self.pulse_frequency)?;
        self.shape.validate()?;
        self.forcing.validate()
    }

    /// Report time `T = t / (2 pi f_p)`.
    pub fn report_time(&self, t: f64) -> f64 {
        t / (2.0 * std::f64::consts::PI * self.pulse_frequency)
    }
}

/// Grid spacings, time step and run-length policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericalParams {
    pub dz: f64,
    pub dxi: f64,
    pub dt: f64,
    /// Number of axial intervals; nodes are `0..=axial_intervals`.
    pub axial_intervals: usize,
    /// Number of radial intervals; nodes are `0..=radial_intervals`.
    pub radial_intervals: usize,
    pub warmup_periods: u32,
    pub measure_periods: u32,
}

impl Default for NumericalParams {
    fn default() -> Self {
        Self::new(5.0, 0.05, 0.025, 0.001).expect("default grid is consistent")
    }
}

impl NumericalParams {
    /// Derives node counts from the spacings. Spacings must divide the
    /// domain lengths exactly (to 1e-12).
    pub fn new(tube_length: f64, dz: f64, dxi: f64, dt: f64) -> Result<Self, ParamError> {
        check_param(dz > 0.0, "dz", "> 0", dz)?;
        check_param(dxi > 0.0, "dxi", "> 0", dxi)?;
        check_param(dt > 0.0, "dt", "> 0", dt)?;
        check_param(tube_length > 0.0, "L", "> 0", tube_length)?;
        let m = (tube_length / dz).round();
        let n = (1.0 / dxi).round();
        if m < 2.0 || (m * dz - tube_length).abs() > 1e-12 {
            return Err(ParamError::Inconsistent(format!(
                "dz = {dz} does not divide L = {tube_length} into at least 2 intervals"
            )));
        }
        if n < 3.0 || (n * dxi - 1.0).abs() > 1e-12 {
            return Err(ParamError::Inconsistent(format!(
                "dxi = {dxi} does not divide [0, 1] into at least 3 intervals"
            )));
        }
        Ok(Self {
            dz,
            dxi,
            dt,
            axial_intervals: m as usize,
            radial_intervals: n as usize,
            warmup_periods: 3,
            measure_periods: 1,
        })
    }

    pub fn axial_nodes(&self) -> usize {
        self.axial_intervals + 1
    }

    pub fn radial_nodes(&self) -> usize {
        self.radial_intervals + 1
    }

    pub fn xi(&self, j: usize) -> f64 {
        j as f64 / self.radial_intervals as f64
    }

    pub fn z(&self, i: usize) -> f64 {
        i as f64 * self.dz
    }

    /// Same grid with both spacings halved and the time step quartered so the
    /// diffusive stability margin is unchanged.
    pub fn refined(&self, tube_length: f64) -> Result<Self, ParamError> {
        let mut next = Self::new(tube_length, 0.5 * self.dz, 0.5 * self.dxi, 0.25 * self.dt)?;
        next.warmup_periods = self.warmup_periods;
        next.measure_periods = self.measure_periods;
        Ok(next)
    }

    /// Axial node closest to `z`.
    pub fn nearest_node(&self, z: f64) -> usize {
        ((z / self.dz).round().max(0.0) as usize).min(self.axial_intervals)
    }
}
