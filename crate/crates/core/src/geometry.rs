//! Time-dependent stenosed wall radius and its analytic derivatives.
//!
//! The wall is a single cosine bump of depth `depth` occupying
//! `offset < z < offset + length`, multiplied by the wall-motion factor
//! `1 + wall_amplitude * sin(t + wall_phase)`. Outside the bump the radius is
//! the mean radius times the same factor.

use std::f64::consts::PI;

use crate::error::{GeometryError, ParamError};

/// Stenosed tube geometry in units of the unconstricted radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StenosisShape {
    pub mean_radius: f64,
    /// Fractional depth of the constriction at the throat.
    pub depth: f64,
    /// Axial position where the bump starts.
    pub offset: f64,
    /// Axial extent of the bump.
    pub length: f64,
    pub wall_amplitude: f64,
    pub wall_phase: f64,
    pub tube_length: f64,
}

impl Default for StenosisShape {
    fn default() -> Self {
        Self {
            mean_radius: 1.0,
            depth: 0.25,
            offset: 2.0,
            length: 1.0,
            wall_amplitude: 0.05,
            wall_phase: 0.0,
            tube_length: 5.0,
        }
    }
}

/// Radius and its first derivatives at one axial station.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WallState {
    pub radius: f64,
    pub dr_dz: f64,
    pub dr_dt: f64,
}

impl StenosisShape {
    /// A rigid straight tube of unit radius.
    pub fn straight(tube_length: f64) -> Self {
        Self {
            depth: 0.0,
            wall_amplitude: 0.0,
            tube_length,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        check_param(self.mean_radius > 0.0, "Rbar", "> 0", self.mean_radius)?;
        check_param(self.depth >= 0.0, "delta", "≥ 0", self.depth)?;
        check_param(self.depth < 1.0, "delta", "< 1 (fraction of the radius)", self.depth)?;
        check_param(self.length > 0.0, "l0", "> 0", self.length)?;
        check_param(self.offset >= 0.0, "d", "≥ 0", self.offset)?;
        check_param(self.tube_length > 0.0, "L", "> 0", self.tube_length)?;
        check_param(
            (0.0..1.0).contains(&self.wall_amplitude),
            "Kr",
            "in [0, 1)",
            self.wall_amplitude,
        )?;
        check_param(self.wall_phase.is_finite(), "phi_r", "finite", self.wall_phase)?;
        if self.offset + self.length > self.tube_length {
            return Err(ParamError::Inconsistent(format!(
                "stenosis d + l0 = {} extends past the tube end L = {}",
                self.offset + self.length,
                self.tube_length
            )));
        }
        Ok(())
    }

    /// Axial position of the narrowest cross-section.
    pub fn throat(&self) -> f64 {
        self.offset + 0.5 * self.length
    }

    /// Smallest radius attained anywhere in the tube over a wall-motion cycle.
    pub fn min_radius(&self) -> f64 {
        self.mean_radius * (1.0 - self.depth) * (1.0 - self.wall_amplitude)
    }

    fn in_bump(&self, z: f64) -> bool {
        z > self.offset && z < self.offset + self.length
    }

    fn check_z(&self, z: f64) -> Result<(), GeometryError> {
        if (0.0..=self.tube_length).contains(&z) {
            Ok(())
        } else {
            Err(GeometryError::OutOfDomain {
                z,
                length: self.tube_length,
            })
        }
    }

    /// Static profile (no wall motion) and its z-derivative.
    fn profile(&self, z: f64) -> (f64, f64) {
        if self.in_bump(z) {
            let wave = 2.0 * PI / self.length;
            let arg = wave * (z - self.throat());
            let shape = self.mean_radius * (1.0 - 0.5 * self.depth * (1.0 + arg.cos()));
            let slope = self.mean_radius * 0.5 * self.depth * wave * arg.sin();
            (shape, slope)
        } else {
            (self.mean_radius, 0.0)
        }
    }

    fn motion(&self, t: f64) -> (f64, f64) {
        let phase = t + self.wall_phase;
        (
            1.0 + self.wall_amplitude * phase.sin(),
            self.wall_amplitude * phase.cos(),
        )
    }

    pub fn radius(&self, z: f64, t: f64) -> Result<f64, GeometryError> {
        self.check_z(z)?;
        Ok(self.profile(z).0 * self.motion(t).0)
    }

    pub fn radius_dz(&self, z: f64, t: f64) -> Result<f64, GeometryError> {
        self.check_z(z)?;
        Ok(self.profile(z).1 * self.motion(t).0)
    }

    pub fn radius_dt(&self, z: f64, t: f64) -> Result<f64, GeometryError> {
        self.check_z(z)?;
        Ok(self.profile(z).0 * self.motion(t).1)
    }

    pub fn wall_state(&self, z: f64, t: f64) -> Result<WallState, GeometryError> {
        self.check_z(z)?;
        let (shape, slope) = self.profile(z);
        let (factor, rate) = self.motion(t);
        Ok(WallState {
            radius: shape * factor,
            dr_dz: slope * factor,
            dr_dt: shape * rate,
        })
    }

    /// Wall state at every axial node `z_i = i * dz`, `i = 0..=m`.
    ///
    /// The last node is clamped to the tube length so rounding in `m * dz`
    /// never pushes it outside the domain.
    pub fn wall_states(&self, m: usize, dz: f64, t: f64, out: &mut Vec<WallState>) {
        out.clear();
        out.extend((0..=m).map(|i| {
            let z = (i as f64 * dz).min(self.tube_length);
            self.wall_state(z, t).expect("grid nodes lie inside the tube")
        }));
    }
}

pub(crate) fn check_param(
    ok: bool,
    name: &'static str,
    requirement: &'static str,
    value: f64,
) -> Result<(), ParamError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ParamError::OutOfRange {
            name,
            requirement,
            value,
        })
    }
}
