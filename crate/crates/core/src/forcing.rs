//! Periodic body acceleration and pulsatile pressure gradient.

use crate::error::ParamError;
use crate::geometry::check_param;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcingParams {
    /// Body-acceleration amplitude `a0`.
    pub body_amplitude: f64,
    /// Body-acceleration to pulse frequency ratio `b`.
    pub body_frequency: f64,
    pub body_phase: f64,
    /// Steady part of the driving gradient `-dp/dz`.
    pub mean_gradient: f64,
    /// Amplitude of the pulsatile part of `-dp/dz`.
    pub pulsatile_gradient: f64,
}

impl Default for ForcingParams {
    fn default() -> Self {
        Self {
            body_amplitude: 1.0,
            body_frequency: 1.0,
            body_phase: 0.0,
            mean_gradient: 7.30,
            pulsatile_gradient: 1.46,
        }
    }
}

impl ForcingParams {
    /// Constant pressure gradient, no body acceleration.
    pub fn steady(mean_gradient: f64) -> Self {
        Self {
            body_amplitude: 0.0,
            pulsatile_gradient: 0.0,
            mean_gradient,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        check_param(self.body_amplitude >= 0.0, "a0", "≥ 0", self.body_amplitude)?;
        check_param(self.body_frequency > 0.0, "b", "> 0", self.body_frequency)?;
        check_param(self.body_phase.is_finite(), "phi_g", "finite", self.body_phase)?;
        check_param(self.mean_gradient > 0.0, "Kbar", "> 0", self.mean_gradient)?;
        check_param(self.pulsatile_gradient >= 0.0, "Kp", "≥ 0", self.pulsatile_gradient)
    }

    /// `G(t) = a0 cos(b t + phi_g)`.
    pub fn body_accel(&self, t: f64) -> f64 {
        self.body_amplitude * (self.body_frequency * t + self.body_phase).cos()
    }

    /// Driving gradient `-dp/dz = Kbar + Kp cos t`; positive drives flow towards +z.
    pub fn pressure_gradient(&self, t: f64) -> f64 {
        self.mean_gradient + self.pulsatile_gradient * t.cos()
    }
}
