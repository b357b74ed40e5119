//! Constant-divergence control: `u_z = K_z (θ* − θ_z)` plus an optional
//! integrator, and the conversion of the control acceleration into thrust.

use serde::{Deserialize, Serialize};

use crate::dynamics::VehicleParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerConfig {
    /// Proportional gain `K_z`.
    pub gain_p: f64,
    /// Integral gain `I_z`; zero disables the integrator.
    pub gain_i: f64,
    /// Divergence magnitude `c²`; the setpoint is `θ* = −c²`.
    pub c2: f64,
    /// Bound on the integral contribution to `u_z` (m/s²).
    pub integrator_limit: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            gain_p: 20.0,
            gain_i: 0.0,
            c2: 0.2,
            integrator_limit: 2.0 * 9.81,
        }
    }
}

impl ControllerConfig {
    pub fn setpoint(&self) -> f64 {
        -self.c2
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gain_p >= 0.0) {
            return Err(Error::invalid("gain_p", "must be >= 0"));
        }
        if !(self.gain_i >= 0.0) {
            return Err(Error::invalid("gain_i", "must be >= 0"));
        }
        if !(self.c2 >= 0.0 && self.c2.is_finite()) {
            return Err(Error::invalid("c2", "must be >= 0"));
        }
        if !(self.integrator_limit > 0.0) {
            return Err(Error::invalid("integrator_limit", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControllerState {
    /// Rectangular sum of the divergence error, `Σ e·T`.
    pub integral_error: f64,
    /// Last control acceleration `u_z`, m/s².
    pub last_command_u_z: f64,
    /// Last thrust `u′_z = m (u_z + g)`, N.
    pub last_thrust: f64,
}

pub fn p_control(cfg: &ControllerConfig, theta: f64) -> f64 {
    cfg.gain_p * (cfg.setpoint() - theta)
}

/// PI law with a rectangular integrator and a clamp on the integral term.
pub fn pi_control(cfg: &ControllerConfig, state: &ControllerState, theta: f64, dt: f64) -> (f64, ControllerState) {
    let error = cfg.setpoint() - theta;
    let mut next = *state;
    let u_z = if cfg.gain_i > 0.0 {
        let bound = cfg.integrator_limit / cfg.gain_i;
        next.integral_error = (state.integral_error + error * dt).clamp(-bound, bound);
        cfg.gain_p * error + cfg.gain_i * next.integral_error
    } else {
        cfg.gain_p * error
    };
    next.last_command_u_z = u_z;
    (u_z, next)
}

/// `u′_z = m (u_z + g)`; no clamping.
pub fn to_thrust(u_z: f64, vehicle: &VehicleParams) -> f64 {
    vehicle.mass * (u_z + vehicle.gravity)
}
