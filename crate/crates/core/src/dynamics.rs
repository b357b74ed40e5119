//! Vertical point-mass dynamics with gravity, quadratic drag, wind, sinusoidal
//! gusts and airflow-dependent actuator effectiveness.
//!
//! The `z` axis points up. Relative airflow is `v_air = v_wind - v_z`, so a
//! descending vehicle in still air sees a positive airflow and drag that pushes
//! it up.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vehicle constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VehicleParams {
    /// kg
    pub mass: f64,
    /// m/s²
    pub gravity: f64,
    /// Aggregate `½·ρ·C_D·A` in kg/m.
    pub drag_coeff_half: f64,
    /// Slope loss of the actuator per m/s of inflow.
    pub actuator_b: f64,
    /// Offset loss of the actuator in N per m/s of inflow.
    pub actuator_c: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            mass: 1.0,
            gravity: 9.81,
            drag_coeff_half: 0.5,
            actuator_b: 0.0,
            actuator_c: 0.0,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::invalid("mass", format!("must be > 0, got {}", self.mass)));
        }
        if !(self.gravity >= 0.0) {
            return Err(Error::invalid("gravity", "must be >= 0"));
        }
        if !(self.drag_coeff_half >= 0.0) {
            return Err(Error::invalid("drag_coeff_half", "must be >= 0"));
        }
        if !(self.actuator_b >= 0.0 && self.actuator_c >= 0.0) {
            return Err(Error::invalid("actuator_b/actuator_c", "must be >= 0"));
        }
        Ok(())
    }

    /// Thrust that balances gravity in still air.
    pub fn hover_thrust(&self) -> f64 {
        self.mass * self.gravity
    }

    /// Linearized drag constant `β = ρ·C_D·A / m`.
    pub fn beta(&self) -> f64 {
        2.0 * self.drag_coeff_half / self.mass
    }
}

/// Wind environment: a mean vertical wind plus a sinusoidal gust.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvParams {
    /// m/s, positive up.
    pub wind_mean: f64,
    /// Gust amplitude `W` in m/s.
    pub gust_amplitude: f64,
    /// Gust angular rate `a` in rad/s.
    pub gust_rate: f64,
}

impl EnvParams {
    pub fn still() -> Self {
        Self::default()
    }

    pub fn with_wind(wind_mean: f64) -> Self {
        Self {
            wind_mean,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gust_amplitude >= 0.0 && self.gust_rate >= 0.0) {
            return Err(Error::invalid("gust", "amplitude and rate must be >= 0"));
        }
        if !self.wind_mean.is_finite() {
            return Err(Error::invalid("wind_mean", "must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    /// Height above the surface, m.
    pub z: f64,
    /// Vertical velocity, m/s, positive up.
    pub v_z: f64,
    /// s
    pub t: f64,
}

impl VehicleState {
    pub fn new(z: f64, v_z: f64) -> Self {
        Self { z, v_z, t: 0.0 }
    }
}

/// Thrust before and after the actuator effectiveness loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThrustCommand {
    pub commanded_thrust: f64,
    pub effective_thrust: f64,
}

/// Integration scheme used inside one control period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Integrator {
    /// Classical RK4 with `substeps` equal sub-intervals per period.
    Rk4 { substeps: u32 },
    /// A single explicit Euler step per period.
    Euler,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::Rk4 { substeps: 4 }
    }
}

/// Per-step settings shared by every call to [`step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    /// Control period `T`, s.
    pub dt: f64,
    pub integrator: Integrator,
    /// Touchdown height; `z` is clamped here when crossed.
    pub z_floor: f64,
}

impl StepConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            integrator: Integrator::default(),
            z_floor: 0.0,
        }
    }
}

pub fn wind_at(env: &EnvParams, t: f64) -> f64 {
    env.wind_mean + env.gust_amplitude * (env.gust_rate * t).sin()
}

/// Drag force along `z` for the given wind and vehicle velocity.
pub fn drag_force(v_wind: f64, v_z: f64, drag_coeff_half: f64) -> f64 {
    let v_air = v_wind - v_z;
    // v_air.abs() * v_air == sign(v_air) * v_air²
    drag_coeff_half * v_air.abs() * v_air
}

/// Airflow-dependent loss of thrust, clamped at zero. `inflow` is the axial
/// airspeed entering the rotor disc from above.
pub fn apply_actuator_effectiveness(u_commanded: f64, inflow: f64, b: f64, c: f64) -> f64 {
    (u_commanded - b * inflow * u_commanded - c * inflow).max(0.0)
}

/// Axial rotor inflow `v_z - v_wind`: positive when the vehicle climbs
/// relative to the air, where a propeller loses thrust.
pub fn rotor_inflow(env: &EnvParams, state: &VehicleState) -> f64 {
    state.v_z - wind_at(env, state.t)
}

/// Converts a commanded thrust into the thrust the rotors deliver over the
/// coming period, using the inflow at the start of the period.
pub fn actuate(commanded_thrust: f64, state: &VehicleState, env: &EnvParams, vehicle: &VehicleParams) -> ThrustCommand {
    ThrustCommand {
        commanded_thrust,
        effective_thrust: apply_actuator_effectiveness(
            commanded_thrust,
            rotor_inflow(env, state),
            vehicle.actuator_b,
            vehicle.actuator_c,
        ),
    }
}

/// Vertical acceleration at `state` under the given effective thrust.
pub fn accel(state: &VehicleState, effective_thrust: f64, env: &EnvParams, vehicle: &VehicleParams) -> f64 {
    let f_d = drag_force(wind_at(env, state.t), state.v_z, vehicle.drag_coeff_half);
    -vehicle.gravity + (effective_thrust + f_d) / vehicle.mass
}

/// Advances the plant by one control period with the thrust held constant.
pub fn step(
    state: &VehicleState,
    effective_thrust: f64,
    env: &EnvParams,
    vehicle: &VehicleParams,
    cfg: &StepConfig,
) -> Result<VehicleState> {
    let dt = cfg.dt;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("T", format!("time step must be > 0, got {dt}")));
    }
    if !effective_thrust.is_finite() {
        return Err(Error::invalid("thrust", "must be finite"));
    }
    if !(state.z > 0.0) {
        return Err(Error::ObservationUndefined { z: state.z });
    }

    let derivative = |s: &VehicleState| (s.v_z, accel(s, effective_thrust, env, vehicle));

    let mut next = *state;
    match cfg.integrator {
        Integrator::Euler => {
            let (dz, dv) = derivative(&next);
            next.z += dt * dz;
            next.v_z += dt * dv;
        }
        Integrator::Rk4 { substeps } => {
            let n = substeps.max(1);
            let h = dt / f64::from(n);
            for _ in 0..n {
                let at = |s: &VehicleState, k: (f64, f64), frac: f64| VehicleState {
                    z: s.z + frac * h * k.0,
                    v_z: s.v_z + frac * h * k.1,
                    t: s.t + frac * h,
                };
                let k1 = derivative(&next);
                let k2 = derivative(&at(&next, k1, 0.5));
                let k3 = derivative(&at(&next, k2, 0.5));
                let k4 = derivative(&at(&next, k3, 1.0));
                next.z += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
                next.v_z += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
                next.t += h;
            }
        }
    }
    // Avoid drift in t from repeated sub-step additions.
    next.t = state.t + dt;
    if next.z <= cfg.z_floor {
        next.z = cfg.z_floor;
    }
    if !(next.z.is_finite() && next.v_z.is_finite()) {
        return Err(Error::Numerical(format!(
            "non-finite state after step at t = {}",
            state.t
        )));
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn vacuum() -> VehicleParams {
        VehicleParams {
            drag_coeff_half: 0.0,
            ..VehicleParams::default()
        }
    }

    #[test]
    fn wind_examples() {
        let gust = EnvParams {
            wind_mean: 0.0,
            gust_amplitude: 4.0,
            gust_rate: 1.0,
        };
        assert_eq!(wind_at(&gust, 0.0), 0.0);
        assert!((wind_at(&gust, FRAC_PI_2) - 4.0).abs() < 1e-12);
        let steady = EnvParams {
            wind_mean: -2.0,
            gust_amplitude: 0.0,
            gust_rate: 1.0,
        };
        assert_eq!(wind_at(&steady, 7.3), -2.0);
    }

    #[test]
    fn drag_examples() {
        assert_eq!(drag_force(0.0, 0.0, 0.5), 0.0);
        assert!((drag_force(0.0, -2.0, 0.5) - 2.0).abs() < 1e-12);
        let k = 0.5 * 1.204 * 0.25 * 0.25;
        assert!((drag_force(-1.0, 0.0, k) + 0.037625).abs() < 1e-12);
    }

    #[test]
    fn drag_opposes_relative_airflow() {
        for &(w, v) in &[(1.0, 0.0), (-3.0, 1.0), (0.5, 2.0), (0.0, -4.0)] {
            let f = drag_force(w, v, 0.3);
            assert_eq!(f.signum(), (w - v).signum());
        }
    }

    #[test]
    fn effectiveness_examples() {
        assert_eq!(apply_actuator_effectiveness(10.0, 0.0, 0.5, 0.5), 10.0);
        assert!((apply_actuator_effectiveness(10.0, 1.0, 0.5, 0.5) - 4.5).abs() < 1e-12);
        assert_eq!(apply_actuator_effectiveness(1.0, 4.0, 0.5, 0.5), 0.0);
    }

    #[test]
    fn accel_examples() {
        let v = VehicleParams::default();
        let still = EnvParams::still();
        assert_eq!(accel(&VehicleState::new(5.0, 0.0), v.hover_thrust(), &still, &v), 0.0);
        let a = accel(&VehicleState::new(5.0, -2.0), 9.81, &still, &v);
        assert!((a - 2.0).abs() < 1e-12);
        let a = accel(&VehicleState::new(5.0, 3.0), 11.81, &still, &vacuum());
        assert!((a - 2.0).abs() < 1e-12);
    }

    #[test]
    fn step_rejects_bad_inputs() {
        let v = VehicleParams::default();
        let s = VehicleState::new(1.0, 0.0);
        let env = EnvParams::still();
        assert!(step(&s, 9.81, &env, &v, &StepConfig::new(0.0)).is_err());
        assert!(step(&s, 9.81, &env, &v, &StepConfig::new(-0.1)).is_err());
        assert!(step(&s, f64::NAN, &env, &v, &StepConfig::new(0.03)).is_err());
        assert!(step(&VehicleState::new(0.0, 0.0), 9.81, &env, &v, &StepConfig::new(0.03)).is_err());
    }

    #[test]
    fn vacuum_equilibrium_only_advances_time() {
        let v = vacuum();
        let s = VehicleState::new(10.0, 0.0);
        let n = step(&s, v.hover_thrust(), &EnvParams::still(), &v, &StepConfig::new(0.03)).unwrap();
        assert_eq!(n.z, 10.0);
        assert_eq!(n.v_z, 0.0);
        assert!((n.t - 0.03).abs() < 1e-15);
    }

    #[test]
    fn vacuum_step_matches_closed_form_zoh() {
        let v = vacuum();
        let s = VehicleState::new(10.0, 0.0);
        let n = step(&s, 10.81, &EnvParams::still(), &v, &StepConfig::new(0.03)).unwrap();
        assert!((n.v_z - 0.03).abs() < 1e-12);
        assert!((n.z - 10.00045).abs() < 1e-12);
    }

    #[test]
    fn drag_step_matches_fine_euler_oracle() {
        let v = VehicleParams::default();
        let env = EnvParams::still();
        let s = VehicleState::new(10.0, -2.0);
        let dt = 0.03;
        let n = step(&s, 9.81, &env, &v, &StepConfig::new(dt)).unwrap();

        // independent explicit Euler at dt/1000
        let (mut z, mut vz) = (10.0_f64, -2.0_f64);
        let h = dt / 1000.0;
        for _ in 0..1000 {
            let f = 0.5 * (0.0 - vz).abs() * (0.0 - vz);
            let a = -9.81 + (9.81 + f) / 1.0;
            z += h * vz;
            vz += h * a;
        }
        assert!((n.v_z - vz).abs() < 1e-4);
        assert!((n.z - z).abs() < 1e-5);
        // roughly 2·T of speed gained
        assert!(((n.v_z - s.v_z) / (2.0 * dt) - 1.0).abs() < 0.05);
    }

    #[test]
    fn euler_mode_is_one_explicit_step() {
        let v = vacuum();
        let cfg = StepConfig {
            integrator: Integrator::Euler,
            ..StepConfig::new(0.1)
        };
        let n = step(&VehicleState::new(10.0, 1.0), 11.81, &EnvParams::still(), &v, &cfg).unwrap();
        assert!((n.z - 10.1).abs() < 1e-12);
        assert!((n.v_z - 1.2).abs() < 1e-12);
    }

    #[test]
    fn touchdown_clamps_to_floor() {
        let v = vacuum();
        let cfg = StepConfig {
            z_floor: 0.05,
            ..StepConfig::new(0.1)
        };
        let n = step(&VehicleState::new(0.06, -2.0), 0.0, &EnvParams::still(), &v, &cfg).unwrap();
        assert_eq!(n.z, 0.05);
    }

    #[test]
    fn actuate_uses_inflow_at_period_start() {
        let v = VehicleParams {
            actuator_b: 0.5,
            actuator_c: 0.5,
            ..VehicleParams::default()
        };
        let env = EnvParams::with_wind(-1.0);
        let cmd = actuate(10.0, &VehicleState::new(3.0, 0.0), &env, &v);
        assert_eq!(cmd.commanded_thrust, 10.0);
        assert!((cmd.effective_thrust - 4.5).abs() < 1e-12);
        let descending = actuate(10.0, &VehicleState::new(3.0, -1.0), &EnvParams::still(), &v);
        assert!((descending.effective_thrust - 15.5).abs() < 1e-12);
    }
}
