use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::config::{ScenarioConfig, StopRule};
use crate::adaptive::update_gain_towards;
use crate::controller::{pi_control, to_thrust, ControllerState};
use crate::detector::CovWindow;
use crate::dynamics::{self, StepConfig, VehicleState};
use crate::error::{Error, Result};
use crate::observer::{observe_theta, DelayLine};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Hover,
    Landing,
    Done,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Hover => "hover",
            Phase::Landing => "landing",
            Phase::Done => "done",
        }
    }
}

/// One control period of a run.
///
/// `u_prime_commanded` is the thrust leaving the delay line (the command
/// computed `Δt` earlier); `u_prime_effective` is what the actuator delivers
/// after the airflow loss. `cov` pairs each period's effective thrust with
/// the observation taken at the end of that period, over the window ending
/// at this record; it is `None` until the window has filled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub t: f64,
    pub z: f64,
    pub v_z: f64,
    pub theta: f64,
    pub theta_setpoint: f64,
    pub u_z: f64,
    pub u_prime_commanded: f64,
    pub u_prime_effective: f64,
    pub cov: Option<f64>,
    pub k_z: f64,
    pub k_prime: f64,
    pub wind: f64,
    pub phase: Phase,
}

/// Why a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Touchdown,
    Timeout,
    Detected,
    Converged,
    Failed(Error),
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub records: Vec<TraceRecord>,
    pub termination: Termination,
}

impl ScenarioRun {
    /// Records of the flight proper, without the terminal `Done` marker.
    pub fn flight(&self) -> &[TraceRecord] {
        match self.records.last() {
            Some(r) if r.phase == Phase::Done => &self.records[..self.records.len() - 1],
            _ => &self.records,
        }
    }
}

/// Simulates one flight.
///
/// Each control period runs: observe → noise → inner controller → outer gain
/// update → thrust conversion → delay line → actuator effectiveness → plant
/// step → covariance update. An invalid configuration is an error; a failure
/// during the flight ends the trace with [`Termination::Failed`].
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun> {
    cfg.validate()?;
    let sim = &cfg.sim;
    let vehicle = &cfg.vehicle;
    let env = &cfg.env;
    let step_cfg = StepConfig {
        dt: sim.dt,
        integrator: sim.integrator,
        z_floor: sim.z_floor,
    };

    let mut state = VehicleState::new(sim.z0, sim.v_z0);
    let mut delay = DelayLine::from_delay(sim.delay, sim.dt, vehicle.hover_thrust())?;
    let mut window = CovWindow::new(sim.window)?;
    let mut ctrl_state = ControllerState::default();
    let mut adaptive = cfg.adaptive.map(|a| a.initial_state());
    let mut phase = match (&cfg.edge, cfg.controller.c2 > 0.0) {
        (Some(_), _) | (None, false) => Phase::Hover,
        (None, true) => Phase::Landing,
    };

    let noise = if sim.noise_sigma > 0.0 {
        Some(Normal::new(0.0, sim.noise_sigma).map_err(|e| Error::invalid("noise_sigma", e.to_string()))?)
    } else {
        None
    };
    let mut rng = ChaCha8Rng::seed_from_u64(sim.seed);

    let max_steps = (sim.t_max / sim.dt).ceil() as usize;
    let mut records = Vec::with_capacity(max_steps.min(1 << 20) + 1);

    let mut sense = |state: &VehicleState| -> Result<f64> {
        let obs = observe_theta(state)?;
        Ok(match &noise {
            Some(n) => obs.theta_z + n.sample(&mut rng),
            None => obs.theta_z,
        })
    };
    let mut theta = sense(&state)?;

    let termination = loop {
        if records.len() >= max_steps {
            break Termination::Timeout;
        }

        let mut ctrl = cfg.controller;
        if let Some(edge) = &cfg.edge {
            ctrl.c2 = if phase == Phase::Hover { 0.0 } else { edge.landing_c2 };
        }
        let (k_z, k_prime) = match &adaptive {
            Some(a) => (a.k_effective, a.k_prime),
            None => (ctrl.gain_p, ctrl.gain_p),
        };
        ctrl.gain_p = k_z;
        let (u_z, next_ctrl) = pi_control(&ctrl, &ctrl_state, theta, sim.dt);

        let mut converged = false;
        if let (Some(a_cfg), Some(a_state)) = (&cfg.adaptive, adaptive.as_mut()) {
            let setpoint = cov_setpoint(cfg, phase);
            let cov = window.cov();
            *a_state = update_gain_towards(a_cfg, setpoint, a_state, cov);
            if let Some(c) = cov {
                converged = (setpoint - c).abs() < a_cfg.convergence_band;
            }
        }

        let thrust = to_thrust(u_z, vehicle);
        ctrl_state = ControllerState {
            last_thrust: thrust,
            ..next_ctrl
        };
        let delayed = delay.push_pop(thrust);
        let command = dynamics::actuate(delayed, &state, env, vehicle);

        let record = TraceRecord {
            t: state.t,
            z: state.z,
            v_z: state.v_z,
            theta,
            theta_setpoint: ctrl.setpoint(),
            u_z,
            u_prime_commanded: command.commanded_thrust,
            u_prime_effective: command.effective_thrust,
            cov: None,
            k_z,
            k_prime,
            wind: dynamics::wind_at(env, state.t),
            phase,
        };

        let next = match dynamics::step(&state, command.effective_thrust, env, vehicle, &step_cfg) {
            Ok(s) => s,
            Err(e) => {
                records.push(record);
                break Termination::Failed(e);
            }
        };
        let theta_next = match sense(&next) {
            Ok(th) => th,
            Err(e) => {
                records.push(record);
                break Termination::Failed(e);
            }
        };
        window.push(command.effective_thrust, theta_next);
        let mut record = record;
        record.cov = window.cov();
        records.push(record);

        if sim.stop == StopRule::OnConvergence && converged {
            break Termination::Converged;
        }
        if sim.stop == StopRule::OnDetection && cfg.detector.triggered(record.theta, record.cov) {
            break Termination::Detected;
        }

        if let (Some(edge), Some(c)) = (&cfg.edge, record.cov) {
            if phase == Phase::Hover && c >= edge.hover_trigger {
                phase = Phase::Landing;
                window.clear();
            }
        }

        state = next;
        theta = theta_next;
        if state.z <= sim.z_floor {
            break Termination::Touchdown;
        }
    };

    if !matches!(termination, Termination::Failed(_)) {
        if let Some(last) = records.last().copied() {
            if termination == Termination::Touchdown || termination == Termination::Timeout {
                records.push(TraceRecord {
                    t: state.t,
                    z: state.z,
                    v_z: state.v_z,
                    theta: state.v_z / state.z,
                    phase: Phase::Done,
                    wind: dynamics::wind_at(env, state.t),
                    ..last
                });
            }
        }
    }

    Ok(ScenarioRun { records, termination })
}

fn cov_setpoint(cfg: &ScenarioConfig, phase: Phase) -> f64 {
    let base = cfg.adaptive.map_or(0.0, |a| a.cov_setpoint);
    match (&cfg.edge, phase) {
        (Some(edge), Phase::Hover) => edge.hover_setpoint,
        _ => base,
    }
}
