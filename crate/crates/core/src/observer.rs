//! The visual observable `θ_z = v_z / z` and the sensing-to-actuation delay.

use std::collections::VecDeque;

use crate::dynamics::VehicleState;
use crate::error::{Error, Result};

/// One sample of the relative vertical velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    /// 1/s; the negative of the flow divergence.
    pub theta_z: f64,
    pub t: f64,
}

pub fn observe_theta(state: &VehicleState) -> Result<Observation> {
    if !(state.z > 0.0) {
        return Err(Error::ObservationUndefined { z: state.z });
    }
    Ok(Observation {
        theta_z: state.v_z / state.z,
        t: state.t,
    })
}

/// Backward difference of two observations.
pub fn theta_dot(prev: &Observation, curr: &Observation) -> Result<f64> {
    let dt = curr.t - prev.t;
    if !(dt > 0.0) {
        return Err(Error::NonPositiveTimeDelta { dt });
    }
    Ok((curr.theta_z - prev.theta_z) / dt)
}

/// Fixed-depth FIFO of thrust commands.
///
/// The output at step `k` is the input pushed at step `k - depth`; the line
/// starts filled with `prefill` so that early outputs are well defined.
#[derive(Debug, Clone)]
pub struct DelayLine {
    buffer: VecDeque<f64>,
    depth: usize,
}

impl DelayLine {
    pub fn new(depth: usize, prefill: f64) -> Self {
        Self {
            buffer: std::iter::repeat_n(prefill, depth).collect(),
            depth,
        }
    }

    /// Depth for a delay of `delay` seconds at period `dt`, rounded to the
    /// nearest whole step.
    pub fn from_delay(delay: f64, dt: f64, prefill: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::invalid("T", "must be > 0"));
        }
        if !(delay >= 0.0 && delay.is_finite()) {
            return Err(Error::invalid("delay", format!("must be >= 0, got {delay}")));
        }
        Ok(Self::new((delay / dt).round() as usize, prefill))
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn push_pop(&mut self, input: f64) -> f64 {
        if self.depth == 0 {
            return input;
        }
        self.buffer.push_back(input);
        self.buffer.pop_front().expect("delay line holds `depth` entries")
    }
}
