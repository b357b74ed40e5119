//! Self-induced oscillation detection from the covariance between the
//! effective thrust and `θ_z`.
//!
//! While the loop tracks its setpoint the covariance is a small negative
//! number: descending too fast makes the vehicle thrust harder. Once the
//! delayed loop starts to oscillate the relation flips sign, which together
//! with a positive `θ_z` marks the onset.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::TraceRecord;

pub const DEFAULT_WINDOW: usize = 20;

/// Paired ring buffer of `(u′_z, θ_z)` samples.
#[derive(Debug, Clone)]
pub struct CovWindow {
    samples: VecDeque<(f64, f64)>,
    capacity: usize,
}

impl CovWindow {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity < 2 {
            return Err(Error::invalid("window", "capacity must be >= 2"));
        }
        Ok(Self {
            samples: VecDeque::with_capacity(capacity),
            capacity,
        })
    }

    pub fn push(&mut self, thrust: f64, theta: f64) {
        if self.samples.len() == self.capacity {
            self.samples.pop_front();
        }
        self.samples.push_back((thrust, theta));
    }

    pub fn clear(&mut self) {
        self.samples.clear();
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn is_full(&self) -> bool {
        self.samples.len() == self.capacity
    }

    /// Covariance if the window is full, `None` otherwise.
    pub fn cov(&self) -> Option<f64> {
        window_cov(self).ok()
    }
}

impl Default for CovWindow {
    fn default() -> Self {
        Self::new(DEFAULT_WINDOW).expect("default capacity is valid")
    }
}

/// Population covariance `(1/N) Σ (u − ū)(θ − θ̄)` over a full window.
pub fn window_cov(window: &CovWindow) -> Result<f64> {
    if !window.is_full() {
        return Err(Error::WindowNotFull {
            len: window.len(),
            capacity: window.capacity,
        });
    }
    let n = window.samples.len() as f64;
    let (su, st) = window
        .samples
        .iter()
        .fold((0.0, 0.0), |(a, b), &(u, th)| (a + u, b + th));
    let (mu, mt) = (su / n, st / n);
    let sxy: f64 = window.samples.iter().map(|&(u, th)| (u - mu) * (th - mt)).sum();
    Ok(sxy / n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorThresholds {
    /// 1/s
    pub theta_thr: f64,
    /// N/s
    pub cov_thr: f64,
}

impl Default for DetectorThresholds {
    fn default() -> Self {
        Self {
            theta_thr: 0.01,
            cov_thr: 0.01,
        }
    }
}

impl DetectorThresholds {
    /// Thresholds for gusty conditions, where the covariance bar is raised.
    pub fn gusty() -> Self {
        Self {
            theta_thr: 0.01,
            cov_thr: 0.1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta_thr.is_finite() && self.cov_thr.is_finite()) {
            return Err(Error::invalid("detector", "thresholds must be finite"));
        }
        Ok(())
    }

    pub fn triggered(&self, theta: f64, cov: Option<f64>) -> bool {
        matches!(cov, Some(c) if c > self.cov_thr) && theta > self.theta_thr
    }
}

/// Earliest record where both `θ_z` and the covariance exceed their
/// thresholds. Returns `(t, z)`.
pub fn detect_onset(trace: &[TraceRecord], thr: &DetectorThresholds) -> Option<(f64, f64)> {
    trace.iter().find(|r| thr.triggered(r.theta, r.cov)).map(|r| (r.t, r.z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Phase;

    fn filled(pairs: &[(f64, f64)]) -> CovWindow {
        let mut w = CovWindow::new(pairs.len()).unwrap();
        for &(u, th) in pairs {
            w.push(u, th);
        }
        w
    }

    fn record(t: f64, z: f64, theta: f64, cov: Option<f64>) -> TraceRecord {
        TraceRecord {
            t,
            z,
            v_z: theta * z,
            theta,
            theta_setpoint: -0.05,
            u_z: 0.0,
            u_prime_commanded: 9.81,
            u_prime_effective: 9.81,
            cov,
            k_z: 10.0,
            k_prime: 10.0,
            wind: 0.0,
            phase: Phase::Landing,
        }
    }

    #[test]
    fn cov_examples() {
        assert_eq!(window_cov(&filled(&[(3.0, 0.1); 5])).unwrap(), 0.0);
        let up = filled(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0), (4.0, 4.0)]);
        assert!((window_cov(&up).unwrap() - 1.25).abs() < 1e-12);
        let down = filled(&[(1.0, 4.0), (2.0, 3.0), (3.0, 2.0), (4.0, 1.0)]);
        assert!((window_cov(&down).unwrap() + 1.25).abs() < 1e-12);
    }

    #[test]
    fn cov_undefined_until_full() {
        let mut w = CovWindow::new(3).unwrap();
        w.push(1.0, 1.0);
        w.push(2.0, 2.0);
        assert!(matches!(
            window_cov(&w),
            Err(Error::WindowNotFull { len: 2, capacity: 3 })
        ));
        assert_eq!(w.cov(), None);
        w.push(3.0, 3.0);
        assert!(w.cov().is_some());
        assert!(CovWindow::new(1).is_err());
    }

    #[test]
    fn ring_buffer_drops_oldest() {
        let mut w = CovWindow::new(2).unwrap();
        w.push(100.0, -100.0);
        w.push(1.0, 1.0);
        w.push(2.0, 2.0);
        assert!((w.cov().unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn detection_examples() {
        let thr = DetectorThresholds::default();
        let smooth: Vec<_> = (0..100)
            .map(|k| record(k as f64 * 0.03, 10.0 * (-0.003 * k as f64).exp(), -0.2, Some(-0.001)))
            .collect();
        assert_eq!(detect_onset(&smooth, &thr), None);

        // correlated thrust and θ, but θ never positive
        let correlated: Vec<_> = (0..100)
            .map(|k| record(k as f64 * 0.03, 5.0, -0.2 + 0.05 * (k as f64).sin(), Some(0.5)))
            .collect();
        assert_eq!(detect_onset(&correlated, &thr), None);

        let mut mixed = smooth.clone();
        mixed[40] = record(1.2, 0.7, 0.02, Some(0.02));
        mixed[41] = record(1.23, 0.69, 0.5, Some(0.5));
        assert_eq!(detect_onset(&mixed, &thr), Some((1.2, 0.7)));
        // undefined covariance never triggers
        mixed[40].cov = None;
        assert_eq!(detect_onset(&mixed, &thr), Some((1.23, 0.69)));
    }
}
