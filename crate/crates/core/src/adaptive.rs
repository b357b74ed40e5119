//! Outer-loop gain adaptation that keeps the thrust/`θ_z` covariance at a
//! small positive setpoint, i.e. on the edge of self-induced oscillation.
//!
//! Both the proportional and the integral action are relative to the current
//! base gain `K′`:
//!
//! ```text
//! e_cov = cov* − cov
//! K     = K′ (1 + P e_cov)
//! K′   ← K′ (1 + I e_cov)
//! ```
//!
//! Once the loop oscillates at the setpoint, the gain is a stand-in for the
//! height.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{run_scenario, Phase, ScenarioConfig, StopRule, Termination};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaptiveConfig {
    /// Covariance setpoint `cov*`, N/s.
    pub cov_setpoint: f64,
    /// Relative proportional gain `P`.
    pub outer_p: f64,
    /// Relative integral gain `I`.
    pub outer_i: f64,
    pub k_init: f64,
    pub k_floor: f64,
    /// `|e_cov|` below which the loop counts as converged.
    pub convergence_band: f64,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        Self {
            cov_setpoint: 0.05,
            outer_p: 0.15,
            outer_i: 0.005,
            k_init: 50.0,
            k_floor: 0.1,
            convergence_band: 0.005,
        }
    }
}

impl AdaptiveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.outer_p) {
            return Err(Error::invalid("outer_p", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.outer_i) {
            return Err(Error::invalid("outer_i", "must lie in [0, 1]"));
        }
        if !(self.k_floor >= 0.0 && self.k_init > self.k_floor) {
            return Err(Error::invalid("k_init/k_floor", "need k_init > k_floor >= 0"));
        }
        if !(self.convergence_band >= 0.0) {
            return Err(Error::invalid("convergence_band", "must be >= 0"));
        }
        if !self.cov_setpoint.is_finite() {
            return Err(Error::invalid("cov_setpoint", "must be finite"));
        }
        Ok(())
    }

    pub fn initial_state(&self) -> AdaptiveState {
        AdaptiveState {
            k_prime: self.k_init,
            k_effective: self.k_init,
            last_e_cov: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveState {
    /// Base gain `K′`.
    pub k_prime: f64,
    /// Gain applied by the inner loop, `K`.
    pub k_effective: f64,
    pub last_e_cov: Option<f64>,
}

/// One outer-loop update. `cov_now` is `None` while the covariance window is
/// still filling, in which case the state is returned unchanged.
pub fn update_gain(cfg: &AdaptiveConfig, state: &AdaptiveState, cov_now: Option<f64>) -> AdaptiveState {
    update_gain_towards(cfg, cfg.cov_setpoint, state, cov_now)
}

/// [`update_gain`] with an explicit covariance setpoint, used when the
/// setpoint depends on the flight phase.
pub fn update_gain_towards(
    cfg: &AdaptiveConfig,
    cov_setpoint: f64,
    state: &AdaptiveState,
    cov_now: Option<f64>,
) -> AdaptiveState {
    let Some(cov) = cov_now else {
        return *state;
    };
    let e_cov = cov_setpoint - cov;
    let k_effective = (state.k_prime * (1.0 + cfg.outer_p * e_cov)).max(0.0);
    let k_prime = (state.k_prime * (1.0 + cfg.outer_i * e_cov)).max(cfg.k_floor);
    AdaptiveState {
        k_prime,
        k_effective,
        last_e_cov: Some(e_cov),
    }
}

/// Two-phase edge-of-oscillation landing: hover (`c² = 0`) regulating the
/// covariance to `hover_setpoint` until it first reaches `hover_trigger`, then
/// descend at `landing_c2` while regulating it to the adaptive setpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EdgeLandingConfig {
    /// Covariance regulated during hover.
    pub hover_setpoint: f64,
    /// Reaching this covariance in hover starts the landing.
    pub hover_trigger: f64,
    pub landing_c2: f64,
}

impl Default for EdgeLandingConfig {
    fn default() -> Self {
        Self {
            hover_setpoint: 0.05,
            hover_trigger: 0.05,
            landing_c2: 0.05,
        }
    }
}

/// Hover with `θ* = 0` and adapt the gain until `|e_cov|` first falls inside
/// the convergence band. Returns `(K_z, z)` at that instant.
pub fn run_hover_ranging(scenario: &ScenarioConfig) -> Result<(f64, f64)> {
    let adaptive = scenario
        .adaptive
        .ok_or_else(|| Error::Config("hover ranging needs an [adaptive] section".into()))?;
    let mut cfg = scenario.clone();
    cfg.controller.c2 = 0.0;
    cfg.edge = None;
    cfg.sim.stop = StopRule::OnConvergence;
    let run = run_scenario(&cfg)?;
    match run.termination {
        Termination::Converged => {
            let r = run
                .records
                .iter()
                .rev()
                .find(|r| r.phase != Phase::Done)
                .expect("converged run has records");
            Ok((r.k_z, r.z))
        }
        Termination::Failed(e) => Err(e),
        Termination::Touchdown => Err(Error::Numerical(format!(
            "touchdown before convergence (band {})",
            adaptive.convergence_band
        ))),
        _ => Err(Error::NotConverged { t_max: cfg.sim.t_max }),
    }
}

/// Runs a two-phase edge landing and returns every `(K_z, z)` sample of the
/// landing phase at which `|e_cov|` is inside the convergence band.
pub fn run_edge_landing(scenario: &ScenarioConfig) -> Result<Vec<(f64, f64)>> {
    let adaptive = scenario
        .adaptive
        .ok_or_else(|| Error::Config("edge landing needs an [adaptive] section".into()))?;
    let mut cfg = scenario.clone();
    if cfg.edge.is_none() {
        cfg.edge = Some(EdgeLandingConfig::default());
    }
    cfg.sim.stop = StopRule::Full;
    let run = run_scenario(&cfg)?;
    if let Termination::Failed(e) = run.termination {
        return Err(e);
    }
    let landed = run.records.iter().any(|r| r.phase == Phase::Landing);
    if !landed {
        if run.termination == Termination::Touchdown {
            let t = run.records.last().map_or(0.0, |r| r.t);
            return Err(Error::TouchdownInHover { t });
        }
        return Err(Error::NotConverged { t_max: cfg.sim.t_max });
    }
    Ok(edge_samples(&run.records, &adaptive))
}

/// In-band `(K_z, z)` samples of the landing phase of a trace.
pub fn edge_samples(records: &[crate::harness::TraceRecord], cfg: &AdaptiveConfig) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter(|r| r.phase == Phase::Landing)
        .filter_map(|r| {
            let cov = r.cov?;
            ((cfg.cov_setpoint - cov).abs() < cfg.convergence_band).then_some((r.k_z, r.z))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: f64, i: f64) -> AdaptiveConfig {
        AdaptiveConfig {
            outer_p: p,
            outer_i: i,
            ..AdaptiveConfig::default()
        }
    }

    fn state(k: f64) -> AdaptiveState {
        AdaptiveState {
            k_prime: k,
            k_effective: k,
            last_e_cov: None,
        }
    }

    #[test]
    fn converged_update_is_fixed_point() {
        let c = cfg(0.15, 0.005);
        let s = update_gain(&c, &state(37.0), Some(c.cov_setpoint));
        assert_eq!(s.k_prime, 37.0);
        assert_eq!(s.k_effective, 37.0);
        assert_eq!(s.last_e_cov, Some(0.0));
    }

    #[test]
    fn update_example() {
        let s = update_gain(&cfg(0.15, 0.005), &state(10.0), Some(0.0));
        assert!((s.last_e_cov.unwrap() - 0.05).abs() < 1e-15);
        assert!((s.k_effective - 10.075).abs() < 1e-12);
        assert!((s.k_prime - 10.0025).abs() < 1e-12);
    }

    #[test]
    fn excess_covariance_drives_gain_to_floor() {
        let c = AdaptiveConfig {
            outer_i: 0.5,
            ..cfg(0.15, 0.5)
        };
        let mut s = state(10.0);
        let mut prev = s.k_prime;
        for _ in 0..200_000 {
            s = update_gain(&c, &s, Some(2.0 * c.cov_setpoint));
            assert!(s.k_prime < prev || s.k_prime == c.k_floor);
            prev = s.k_prime;
        }
        assert_eq!(s.k_prime, c.k_floor);
    }

    #[test]
    fn undefined_covariance_passes_through() {
        let s = state(12.0);
        assert_eq!(update_gain(&cfg(0.15, 0.005), &s, None), s);
    }

    #[test]
    fn relative_change_is_scale_free() {
        let c = cfg(0.3, 0.02);
        for &e in &[-0.2, 0.01, 0.07] {
            let cov = c.cov_setpoint - e;
            let a = update_gain(&c, &state(3.0), Some(cov));
            let b = update_gain(&c, &state(300.0), Some(cov));
            assert!((a.k_prime / 3.0 - b.k_prime / 300.0).abs() < 1e-14);
            assert!((a.k_effective / 3.0 - b.k_effective / 300.0).abs() < 1e-14);
        }
    }

    #[test]
    fn validation() {
        assert!(cfg(1.5, 0.0).validate().is_err());
        assert!(cfg(0.1, -0.1).validate().is_err());
        let bad = AdaptiveConfig {
            k_init: 0.05,
            ..AdaptiveConfig::default()
        };
        assert!(bad.validate().is_err());
        assert!(AdaptiveConfig::default().validate().is_ok());
    }
}
