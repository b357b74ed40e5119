use serde::{Deserialize, Serialize};

use crate::adaptive::{AdaptiveConfig, EdgeLandingConfig};
use crate::controller::ControllerConfig;
use crate::detector::{DetectorThresholds, DEFAULT_WINDOW};
use crate::dynamics::{EnvParams, Integrator, VehicleParams};
use crate::error::{Error, Result};

/// Default standard deviation of the observation noise, 1/s.
pub const DEFAULT_EXCITATION: f64 = 1e-5;

/// When a scenario run stops early.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// Run until touchdown or `t_max`.
    #[default]
    Full,
    /// Stop at the first record that triggers the oscillation detector.
    OnDetection,
    /// Stop when `|e_cov|` first falls inside the adaptive convergence band.
    OnConvergence,
}

/// Timing, initial condition and termination settings of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    /// Control period `T`, s.
    pub dt: f64,
    /// Actuation delay `Δt`, s.
    pub delay: f64,
    pub z0: f64,
    pub v_z0: f64,
    pub t_max: f64,
    pub z_floor: f64,
    /// Standard deviation of additive Gaussian noise on `θ_z`; 0 disables.
    /// The small default seeds the oscillatory modes, which an exactly
    /// noiseless run would only excite through rounding.
    pub noise_sigma: f64,
    pub seed: u64,
    pub integrator: Integrator,
    /// Covariance window length in steps.
    pub window: usize,
    pub stop: StopRule,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            dt: 0.03,
            delay: 0.15,
            z0: 10.0,
            v_z0: -2.0,
            t_max: 120.0,
            z_floor: 0.05,
            noise_sigma: DEFAULT_EXCITATION,
            seed: 0,
            integrator: Integrator::default(),
            window: DEFAULT_WINDOW,
            stop: StopRule::Full,
        }
    }
}

/// Everything needed for one simulated flight.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub vehicle: VehicleParams,
    pub env: EnvParams,
    pub controller: ControllerConfig,
    pub adaptive: Option<AdaptiveConfig>,
    pub edge: Option<EdgeLandingConfig>,
    pub detector: DetectorThresholds,
    pub sim: SimParams,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.vehicle.validate()?;
        self.env.validate()?;
        self.controller.validate()?;
        self.detector.validate()?;
        if let Some(a) = &self.adaptive {
            a.validate()?;
        }
        if let Some(e) = &self.edge {
            if self.adaptive.is_none() {
                return Err(Error::Config("[edge] requires an [adaptive] section".into()));
            }
            if !(e.landing_c2 > 0.0) {
                return Err(Error::invalid("landing_c2", "must be > 0"));
            }
        }
        let s = &self.sim;
        if !(s.dt > 0.0 && s.dt.is_finite()) {
            return Err(Error::invalid("dt", "must be > 0"));
        }
        if !(s.delay >= 0.0) {
            return Err(Error::invalid("delay", "must be >= 0"));
        }
        if !(s.z_floor >= 0.0 && s.z0 > s.z_floor) {
            return Err(Error::invalid("z0", "must exceed z_floor >= 0"));
        }
        if !(s.t_max > 0.0) {
            return Err(Error::invalid("t_max", "must be > 0"));
        }
        if !(s.noise_sigma >= 0.0) {
            return Err(Error::invalid("noise_sigma", "must be >= 0"));
        }
        if s.window < 2 {
            return Err(Error::invalid("window", "must be >= 2"));
        }
        if !s.v_z0.is_finite() {
            return Err(Error::invalid("v_z0", "must be finite"));
        }
        Ok(())
    }

    /// Fixed-gain landing from 10 m at −2 m/s with `K_z = 20`, `c² = 0.2`
    /// in still air. The default configuration.
    pub fn fixed_gain_landing() -> Self {
        Self::default()
    }

    /// Base case of the fixed-gain detection sweep: 20 m, −1 m/s, `c² = 0.05`.
    pub fn detection_base() -> Self {
        let mut cfg = Self::default();
        cfg.controller.c2 = 0.05;
        cfg.sim.z0 = 20.0;
        cfg.sim.v_z0 = -1.0;
        cfg
    }

    /// Detection base with sinusoidal gusts (`W = 4`, `a = 1`), airflow
    /// dependent actuator effectiveness (`b = c = 0.5`) and the raised
    /// covariance threshold.
    pub fn gusty_base() -> Self {
        let mut cfg = Self::detection_base();
        cfg.env.gust_amplitude = 4.0;
        cfg.env.gust_rate = 1.0;
        cfg.vehicle.actuator_b = 0.5;
        cfg.vehicle.actuator_c = 0.5;
        cfg.detector = DetectorThresholds::gusty();
        cfg
    }

    /// Hover ranging base: `θ* = 0`, adaptive gain from `K = 50` towards
    /// `cov* = 0.05`.
    pub fn hover_base() -> Self {
        let mut cfg = Self::default();
        cfg.controller.c2 = 0.0;
        cfg.sim.v_z0 = 0.0;
        cfg.sim.t_max = 300.0;
        cfg.adaptive = Some(AdaptiveConfig::default());
        cfg
    }

    /// Edge-of-oscillation landing base: hover until the covariance reaches
    /// 0.05, then land at `c² = 0.05` regulating `cov* = 0.05`.
    pub fn edge_base() -> Self {
        let mut cfg = Self::hover_base();
        cfg.edge = Some(EdgeLandingConfig::default());
        cfg.sim.t_max = 600.0;
        cfg
    }
}

/// Grid for the sweep subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub gains: Vec<f64>,
    pub winds: Vec<f64>,
    pub heights: Vec<f64>,
    pub pi_mode: bool,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            gains: vec![10.0, 30.0, 50.0],
            winds: (-6..=6).map(|k| f64::from(k) * 0.5).collect(),
            heights: (1..=10).map(|k| f64::from(k) * 5.0).collect(),
            pi_mode: false,
        }
    }
}

impl SweepGrid {
    /// Hover battery grid: heights 5..50 m, winds −3..3 m/s in 1 m/s steps.
    pub fn hover() -> Self {
        Self {
            winds: (-3..=3).map(f64::from).collect(),
            ..Self::default()
        }
    }
}

/// On-disk experiment description: a scenario plus an optional sweep grid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentFile {
    pub scenario: ScenarioConfig,
    pub sweep: Option<SweepGrid>,
}

/// Flat section layout of the config file.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawFile {
    vehicle: VehicleParams,
    env: EnvParams,
    controller: ControllerConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    adaptive: Option<AdaptiveConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    edge: Option<EdgeLandingConfig>,
    detector: DetectorThresholds,
    sim: SimParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<SweepGrid>,
}

impl ExperimentFile {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let file = ExperimentFile {
            scenario: ScenarioConfig {
                vehicle: raw.vehicle,
                env: raw.env,
                controller: raw.controller,
                adaptive: raw.adaptive,
                edge: raw.edge,
                detector: raw.detector,
                sim: raw.sim,
            },
            sweep: raw.sweep,
        };
        file.scenario.validate()?;
        Ok(file)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        let s = self.scenario.clone();
        let raw = RawFile {
            vehicle: s.vehicle,
            env: s.env,
            controller: s.controller,
            adaptive: s.adaptive,
            edge: s.edge,
            detector: s.detector,
            sim: s.sim,
            sweep: self.sweep.clone(),
        };
        toml::to_string_pretty(&raw).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_default_scenario() {
        let f = ExperimentFile::parse("").unwrap();
        assert_eq!(f.scenario, ScenarioConfig::default());
        assert!(f.sweep.is_none());
    }

    #[test]
    fn sections_override_defaults() {
        let f = ExperimentFile::parse(
            r#"
            [controller]
            gain_p = 30.0
            c2 = 0.05

            [env]
            wind_mean = -1.5

            [sim]
            z0 = 20.0
            integrator = { kind = "euler" }
            stop = "on_detection"

            [adaptive]
            cov_setpoint = 0.07

            [sweep]
            gains = [10.0, 20.0]
            "#,
        )
        .unwrap();
        let s = &f.scenario;
        assert_eq!(s.controller.gain_p, 30.0);
        assert_eq!(s.controller.gain_i, 0.0);
        assert_eq!(s.env.wind_mean, -1.5);
        assert_eq!(s.sim.z0, 20.0);
        assert_eq!(s.sim.integrator, Integrator::Euler);
        assert_eq!(s.sim.stop, StopRule::OnDetection);
        assert_eq!(s.adaptive.unwrap().cov_setpoint, 0.07);
        assert_eq!(s.adaptive.unwrap().outer_p, 0.15);
        assert_eq!(f.sweep.as_ref().unwrap().gains, vec![10.0, 20.0]);
        assert_eq!(f.sweep.as_ref().unwrap().winds.len(), 13);
    }

    #[test]
    fn rejects_typos_and_invalid_values() {
        assert!(matches!(
            ExperimentFile::parse("[controller]\ngain = 3.0\n"),
            Err(Error::Config(_))
        ));
        assert!(ExperimentFile::parse("[sim]\ndt = 0.0\n").unwrap_err().is_config());
        assert!(ExperimentFile::parse("[sim]\nz0 = 0.01\n").is_err());
        assert!(ExperimentFile::parse("[edge]\nlanding_c2 = 0.05\n").is_err());
    }

    #[test]
    fn round_trips_through_toml() {
        let f = ExperimentFile {
            scenario: ScenarioConfig::edge_base(),
            sweep: Some(SweepGrid::default()),
        };
        assert_eq!(ExperimentFile::parse(&f.to_toml()).unwrap(), f);
    }
}
