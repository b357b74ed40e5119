//! Scenario runner, experiment batteries, CSV traces and the command line.

pub mod cli;
pub mod config;
pub mod csv;
mod scenario;
pub mod sweep;

pub use config::{ExperimentFile, ScenarioConfig, SimParams, StopRule, SweepGrid};
pub use scenario::{run_scenario, Phase, ScenarioRun, Termination, TraceRecord};
pub use sweep::{detection_sweep, edge_landing_battery, gusty_sweep, hover_sweep, Outcome, SweepResult, SweepRow};
