//! Experiment batteries over gains, winds and starting heights.
//!
//! Cells are independent and run in parallel on the rayon pool
//! (`RAYON_NUM_THREADS` controls its size); rows come back in grid order so
//! results and fits are deterministic.

use rayon::prelude::*;

use super::config::{ScenarioConfig, StopRule};
use super::scenario::{run_scenario, Termination};
use crate::adaptive::{run_edge_landing, run_hover_ranging};
use crate::detector::detect_onset;
use crate::error::Error;
use crate::estimators::{fit_calibration, CalibrationLine};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Oscillation detected, or the adaptive loop converged.
    Detected,
    /// The run failed before producing a result.
    None,
    Timeout,
    TouchdownFirst,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Detected => "detected",
            Outcome::None => "none",
            Outcome::Timeout => "timeout",
            Outcome::TouchdownFirst => "touchdown-first",
        }
    }
}

/// One cell (or, for edge landings, one in-band sample) of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// Gain setting of the cell: fixed `K_z`, or the initial gain for
    /// adaptive runs.
    pub gain: f64,
    pub wind: f64,
    pub z0: f64,
    /// Gain at the event.
    pub k: f64,
    /// Height at the event.
    pub z: Option<f64>,
    pub t: Option<f64>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// `None` when fewer than two distinct gains were realized.
    pub fit: Option<CalibrationLine>,
    /// Cells left out of the fit.
    pub excluded: usize,
}

impl SweepResult {
    fn from_rows(rows: Vec<SweepRow>) -> Self {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.outcome == Outcome::Detected)
            .filter_map(|r| r.z.map(|z| (r.k, z)))
            .collect();
        let excluded = rows.iter().filter(|r| r.outcome != Outcome::Detected).count();
        Self {
            fit: fit_calibration(&points).ok(),
            rows,
            excluded,
        }
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.rows
            .iter()
            .filter(|r| r.outcome == Outcome::Detected)
            .filter_map(|r| r.z.map(|z| (r.k, z)))
    }

    /// Largest minus smallest detected height among rows with setting `gain`.
    pub fn spread_for_gain(&self, gain: f64) -> Option<f64> {
        let zs: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| r.gain == gain && r.outcome == Outcome::Detected)
            .filter_map(|r| r.z)
            .collect();
        let lo = zs.iter().copied().reduce(f64::min)?;
        let hi = zs.iter().copied().reduce(f64::max)?;
        Some(hi - lo)
    }
}

impl std::fmt::Display for SweepResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let used = self.rows.len() - self.excluded;
        match &self.fit {
            Some(line) => write!(f, "fit: {line}; {used} point(s), {} excluded", self.excluded),
            None => write!(f, "fit: degenerate; {used} point(s), {} excluded", self.excluded),
        }
    }
}

fn grid(a: &[f64], b: &[f64]) -> Vec<(f64, f64)> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
}

fn fixed_gain_cell(base: &ScenarioConfig, gain: f64, wind: f64, gain_i: Option<f64>) -> SweepRow {
    let mut cfg = base.clone();
    cfg.controller.gain_p = gain;
    if let Some(i) = gain_i {
        cfg.controller.gain_i = i;
    }
    cfg.env.wind_mean = wind;
    cfg.adaptive = None;
    cfg.edge = None;
    cfg.sim.stop = StopRule::OnDetection;
    let mut row = SweepRow {
        gain,
        wind,
        z0: cfg.sim.z0,
        k: gain,
        z: None,
        t: None,
        outcome: Outcome::None,
    };
    let Ok(run) = run_scenario(&cfg) else {
        return row;
    };
    match detect_onset(run.flight(), &cfg.detector) {
        Some((t, z)) => {
            row.t = Some(t);
            row.z = Some(z);
            row.outcome = Outcome::Detected;
        }
        None => {
            row.outcome = match run.termination {
                Termination::Touchdown => Outcome::TouchdownFirst,
                Termination::Timeout => Outcome::Timeout,
                _ => Outcome::None,
            }
        }
    }
    row
}

/// Fixed-gain landings over `gains × winds`, each run until the oscillation
/// detector fires. `pi_mode` adds an integrator with `I_z = 1`.
pub fn detection_sweep(base: &ScenarioConfig, gains: &[f64], winds: &[f64], pi_mode: bool) -> SweepResult {
    let gain_i = Some(if pi_mode { 1.0 } else { 0.0 });
    let rows = grid(gains, winds)
        .into_par_iter()
        .map(|(g, w)| fixed_gain_cell(base, g, w, gain_i))
        .collect();
    SweepResult::from_rows(rows)
}

/// Detection sweep in gusty conditions. The gust, actuator and threshold
/// settings come from `base` (see [`ScenarioConfig::gusty_base`]).
pub fn gusty_sweep(base: &ScenarioConfig, gains: &[f64], winds: &[f64]) -> SweepResult {
    let rows = grid(gains, winds)
        .into_par_iter()
        .map(|(g, w)| fixed_gain_cell(base, g, w, None))
        .collect();
    SweepResult::from_rows(rows)
}

/// Adaptive hover ranging over `heights × winds`.
pub fn hover_sweep(base: &ScenarioConfig, heights: &[f64], winds: &[f64]) -> SweepResult {
    let k_init = base.adaptive.map_or(f64::NAN, |a| a.k_init);
    let rows = grid(heights, winds)
        .into_par_iter()
        .map(|(h, w)| {
            let mut cfg = base.clone();
            cfg.sim.z0 = h;
            cfg.env.wind_mean = w;
            let mut row = SweepRow {
                gain: k_init,
                wind: w,
                z0: h,
                k: f64::NAN,
                z: None,
                t: None,
                outcome: Outcome::None,
            };
            match run_hover_ranging(&cfg) {
                Ok((k, z)) => {
                    row.k = k;
                    row.z = Some(z);
                    row.outcome = Outcome::Detected;
                }
                Err(Error::NotConverged { .. }) => row.outcome = Outcome::Timeout,
                Err(_) => row.outcome = Outcome::TouchdownFirst,
            }
            row
        })
        .collect();
    SweepResult::from_rows(rows)
}

/// Two-phase edge-of-oscillation landings from each starting height. Every
/// in-band landing sample becomes a row; a run that touches down while still
/// hovering contributes a single `touchdown-first` row.
pub fn edge_landing_battery(base: &ScenarioConfig, heights: &[f64]) -> SweepResult {
    let k_init = base.adaptive.map_or(f64::NAN, |a| a.k_init);
    let wind = base.env.wind_mean;
    let per_height: Vec<Vec<SweepRow>> = heights
        .par_iter()
        .map(|&h| {
            let mut cfg = base.clone();
            cfg.sim.z0 = h;
            let failed = |outcome| {
                vec![SweepRow {
                    gain: k_init,
                    wind,
                    z0: h,
                    k: f64::NAN,
                    z: None,
                    t: None,
                    outcome,
                }]
            };
            match run_edge_landing(&cfg) {
                Ok(samples) if samples.is_empty() => failed(Outcome::None),
                Ok(samples) => samples
                    .into_iter()
                    .map(|(k, z)| SweepRow {
                        gain: k_init,
                        wind,
                        z0: h,
                        k,
                        z: Some(z),
                        t: None,
                        outcome: Outcome::Detected,
                    })
                    .collect(),
                Err(Error::TouchdownInHover { .. }) => failed(Outcome::TouchdownFirst),
                Err(Error::NotConverged { .. }) => failed(Outcome::Timeout),
                Err(_) => failed(Outcome::None),
            }
        })
        .collect();
    SweepResult::from_rows(per_height.into_iter().flatten().collect())
}
