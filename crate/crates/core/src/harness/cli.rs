//! `oscrange` command line.
//!
//! Every subcommand takes an optional `--config` TOML file (falling back to
//! the matching preset), an optional `--out` CSV path, and prints a summary.
//! Exit codes: 0 success, 1 usage or configuration error, 2 numerical
//! failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::config::{ExperimentFile, ScenarioConfig, SweepGrid};
use super::csv::{fmt_f64, write_sweep, write_trace};
use super::scenario::{run_scenario, Termination};
use super::sweep::{detection_sweep, edge_landing_battery, gusty_sweep, hover_sweep, SweepResult};
use crate::analysis::{
    default_k_grid, drag_pole, instability_height, unstable_gain_drag, unstable_gain_vacuum, ContinuousLoop,
};
use crate::detector::detect_onset;
use crate::error::{Error, Result};
use crate::estimators::{fit_calibration, perfect_landing_thrust};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "oscrange", version, about = "Stability-based distance estimation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Io {
    /// Experiment file (TOML); the subcommand's preset when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one flight and report the oscillation onset.
    Simulate(Io),
    /// Fixed-gain detection heights over gains × winds.
    SweepDetect(Io),
    /// Detection sweep under sinusoidal gusts.
    SweepGust(Io),
    /// Adaptive hover ranging over heights × winds.
    SweepHover(Io),
    /// Edge-of-oscillation landings from each sweep height.
    EdgeLanding(Io),
    /// Critical gains from the linearized models.
    Analyze(AnalyzeArgs),
    /// Thrust along a perfect constant-divergence landing.
    PerfectCurve(CurveArgs),
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    io: Io,
    /// Height, m.
    #[arg(long)]
    z: f64,
    /// Control period, s; `sim.dt` when omitted.
    #[arg(long = "T")]
    t: Option<f64>,
    /// Vertical velocity at the linearization point, m/s.
    #[arg(long, default_value_t = -0.1, allow_negative_numbers = true)]
    v_z: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    wind: f64,
    /// Gain whose instability height is reported.
    #[arg(long)]
    k: Option<f64>,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[command(flatten)]
    io: Io,
    /// Divergence setpoint magnitude; `controller.c2` when omitted.
    #[arg(long)]
    c2: Option<f64>,
    /// Top of the height grid, m; `sim.z0` when omitted.
    #[arg(long)]
    z_max: Option<f64>,
    #[arg(long, default_value_t = 101)]
    points: usize,
}

/// Parses `std::env::args` and runs.
pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_NUMERICAL
            }
        }
    }
}

fn load(io: &Io, preset: fn() -> ScenarioConfig) -> Result<ExperimentFile> {
    match &io.config {
        Some(path) => ExperimentFile::load(path),
        None => Ok(ExperimentFile {
            scenario: preset(),
            sweep: None,
        }),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Simulate(io) => simulate(&io, out),
        Command::SweepDetect(io) => {
            let file = load(&io, ScenarioConfig::detection_base)?;
            let grid = file.sweep.unwrap_or_default();
            let r = detection_sweep(&file.scenario, &grid.gains, &grid.winds, grid.pi_mode);
            finish_sweep(&io, &r, Some(&grid.gains), out)
        }
        Command::SweepGust(io) => {
            let file = load(&io, ScenarioConfig::gusty_base)?;
            let grid = file.sweep.unwrap_or_default();
            let r = gusty_sweep(&file.scenario, &grid.gains, &grid.winds);
            finish_sweep(&io, &r, Some(&grid.gains), out)
        }
        Command::SweepHover(io) => {
            let file = load(&io, ScenarioConfig::hover_base)?;
            if file.scenario.adaptive.is_none() {
                return Err(Error::Config("sweep-hover needs an [adaptive] section".into()));
            }
            let grid = file.sweep.unwrap_or_else(SweepGrid::hover);
            let r = hover_sweep(&file.scenario, &grid.heights, &grid.winds);
            finish_sweep(&io, &r, None, out)
        }
        Command::EdgeLanding(io) => {
            let file = load(&io, ScenarioConfig::edge_base)?;
            if file.scenario.edge.is_none() {
                return Err(Error::Config(
                    "edge-landing needs [adaptive] and [edge] sections".into(),
                ));
            }
            let grid = file.sweep.unwrap_or_default();
            let r = edge_landing_battery(&file.scenario, &grid.heights);
            finish_sweep(&io, &r, None, out)
        }
        Command::Analyze(args) => analyze(&args, out),
        Command::PerfectCurve(args) => perfect_curve(&args, out),
    }
}

fn simulate(io: &Io, out: &mut dyn Write) -> Result<()> {
    let file = load(io, ScenarioConfig::fixed_gain_landing)?;
    let cfg = &file.scenario;
    let run = run_scenario(cfg)?;
    if let Some(path) = &io.out {
        let mut w = create(path)?;
        write_trace(&mut w, &run.records)?;
        w.flush()?;
    }
    writeln!(out, "records: {}", run.records.len())?;
    let last = run.flight().last();
    match &run.termination {
        Termination::Failed(e) => return Err(e.clone()),
        t => writeln!(out, "termination: {t:?}")?,
    }
    match detect_onset(run.flight(), &cfg.detector) {
        Some((t, z)) => writeln!(out, "onset: t = {t:.3} s, z = {z:.3} m")?,
        None => writeln!(out, "onset: none")?,
    }
    if let (Some(_), Some(r)) = (cfg.adaptive, last) {
        writeln!(out, "final gain: K = {:.3} at z = {:.3} m", r.k_z, r.z)?;
    }
    Ok(())
}

fn finish_sweep(io: &Io, r: &SweepResult, gains: Option<&[f64]>, out: &mut dyn Write) -> Result<()> {
    if let Some(path) = &io.out {
        let mut w = create(path)?;
        write_sweep(&mut w, r)?;
        w.flush()?;
    }
    writeln!(out, "{r}")?;
    for &g in gains.unwrap_or_default() {
        if let Some(s) = r.spread_for_gain(g) {
            writeln!(out, "spread at K = {g}: {s:.3} m")?;
        }
    }
    if r.fit.is_none() {
        return Err(Error::DegenerateFit("fewer than two distinct realized gains".into()));
    }
    Ok(())
}

fn analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<()> {
    let file = load(&args.io, ScenarioConfig::default)?;
    let cfg = &file.scenario;
    let t = args.t.unwrap_or(cfg.sim.dt);
    if !(args.z > 0.0 && t > 0.0) {
        return Err(Error::invalid("z/T", "must both be > 0"));
    }
    writeln!(out, "K_unstable = {:.2}", unstable_gain_vacuum(args.z, t))?;
    if let Some(k) = args.k {
        writeln!(out, "z_unstable(K = {k}) = {:.4} m", instability_height(k, t))?;
    }

    let beta = cfg.vehicle.beta();
    let p = drag_pole(args.v_z, args.wind, beta);
    if p > 0.0 {
        writeln!(out, "p = {p:.4}")?;
        for (label, simplified) in [("full", false), ("simplified", true)] {
            match unstable_gain_drag(args.z, args.v_z, p, t, simplified) {
                Ok(k) => writeln!(out, "K_unstable_drag ({label}) = {k:.2}")?,
                Err(e) => writeln!(out, "K_unstable_drag ({label}): {e}")?,
            }
        }
    }

    let lp = ContinuousLoop {
        z: args.z,
        v_z: args.v_z,
        v_wind: args.wind,
        beta,
        delay: cfg.sim.delay,
    };
    let grid = default_k_grid(args.z, t);
    let gains = lp.critical_gains(&grid)?;
    let show = |k: Option<f64>| k.map_or("none".to_owned(), |k| format!("{k:.2}"));
    writeln!(out, "k_oscillation = {}", show(gains.k_oscillation))?;
    writeln!(out, "k_unstable = {}", show(gains.k_unstable))?;

    if let Some(path) = &args.io.out {
        let mut w = create(path)?;
        writeln!(w, "K,re,im")?;
        for &k in &grid {
            for pole in lp.poles(k) {
                writeln!(w, "{},{},{}", fmt_f64(k), fmt_f64(pole.re), fmt_f64(pole.im))?;
            }
        }
        w.flush()?;
    }
    Ok(())
}

fn perfect_curve(args: &CurveArgs, out: &mut dyn Write) -> Result<()> {
    let file = load(&args.io, ScenarioConfig::detection_base)?;
    let cfg = &file.scenario;
    let c2 = args.c2.unwrap_or(cfg.controller.c2);
    let z_max = args.z_max.unwrap_or(cfg.sim.z0);
    if args.points < 2 || !(z_max > 0.0) {
        return Err(Error::invalid("points/z_max", "need >= 2 points and z_max > 0"));
    }
    let n = args.points;
    let zs: Vec<f64> = (0..n).map(|i| z_max * i as f64 / (n - 1) as f64).collect();
    let curve = perfect_landing_thrust(&zs, c2, &cfg.env, &cfg.vehicle)?;
    if let Some(path) = &args.io.out {
        let mut w = create(path)?;
        writeln!(w, "z,thrust")?;
        for (z, u) in curve.z.iter().zip(&curve.thrust) {
            writeln!(w, "{},{}", fmt_f64(*z), fmt_f64(*u))?;
        }
        w.flush()?;
    }
    writeln!(
        out,
        "thrust: {:.4} N at z = 0, {:.4} N at z = {z_max}",
        curve.thrust[0],
        curve.thrust[n - 1]
    )?;
    let pts: Vec<(f64, f64)> = curve.thrust.iter().copied().zip(curve.z.iter().copied()).collect();
    match fit_calibration(&pts) {
        Ok(line) => writeln!(out, "fit (z on thrust): {line}")?,
        Err(e) => writeln!(out, "fit: {e}")?,
    }
    Ok(())
}
