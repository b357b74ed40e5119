//! Fixed-gain constant-divergence landing from 10 m and the height at which
//! the covariance detector first fires. Writes `landing.csv`.

use oscillation_ranging::detector::detect_onset;
use oscillation_ranging::harness::csv::write_trace;
use oscillation_ranging::harness::{run_scenario, ScenarioConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = ScenarioConfig::fixed_gain_landing();
    let run = run_scenario(&cfg)?;

    let file = std::fs::File::create("landing.csv")?;
    write_trace(std::io::BufWriter::new(file), &run.records)?;

    println!("K_z = {}, c² = {}", cfg.controller.gain_p, cfg.controller.c2);
    println!("{} records, ended by {:?}", run.records.len(), run.termination);
    match detect_onset(run.flight(), &cfg.detector) {
        Some((t, z)) => println!("oscillation onset at t = {t:.2} s, z = {z:.3} m"),
        None => println!("no oscillation detected"),
    }
    Ok(())
}
