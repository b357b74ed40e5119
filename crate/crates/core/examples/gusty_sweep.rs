//! Detection sweep under ±4 m/s sinusoidal gusts with airflow-dependent
//! actuator effectiveness.

use oscillation_ranging::harness::{gusty_sweep, Outcome, ScenarioConfig};

fn main() {
    let base = ScenarioConfig::gusty_base();
    let winds: Vec<f64> = (-6..=6).map(|k| f64::from(k) * 0.5).collect();
    let r = gusty_sweep(&base, &[10.0, 30.0, 50.0], &winds);

    for row in r.rows.iter().filter(|r| r.outcome == Outcome::Detected) {
        println!(
            "K = {:4}  wind = {:5.1}  z = {:.3}",
            row.gain,
            row.wind,
            row.z.unwrap_or(f64::NAN)
        );
    }
    println!("{r}");
}
