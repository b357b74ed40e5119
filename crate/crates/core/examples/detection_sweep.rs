//! Onset heights for K ∈ {10, 30, 50} over steady winds, with and without
//! an integrator, and the fitted gain-to-height lines.

use oscillation_ranging::harness::{detection_sweep, ScenarioConfig};

fn main() {
    let base = ScenarioConfig::detection_base();
    let gains = [10.0, 30.0, 50.0];
    let winds: Vec<f64> = (-6..=6).map(|k| f64::from(k) * 0.5).collect();

    for pi_mode in [false, true] {
        let r = detection_sweep(&base, &gains, &winds, pi_mode);
        println!("{} control", if pi_mode { "PI" } else { "P" });
        println!("  {r}");
        for g in gains {
            if let Some(s) = r.spread_for_gain(g) {
                println!("  K = {g}: spread {s:.2} m");
            }
        }
    }
}
