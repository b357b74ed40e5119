//! Landing while holding the loop on the edge of oscillation: the gain
//! shrinks with height on the way down, so it doubles as a height estimate.

use oscillation_ranging::estimators::estimate_z_from_gain;
use oscillation_ranging::harness::{edge_landing_battery, ScenarioConfig};

fn main() {
    let heights: Vec<f64> = (1..=10).map(|k| f64::from(k) * 5.0).collect();
    let r = edge_landing_battery(&ScenarioConfig::edge_base(), &heights);
    println!("{r}");

    if let Some(line) = r.fit {
        for k in [20.0, 60.0, 100.0] {
            println!("K = {k:5}: z ≈ {:.2} m", estimate_z_from_gain(&line, k));
        }
    }
}
