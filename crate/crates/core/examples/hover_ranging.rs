//! Adaptive hover: the gain settles where the loop sits on the edge of
//! oscillation, and the settled gain tracks the hover height.

use oscillation_ranging::adaptive::run_hover_ranging;
use oscillation_ranging::harness::{hover_sweep, ScenarioConfig, SweepGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = ScenarioConfig::hover_base();
    for z0 in [5.0, 15.0, 30.0] {
        cfg.sim.z0 = z0;
        let (k, z) = run_hover_ranging(&cfg)?;
        println!("start {z0:4} m: converged K = {k:7.2} at z = {z:.2} m");
    }

    let grid = SweepGrid::hover();
    let r = hover_sweep(&ScenarioConfig::hover_base(), &grid.heights, &grid.winds);
    println!("{r}");
    Ok(())
}
