//! The outer gain loop stepped by hand against a toy covariance that grows
//! with the gain.

use oscillation_ranging::adaptive::{update_gain, AdaptiveConfig};

fn main() {
    let cfg = AdaptiveConfig::default();
    let mut state = cfg.initial_state();
    // pretend cov rises linearly once K exceeds 30
    let plant = |k: f64| 0.01 * (k - 30.0);
    for step in 0..=4000 {
        let cov = plant(state.k_effective);
        if step % 500 == 0 {
            println!(
                "step {step:4}: K = {:6.2}, K' = {:6.2}, cov = {cov:.4}",
                state.k_effective, state.k_prime
            );
        }
        state = update_gain(&cfg, &state, Some(cov));
    }
}
