//! Critical gains from the linearized models: discrete vacuum and drag
//! formulas, pole locations, and the continuous loop with a Padé delay.

use oscillation_ranging::analysis::{
    closed_loop_poles, continuous_critical_gains, default_k_grid, unstable_gain_drag, unstable_gain_vacuum,
    zoh_drag_model, zoh_vacuum_model,
};

fn main() -> Result<(), oscillation_ranging::Error> {
    let t = 0.03;
    for z in [1.0, 5.0, 10.0] {
        let v_z = -0.2 * z;
        let k_vac = unstable_gain_vacuum(z, t);
        let drag = zoh_drag_model(z, v_z, 0.0, 1.0, t)?;
        let k_drag = unstable_gain_drag(z, v_z, drag.p, t, false)?;
        println!("z = {z:4}: K_unstable vacuum {k_vac:8.2}, drag {k_drag:8.2}");
    }

    let model = zoh_vacuum_model(1.0, -0.2, t)?;
    for k in [0.0, 30.0, 66.0, 70.0] {
        let poles = closed_loop_poles(&model, k)?;
        let radius = poles.iter().map(|w| w.norm()).fold(0.0, f64::max);
        println!("K = {k:4}: max |w| = {radius:.4}");
    }

    for z in [1.0, 10.0] {
        let g = continuous_critical_gains(z, -0.1, 0.0, 1.0, 0.15, &default_k_grid(z, t))?;
        println!("continuous z = {z:4}: {g:?}");
    }
    Ok(())
}
