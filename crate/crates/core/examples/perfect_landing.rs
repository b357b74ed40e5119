//! Thrust along a perfect constant-divergence landing, and what the
//! thrust-based height estimate gets wrong when the wind is unknown.

use oscillation_ranging::dynamics::{EnvParams, VehicleParams};
use oscillation_ranging::estimators::{perfect_landing_thrust, z_from_thrust};

fn main() -> Result<(), oscillation_ranging::Error> {
    let c2 = 0.1;
    let zs: Vec<f64> = (0..=100).map(|k| f64::from(k) * 0.1).collect();
    // small quad rotor: ρ = 1.204, C_D = 0.25, A = 0.25
    let vehicle = VehicleParams {
        drag_coeff_half: 0.5 * 1.204 * 0.25 * 0.25,
        ..VehicleParams::default()
    };
    let still = perfect_landing_thrust(&zs, c2, &EnvParams::still(), &vehicle)?;
    let down = perfect_landing_thrust(&zs, c2, &EnvParams::with_wind(-1.0), &vehicle)?;

    for i in (0..zs.len()).step_by(20) {
        println!(
            "z = {:4.1}  still {:7.4} N  wind -1 {:7.4} N",
            zs[i], still.thrust[i], down.thrust[i]
        );
    }

    // touchdown thrust in a downdraft, read off the still-air curve
    let misread = still.invert(down.thrust[0]);
    match misread {
        Some(z) => println!("downdraft touchdown thrust reads as z = {z:.2} m in still air"),
        None => println!("downdraft touchdown thrust is off the still-air curve"),
    }

    let u_z = c2 * c2 * 5.0;
    println!("vacuum estimate from u_z = {u_z:.3}: z = {}", z_from_thrust(u_z, c2)?);
    Ok(())
}
