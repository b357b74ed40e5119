//! Height estimators.
//!
//! The thrust-based relations express `z` through observables and the
//! acceleration (or thrust) and are exact only on a perfect constant-divergence
//! descent without external forces. The stability-based route maps a gain at
//! the edge of oscillation to a height through a fitted calibration line.

use serde::{Deserialize, Serialize};

use crate::dynamics::{drag_force, EnvParams, VehicleParams};
use crate::error::{Error, Result};

const SINGULAR_EPS: f64 = 1e-9;

/// Least-squares line `z = slope·K + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationLine {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Summary of a (K, z) least-squares fit.
pub type FitResult = CalibrationLine;

impl CalibrationLine {
    pub fn new(slope: f64, intercept: f64) -> Self {
        Self {
            slope,
            intercept,
            r_squared: 1.0,
        }
    }
}

impl std::fmt::Display for CalibrationLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "z = {:.4} K {} {:.4}  (R² = {:.4})",
            self.slope,
            if self.intercept < 0.0 { '-' } else { '+' },
            self.intercept.abs(),
            self.r_squared
        )
    }
}

/// `z = a_z / (θ² + θ̇)`.
pub fn z_from_accel(theta: f64, theta_dot: f64, a_z: f64) -> Result<f64> {
    let den = theta * theta + theta_dot;
    if den.abs() < SINGULAR_EPS {
        return Err(Error::SingularEstimate { denominator: den });
    }
    Ok(a_z / den)
}

/// `z = u_z / c⁴`, valid on a perfect constant-divergence descent in vacuum.
pub fn z_from_thrust(u_z: f64, c2: f64) -> Result<f64> {
    if !(c2 > 0.0) {
        return Err(Error::invalid("c2", format!("must be > 0, got {c2}")));
    }
    Ok(u_z / (c2 * c2))
}

/// Horizontal variant at constant ventral flow: `z = a_x / (θ_x θ_z)`.
pub fn z_from_thrust_horizontal(a_x: f64, theta_x: f64, theta_z: f64) -> Result<f64> {
    z_from_thrust_horizontal_full(a_x, theta_x, 0.0, theta_z)
}

/// Full horizontal form `z = a_x / (θ̇_x + θ_x θ_z)`.
pub fn z_from_thrust_horizontal_full(a_x: f64, theta_x: f64, theta_x_dot: f64, theta_z: f64) -> Result<f64> {
    if theta_z == 0.0 {
        // a hover (θ_z = 0) forces a_x = 0 at constant ventral flow
        return Err(Error::SingularEstimate {
            denominator: theta_x_dot,
        });
    }
    let den = theta_x_dot + theta_x * theta_z;
    if den.abs() < SINGULAR_EPS {
        return Err(Error::SingularEstimate { denominator: den });
    }
    Ok(a_x / den)
}

/// Thrust required along a perfect constant-divergence landing, sampled on
/// a height grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PerfectLandingCurve {
    pub c2: f64,
    pub wind: f64,
    pub z: Vec<f64>,
    pub thrust: Vec<f64>,
}

impl PerfectLandingCurve {
    /// Smallest height on the curve whose thrust equals `thrust`, found on the
    /// increasing branch by linear interpolation between samples.
    pub fn invert(&self, thrust: f64) -> Option<f64> {
        self.z.windows(2).zip(self.thrust.windows(2)).find_map(|(zs, us)| {
            let (lo, hi) = (us[0].min(us[1]), us[0].max(us[1]));
            if us[1] > us[0] && (lo..=hi).contains(&thrust) {
                let f = (thrust - us[0]) / (us[1] - us[0]);
                Some(zs[0] + f * (zs[1] - zs[0]))
            } else {
                None
            }
        })
    }
}

/// Thrust along `v_z = −c² z`: `u′ = m (c⁴ z + g) − f_D(v_wind − v_z)`.
/// Negative requirements are clamped to zero.
pub fn perfect_landing_thrust(
    z_grid: &[f64],
    c2: f64,
    env: &EnvParams,
    vehicle: &VehicleParams,
) -> Result<PerfectLandingCurve> {
    if !(c2 > 0.0) {
        return Err(Error::invalid("c2", "must be > 0"));
    }
    if z_grid.iter().any(|z| !(*z >= 0.0)) || z_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("z_grid", "must be non-negative and strictly increasing"));
    }
    let thrust = z_grid
        .iter()
        .map(|&z| {
            let v_z = -c2 * z;
            let a_z = c2 * c2 * z;
            let f_d = drag_force(env.wind_mean, v_z, vehicle.drag_coeff_half);
            (vehicle.mass * (a_z + vehicle.gravity) - f_d).max(0.0)
        })
        .collect();
    Ok(PerfectLandingCurve {
        c2,
        wind: env.wind_mean,
        z: z_grid.to_vec(),
        thrust,
    })
}

/// Ordinary least squares of `z` on `K`.
pub fn fit_calibration(samples: &[(f64, f64)]) -> Result<CalibrationLine> {
    if samples.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} sample(s)", samples.len())));
    }
    let n = samples.len() as f64;
    let mk = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let mz = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let (mut skk, mut skz, mut szz) = (0.0, 0.0, 0.0);
    for &(k, z) in samples {
        skk += (k - mk) * (k - mk);
        skz += (k - mk) * (z - mz);
        szz += (z - mz) * (z - mz);
    }
    if !(skk > 0.0) {
        return Err(Error::DegenerateFit("all gains equal".into()));
    }
    let slope = skz / skk;
    let intercept = mz - slope * mk;
    let ss_res: f64 = samples
        .iter()
        .map(|&(k, z)| {
            let r = z - (slope * k + intercept);
            r * r
        })
        .sum();
    let r_squared = if szz > 0.0 {
        (1.0 - ss_res / szz).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(CalibrationLine {
        slope,
        intercept,
        r_squared,
    })
}

pub fn estimate_z_from_gain(line: &CalibrationLine, k: f64) -> f64 {
    line.slope * k + line.intercept
}
