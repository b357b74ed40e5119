use nalgebra::{Complex, Matrix2, Matrix4};

use super::drag_pole;
use crate::error::{Error, Result};

/// Imaginary part above which a pole counts as complex.
pub const COMPLEX_TOL: f64 = 1e-9;
/// Real part above which a continuous pole counts as unstable.
pub const UNSTABLE_TOL: f64 = 1e-9;

const GRID_POINTS: usize = 1000;
const GRID_MIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalGains {
    /// Gain at which the dominant poles become complex.
    pub k_oscillation: Option<f64>,
    /// Gain at which a pole crosses into the right half plane.
    pub k_unstable: Option<f64>,
}

/// Continuous linearized loop: plant `Δż = Δv`, `Δv̇ = −p Δv + u_d`, output
/// `Δθ = −v_z/z² Δz + 1/z Δv`, feedback `u = −K Δθ`, and `u_d` the
/// second-order Padé approximation of `u` delayed by `delay` (omitted when
/// `delay == 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousLoop {
    pub z: f64,
    pub v_z: f64,
    pub v_wind: f64,
    pub beta: f64,
    pub delay: f64,
}

impl ContinuousLoop {
    pub fn validate(&self) -> Result<()> {
        if !(self.z > 0.0 && self.z.is_finite()) {
            return Err(Error::invalid("z", format!("must be > 0, got {}", self.z)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid("beta", format!("must be >= 0, got {}", self.beta)));
        }
        if !(self.delay >= 0.0 && self.delay.is_finite()) {
            return Err(Error::invalid("delay", format!("must be >= 0, got {}", self.delay)));
        }
        Ok(())
    }

    pub fn drag_pole(&self) -> f64 {
        drag_pole(self.v_z, self.v_wind, self.beta)
    }

    /// Closed-loop poles at gain `k`.
    pub fn poles(&self, k: f64) -> Vec<Complex<f64>> {
        let p = self.drag_pole();
        let c0 = -self.v_z / (self.z * self.z);
        let c1 = 1.0 / self.z;
        if self.delay == 0.0 {
            let m = Matrix2::new(0.0, 1.0, -k * c0, -p - k * c1);
            return m.complex_eigenvalues().iter().copied().collect();
        }
        // Padé states q1'' a + q1' b + q1 = u, u_d = u − 2b q1'
        let a = self.delay * self.delay / 12.0;
        let b = self.delay / 2.0;
        #[rustfmt::skip]
        let m = Matrix4::new(
            0.0, 1.0, 0.0, 0.0,
            -k * c0, -p - k * c1, 0.0, -2.0 * b,
            0.0, 0.0, 0.0, 1.0,
            -k * c0 / a, -k * c1 / a, -1.0 / a, -b / a,
        );
        m.complex_eigenvalues().iter().copied().collect()
    }

    fn complex_count(&self, k: f64) -> usize {
        self.poles(k).iter().filter(|w| w.im.abs() > COMPLEX_TOL).count()
    }

    fn is_unstable(&self, k: f64) -> bool {
        self.poles(k).iter().any(|w| w.re > UNSTABLE_TOL)
    }

    /// Scans `k_grid` for the first gain where the number of complex poles
    /// rises (the Padé pair is complex at low gain and turns real before the
    /// plant pair meets), and the first gain with a right-half-plane pole,
    /// each refined by bisection. Fails with [`Error::NoCrossing`] only when
    /// neither is found.
    pub fn critical_gains(&self, k_grid: &[f64]) -> Result<CriticalGains> {
        self.validate()?;
        if k_grid.len() < 2 || k_grid.windows(2).any(|w| !(w[1] > w[0])) || !(k_grid[0] >= 0.0) {
            return Err(Error::invalid(
                "k_grid",
                "needs >= 2 non-negative, strictly increasing gains",
            ));
        }
        let counts: Vec<usize> = k_grid.iter().map(|&k| self.complex_count(k)).collect();
        let k_oscillation = counts.windows(2).position(|c| c[1] > c[0]).map(|i| {
            let base = counts[i];
            first_crossing(&k_grid[i..], |k| self.complex_count(k) > base).unwrap_or(k_grid[i + 1])
        });
        let k_unstable = if self.is_unstable(k_grid[0]) {
            Some(k_grid[0])
        } else {
            first_crossing(k_grid, |k| self.is_unstable(k))
        };
        if k_oscillation.is_none() && k_unstable.is_none() {
            return Err(Error::NoCrossing {
                what: "oscillation or instability",
                k_max: k_grid[k_grid.len() - 1],
            });
        }
        Ok(CriticalGains {
            k_oscillation,
            k_unstable,
        })
    }
}

fn first_crossing(grid: &[f64], pred: impl Fn(f64) -> bool) -> Option<f64> {
    let i = grid.iter().position(|&k| pred(k))?;
    if i == 0 {
        return Some(grid[0]);
    }
    let (mut lo, mut hi) = (grid[i - 1], grid[i]);
    for _ in 0..100 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// 1000 log-spaced gains over `[0.1, 10 · 2z/T]`.
pub fn default_k_grid(z: f64, t: f64) -> Vec<f64> {
    let hi = 10.0 * 2.0 * z / t;
    let (l0, l1) = (GRID_MIN.ln(), hi.ln());
    (0..GRID_POINTS)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (GRID_POINTS - 1) as f64).exp())
        .collect()
}

pub fn continuous_critical_gains(
    z: f64,
    v_z: f64,
    v_wind: f64,
    beta: f64,
    delay: f64,
    k_grid: &[f64],
) -> Result<CriticalGains> {
    ContinuousLoop {
        z,
        v_z,
        v_wind,
        beta,
        delay,
    }
    .critical_gains(k_grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    const T: f64 = 0.03;

    fn reference_loop(z: f64) -> ContinuousLoop {
        ContinuousLoop {
            z,
            v_z: -0.1,
            v_wind: 0.0,
            beta: 1.0,
            delay: 0.15,
        }
    }

    #[test]
    fn oscillation_gain_at_ten_metres() {
        let l = reference_loop(10.0);
        let g = l.critical_gains(&default_k_grid(10.0, T)).unwrap();
        let k = g.k_oscillation.unwrap();
        assert!((k / 24.3 - 1.0).abs() < 0.1, "{k}");
        assert!(k <= g.k_unstable.unwrap());
    }

    #[test]
    fn oscillation_gain_grows_with_height() {
        let k1 = reference_loop(1.0).critical_gains(&default_k_grid(10.0, T)).unwrap();
        let k10 = reference_loop(10.0).critical_gains(&default_k_grid(10.0, T)).unwrap();
        assert!(k1.k_oscillation.unwrap() < k10.k_oscillation.unwrap());
        assert!(k1.k_unstable.unwrap() < k10.k_unstable.unwrap());
    }

    #[test]
    fn delayless_vacuum_loop_never_unstable() {
        let l = ContinuousLoop {
            z: 2.0,
            v_z: -0.4,
            v_wind: 0.0,
            beta: 0.0,
            delay: 0.0,
        };
        assert!(matches!(
            l.critical_gains(&default_k_grid(2.0, T)),
            Err(Error::NoCrossing { .. })
        ));
        assert!(l.poles(1e4).iter().all(|w| w.re < 0.0));
    }

    #[test]
    fn no_crossing_error() {
        let l = reference_loop(10.0);
        assert!(matches!(
            l.critical_gains(&[0.1, 0.2, 0.3]),
            Err(Error::NoCrossing { .. })
        ));
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut l = reference_loop(1.0);
        assert!(l.critical_gains(&[1.0, 1.0]).is_err());
        l.delay = -0.1;
        assert!(l.critical_gains(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn grid_shape() {
        let g = default_k_grid(10.0, T);
        assert_eq!(g.len(), 1000);
        assert!((g[0] - 0.1).abs() < 1e-12);
        assert!((g[999] / (10.0 * 2.0 * 10.0 / T) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn open_loop_poles() {
        let l = reference_loop(5.0);
        let poles = l.poles(0.0);
        assert_eq!(poles.len(), 4);
        assert!(poles.iter().any(|w| w.norm() < 1e-12));
        assert!(poles.iter().any(|w| (w.re + 0.1).abs() < 1e-12));
    }
}
