//! Linearized stability analysis of the divergence loop.
//!
//! Around a height `z` and velocity `v_z` the observation `θ = v_z/z` is
//! linearized to `Δθ = −v_z/z² Δz + 1/z Δv_z`. With a zero-order hold of
//! period `T` and feedback `u = −K Δθ`, the vacuum loop has a pole at `w = −1`
//! for `K = 2z/T`: the critical gain grows linearly with height. The drag and
//! horizontal variants and a continuous loop with a Padé-approximated delay
//! are provided alongside.

mod continuous;
mod poly;

use nalgebra::{Complex, DMatrix, DVector, RowDVector};

pub use continuous::{continuous_critical_gains, default_k_grid, ContinuousLoop, CriticalGains};
pub use poly::{char_poly, quadratic_roots, Polynomial};

use crate::error::{Error, Result};

/// Tolerance on `|w| − 1` for discrete instability.
pub const DISCRETE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPoint {
    pub z: f64,
    pub v_z: f64,
    pub v_wind: f64,
    /// Horizontal velocity; zero for the vertical models.
    pub v_x: f64,
}

/// Single-input single-output state-space model. `t == 0` marks a
/// continuous model (`a`, `b`); otherwise `a`, `b` are `Φ`, `Γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: RowDVector<f64>,
    pub d: f64,
    pub t: f64,
    pub point: LinearPoint,
    /// Linear drag pole `p`; zero in vacuum.
    pub p: f64,
}

fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be > 0, got {x}")))
    }
}

fn vertical_c(z: f64, v_z: f64) -> RowDVector<f64> {
    RowDVector::from_row_slice(&[-v_z / (z * z), 1.0 / z])
}

impl LinearModel {
    pub fn is_discrete(&self) -> bool {
        self.t > 0.0
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }

    /// `Φ − K Γ C`.
    pub fn closed_loop_matrix(&self, k: f64) -> DMatrix<f64> {
        &self.a - (&self.b * &self.c) * k
    }

    /// `C (wI − Φ)⁻¹ Γ + D`; `None` at a pole.
    pub fn transfer_function(&self, w: Complex<f64>) -> Option<Complex<f64>> {
        let n = self.order();
        let m = DMatrix::<Complex<f64>>::from_fn(n, n, |i, j| {
            let diag = if i == j { w } else { Complex::new(0.0, 0.0) };
            diag - self.a[(i, j)]
        });
        let rhs = self.b.map(|x| Complex::new(x, 0.0));
        let x = m.lu().solve(&rhs)?;
        let y = self.c.iter().zip(x.iter()).map(|(c, x)| x * *c).sum::<Complex<f64>>();
        Some(y + self.d)
    }

    /// Outputs `C x_k` of the closed loop `x_{k+1} = (Φ − KΓC) x_k`.
    pub fn rollout(&self, k: f64, x0: &DVector<f64>, steps: usize) -> Vec<f64> {
        let m = self.closed_loop_matrix(k);
        let mut x = x0.clone();
        let mut out = Vec::with_capacity(steps + 1);
        for _ in 0..=steps {
            out.push((&self.c * &x)[0]);
            x = &m * x;
        }
        out
    }
}

/// `p = sign(v_air) β v_air` with `v_air = v_wind − v_z`.
pub fn drag_pole(v_z: f64, v_wind: f64, beta: f64) -> f64 {
    let v_air = v_wind - v_z;
    v_air.signum() * beta * v_air
}

/// ZOH model of the vacuum double integrator.
pub fn zoh_vacuum_model(z: f64, v_z: f64, t: f64) -> Result<LinearModel> {
    check_positive("z", z)?;
    check_positive("T", t)?;
    Ok(LinearModel {
        a: DMatrix::from_row_slice(2, 2, &[1.0, t, 0.0, 1.0]),
        b: DVector::from_column_slice(&[t * t / 2.0, t]),
        c: vertical_c(z, v_z),
        d: 0.0,
        t,
        point: LinearPoint {
            z,
            v_z,
            v_wind: 0.0,
            v_x: 0.0,
        },
        p: 0.0,
    })
}

/// ZOH model with linear drag `Δv̇ = −p Δv + u`, `p` from [`drag_pole`].
pub fn zoh_drag_model(z: f64, v_z: f64, v_wind: f64, beta: f64, t: f64) -> Result<LinearModel> {
    let p = drag_pole(v_z, v_wind, beta);
    let mut model = zoh_drag_model_with_pole(z, v_z, p, t)?;
    model.point.v_wind = v_wind;
    Ok(model)
}

/// [`zoh_drag_model`] for a given drag pole; `point.v_wind` is left at zero.
pub fn zoh_drag_model_with_pole(z: f64, v_z: f64, p: f64, t: f64) -> Result<LinearModel> {
    check_positive("z", z)?;
    check_positive("T", t)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::DragRegime { p });
    }
    let x = p * t;
    let decay = (-x).exp();
    // (1 − e^{−pT})/p and T/p − (1 − e^{−pT})/p², both stable as p → 0
    let g1 = -(-x).exp_m1() / p;
    let g0 = if x < 1e-4 {
        t * t * (0.5 - x / 6.0 + x * x / 24.0)
    } else {
        t / p - g1 / p
    };
    Ok(LinearModel {
        a: DMatrix::from_row_slice(2, 2, &[1.0, g1, 0.0, decay]),
        b: DVector::from_column_slice(&[g0, g1]),
        c: vertical_c(z, v_z),
        d: 0.0,
        t,
        point: LinearPoint {
            z,
            v_z,
            v_wind: 0.0,
            v_x: 0.0,
        },
        p,
    })
}

/// Four-state ZOH model `[Δz, Δv_z, Δx, Δv_x]` for ventral-flow control
/// `θ_x = v_x / z` at constant height.
pub fn zoh_horizontal_model(z: f64, v_x: f64, t: f64) -> Result<LinearModel> {
    check_positive("z", z)?;
    check_positive("T", t)?;
    #[rustfmt::skip]
    let a = DMatrix::from_row_slice(4, 4, &[
        1.0, t, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 1.0, t,
        0.0, 0.0, 0.0, 1.0,
    ]);
    Ok(LinearModel {
        a,
        b: DVector::from_column_slice(&[0.0, 0.0, t * t / 2.0, t]),
        c: RowDVector::from_row_slice(&[-v_x / (z * z), 0.0, 0.0, 1.0 / z]),
        d: 0.0,
        t,
        point: LinearPoint {
            z,
            v_z: 0.0,
            v_wind: 0.0,
            v_x,
        },
        p: 0.0,
    })
}

/// `z² det(wI − Φ + KΓC)`. For the vacuum model this is
/// `z²(w−1)² + K((zT − ½v_zT²)w − zT − ½v_zT²)`.
pub fn closed_loop_char_poly(model: &LinearModel, k: f64) -> Result<Polynomial> {
    if !model.is_discrete() {
        return Err(Error::invalid("model", "closed_loop_char_poly needs a discrete model"));
    }
    let z = model.point.z;
    Ok(char_poly(&model.closed_loop_matrix(k)).scale(z * z))
}

pub fn closed_loop_poles(model: &LinearModel, k: f64) -> Result<Vec<Complex<f64>>> {
    Ok(closed_loop_char_poly(model, k)?.roots())
}

/// Whether every closed-loop pole satisfies `|w| ≤ 1 + DISCRETE_TOL`.
pub fn is_stable_discrete(model: &LinearModel, k: f64) -> Result<bool> {
    Ok(closed_loop_poles(model, k)?
        .iter()
        .all(|w| w.norm() <= 1.0 + DISCRETE_TOL))
}

/// Zero of the vacuum loop, `(zT + ½v_zT²)/(zT − ½v_zT²)`.
pub fn zero_location(z: f64, v_z: f64, t: f64) -> f64 {
    let h = 0.5 * v_z * t * t;
    (z * t + h) / (z * t - h)
}

/// `K = 2z/T`.
pub fn unstable_gain_vacuum(z: f64, t: f64) -> f64 {
    2.0 * z / t
}

/// `z = K T / 2`, the height below which gain `K` is unstable.
pub fn instability_height(k: f64, t: f64) -> f64 {
    k * t / 2.0
}

/// Gain placing a drag-model pole at `w = −1`. The simplified form drops
/// the `v_z` term of the denominator, whose coefficient is `O(T³p³)`.
pub fn unstable_gain_drag(z: f64, v_z: f64, p: f64, t: f64, simplified: bool) -> Result<f64> {
    check_positive("z", z)?;
    check_positive("T", t)?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::DragRegime { p });
    }
    let x = p * t;
    let e = x.exp();
    let em1 = x.exp_m1();
    let num = 2.0 * p * p * (1.0 + e) * z * z;
    let mut den = 2.0 * p * em1 * z;
    if !simplified {
        den += (2.0 * em1 - x - x * e) * v_z;
    }
    if !(den > 0.0) {
        return Err(Error::NonPositiveDenominator { denominator: den });
    }
    Ok(num / den)
}

/// Same as the vertical vacuum case: `K_x = 2z/T`.
pub fn unstable_gain_horizontal(z: f64, t: f64) -> f64 {
    unstable_gain_vacuum(z, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    const T: f64 = 0.03;

    #[test]
    fn vacuum_model_entries() {
        let m = zoh_vacuum_model(10.0, -2.0, T).unwrap();
        assert_eq!(m.a[(0, 1)], 0.03);
        assert!((m.b[0] - 0.00045).abs() < 1e-18);
        assert_eq!(m.b[1], 0.03);
        assert!((m.c[0] - 0.02).abs() < 1e-15);
        assert!((m.c[1] - 0.1).abs() < 1e-15);
        let m = zoh_vacuum_model(4.0, 0.0, T).unwrap();
        assert_eq!(m.c[0], 0.0);
        assert_eq!(m.c[1], 0.25);
        assert!(zoh_vacuum_model(0.0, 0.0, T).is_err());
        assert!(zoh_vacuum_model(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn drag_pole_examples() {
        assert_eq!(drag_pole(-1.0, 1.0, 1.0), 2.0);
        assert_eq!(drag_pole(1.0, -1.0, 1.0), 2.0);
        assert_eq!(drag_pole(0.0, 0.0, 1.0), 0.0);
    }

    #[test]
    fn drag_model_entries() {
        let m = zoh_drag_model(5.0, -1.0, 1.0, 1.0, T).unwrap();
        assert_eq!(m.p, 2.0);
        assert!((m.a[(1, 1)] - 0.941_764_533_584_248_7).abs() < 1e-12);
        assert!(matches!(
            zoh_drag_model(5.0, 0.0, 0.0, 1.0, T),
            Err(Error::DragRegime { .. })
        ));
        assert!(matches!(
            zoh_drag_model_with_pole(5.0, 0.0, -0.5, T),
            Err(Error::DragRegime { .. })
        ));
    }

    #[test]
    fn drag_model_vacuum_limit() {
        let d = zoh_drag_model_with_pole(3.0, -0.5, 1e-8, T).unwrap();
        let v = zoh_vacuum_model(3.0, -0.5, T).unwrap();
        for (a, b) in d.a.iter().zip(v.a.iter()) {
            assert!((a - b).abs() < 1e-6);
        }
        for (a, b) in d.b.iter().zip(v.b.iter()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn drag_gamma_continuous_across_series_switch() {
        let lo = zoh_drag_model_with_pole(1.0, 0.0, 0.999e-4 / T, T).unwrap();
        let hi = zoh_drag_model_with_pole(1.0, 0.0, 1.001e-4 / T, T).unwrap();
        assert!((lo.b[0] - hi.b[0]).abs() < 1e-10);
    }

    #[test]
    fn vacuum_char_poly_closed_form() {
        let (z, v, k) = (2.5, -0.7, 40.0);
        let m = zoh_vacuum_model(z, v, T).unwrap();
        let p = closed_loop_char_poly(&m, k).unwrap();
        let a = z * T - 0.5 * v * T * T;
        let b = z * T + 0.5 * v * T * T;
        let expected = [z * z - k * b, -2.0 * z * z + k * a, z * z];
        for (c, e) in p.coeffs().iter().zip(expected) {
            assert!((c - e).abs() < 1e-12 * z * z, "{c} vs {e}");
        }
    }

    #[test]
    fn zero_gain_double_pole_at_one() {
        let m = zoh_vacuum_model(1.0, -1.0, T).unwrap();
        for w in closed_loop_poles(&m, 0.0).unwrap() {
            assert!((w - Complex::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn pole_at_minus_one_at_critical_gain() {
        for &(z, v) in &[(1.0, -1.0), (10.0, 0.0), (3.0, 2.0)] {
            let m = zoh_vacuum_model(z, v, T).unwrap();
            let p = closed_loop_char_poly(&m, unstable_gain_vacuum(z, T)).unwrap();
            assert!(p.eval(-1.0).abs() <= 1e-12 * z * z);
        }
    }

    #[test]
    fn stable_below_critical_gain() {
        let m = zoh_vacuum_model(1.0, -1.0, T).unwrap();
        for w in closed_loop_poles(&m, 30.0).unwrap() {
            assert!(w.norm() < 1.0);
        }
        assert!(!is_stable_discrete(&m, 80.0).unwrap());
    }

    #[test]
    fn unstable_gain_values() {
        assert!((unstable_gain_vacuum(1.0, T) - 66.666_666_666_666_67).abs() < 1e-9);
        assert!((unstable_gain_vacuum(10.0, T) - 666.666_666_666_666_7).abs() < 1e-9);
        assert!((unstable_gain_vacuum(instability_height(50.0, T), T) - 50.0).abs() < 1e-12);
        assert_eq!(unstable_gain_horizontal(1.0, T), unstable_gain_vacuum(1.0, T));
    }

    #[test]
    fn drag_gain_limits() {
        let s = unstable_gain_drag(4.0, -1.0, 1e-8, T, true).unwrap();
        assert!((s / unstable_gain_vacuum(4.0, T) - 1.0).abs() < 1e-6);
        let full = unstable_gain_drag(5.0, -1.0, 2.0, T, false).unwrap();
        let simp = unstable_gain_drag(5.0, -1.0, 2.0, T, true).unwrap();
        assert!((full / simp - 1.0).abs() < 0.005);
        assert_eq!(
            unstable_gain_drag(5.0, 0.0, 2.0, T, false).unwrap(),
            unstable_gain_drag(5.0, 0.0, 2.0, T, true).unwrap()
        );
        assert!(matches!(
            unstable_gain_drag(1.0, -1.0, 0.0, T, true),
            Err(Error::DragRegime { .. })
        ));
        assert!(matches!(
            unstable_gain_drag(1e-9, 1e6, 2.0, T, false),
            Err(Error::NonPositiveDenominator { .. })
        ));
    }

    #[test]
    fn drag_gain_places_pole_at_minus_one() {
        let (z, v, p) = (5.0, -1.0, 2.0);
        let m = zoh_drag_model_with_pole(z, v, p, T).unwrap();
        let k = unstable_gain_drag(z, v, p, T, false).unwrap();
        let poly = closed_loop_char_poly(&m, k).unwrap();
        assert!(poly.eval(-1.0).abs() < 1e-9 * z * z);
    }

    #[test]
    fn horizontal_model() {
        let (z, t) = (2.0, T);
        let m = zoh_horizontal_model(z, 0.3, t).unwrap();
        let k = unstable_gain_horizontal(z, t);
        let p = closed_loop_char_poly(&m, k).unwrap();
        assert_eq!(p.degree(), 4);
        assert!(p.eval(-1.0).abs() < 1e-10);
        let w = Complex::new(0.3, 0.4);
        let g = m.transfer_function(w).unwrap();
        let expected = Complex::new(t, 0.0) / ((w - 1.0) * z);
        assert!((g - expected).norm() < 1e-12);
    }

    #[test]
    fn vacuum_transfer_function() {
        let (z, v) = (3.0, -0.6);
        let m = zoh_vacuum_model(z, v, T).unwrap();
        let w = Complex::new(-0.2, 0.7);
        let num = w * (z * T - 0.5 * v * T * T) - z * T - 0.5 * v * T * T;
        let expected = num / ((w - 1.0) * (w - 1.0) * z * z);
        assert!((m.transfer_function(w).unwrap() - expected).norm() < 1e-12);
        assert!(m.transfer_function(Complex::new(1.0, 0.0)).is_none());
    }

    #[test]
    fn zero_location_examples() {
        assert_eq!(zero_location(5.0, 0.0, T), 1.0);
        assert!(zero_location(5.0, -1.0, T) < 1.0);
    }

    #[test]
    fn rollout_bounded_below_critical_gain() {
        let m = zoh_vacuum_model(1.0, -0.2, T).unwrap();
        let kc = unstable_gain_vacuum(1.0, T);
        let x0 = DVector::from_column_slice(&[0.01, 0.0]);
        let y = m.rollout(0.9 * kc, &x0, 2000);
        assert!(y[1500..].iter().all(|v| v.abs() < y[0].abs()));
        let y = m.rollout(1.1 * kc, &x0, 2000);
        assert!(y[2000].abs() > 1e3 * y[0].abs());
    }
}
