//! The onset detector on synthetic data: in-phase thrust and divergence give
//! a positive covariance, counter-phase a negative one.

use oscillation_ranging::detector::{CovWindow, DetectorThresholds};

fn main() -> Result<(), oscillation_ranging::Error> {
    let thr = DetectorThresholds::default();
    for (label, sign) in [("counter-phase", -1.0), ("in-phase", 1.0)] {
        let mut w = CovWindow::new(20)?;
        let mut theta = 0.0;
        for k in 0..40 {
            let s = (f64::from(k) * 0.6).sin();
            theta = 0.2 * s;
            w.push(9.81 + sign * 2.0 * s, theta);
        }
        let cov = w.cov();
        println!(
            "{label}: cov = {:.4}, triggered = {}",
            cov.unwrap_or(f64::NAN),
            thr.triggered(theta.abs(), cov)
        );
    }
    Ok(())
}
