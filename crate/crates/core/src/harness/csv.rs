//! CSV writers. Floats are written with 17 significant digits so a replayed
//! run reproduces the file byte for byte; an undefined covariance is an empty
//! field.

use std::io::Write;

use super::scenario::TraceRecord;
use super::sweep::SweepResult;
use crate::error::Result;

pub const TRACE_HEADER: &str =
    "t,z,v_z,theta,theta_setpoint,u_z,u_prime_commanded,u_prime_effective,cov,K_z,K_prime,wind,phase";

pub const SWEEP_HEADER: &str = "gain,wind,z0,K_z,z,t,outcome";

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn write_trace<W: Write>(mut out: W, records: &[TraceRecord]) -> Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in records {
        let fields = [
            fmt_f64(r.t),
            fmt_f64(r.z),
            fmt_f64(r.v_z),
            fmt_f64(r.theta),
            fmt_f64(r.theta_setpoint),
            fmt_f64(r.u_z),
            fmt_f64(r.u_prime_commanded),
            fmt_f64(r.u_prime_effective),
            fmt_opt(r.cov),
            fmt_f64(r.k_z),
            fmt_f64(r.k_prime),
            fmt_f64(r.wind),
            r.phase.as_str().to_owned(),
        ];
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

pub fn write_sweep<W: Write>(mut out: W, result: &SweepResult) -> Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in &result.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_f64(r.gain),
            fmt_f64(r.wind),
            fmt_f64(r.z0),
            fmt_f64(r.k),
            fmt_opt(r.z),
            fmt_opt(r.t),
            r.outcome.as_str()
        )?;
    }
    Ok(())
}
