//! Stability-based distance estimation for optical-flow divergence control.
//!
//! A vehicle that holds its relative vertical velocity `θ_z = v_z / z`
//! constant with a fixed proportional gain becomes oscillatory, and later
//! unstable, once it gets close enough to the surface. The height at which
//! this happens is proportional to the gain. This crate simulates that loop
//! for a vertical point mass under drag, wind and gusts, detects the onset of
//! self-induced oscillations from the covariance between thrust and `θ_z`,
//! adapts the gain to stay on the edge of oscillation, and provides the
//! analytic tools (ZOH models, characteristic polynomials, Padé-delay root
//! loci) that predict the critical gain as a function of height.
//!
//! Modules:
//! - [`dynamics`]: nonlinear vertical point-mass plant.
//! - [`observer`]: `θ_z` observation, finite differences and the actuation delay.
//! - [`controller`]: P and PI divergence control laws.
//! - [`detector`]: sliding covariance window and onset detection.
//! - [`adaptive`]: outer-loop gain adaptation, hover ranging and edge landing.
//! - [`analysis`]: linear models and critical-gain formulas.
//! - [`estimators`]: thrust-based estimators and gain-to-height calibration.
//! - [`harness`]: scenario runner, sweeps, CSV traces and the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptive;
pub mod analysis;
pub mod controller;
pub mod detector;
pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod observer;

pub use error::{Error, Result};
