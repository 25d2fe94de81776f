//! Poisson processes of polytopal grains, the Boolean model and its
//! densities, simulated and in closed form.

mod analytic;
mod grains;
mod simulate;

pub use analytic::*;
pub use grains::{min_ball, GrainDistribution, RotationMode, Shape};
pub use simulate::*;
