//! Benchmark problems: the Brusselator, a heave/pitch/roll vehicle model and
//! closed-form problems for convergence checks.

pub mod analytic;
pub mod brusselator;
pub mod presets;
pub mod vehicle;

pub use analytic::AnalyticProblem;
pub use brusselator::BrusselatorParams;
pub use presets::{Preset, TABLE1_ICS};
pub use vehicle::{Roadway, VehicleParams};
