//! Two-step PECE integrators shaped after BDF2, for first-order systems,
//! second-order systems with prescribed velocity and acceleration, and
//! Newton's-law dynamics, with PI step-size control and an exact
//! order-condition engine for the underlying formulas.

pub mod control;
pub mod driver;
pub mod error;
pub mod history;
pub mod problem;
pub mod problems;
pub mod solution;
pub mod stencil;
pub mod steppers;
pub mod vector;

pub use error::{IntegrateError, IntegrateResult};
pub use history::{HistoryWindow, Node};
pub use problem::{DynamicProblem, FirstOrderProblem, KinematicProblem, Problem};
pub use solution::{GlobalRecord, RunStatistics, SolutionSeries, TraceEntry};
pub use steppers::CorrectorVariant;
pub use vector::{euclidean_norm, StateVector};
