//! Problems with closed-form solutions, posed for each solver family.

use std::fmt;
use std::str::FromStr;

use crate::driver::SolverFamily;
use crate::error::IntegrateError;
use crate::problem::{DynamicProblem, FirstOrderProblem, KinematicProblem, Problem};
use crate::vector::StateVector;

const FORCED_X0: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticProblem {
    /// `x' = −x`, `x(0) = 1`.
    ExpDecay,
    /// `x'' = −x`, `x(0) = 1`, `x'(0) = 0`.
    Harmonic,
    /// `x' = −x + sin t`, `x(0) = 1`.
    ForcedLinear,
}

impl AnalyticProblem {
    pub const ALL: [AnalyticProblem; 3] = [
        AnalyticProblem::ExpDecay,
        AnalyticProblem::Harmonic,
        AnalyticProblem::ForcedLinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnalyticProblem::ExpDecay => "exp_decay",
            AnalyticProblem::Harmonic => "harmonic",
            AnalyticProblem::ForcedLinear => "forced_linear",
        }
    }

    /// Scalar displacement, velocity and acceleration at `t`.
    pub fn exact(self, t: f64) -> [f64; 3] {
        match self {
            AnalyticProblem::ExpDecay => {
                let e = (-t).exp();
                [e, -e, e]
            }
            AnalyticProblem::Harmonic => [t.cos(), -t.sin(), -t.cos()],
            AnalyticProblem::ForcedLinear => {
                let e = (FORCED_X0 + 0.5) * (-t).exp();
                let (s, c) = t.sin_cos();
                [e + 0.5 * (s - c), -e + 0.5 * (c + s), e + 0.5 * (c - s)]
            }
        }
    }

    /// Exact state of the first-order form; the oscillator is posed as the
    /// planar system `(x, x')`.
    pub fn first_order_exact(self, t: f64) -> StateVector {
        let [x, v, _] = self.exact(t);
        match self {
            AnalyticProblem::Harmonic => StateVector::new(vec![x, v]),
            _ => StateVector::new(vec![x]),
        }
    }

    /// Exact `(x, v)` in the layout the given family produces.
    pub fn exact_for(self, family: SolverFamily, t: f64) -> (StateVector, StateVector) {
        let [x, v, a] = self.exact(t);
        match (family, self) {
            (SolverFamily::FirstOrder, AnalyticProblem::Harmonic) => {
                (StateVector::new(vec![x, v]), StateVector::new(vec![v, a]))
            }
            _ => (StateVector::new(vec![x]), StateVector::new(vec![v])),
        }
    }

    pub fn first_order(self, t_end: f64, n_global: usize) -> FirstOrderProblem {
        match self {
            AnalyticProblem::ExpDecay => FirstOrderProblem::new(|_, x| -x, [1.0], t_end, n_global),
            AnalyticProblem::Harmonic => FirstOrderProblem::new(
                |_, x| StateVector::new(vec![x[1], -x[0]]),
                [1.0, 0.0],
                t_end,
                n_global,
            ),
            AnalyticProblem::ForcedLinear => FirstOrderProblem::new(
                |t, x| StateVector::new(vec![-x[0] + t.sin()]),
                [FORCED_X0],
                t_end,
                n_global,
            ),
        }
    }

    pub fn kinematic(self, t_end: f64, n_global: usize) -> KinematicProblem {
        match self {
            AnalyticProblem::ExpDecay => {
                KinematicProblem::new(|_, x| -x, |_, _, v| -v, [1.0], t_end, n_global)
            }
            AnalyticProblem::Harmonic => KinematicProblem::new(
                |t, _| StateVector::new(vec![-t.sin()]),
                |_, x, _| -x,
                [1.0],
                t_end,
                n_global,
            ),
            AnalyticProblem::ForcedLinear => KinematicProblem::new(
                |t, x| StateVector::new(vec![-x[0] + t.sin()]),
                |t, _, v| StateVector::new(vec![-v[0] + t.cos()]),
                [FORCED_X0],
                t_end,
                n_global,
            ),
        }
    }

    pub fn dynamic(self, t_end: f64, n_global: usize) -> DynamicProblem {
        match self {
            AnalyticProblem::ExpDecay => {
                DynamicProblem::new(|_, _, v| -v, [1.0], [-1.0], t_end, n_global)
            }
            AnalyticProblem::Harmonic => {
                DynamicProblem::new(|_, x, _| -x, [1.0], [0.0], t_end, n_global)
            }
            AnalyticProblem::ForcedLinear => DynamicProblem::new(
                |t, _, v| StateVector::new(vec![-v[0] + t.cos()]),
                [FORCED_X0],
                [-FORCED_X0],
                t_end,
                n_global,
            ),
        }
    }

    pub fn problem(self, family: SolverFamily, t_end: f64, n_global: usize) -> Problem {
        match family {
            SolverFamily::FirstOrder => self.first_order(t_end, n_global).into(),
            SolverFamily::Kinematic => self.kinematic(t_end, n_global).into(),
            SolverFamily::Dynamic => self.dynamic(t_end, n_global).into(),
        }
    }
}

impl fmt::Display for AnalyticProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnalyticProblem {
    type Err = IntegrateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "exp_decay" => Ok(AnalyticProblem::ExpDecay),
            "harmonic" | "harmonic_oscillator" => Ok(AnalyticProblem::Harmonic),
            "forced_linear" => Ok(AnalyticProblem::ForcedLinear),
            _ => Err(IntegrateError::Config(format!(
                "unknown analytic problem '{s}' (expected exp_decay, harmonic or forced_linear)"
            ))),
        }
    }
}
