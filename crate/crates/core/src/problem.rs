//! Problem definitions for the three solver families.
//!
//! Callbacks are pure functions of their arguments. The integration always
//! starts at `t = 0` and reports `n_global` evenly spaced nodes up to `t_end`.

use crate::error::{IntegrateError, IntegrateResult};
use crate::vector::StateVector;

pub type VelocityFn = Box<dyn Fn(f64, &StateVector) -> StateVector + Send + Sync>;
pub type AccelerationFn =
    Box<dyn Fn(f64, &StateVector, &StateVector) -> StateVector + Send + Sync>;

/// `dx/dt = v(t, x)`.
pub struct FirstOrderProblem {
    pub velocity: VelocityFn,
    pub x0: StateVector,
    pub t_end: f64,
    pub n_global: usize,
}

/// `dx/dt = v(t, x)` with the acceleration `a(t, x, v)` also prescribed.
pub struct KinematicProblem {
    pub velocity: VelocityFn,
    pub acceleration: AccelerationFn,
    pub x0: StateVector,
    pub t_end: f64,
    pub n_global: usize,
}

/// Newton's-law form `d²x/dt² = a(t, x, v)`; both `x` and `v` are solved for.
pub struct DynamicProblem {
    pub acceleration: AccelerationFn,
    pub x0: StateVector,
    pub v0: StateVector,
    pub t_end: f64,
    pub n_global: usize,
}

impl FirstOrderProblem {
    pub fn new(
        velocity: impl Fn(f64, &StateVector) -> StateVector + Send + Sync + 'static,
        x0: impl Into<StateVector>,
        t_end: f64,
        n_global: usize,
    ) -> Self {
        FirstOrderProblem {
            velocity: Box::new(velocity),
            x0: x0.into(),
            t_end,
            n_global,
        }
    }

    pub(crate) fn eval_velocity(&self, t: f64, x: &StateVector) -> IntegrateResult<StateVector> {
        checked(t, x, (self.velocity)(t, x))
    }
}

impl KinematicProblem {
    pub fn new(
        velocity: impl Fn(f64, &StateVector) -> StateVector + Send + Sync + 'static,
        acceleration: impl Fn(f64, &StateVector, &StateVector) -> StateVector
            + Send
            + Sync
            + 'static,
        x0: impl Into<StateVector>,
        t_end: f64,
        n_global: usize,
    ) -> Self {
        KinematicProblem {
            velocity: Box::new(velocity),
            acceleration: Box::new(acceleration),
            x0: x0.into(),
            t_end,
            n_global,
        }
    }

    /// Evaluates `v(t, x)` and then `a(t, x, v)`.
    pub(crate) fn eval(
        &self,
        t: f64,
        x: &StateVector,
    ) -> IntegrateResult<(StateVector, StateVector)> {
        let v = checked(t, x, (self.velocity)(t, x))?;
        let a = checked(t, x, (self.acceleration)(t, x, &v))?;
        Ok((v, a))
    }
}

impl DynamicProblem {
    pub fn new(
        acceleration: impl Fn(f64, &StateVector, &StateVector) -> StateVector
            + Send
            + Sync
            + 'static,
        x0: impl Into<StateVector>,
        v0: impl Into<StateVector>,
        t_end: f64,
        n_global: usize,
    ) -> Self {
        DynamicProblem {
            acceleration: Box::new(acceleration),
            x0: x0.into(),
            v0: v0.into(),
            t_end,
            n_global,
        }
    }

    pub(crate) fn eval_acceleration(
        &self,
        t: f64,
        x: &StateVector,
        v: &StateVector,
    ) -> IntegrateResult<StateVector> {
        checked(t, x, (self.acceleration)(t, x, v))
    }
}

fn checked(t: f64, x: &StateVector, out: StateVector) -> IntegrateResult<StateVector> {
    if out.dim() != x.dim() {
        return Err(IntegrateError::DimensionMismatch {
            expected: x.dim(),
            found: out.dim(),
        });
    }
    if !out.is_finite() {
        return Err(IntegrateError::Evaluation {
            t,
            x: x.as_slice().to_vec(),
        });
    }
    Ok(out)
}

/// Any of the three problem families.
pub enum Problem {
    FirstOrder(FirstOrderProblem),
    Kinematic(KinematicProblem),
    Dynamic(DynamicProblem),
}

impl Problem {
    pub fn t_end(&self) -> f64 {
        match self {
            Problem::FirstOrder(p) => p.t_end,
            Problem::Kinematic(p) => p.t_end,
            Problem::Dynamic(p) => p.t_end,
        }
    }

    pub fn n_global(&self) -> usize {
        match self {
            Problem::FirstOrder(p) => p.n_global,
            Problem::Kinematic(p) => p.n_global,
            Problem::Dynamic(p) => p.n_global,
        }
    }

    pub fn x0(&self) -> &StateVector {
        match self {
            Problem::FirstOrder(p) => &p.x0,
            Problem::Kinematic(p) => &p.x0,
            Problem::Dynamic(p) => &p.x0,
        }
    }

    /// Method order `p` used by the step-size controller (local error `O(h^{p+1})`).
    pub fn method_order(&self) -> u32 {
        match self {
            Problem::FirstOrder(_) => 2,
            Problem::Kinematic(_) | Problem::Dynamic(_) => 3,
        }
    }

    pub fn validate(&self) -> IntegrateResult<()> {
        let t_end = self.t_end();
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(IntegrateError::Config(format!(
                "t_end must be positive and finite, got {t_end}"
            )));
        }
        if self.n_global() == 0 {
            return Err(IntegrateError::Config("n_global must be at least 1".into()));
        }
        let x0 = self.x0();
        if x0.dim() == 0 {
            return Err(IntegrateError::Config("state dimension must be at least 1".into()));
        }
        x0.check_finite()?;
        if let Problem::Dynamic(p) = self {
            p.v0.check_dim(x0.dim())?;
            p.v0.check_finite()?;
        }
        Ok(())
    }
}

impl From<FirstOrderProblem> for Problem {
    fn from(p: FirstOrderProblem) -> Self {
        Problem::FirstOrder(p)
    }
}

impl From<KinematicProblem> for Problem {
    fn from(p: KinematicProblem) -> Self {
        Problem::Kinematic(p)
    }
}

impl From<DynamicProblem> for Problem {
    fn from(p: DynamicProblem) -> Self {
        Problem::Dynamic(p)
    }
}
