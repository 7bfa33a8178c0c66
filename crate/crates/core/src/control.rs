//! Local error estimation and step-size control.
//!
//! The local step `h` only ever doubles or halves. The controller tracks
//! `steps_to_go`, the number of local steps of size `h` that remain before
//! the next global node, so that the local grid always lands on global nodes
//! exactly.

use crate::error::{IntegrateError, IntegrateResult};
use crate::problem::Problem;
use crate::vector::StateVector;

/// Floor applied to error estimates before they are used as divisors.
pub const EPS_FLOOR: f64 = 10.0 * f64::MIN_POSITIVE;

/// Admissible tolerance range.
pub const TOL_RANGE: (f64, f64) = (1e-8, 1e-2);

/// `‖x_corr − x_pred‖ / max(1, ‖x_corr‖)` in the Euclidean norm.
pub fn truncation_error(x_corr: &StateVector, x_pred: &StateVector) -> IntegrateResult<f64> {
    x_pred.check_dim(x_corr.dim())?;
    x_corr.check_finite()?;
    x_pred.check_finite()?;
    let diff = x_corr - x_pred;
    Ok(diff.norm() / x_corr.norm().max(1.0))
}

/// Result of the initial step-size heuristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialStep {
    /// First estimate `‖x₀‖/‖v₀‖`, clamped to `[Δt/100, Δt/10]`.
    pub h0: f64,
    /// Refined estimate from the probe step.
    pub h1: f64,
    /// Local steps per global step.
    pub steps: u64,
    /// `Δt / steps`.
    pub h: f64,
}

/// Number of local steps per global step for a step near `h`: `max(2, round(Δt/h))`.
pub fn steps_per_global(dt: f64, h: f64) -> u64 {
    let ratio = (dt / h).round();
    if ratio.is_finite() {
        (ratio as u64).max(2)
    } else {
        2
    }
}

/// Chooses the first local step from the initial conditions and one
/// Euler/trapezoid probe step.
pub fn initial_step_size(problem: &Problem, dt: f64) -> IntegrateResult<InitialStep> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(IntegrateError::Domain(format!(
            "global step must be positive, got {dt}"
        )));
    }
    let t0 = 0.0;
    let x0 = problem.x0().clone();
    let v0 = match problem {
        Problem::FirstOrder(p) => p.eval_velocity(t0, &x0)?,
        Problem::Kinematic(p) => p.eval(t0, &x0)?.0,
        Problem::Dynamic(p) => p.v0.clone(),
    };
    let (x_norm, v_norm) = (x0.norm(), v0.norm());
    let ratio = x_norm / v_norm;
    let h0 = if ratio.is_nan() { dt / 10.0 } else { ratio.clamp(dt / 100.0, dt / 10.0) };

    let t1 = t0 + h0;
    let x_pred = StateVector::lincomb(&[(1.0, &x0), (h0, &v0)]);
    let (x1, v1) = match problem {
        Problem::FirstOrder(p) => {
            let vp = p.eval_velocity(t1, &x_pred)?;
            let x1 = StateVector::lincomb(&[(1.0, &x0), (0.5 * h0, &vp), (0.5 * h0, &v0)]);
            let v1 = p.eval_velocity(t1, &x1)?;
            (x1, v1)
        }
        Problem::Kinematic(p) => {
            let vp = p.eval(t1, &x_pred)?.0;
            let x1 = StateVector::lincomb(&[(1.0, &x0), (0.5 * h0, &vp), (0.5 * h0, &v0)]);
            let v1 = p.eval(t1, &x1)?.0;
            (x1, v1)
        }
        Problem::Dynamic(p) => {
            let a0 = p.eval_acceleration(t0, &x0, &v0)?;
            let vp = StateVector::lincomb(&[(1.0, &v0), (h0, &a0)]);
            let ap = p.eval_acceleration(t1, &x_pred, &vp)?;
            let x1 = StateVector::lincomb(&[(1.0, &x0), (0.5 * h0, &vp), (0.5 * h0, &v0)]);
            let v1 = StateVector::lincomb(&[(1.0, &v0), (0.5 * h0, &ap), (0.5 * h0, &a0)]);
            (x1, v1)
        }
    };
    let denom = v1.norm() + v_norm;
    let h1 = if denom == 0.0 {
        h0
    } else {
        (2.0 * ((x1.norm() - x_norm) / denom.max(EPS_FLOOR)).abs()).max(dt / 1000.0)
    };
    let steps = steps_per_global(dt, h1);
    Ok(InitialStep {
        h0,
        h1,
        steps,
        h: dt / steps as f64,
    })
}

/// Outcome of the step-size policy for one completed local step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepDecision {
    /// Accept; continue with `2h`.
    Double,
    /// Accept; keep `h`.
    Maintain,
    /// Accept; continue with `h/2`.
    HalveContinue,
    /// Reject; repeat the step from node `n` with `h/2`.
    HalveRedo,
}

impl StepDecision {
    pub fn accepts(self) -> bool {
        !matches!(self, StepDecision::HalveRedo)
    }
}

/// Controller memory for one integration run.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    pub tol: f64,
    /// Error of the last accepted step (`1` before any step).
    pub eps_prev: f64,
    /// Method order `p` (local error `O(h^{p+1})`).
    pub order: u32,
    pub h: f64,
    /// Local steps left before the next global node, counted from the front
    /// that the step under evaluation would establish.
    pub steps_to_go: u64,
    /// Global step `Δt`.
    pub dt: f64,
}

impl ControllerState {
    pub fn new(tol: f64, order: u32, h: f64, steps_to_go: u64, dt: f64) -> Self {
        ControllerState {
            tol,
            eps_prev: 1.0,
            order,
            h,
            steps_to_go,
            dt,
        }
    }

    /// Time left to the next global node, `s·h`.
    pub fn remaining(&self) -> f64 {
        self.steps_to_go as f64 * self.h
    }

    /// Applies a decision to `h` and `steps_to_go`. For [`StepDecision::HalveRedo`]
    /// the rejected step is returned to the budget before halving.
    pub fn apply(&mut self, decision: StepDecision) {
        match decision {
            StepDecision::Double => {
                self.h *= 2.0;
                self.steps_to_go /= 2;
            }
            StepDecision::Maintain => {}
            StepDecision::HalveContinue => {
                self.h *= 0.5;
                self.steps_to_go *= 2;
            }
            StepDecision::HalveRedo => {
                self.h *= 0.5;
                self.steps_to_go = 2 * (self.steps_to_go + 1);
            }
        }
    }
}

/// PI step-size scale factor `C ≈ h_{n+1}/h_n`.
///
/// Uses the PI law while both the previous and the new error are below
/// tolerance, and the I law `(tol/ε)^{1/p}` otherwise.
pub fn pi_scale_factor(eps_next: f64, state: &ControllerState) -> f64 {
    let tol = state.tol;
    let p = state.order as f64;
    let eps = eps_next.max(EPS_FLOOR);
    if state.eps_prev < tol && eps_next < tol {
        let eps_prev = state.eps_prev.max(EPS_FLOOR);
        (tol / eps).powf(0.7 / (p + 1.0)) * (eps_prev / tol).powf(0.4 / (p + 1.0))
    } else {
        (tol / eps).powf(1.0 / p)
    }
}

/// The six-rule step policy. `state.steps_to_go` must already count the
/// step under evaluation as taken.
pub fn decide_step(c: f64, eps_next: f64, state: &ControllerState) -> StepDecision {
    let s = state.steps_to_go;
    if c > 2.0 {
        if s > 3 && s.is_multiple_of(2) {
            StepDecision::Double
        } else {
            StepDecision::Maintain
        }
    } else if c >= 1.0 {
        StepDecision::Maintain
    } else if eps_next <= state.tol {
        StepDecision::HalveContinue
    } else {
        StepDecision::HalveRedo
    }
}

/// Cubic Hermite interpolant on `[t_a, t_a + h]` evaluated at `t_a + θh`.
///
/// At `θ = ½` this is `½(x_a + x_b) − (h/8)(v_b − v_a)`.
pub fn hermite_eval(
    x_a: &StateVector,
    x_b: &StateVector,
    v_a: &StateVector,
    v_b: &StateVector,
    h: f64,
    theta: f64,
) -> IntegrateResult<StateVector> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(IntegrateError::Domain(format!(
            "interpolation parameter {theta} outside [0, 1]"
        )));
    }
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    Ok(StateVector::lincomb(&[
        (h00, x_a),
        (h01, x_b),
        (h10 * h, v_a),
        (h11 * h, v_b),
    ]))
}
