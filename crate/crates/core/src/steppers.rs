//! One-step startup methods and two-step PECE methods for the three problem
//! families.
//!
//! Every stepper returns both the predicted and the corrected solution, and
//! the derivatives re-evaluated at the corrected state. `ce_passes` is the
//! `m` of PE(CE)^m; `1` gives plain PECE.

use std::fmt;
use std::str::FromStr;

use crate::error::{IntegrateError, IntegrateResult};
use crate::history::{HistoryWindow, Node};
use crate::problem::{DynamicProblem, FirstOrderProblem, KinematicProblem};
use crate::vector::StateVector;

/// Corrector used by the second-order and dynamic two-step methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrectorVariant {
    /// Mean of the type #1 and type #2 correctors, as printed.
    Averaged,
    Type1,
    /// The only printed corrector whose residual vanishes through third order.
    #[default]
    Type2,
}

/// Weights on `h·v` and `h²·a` at nodes `(n+1, n, n-1)`.
struct DerivativeWeights {
    velocity: [f64; 3],
    acceleration: [f64; 3],
}

impl CorrectorVariant {
    pub const ALL: [CorrectorVariant; 3] = [
        CorrectorVariant::Averaged,
        CorrectorVariant::Type1,
        CorrectorVariant::Type2,
    ];

    fn weights(self) -> DerivativeWeights {
        match self {
            CorrectorVariant::Averaged => DerivativeWeights {
                velocity: [1.0 / 24.0, 14.0 / 24.0, 1.0 / 24.0],
                acceleration: [10.0 / 72.0, 51.0 / 72.0, -1.0 / 72.0],
            },
            CorrectorVariant::Type1 => DerivativeWeights {
                velocity: [1.0 / 9.0, 5.0 / 9.0, 0.0],
                acceleration: [2.0 / 9.0, 6.0 / 9.0, 0.0],
            },
            CorrectorVariant::Type2 => DerivativeWeights {
                velocity: [-1.0 / 36.0, 22.0 / 36.0, 3.0 / 36.0],
                acceleration: [2.0 / 36.0, 27.0 / 36.0, -1.0 / 36.0],
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CorrectorVariant::Averaged => "averaged",
            CorrectorVariant::Type1 => "type1",
            CorrectorVariant::Type2 => "type2",
        }
    }
}

impl fmt::Display for CorrectorVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CorrectorVariant {
    type Err = IntegrateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "averaged" => Ok(CorrectorVariant::Averaged),
            "type1" => Ok(CorrectorVariant::Type1),
            "type2" => Ok(CorrectorVariant::Type2),
            other => Err(IntegrateError::Config(format!(
                "unknown corrector variant '{other}' (expected averaged, type1 or type2)"
            ))),
        }
    }
}

/// Outcome of one local step from `t[n]` to `t[n+1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub t: f64,
    pub x_pred: StateVector,
    pub x: StateVector,
    /// Predicted velocity, for the family that integrates velocity.
    pub v_pred: Option<StateVector>,
    /// Velocity at the corrected state (re-evaluated, or corrected for the
    /// dynamic family).
    pub v: StateVector,
    /// Acceleration re-evaluated at the corrected state.
    pub a: Option<StateVector>,
}

impl StepResult {
    pub fn into_node(self) -> Node {
        Node::new(self.t, self.x, self.v, self.a)
    }
}

fn check_step(h: f64) -> IntegrateResult<()> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(IntegrateError::Domain(format!(
            "step size must be positive, got {h}"
        )))
    }
}

fn two_nodes(history: &HistoryWindow) -> IntegrateResult<(&Node, &Node)> {
    let prev = history.previous().ok_or_else(|| {
        IntegrateError::InvalidState("two-step method needs nodes n-1 and n".into())
    })?;
    Ok((prev, history.current()))
}

// ---------------------------------------------------------------------------
// First-order family: dx/dt = v(t, x)
// ---------------------------------------------------------------------------

/// Heun startup: forward Euler predictor, trapezoidal corrector.
pub fn heun_start(
    p: &FirstOrderProblem,
    h: f64,
    start: &Node,
    ce_passes: u32,
) -> IntegrateResult<StepResult> {
    check_step(h)?;
    let t1 = start.t + h;
    let (x0, v0) = (&start.x, &start.v);
    let x_pred = StateVector::lincomb(&[(1.0, x0), (h, v0)]);
    let mut v = p.eval_velocity(t1, &x_pred)?;
    let mut x = x_pred.clone();
    for pass in 0..ce_passes.max(1) {
        if pass > 0 {
            v = p.eval_velocity(t1, &x)?;
        }
        x = StateVector::lincomb(&[(1.0, x0), (0.5 * h, &v), (0.5 * h, v0)]);
    }
    let v = p.eval_velocity(t1, &x)?;
    Ok(StepResult {
        t: t1,
        x_pred,
        x,
        v_pred: None,
        v,
        a: None,
    })
}

/// Two-step PECE: BDF2-shaped predictor followed by the BDF2 corrector.
pub fn pece_first_order_step(
    p: &FirstOrderProblem,
    history: &HistoryWindow,
    ce_passes: u32,
) -> IntegrateResult<StepResult> {
    let (prev, curr) = two_nodes(history)?;
    let h = history.h();
    let t1 = curr.t + h;
    let x_pred = StateVector::lincomb(&[
        (4.0 / 3.0, &curr.x),
        (-1.0 / 3.0, &prev.x),
        (4.0 * h / 3.0, &curr.v),
        (-2.0 * h / 3.0, &prev.v),
    ]);
    let mut v = p.eval_velocity(t1, &x_pred)?;
    let mut x = x_pred.clone();
    for pass in 0..ce_passes.max(1) {
        if pass > 0 {
            v = p.eval_velocity(t1, &x)?;
        }
        x = StateVector::lincomb(&[
            (4.0 / 3.0, &curr.x),
            (-1.0 / 3.0, &prev.x),
            (2.0 * h / 3.0, &v),
        ]);
    }
    let v = p.eval_velocity(t1, &x)?;
    Ok(StepResult {
        t: t1,
        x_pred,
        x,
        v_pred: None,
        v,
        a: None,
    })
}

// ---------------------------------------------------------------------------
// Second-order family: v(t, x) and a(t, x, v) prescribed
// ---------------------------------------------------------------------------

/// `x₀ + h/2 (v₁ + v₀) − h²/12 (a₁ − a₀)`.
fn jerk_corrected_displacement(
    h: f64,
    x0: &StateVector,
    v0: &StateVector,
    a0: &StateVector,
    v1: &StateVector,
    a1: &StateVector,
) -> StateVector {
    let h2 = h * h;
    StateVector::lincomb(&[
        (1.0, x0),
        (0.5 * h, v1),
        (0.5 * h, v0),
        (-h2 / 12.0, a1),
        (h2 / 12.0, a0),
    ])
}

/// Displacement predictor shared by the second-order and dynamic families.
fn second_order_predictor(h: f64, prev: &Node, curr: &Node) -> StateVector {
    let h2 = h * h;
    StateVector::lincomb(&[
        (4.0 / 3.0, &curr.x),
        (-1.0 / 3.0, &prev.x),
        (h / 2.0, &curr.v),
        (h / 6.0, &prev.v),
        (31.0 * h2 / 36.0, curr.accel()),
        (-h2 / 36.0, prev.accel()),
    ])
}

fn second_order_corrector(
    variant: CorrectorVariant,
    h: f64,
    prev: &Node,
    curr: &Node,
    v1: &StateVector,
    a1: &StateVector,
) -> StateVector {
    let w = variant.weights();
    let h2 = h * h;
    StateVector::lincomb(&[
        (4.0 / 3.0, &curr.x),
        (-1.0 / 3.0, &prev.x),
        (h * w.velocity[0], v1),
        (h * w.velocity[1], &curr.v),
        (h * w.velocity[2], &prev.v),
        (h2 * w.acceleration[0], a1),
        (h2 * w.acceleration[1], curr.accel()),
        (h2 * w.acceleration[2], prev.accel()),
    ])
}

/// Startup for the second-order family: Taylor predictor, jerk-corrected
/// trapezoidal corrector.
pub fn startup_second_order(
    p: &KinematicProblem,
    h: f64,
    start: &Node,
    ce_passes: u32,
) -> IntegrateResult<StepResult> {
    check_step(h)?;
    let t1 = start.t + h;
    let (x0, v0, a0) = (&start.x, &start.v, start.accel());
    let x_pred = StateVector::lincomb(&[(1.0, x0), (h, v0), (0.5 * h * h, a0)]);
    let (mut v, mut a) = p.eval(t1, &x_pred)?;
    let mut x = x_pred.clone();
    for pass in 0..ce_passes.max(1) {
        if pass > 0 {
            (v, a) = p.eval(t1, &x)?;
        }
        x = jerk_corrected_displacement(h, x0, v0, a0, &v, &a);
    }
    let (v, a) = p.eval(t1, &x)?;
    Ok(StepResult {
        t: t1,
        x_pred,
        x,
        v_pred: None,
        v,
        a: Some(a),
    })
}

/// Two-step PECE for the second-order family.
pub fn pece_second_order_step(
    p: &KinematicProblem,
    history: &HistoryWindow,
    variant: CorrectorVariant,
    ce_passes: u32,
) -> IntegrateResult<StepResult> {
    let (prev, curr) = two_nodes(history)?;
    let h = history.h();
    let t1 = curr.t + h;
    let x_pred = second_order_predictor(h, prev, curr);
    let (mut v, mut a) = p.eval(t1, &x_pred)?;
    let mut x = x_pred.clone();
    for pass in 0..ce_passes.max(1) {
        if pass > 0 {
            (v, a) = p.eval(t1, &x)?;
        }
        x = second_order_corrector(variant, h, prev, curr, &v, &a);
    }
    let (v, a) = p.eval(t1, &x)?;
    Ok(StepResult {
        t: t1,
        x_pred,
        x,
        v_pred: None,
        v,
        a: Some(a),
    })
}

// ---------------------------------------------------------------------------
// Dynamic family: a(t, x, v) prescribed, x and v solved
// ---------------------------------------------------------------------------

/// Startup for the dynamic family: paired Taylor/Euler predictors and
/// paired trapezoidal correctors.
pub fn startup_dynamic(
    p: &DynamicProblem,
    h: f64,
    start: &Node,
    ce_passes: u32,
) -> IntegrateResult<StepResult> {
    check_step(h)?;
    let t1 = start.t + h;
    let (x0, v0, a0) = (&start.x, &start.v, start.accel());
    let x_pred = StateVector::lincomb(&[(1.0, x0), (h, v0), (0.5 * h * h, a0)]);
    let v_pred = StateVector::lincomb(&[(1.0, v0), (h, a0)]);
    let mut a = p.eval_acceleration(t1, &x_pred, &v_pred)?;
    let mut x = x_pred.clone();
    let mut v = v_pred.clone();
    for pass in 0..ce_passes.max(1) {
        if pass > 0 {
            a = p.eval_acceleration(t1, &x, &v)?;
        }
        let v_in = if pass == 0 { &v_pred } else { &v };
        x = jerk_corrected_displacement(h, x0, v0, a0, v_in, &a);
        v = StateVector::lincomb(&[(1.0, v0), (0.5 * h, &a), (0.5 * h, a0)]);
    }
    let a = p.eval_acceleration(t1, &x, &v)?;
    Ok(StepResult {
        t: t1,
        x_pred,
        x,
        v_pred: Some(v_pred),
        v,
        a: Some(a),
    })
}

/// Two-step PECE for the dynamic family.
pub fn pece_dynamic_step(
    p: &DynamicProblem,
    history: &HistoryWindow,
    variant: CorrectorVariant,
    ce_passes: u32,
) -> IntegrateResult<StepResult> {
    let (prev, curr) = two_nodes(history)?;
    let h = history.h();
    let t1 = curr.t + h;
    let x_pred = second_order_predictor(h, prev, curr);
    let v_pred = StateVector::lincomb(&[
        (4.0 / 3.0, &curr.v),
        (-1.0 / 3.0, &prev.v),
        (4.0 * h / 3.0, curr.accel()),
        (-2.0 * h / 3.0, prev.accel()),
    ]);
    let mut a = p.eval_acceleration(t1, &x_pred, &v_pred)?;
    let mut x = x_pred.clone();
    let mut v = v_pred.clone();
    for pass in 0..ce_passes.max(1) {
        if pass > 0 {
            a = p.eval_acceleration(t1, &x, &v)?;
        }
        let v_in = if pass == 0 { v_pred.clone() } else { v.clone() };
        x = second_order_corrector(variant, h, prev, curr, &v_in, &a);
        v = StateVector::lincomb(&[
            (4.0 / 3.0, &curr.v),
            (-1.0 / 3.0, &prev.v),
            (2.0 * h / 3.0, &a),
        ]);
    }
    let a = p.eval_acceleration(t1, &x, &v)?;
    Ok(StepResult {
        t: t1,
        x_pred,
        x,
        v_pred: Some(v_pred),
        v,
        a: Some(a),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stencil;
    use approx::assert_relative_eq;

    fn sv(v: f64) -> StateVector {
        StateVector::new(vec![v])
    }

    fn monomial(k: u32, t: f64) -> f64 {
        t.powi(k as i32)
    }

    fn d_monomial(k: u32, t: f64) -> f64 {
        if k == 0 {
            0.0
        } else {
            k as f64 * t.powi(k as i32 - 1)
        }
    }

    fn dd_monomial(k: u32, t: f64) -> f64 {
        if k < 2 {
            0.0
        } else {
            (k * (k - 1)) as f64 * t.powi(k as i32 - 2)
        }
    }

    /// First-order problem whose velocity is the exact derivative of `t^k`.
    fn first_order_monomial(k: u32) -> FirstOrderProblem {
        FirstOrderProblem::new(move |t, _| sv(d_monomial(k, t)), sv(0.0), 1.0, 1)
    }

    fn kinematic_monomial(k: u32) -> KinematicProblem {
        KinematicProblem::new(
            move |t, _| sv(d_monomial(k, t)),
            move |t, _, _| sv(dd_monomial(k, t)),
            sv(0.0),
            1.0,
            1,
        )
    }

    fn first_order_node(k: u32, t: f64) -> Node {
        Node::new(t, sv(monomial(k, t)), sv(d_monomial(k, t)), None)
    }

    fn second_order_node(k: u32, t: f64) -> Node {
        Node::new(
            t,
            sv(monomial(k, t)),
            sv(d_monomial(k, t)),
            Some(sv(dd_monomial(k, t))),
        )
    }

    #[test]
    fn heun_stationary_field() {
        let p = FirstOrderProblem::new(|_, x| 0.0 * x, sv(3.0), 1.0, 1);
        let r = heun_start(&p, 0.1, &Node::new(0.0, sv(3.0), sv(0.0), None), 1).unwrap();
        assert_eq!(r.x_pred, sv(3.0));
        assert_eq!(r.x, sv(3.0));
    }

    #[test]
    fn heun_exponential_growth() {
        let p = FirstOrderProblem::new(|_, x| x.clone(), sv(1.0), 1.0, 1);
        let r = heun_start(&p, 0.1, &Node::new(0.0, sv(1.0), sv(1.0), None), 1).unwrap();
        assert_relative_eq!(r.x_pred[0], 1.1, max_relative = 1e-15);
        assert_relative_eq!(r.x[0], 1.105, max_relative = 1e-15);
        assert!((r.x[0] - 0.1f64.exp()).abs() < 0.1f64.powi(3));
        // derivative is re-evaluated at the corrected state
        assert_eq!(r.v, r.x);
    }

    #[test]
    fn heun_reproduces_quadratic() {
        for h in [0.1, 0.37, 2.0] {
            let p = first_order_monomial(2);
            let r = heun_start(&p, h, &first_order_node(2, 0.0), 1).unwrap();
            assert_relative_eq!(r.x[0], h * h, max_relative = 1e-14);
        }
    }

    #[test]
    fn first_order_pece_examples() {
        let p = FirstOrderProblem::new(|_, x| 0.0 * x, sv(2.0), 1.0, 1);
        let c = Node::new(0.0, sv(2.0), sv(0.0), None);
        let w = HistoryWindow::with_nodes(c.clone(), Node { t: 0.5, ..c }, 0.5);
        assert_eq!(pece_first_order_step(&p, &w, 1).unwrap().x, sv(2.0));

        let h = 0.25;
        let quad = HistoryWindow::with_nodes(first_order_node(2, 0.0), first_order_node(2, h), h);
        let r = pece_first_order_step(&first_order_monomial(2), &quad, 1).unwrap();
        assert_relative_eq!(r.x_pred[0], 4.0 * h * h, max_relative = 1e-14);
        assert_relative_eq!(r.x[0], 4.0 * h * h, max_relative = 1e-14);

        let cubic = HistoryWindow::with_nodes(first_order_node(3, 0.0), first_order_node(3, h), h);
        let r = pece_first_order_step(&first_order_monomial(3), &cubic, 1).unwrap();
        assert_relative_eq!(r.x_pred[0], 16.0 * h.powi(3) / 3.0, max_relative = 1e-14);
        assert!((r.x_pred[0] - 8.0 * h.powi(3)).abs() > 1e-6);
    }

    #[test]
    fn second_order_startup_examples() {
        let p = KinematicProblem::new(|_, x| 0.0 * x, |_, x, _| 0.0 * x, sv(1.5), 1.0, 1);
        let start = Node::new(0.0, sv(1.5), sv(0.0), Some(sv(0.0)));
        assert_eq!(startup_second_order(&p, 0.2, &start, 1).unwrap().x, sv(1.5));

        for (k, h) in [(3, 0.3), (4, 0.3), (4, 1.0)] {
            let r = startup_second_order(&kinematic_monomial(k), h, &second_order_node(k, 0.0), 1)
                .unwrap();
            assert_relative_eq!(r.x[0], h.powi(k as i32), max_relative = 1e-14);
        }
    }

    #[test]
    fn second_order_pece_examples() {
        let h = 0.5;
        let cubic = HistoryWindow::with_nodes(second_order_node(3, 0.0), second_order_node(3, h), h);
        let r = pece_second_order_step(&kinematic_monomial(3), &cubic, CorrectorVariant::Type2, 1)
            .unwrap();
        assert_relative_eq!(r.x_pred[0], 8.0 * h.powi(3), max_relative = 1e-14);

        let quad = HistoryWindow::with_nodes(second_order_node(2, 0.0), second_order_node(2, h), h);
        let r = pece_second_order_step(&kinematic_monomial(2), &quad, CorrectorVariant::Type2, 1)
            .unwrap();
        assert_relative_eq!(r.x[0], 4.0 * h * h, max_relative = 1e-14);
        let r = pece_second_order_step(&kinematic_monomial(2), &quad, CorrectorVariant::Averaged, 1)
            .unwrap();
        assert_relative_eq!(r.x[0], 13.0 * h * h / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn dynamic_startup_examples() {
        // uniform motion
        let p = DynamicProblem::new(|_, x, _| 0.0 * x, sv(1.0), sv(2.0), 1.0, 1);
        let start = Node::new(0.0, sv(1.0), sv(2.0), Some(sv(0.0)));
        let r = startup_dynamic(&p, 0.25, &start, 1).unwrap();
        assert_eq!(r.v, sv(2.0));
        assert_eq!(r.x, sv(1.5));

        // constant acceleration
        let g = -9.5;
        let p = DynamicProblem::new(move |_, _, _| sv(g), sv(0.5), sv(1.0), 1.0, 1);
        let start = Node::new(0.0, sv(0.5), sv(1.0), Some(sv(g)));
        let h = 0.125;
        let r = startup_dynamic(&p, h, &start, 1).unwrap();
        assert_relative_eq!(r.v[0], 1.0 + g * h, max_relative = 1e-15);
        assert_relative_eq!(r.x[0], 0.5 + h + 0.5 * g * h * h, max_relative = 1e-15);

        // harmonic oscillator
        let p = DynamicProblem::new(|_, x, _| -x, sv(1.0), sv(0.0), 1.0, 1);
        let start = Node::new(0.0, sv(1.0), sv(0.0), Some(sv(-1.0)));
        let h = 0.1;
        let r = startup_dynamic(&p, h, &start, 1).unwrap();
        assert!((r.x[0] - h.cos()).abs() < h.powi(5), "{}", r.x[0] - h.cos());
    }

    #[test]
    fn dynamic_pece_examples() {
        let h = 0.25;
        // linear motion with a = 0
        let p = DynamicProblem::new(|_, x, _| 0.0 * x, sv(0.0), sv(3.0), 1.0, 1);
        let lin = |t: f64| Node::new(t, sv(1.0 + 3.0 * t), sv(3.0), Some(sv(0.0)));
        let w = HistoryWindow::with_nodes(lin(0.0), lin(h), h);
        for variant in CorrectorVariant::ALL {
            let r = pece_dynamic_step(&p, &w, variant, 1).unwrap();
            assert_relative_eq!(r.x[0], 1.0 + 6.0 * h, max_relative = 1e-14);
            assert_eq!(r.v, sv(3.0));
        }

        // v = t² under a = 2t
        let p = DynamicProblem::new(|t, _, _| sv(2.0 * t), sv(0.0), sv(0.0), 1.0, 1);
        let node = |t: f64| Node::new(t, sv(t.powi(3) / 3.0), sv(t * t), Some(sv(2.0 * t)));
        let w = HistoryWindow::with_nodes(node(0.0), node(h), h);
        let r = pece_dynamic_step(&p, &w, CorrectorVariant::Type2, 1).unwrap();
        assert_relative_eq!(r.v[0], 4.0 * h * h, max_relative = 1e-14);

        // constant acceleration
        let g = 4.0;
        let p = DynamicProblem::new(move |_, _, _| sv(g), sv(0.0), sv(0.0), 1.0, 1);
        let node = |t: f64| Node::new(t, sv(0.5 * g * t * t), sv(g * t), Some(sv(g)));
        let w = HistoryWindow::with_nodes(node(0.0), node(h), h);
        let r = pece_dynamic_step(&p, &w, CorrectorVariant::Type2, 1).unwrap();
        assert_relative_eq!(r.v[0], 2.0 * g * h, max_relative = 1e-14);
        assert_relative_eq!(r.x[0], 2.0 * g * h * h, max_relative = 1e-14);
    }

    #[test]
    fn two_step_requires_primed_history() {
        let p = first_order_monomial(1);
        let w = HistoryWindow::start(first_order_node(1, 0.0), 0.1);
        assert!(pece_first_order_step(&p, &w, 1).is_err());
    }

    #[test]
    fn non_finite_callback_is_reported() {
        let p = FirstOrderProblem::new(|_, x| (f64::NAN) * x, sv(1.0), 1.0, 1);
        let err = heun_start(&p, 0.1, &Node::new(0.0, sv(1.0), sv(0.0), None), 1).unwrap_err();
        assert!(matches!(err, IntegrateError::Evaluation { .. }));
    }

    /// Monomial exactness of each stepper must agree with the exactness
    /// degree of the corresponding catalogued stencil.
    #[test]
    fn steppers_agree_with_stencil_degrees() {
        let h = 1.0;
        let exact = |k: u32| 2f64.powi(k as i32);
        let is_exact = |got: f64, k: u32| (got - exact(k)).abs() < 1e-9;
        let degree = |s: stencil::Stencil| stencil::exactness_degree(&s).unwrap();

        for k in 0..=5 {
            let w = HistoryWindow::with_nodes(first_order_node(k, 0.0), first_order_node(k, h), h);
            let r = pece_first_order_step(&first_order_monomial(k), &w, 1).unwrap();
            assert_eq!(is_exact(r.x_pred[0], k), k <= degree(stencil::bdf2_predictor()), "k={k}");
            assert_eq!(is_exact(r.x[0], k), k <= degree(stencil::bdf2_corrector()), "k={k}");

            let r = heun_start(&first_order_monomial(k), h, &first_order_node(k, h), 1).unwrap();
            assert_eq!(is_exact(r.x_pred[0], k), k <= degree(stencil::heun_predictor()));
            assert_eq!(is_exact(r.x[0], k), k <= degree(stencil::heun_corrector()));

            let r = startup_second_order(&kinematic_monomial(k), h, &second_order_node(k, h), 1)
                .unwrap();
            assert_eq!(is_exact(r.x_pred[0], k), k <= degree(stencil::taylor_startup_predictor()));
            assert_eq!(is_exact(r.x[0], k), k <= degree(stencil::jerk_startup_corrector()));

            let w = HistoryWindow::with_nodes(second_order_node(k, 0.0), second_order_node(k, h), h);
            for (variant, s) in [
                (CorrectorVariant::Type2, stencil::type2_corrector()),
                (CorrectorVariant::Type1, stencil::type1_corrector()),
                (CorrectorVariant::Averaged, stencil::averaged_corrector()),
            ] {
                let r = pece_second_order_step(&kinematic_monomial(k), &w, variant, 1).unwrap();
                assert_eq!(is_exact(r.x_pred[0], k), k <= degree(stencil::second_order_predictor()));
                assert_eq!(is_exact(r.x[0], k), k <= degree(s), "{variant} k={k}");
            }

            // velocity formulas of the dynamic family, on v(t) = t^k
            let p = DynamicProblem::new(move |t, _, _| sv(d_monomial(k, t)), sv(0.0), sv(0.0), 1.0, 1);
            let node = |t: f64| Node::new(t, sv(0.0), sv(monomial(k, t)), Some(sv(d_monomial(k, t))));
            let w = HistoryWindow::with_nodes(node(0.0), node(h), h);
            let r = pece_dynamic_step(&p, &w, CorrectorVariant::Type2, 1).unwrap();
            let vp = r.v_pred.unwrap()[0];
            assert_eq!(is_exact(vp, k), k <= degree(stencil::velocity_predictor()));
            assert_eq!(is_exact(r.v[0], k), k <= degree(stencil::velocity_corrector()));
            let r = startup_dynamic(&p, h, &node(h), 1).unwrap();
            assert_eq!(is_exact(r.v_pred.unwrap()[0], k), k <= degree(stencil::velocity_startup_predictor()));
            assert_eq!(is_exact(r.v[0], k), k <= degree(stencil::velocity_startup_corrector()));
        }
    }

    #[test]
    fn time_translation_is_bit_identical() {
        let p = FirstOrderProblem::new(|_, x| StateVector::new(vec![-x[0] * x[1], x[0] - 0.3 * x[1]]), [1.0, 0.5], 1.0, 1);
        let v = |x: &StateVector| (p.velocity)(0.0, x);
        let x0: StateVector = [0.9, 0.4].into();
        let x1: StateVector = [0.85, 0.45].into();
        for tau in [0.0, 1.75, 1234.5] {
            let w = HistoryWindow::with_nodes(
                Node::new(tau, x0.clone(), v(&x0), None),
                Node::new(tau + 0.1, x1.clone(), v(&x1), None),
                0.1,
            );
            let r = pece_first_order_step(&p, &w, 2).unwrap();
            let w0 = HistoryWindow::with_nodes(
                Node::new(0.0, x0.clone(), v(&x0), None),
                Node::new(0.1, x1.clone(), v(&x1), None),
                0.1,
            );
            let r0 = pece_first_order_step(&p, &w0, 2).unwrap();
            assert_eq!(r.x, r0.x);
            assert_eq!(r.x_pred, r0.x_pred);
        }
    }

    #[test]
    fn linear_callbacks_superpose() {
        let accel = |_: f64, x: &StateVector, v: &StateVector| {
            StateVector::new(vec![-4.0 * x[0] - 0.2 * v[0] + x[1], -x[1] + 0.5 * v[0]])
        };
        let p = DynamicProblem::new(accel, [0.0, 0.0], [0.0, 0.0], 1.0, 1);
        let mk = |x: [f64; 2], v: [f64; 2], t: f64| {
            let (x, v) = (StateVector::from(x), StateVector::from(v));
            let a = accel(t, &x, &v);
            Node::new(t, x, v, Some(a))
        };
        let h = 0.05;
        let wa = HistoryWindow::with_nodes(mk([1.0, 0.0], [0.0, 1.0], 0.0), mk([0.99, 0.05], [-0.2, 0.98], h), h);
        let wb = HistoryWindow::with_nodes(mk([0.0, 2.0], [1.0, 0.0], 0.0), mk([0.05, 1.9], [0.9, -0.1], h), h);
        let wsum = HistoryWindow::with_nodes(mk([1.0, 2.0], [1.0, 1.0], 0.0), mk([1.04, 1.95], [0.7, 0.88], h), h);
        for variant in CorrectorVariant::ALL {
            let ra = pece_dynamic_step(&p, &wa, variant, 1).unwrap();
            let rb = pece_dynamic_step(&p, &wb, variant, 1).unwrap();
            let rs = pece_dynamic_step(&p, &wsum, variant, 1).unwrap();
            let dx = &(&ra.x + &rb.x) - &rs.x;
            let dv = &(&ra.v + &rb.v) - &rs.v;
            assert!(dx.norm() < 64.0 * f64::EPSILON && dv.norm() < 64.0 * f64::EPSILON);
        }
    }

    #[test]
    fn extra_correction_passes_converge_toward_implicit_solution() {
        // for v = -x the implicit BDF2 solution is available in closed form
        let p = FirstOrderProblem::new(|_, x| -x, sv(1.0), 1.0, 1);
        let h: f64 = 0.1;
        let x0 = 1.0;
        let x1 = (-h).exp();
        let w = HistoryWindow::with_nodes(
            Node::new(0.0, sv(x0), sv(-x0), None),
            Node::new(h, sv(x1), sv(-x1), None),
            h,
        );
        let implicit = (4.0 * x1 - x0) / 3.0 / (1.0 + 2.0 * h / 3.0);
        let e1 = (pece_first_order_step(&p, &w, 1).unwrap().x[0] - implicit).abs();
        let e4 = (pece_first_order_step(&p, &w, 4).unwrap().x[0] - implicit).abs();
        assert!(e4 < e1 * 1e-2, "{e1} {e4}");
    }

    #[test]
    fn variant_parsing() {
        for v in CorrectorVariant::ALL {
            assert_eq!(v.name().parse::<CorrectorVariant>().unwrap(), v);
        }
        assert!("type3".parse::<CorrectorVariant>().is_err());
        assert_eq!(CorrectorVariant::default(), CorrectorVariant::Type2);
    }
}
