//! Full integration runs: startup step, controlled two-step loop, global-node
//! bookkeeping and convergence studies.

use std::fmt;
use std::str::FromStr;

use log::{debug, warn};

use crate::control::{
    decide_step, hermite_eval, initial_step_size, pi_scale_factor, steps_per_global,
    truncation_error, ControllerState, StepDecision, TOL_RANGE,
};
use crate::error::{IntegrateError, IntegrateResult};
use crate::history::{HistoryWindow, Node};
use crate::problem::{DynamicProblem, FirstOrderProblem, KinematicProblem, Problem};
use crate::problems::analytic::AnalyticProblem;
use crate::solution::{GlobalRecord, RunStatistics, SolutionSeries, TraceEntry};
use crate::steppers::{self, CorrectorVariant, StepResult};

/// Smallest admissible local step, as a fraction of the global step.
pub const MIN_STEP_FRACTION: f64 = 1.0 / (1u64 << 40) as f64;

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationConfig {
    pub tol: f64,
    /// `m` in PE(CE)^m.
    pub ce_passes: u32,
    pub variant: CorrectorVariant,
    /// Fixed number of local steps per global step; disables the controller.
    pub fixed_steps: Option<u64>,
    /// Permit a tolerance outside `[1e-8, 1e-2]` (logged as a warning).
    pub allow_any_tol: bool,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            tol: 1e-4,
            ce_passes: 1,
            variant: CorrectorVariant::default(),
            fixed_steps: None,
            allow_any_tol: false,
        }
    }
}

impl IntegrationConfig {
    pub fn with_tol(tol: f64) -> Self {
        IntegrationConfig {
            tol,
            ..Default::default()
        }
    }

    pub fn fixed(steps_per_global: u64) -> Self {
        IntegrationConfig {
            fixed_steps: Some(steps_per_global),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> IntegrateResult<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(IntegrateError::Config(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if !(TOL_RANGE.0..=TOL_RANGE.1).contains(&self.tol) {
            if self.allow_any_tol {
                warn!(
                    "tolerance {:e} outside the usual range [{:e}, {:e}]",
                    self.tol, TOL_RANGE.0, TOL_RANGE.1
                );
            } else {
                return Err(IntegrateError::Config(format!(
                    "tolerance {:e} outside [{:e}, {:e}]",
                    self.tol, TOL_RANGE.0, TOL_RANGE.1
                )));
            }
        }
        if self.ce_passes == 0 {
            return Err(IntegrateError::Config("ce_passes must be at least 1".into()));
        }
        if self.fixed_steps == Some(0) {
            return Err(IntegrateError::Config(
                "fixed step count must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// An integration that stopped early, with everything computed up to the
/// failure.
#[derive(Debug, Clone)]
pub struct Aborted {
    pub error: IntegrateError,
    pub partial: SolutionSeries,
}

impl fmt::Display for Aborted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "integration aborted after {} global node(s): {}",
            self.partial.records.len().saturating_sub(1),
            self.error
        )
    }
}

impl std::error::Error for Aborted {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl From<Aborted> for IntegrateError {
    fn from(a: Aborted) -> Self {
        a.error
    }
}

/// Family-specific pieces of the integration loop.
trait Family {
    fn initial_node(&self) -> IntegrateResult<Node>;
    fn startup(&self, h: f64, start: &Node, cfg: &IntegrationConfig) -> IntegrateResult<StepResult>;
    fn step(&self, history: &HistoryWindow, cfg: &IntegrationConfig) -> IntegrateResult<StepResult>;

    fn error(&self, r: &StepResult) -> IntegrateResult<f64> {
        truncation_error(&r.x, &r.x_pred)
    }

    /// Node at `prev.t + θh` interpolated on `[prev, curr]`.
    fn interpolate(&self, prev: &Node, curr: &Node, h: f64, theta: f64) -> IntegrateResult<Node>;

    fn record(&self, node: &Node) -> GlobalRecord {
        GlobalRecord {
            t: node.t,
            x: node.x.clone(),
            v: None,
        }
    }
}

impl Family for FirstOrderProblem {
    fn initial_node(&self) -> IntegrateResult<Node> {
        let v0 = self.eval_velocity(0.0, &self.x0)?;
        Ok(Node::new(0.0, self.x0.clone(), v0, None))
    }

    fn startup(&self, h: f64, start: &Node, cfg: &IntegrationConfig) -> IntegrateResult<StepResult> {
        steppers::heun_start(self, h, start, cfg.ce_passes)
    }

    fn step(&self, history: &HistoryWindow, cfg: &IntegrationConfig) -> IntegrateResult<StepResult> {
        steppers::pece_first_order_step(self, history, cfg.ce_passes)
    }

    fn interpolate(&self, prev: &Node, curr: &Node, h: f64, theta: f64) -> IntegrateResult<Node> {
        let t = curr.t - (1.0 - theta) * h;
        let x = hermite_eval(&prev.x, &curr.x, &prev.v, &curr.v, h, theta)?;
        let v = self.eval_velocity(t, &x)?;
        Ok(Node::new(t, x, v, None))
    }
}

impl Family for KinematicProblem {
    fn initial_node(&self) -> IntegrateResult<Node> {
        let (v0, a0) = self.eval(0.0, &self.x0)?;
        Ok(Node::new(0.0, self.x0.clone(), v0, Some(a0)))
    }

    fn startup(&self, h: f64, start: &Node, cfg: &IntegrationConfig) -> IntegrateResult<StepResult> {
        steppers::startup_second_order(self, h, start, cfg.ce_passes)
    }

    fn step(&self, history: &HistoryWindow, cfg: &IntegrationConfig) -> IntegrateResult<StepResult> {
        steppers::pece_second_order_step(self, history, cfg.variant, cfg.ce_passes)
    }

    fn interpolate(&self, prev: &Node, curr: &Node, h: f64, theta: f64) -> IntegrateResult<Node> {
        let t = curr.t - (1.0 - theta) * h;
        let x = hermite_eval(&prev.x, &curr.x, &prev.v, &curr.v, h, theta)?;
        let (v, a) = self.eval(t, &x)?;
        Ok(Node::new(t, x, v, Some(a)))
    }
}

impl Family for DynamicProblem {
    fn initial_node(&self) -> IntegrateResult<Node> {
        let a0 = self.eval_acceleration(0.0, &self.x0, &self.v0)?;
        Ok(Node::new(0.0, self.x0.clone(), self.v0.clone(), Some(a0)))
    }

    fn startup(&self, h: f64, start: &Node, cfg: &IntegrationConfig) -> IntegrateResult<StepResult> {
        steppers::startup_dynamic(self, h, start, cfg.ce_passes)
    }

    fn step(&self, history: &HistoryWindow, cfg: &IntegrationConfig) -> IntegrateResult<StepResult> {
        steppers::pece_dynamic_step(self, history, cfg.variant, cfg.ce_passes)
    }

    fn error(&self, r: &StepResult) -> IntegrateResult<f64> {
        let eps_x = truncation_error(&r.x, &r.x_pred)?;
        let eps_v = match &r.v_pred {
            Some(vp) => truncation_error(&r.v, vp)?,
            None => 0.0,
        };
        Ok(eps_x.max(eps_v))
    }

    fn interpolate(&self, prev: &Node, curr: &Node, h: f64, theta: f64) -> IntegrateResult<Node> {
        let t = curr.t - (1.0 - theta) * h;
        let x = hermite_eval(&prev.x, &curr.x, &prev.v, &curr.v, h, theta)?;
        let v = hermite_eval(&prev.v, &curr.v, prev.accel(), curr.accel(), h, theta)?;
        let a = self.eval_acceleration(t, &x, &v)?;
        Ok(Node::new(t, x, v, Some(a)))
    }

    fn record(&self, node: &Node) -> GlobalRecord {
        GlobalRecord {
            t: node.t,
            x: node.x.clone(),
            v: Some(node.v.clone()),
        }
    }
}

/// Integrates `problem` from `t = 0` to its `t_end`, reporting `n_global + 1`
/// evenly spaced nodes.
pub fn integrate(problem: &Problem, config: &IntegrationConfig) -> Result<SolutionSeries, Aborted> {
    let early = |error| Aborted {
        error,
        partial: SolutionSeries {
            records: Vec::new(),
            stats: RunStatistics::default(),
            trace: Vec::new(),
        },
    };
    problem.validate().map_err(early)?;
    config.validate().map_err(early)?;

    let dt = problem.t_end() / problem.n_global() as f64;
    let (h, steps) = match config.fixed_steps {
        Some(s) => (dt / s as f64, s),
        None => {
            let init = initial_step_size(problem, dt).map_err(early)?;
            (init.h, init.steps)
        }
    };
    let mut run = Run::new(problem, config, dt, h, steps);
    let outcome = match problem {
        Problem::FirstOrder(p) => run.execute(p),
        Problem::Kinematic(p) => run.execute(p),
        Problem::Dynamic(p) => run.execute(p),
    };
    match outcome {
        Ok(()) => Ok(run.series),
        Err(error) => Err(Aborted {
            error,
            partial: run.series,
        }),
    }
}

struct Run<'a> {
    config: &'a IntegrationConfig,
    t_end: f64,
    n_global: usize,
    dt: f64,
    ctl: ControllerState,
    series: SolutionSeries,
}

impl<'a> Run<'a> {
    fn new(problem: &Problem, config: &'a IntegrationConfig, dt: f64, h: f64, steps: u64) -> Self {
        Run {
            config,
            t_end: problem.t_end(),
            n_global: problem.n_global(),
            dt,
            ctl: ControllerState::new(config.tol, problem.method_order(), h, steps, dt),
            series: SolutionSeries {
                records: Vec::with_capacity(problem.n_global() + 1),
                stats: RunStatistics::default(),
                trace: Vec::new(),
            },
        }
    }

    fn execute<F: Family>(&mut self, family: &F) -> IntegrateResult<()> {
        let node0 = family.initial_node()?;
        self.series.records.push(family.record(&node0));
        let mut history = HistoryWindow::start(node0, self.ctl.h);
        let mut reached = 0usize;

        while reached < self.n_global {
            debug_assert_eq!(history.h(), self.ctl.h);
            let was_primed = history.is_primed();
            let result = if was_primed {
                family.step(&history, self.config)?
            } else {
                family.startup(self.ctl.h, history.current(), self.config)?
            };
            let eps = family.error(&result)?;
            let h_taken = self.ctl.h;

            self.ctl.steps_to_go -= 1;
            let decision = if self.config.fixed_steps.is_some() {
                StepDecision::Maintain
            } else {
                let c = pi_scale_factor(eps, &self.ctl);
                match decide_step(c, eps, &self.ctl) {
                    // doubling needs the node 2h behind the new front
                    StepDecision::Double if !was_primed => StepDecision::Maintain,
                    d => d,
                }
            };

            if decision == StepDecision::HalveRedo {
                self.series.stats.restarts += 1;
                debug!(
                    "step from t = {} rejected (eps = {:e}, h = {:e})",
                    history.current().t, eps, h_taken
                );
                self.halve_history(family, &mut history)?;
                self.ctl.apply(decision);
                self.check_underflow(history.current().t, eps)?;
                continue;
            }

            let t_new = result.t;
            history.rotate(result.into_node());
            self.ctl.eps_prev = eps;
            self.series.stats.local_steps += 1;
            self.series.trace.push(TraceEntry {
                t: t_new,
                eps,
                h: h_taken,
            });
            match decision {
                StepDecision::Double => {
                    let doubled = history.double();
                    debug_assert!(doubled);
                    self.series.stats.doublings += 1;
                }
                StepDecision::HalveContinue => {
                    self.halve_history(family, &mut history)?;
                    self.series.stats.halvings += 1;
                }
                _ => {}
            }
            self.ctl.apply(decision);
            if decision == StepDecision::HalveContinue {
                self.check_underflow(t_new, eps)?;
            }

            if self.ctl.steps_to_go == 0 {
                reached += 1;
                let t_global = if reached == self.n_global {
                    self.t_end
                } else {
                    reached as f64 * self.dt
                };
                history.pin_time(t_global);
                self.series.records.push(family.record(history.current()));
                if reached < self.n_global {
                    self.next_global_step(family, &mut history)?;
                }
            }
        }
        Ok(())
    }

    fn halve_history<F: Family>(&self, family: &F, history: &mut HistoryWindow) -> IntegrateResult<()> {
        let midpoint = match history.previous() {
            Some(prev) => Some(family.interpolate(prev, history.current(), history.h(), 0.5)?),
            None => None,
        };
        history.halve(midpoint);
        Ok(())
    }

    fn check_underflow(&self, t: f64, eps: f64) -> IntegrateResult<()> {
        if self.ctl.h < self.dt * MIN_STEP_FRACTION {
            Err(IntegrateError::StepUnderflow {
                t,
                h: self.ctl.h,
                eps,
            })
        } else {
            Ok(())
        }
    }

    /// Re-determines the local step count for the next global step and
    /// re-grids the history when `h` changes.
    fn next_global_step<F: Family>(&mut self, family: &F, history: &mut HistoryWindow) -> IntegrateResult<()> {
        if let Some(s) = self.config.fixed_steps {
            self.ctl.steps_to_go = s;
            return Ok(());
        }
        let steps = steps_per_global(self.dt, self.ctl.h);
        let h_old = self.ctl.h;
        let h_new = self.dt / steps as f64;
        if h_new != h_old {
            if h_new < h_old {
                let prev = history
                    .previous()
                    .expect("history is primed at a global node");
                let node = family.interpolate(prev, history.current(), h_old, 1.0 - h_new / h_old)?;
                history.regrid(h_new, node);
            } else if h_new == 2.0 * h_old && history.spare().is_some() {
                history.double();
            } else {
                history.reset(h_new);
                self.series.stats.history_resets += 1;
            }
        }
        self.ctl.h = h_new;
        self.ctl.steps_to_go = steps;
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Convergence studies
// ---------------------------------------------------------------------------

/// Which family of solvers to exercise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverFamily {
    FirstOrder,
    Kinematic,
    Dynamic,
}

impl SolverFamily {
    pub const ALL: [SolverFamily; 3] = [
        SolverFamily::FirstOrder,
        SolverFamily::Kinematic,
        SolverFamily::Dynamic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverFamily::FirstOrder => "first-order",
            SolverFamily::Kinematic => "second-order",
            SolverFamily::Dynamic => "dynamic",
        }
    }
}

impl fmt::Display for SolverFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverFamily {
    type Err = IntegrateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first-order" => Ok(SolverFamily::FirstOrder),
            "second-order" | "kinematic" => Ok(SolverFamily::Kinematic),
            "dynamic" => Ok(SolverFamily::Dynamic),
            other => Err(IntegrateError::Config(format!(
                "unknown solver family '{other}' (expected first-order, second-order or dynamic)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint {
    pub h: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub points: Vec<ConvergencePoint>,
    /// Least-squares slope of `ln(error)` against `ln(h)`.
    pub slope: f64,
}

/// Least-squares slope of `ln(error)` versus `ln(h)`.
pub fn fitted_slope(points: &[ConvergencePoint]) -> IntegrateResult<f64> {
    if points.len() < 2 {
        return Err(IntegrateError::Domain("need at least two grid points".into()));
    }
    if points
        .iter()
        .any(|p| !(p.h > 0.0 && p.error > 0.0 && p.h.is_finite() && p.error.is_finite()))
    {
        return Err(IntegrateError::Domain(
            "step sizes and errors must be positive and finite".into(),
        ));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.h.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.error.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(IntegrateError::Domain("step sizes must be distinct".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Error at the final node against the closed form; for the dynamic family
/// the larger of the displacement and velocity errors.
fn final_error(
    analytic: AnalyticProblem,
    family: SolverFamily,
    series: &SolutionSeries,
) -> f64 {
    let last = series.last();
    let (x, v) = analytic.exact_for(family, last.t);
    let ex = (&last.x - &x).norm();
    match &last.v {
        Some(v_num) => ex.max((v_num - &v).norm()),
        None => ex,
    }
}

/// Global error at `t_end` for each step size in `hs`, with the controller
/// disabled. Each `h` must divide `t_end` into a whole number of steps.
pub fn convergence_study(
    analytic: AnalyticProblem,
    family: SolverFamily,
    variant: CorrectorVariant,
    t_end: f64,
    hs: &[f64],
) -> IntegrateResult<ConvergenceStudy> {
    let mut points = Vec::with_capacity(hs.len());
    for &h in hs {
        let steps = whole_steps(t_end, h)?;
        let problem = analytic.problem(family, t_end, 1);
        let config = IntegrationConfig {
            variant,
            ..IntegrationConfig::fixed(steps)
        };
        let series = integrate(&problem, &config)?;
        points.push(ConvergencePoint {
            h,
            error: final_error(analytic, family, &series),
        });
    }
    let slope = fitted_slope(&points)?;
    Ok(ConvergenceStudy { points, slope })
}

/// Error of the family's one-step startup method after a single step of each
/// size in `hs`; the slope is the local order (`p + 1`).
pub fn startup_study(
    analytic: AnalyticProblem,
    family: SolverFamily,
    hs: &[f64],
) -> IntegrateResult<ConvergenceStudy> {
    let mut points = Vec::with_capacity(hs.len());
    for &h in hs {
        if !(h > 0.0 && h.is_finite()) {
            return Err(IntegrateError::Domain(format!("invalid step size {h}")));
        }
        let problem = analytic.problem(family, h, 1);
        let series = integrate(&problem, &IntegrationConfig::fixed(1))?;
        points.push(ConvergencePoint {
            h,
            error: final_error(analytic, family, &series),
        });
    }
    let slope = fitted_slope(&points)?;
    Ok(ConvergenceStudy { points, slope })
}

fn whole_steps(t_end: f64, h: f64) -> IntegrateResult<u64> {
    if !(h > 0.0 && h.is_finite() && h <= t_end) {
        return Err(IntegrateError::Domain(format!("invalid step size {h}")));
    }
    let steps = (t_end / h).round();
    if ((t_end / steps) - h).abs() > 1e-9 * h {
        return Err(IntegrateError::Domain(format!(
            "step size {h} does not divide t_end = {t_end}"
        )));
    }
    Ok(steps as u64)
}
