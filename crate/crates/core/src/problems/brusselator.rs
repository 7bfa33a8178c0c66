//! Two-species Brusselator reaction model.

use num_complex::Complex64;

use crate::error::{IntegrateError, IntegrateResult};
use crate::problem::FirstOrderProblem;
use crate::vector::StateVector;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrusselatorParams {
    pub a: f64,
    pub b: f64,
    pub y0: [f64; 2],
}

impl BrusselatorParams {
    pub fn new(a: f64, b: f64, y0: [f64; 2]) -> IntegrateResult<Self> {
        let p = BrusselatorParams { a, b, y0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> IntegrateResult<()> {
        if !(self.a.is_finite() && self.a > 0.0 && self.b.is_finite() && self.b > 0.0) {
            return Err(IntegrateError::Config(format!(
                "Brusselator parameters must be finite and positive (A = {}, B = {})",
                self.a, self.b
            )));
        }
        if !self.y0.iter().all(|y| y.is_finite()) {
            return Err(IntegrateError::Config("non-finite initial condition".into()));
        }
        Ok(())
    }

    pub fn fixed_point(&self) -> [f64; 2] {
        [self.a, self.b / self.a]
    }

    pub fn rhs(&self, y: &[f64; 2]) -> [f64; 2] {
        let (a, b) = (self.a, self.b);
        let y1y1y2 = y[0] * y[0] * y[1];
        [a + y1y1y2 - (b + 1.0) * y[0], b * y[0] - y1y1y2]
    }

    /// Eigenvalues of the Jacobian at the fixed point.
    pub fn eigenvalues(&self) -> [Complex64; 2] {
        let a2 = self.a * self.a;
        let tr = -(1.0 - self.b + a2);
        let disc = Complex64::new(tr * tr - 4.0 * a2, 0.0).sqrt();
        [0.5 * (tr + disc), 0.5 * (tr - disc)]
    }

    pub fn problem(&self, t_end: f64, n_global: usize) -> FirstOrderProblem {
        let p = *self;
        FirstOrderProblem::new(
            move |_, y| StateVector::from(p.rhs(&[y[0], y[1]])),
            self.y0,
            t_end,
            n_global,
        )
    }
}

/// `|λ|max / |λ|min`.
pub fn stiffness_ratio(lambdas: &[Complex64]) -> IntegrateResult<f64> {
    let mags: Vec<f64> = lambdas.iter().map(|l| l.norm()).collect();
    let lo = mags.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = mags.iter().copied().fold(0.0, f64::max);
    if mags.is_empty() || lo == 0.0 || !lo.is_finite() {
        return Err(IntegrateError::Domain(
            "stiffness ratio needs nonzero finite eigenvalues".into(),
        ));
    }
    Ok(hi / lo)
}
