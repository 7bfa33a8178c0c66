//! Dense state vectors for displacement, velocity and acceleration samples.

use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{IntegrateError, IntegrateResult};

/// A dense real vector. The dimension is fixed for the life of an integration.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn new(entries: Vec<f64>) -> Self {
        StateVector(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        StateVector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Returns `Err` unless every entry is finite.
    pub fn check_finite(&self) -> IntegrateResult<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(IntegrateError::InvalidState(format!(
                "non-finite entry in {:?}",
                self.0
            )))
        }
    }

    pub fn check_dim(&self, expected: usize) -> IntegrateResult<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(IntegrateError::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }

    /// Euclidean norm, √(Σ xᵢ²).
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Weighted sum `Σ cᵢ·vᵢ`. All terms must share one dimension.
    ///
    /// Accumulation runs left to right per component, so the result is
    /// bit-reproducible for a given term order.
    pub fn lincomb(terms: &[(f64, &StateVector)]) -> StateVector {
        let dim = terms.first().map_or(0, |(_, v)| v.dim());
        let mut out = vec![0.0; dim];
        for (c, v) in terms {
            debug_assert_eq!(v.dim(), dim);
            for (o, x) in out.iter_mut().zip(v.0.iter()) {
                *o += c * x;
            }
        }
        StateVector(out)
    }
}

/// Euclidean norm of a finite state vector.
pub fn euclidean_norm(x: &StateVector) -> IntegrateResult<f64> {
    x.check_finite()?;
    Ok(x.norm())
}

impl From<Vec<f64>> for StateVector {
    fn from(v: Vec<f64>) -> Self {
        StateVector(v)
    }
}

impl<const N: usize> From<[f64; N]> for StateVector {
    fn from(v: [f64; N]) -> Self {
        StateVector(v.to_vec())
    }
}

impl Index<usize> for StateVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &StateVector {
    type Output = StateVector;
    fn add(self, rhs: &StateVector) -> StateVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        StateVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &StateVector {
    type Output = StateVector;
    fn sub(self, rhs: &StateVector) -> StateVector {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        StateVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<&StateVector> for f64 {
    type Output = StateVector;
    fn mul(self, rhs: &StateVector) -> StateVector {
        StateVector(rhs.0.iter().map(|v| self * v).collect())
    }
}

impl Neg for &StateVector {
    type Output = StateVector;
    fn neg(self) -> StateVector {
        StateVector(self.0.iter().map(|v| -v).collect())
    }
}
