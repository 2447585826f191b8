use serde::Serialize;

use crate::error::{GmeError, Result};

/// A real function sampled on the uniform grid `η_i = i·λ/(n-1)`, `i = 0..n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    lambda: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(lambda: f64, values: Vec<f64>) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(GmeError::InvalidGrid(format!(
                "endpoint must be positive and finite, got {lambda}"
            )));
        }
        if values.len() < 2 {
            return Err(GmeError::InvalidGrid(format!(
                "need at least 2 nodes, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GmeError::InvalidGrid(format!(
                "non-finite value {} at node {i}",
                values[i]
            )));
        }
        Ok(Self { lambda, values })
    }

    /// Samples `f` at the `n` grid nodes of `[0, lambda]`.
    pub fn from_fn(lambda: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(GmeError::InvalidGrid(format!(
                "need at least 2 nodes, got {n}"
            )));
        }
        let h = lambda / (n - 1) as f64;
        let values = (0..n).map(|i| f(node_at(i, n, lambda, h))).collect();
        Self::new(lambda, values)
    }

    pub(crate) fn from_parts_unchecked(lambda: f64, values: Vec<f64>) -> Self {
        debug_assert!(values.len() >= 2);
        Self { lambda, values }
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn step(&self) -> f64 {
        self.lambda / (self.values.len() - 1) as f64
    }

    /// The `i`-th node. The last node is exactly `λ`.
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        node_at(i, self.values.len(), self.lambda, self.step())
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(move |i| self.node(i))
    }

    /// Same grid, new values.
    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(self.node(i), v))
            .collect();
        Self::from_parts_unchecked(self.lambda, values)
    }

    /// Linear interpolation between nodes.
    pub fn interpolate(&self, eta: f64) -> Result<f64> {
        let (i, t) = self.locate(eta)?;
        if t == 0.0 {
            return Ok(self.values[i]);
        }
        Ok(self.values[i] + t * (self.values[i + 1] - self.values[i]))
    }

    /// Cell index `i` and local coordinate `t ∈ [0, 1)` such that
    /// `eta = η_i + t·h`. The endpoint maps to `(n-1, 0)`.
    pub(crate) fn locate(&self, eta: f64) -> Result<(usize, f64)> {
        if !(0.0..=self.lambda).contains(&eta) {
            return Err(GmeError::OutOfDomain {
                quantity: "eta",
                value: eta,
                lo: 0.0,
                hi: self.lambda,
            });
        }
        let n = self.values.len();
        if eta == self.lambda {
            return Ok((n - 1, 0.0));
        }
        let s = eta / self.step();
        let i = (s.floor() as usize).min(n - 2);
        Ok((i, (s - i as f64).clamp(0.0, 1.0)))
    }

    /// `max_i |self_i - other_i|`; both functions must share the grid.
    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.values.len() != other.values.len() || self.lambda != other.lambda {
            return Err(GmeError::InvalidGrid(format!(
                "grid mismatch: ({}, {}) vs ({}, {})",
                self.lambda,
                self.values.len(),
                other.lambda,
                other.values.len()
            )));
        }
        Ok(())
    }
}

#[inline]
fn node_at(i: usize, n: usize, lambda: f64, h: f64) -> f64 {
    if i + 1 == n {
        lambda
    } else {
        i as f64 * h
    }
}
