//! Uniform grids and sampled complex-valued functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SplineError};

/// Nodes `start + offset + k·step` for k = 0, 1, … while they stay ≤ `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Knot-avoidance shift, in `[0, step)`.
    pub offset: f64,
}

impl GridSpec {
    pub fn new(start: f64, stop: f64, step: f64, offset: f64) -> Result<Self> {
        let g = Self {
            start,
            stop,
            step,
            offset,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.start, self.stop, self.step, self.offset];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(SplineError::InvalidGrid("non-finite grid parameter".into()));
        }
        if self.step <= 0.0 {
            return Err(SplineError::InvalidGrid(format!("step must be positive, got {}", self.step)));
        }
        if self.stop < self.start {
            return Err(SplineError::InvalidGrid(format!(
                "stop {} precedes start {}",
                self.stop, self.start
            )));
        }
        if !(0.0..self.step).contains(&self.offset) {
            return Err(SplineError::InvalidGrid(format!(
                "offset {} outside [0, step)",
                self.offset
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        let first = self.start + self.offset;
        if first > self.stop {
            return 0;
        }
        // Slack of 1e-9 steps so that `0:3:0.01` includes 3.
        ((self.stop - first) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node(&self, k: usize) -> f64 {
        self.start + self.offset + k as f64 * self.step
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.node(k)).collect()
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }
}

/// Complex values on a uniform grid `x_k = origin + k·step`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    origin: f64,
    step: f64,
    values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn new(origin: f64, step: f64, values: Vec<Complex64>) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() || !origin.is_finite() {
            return Err(SplineError::InvalidGrid(format!(
                "origin {origin} / step {step} not a valid uniform grid"
            )));
        }
        Ok(Self {
            origin,
            step,
            values,
        })
    }

    /// Samples `f` at every node of `grid`.
    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: &GridSpec, f: F) -> Result<Self> {
        grid.validate()?;
        let values = grid.nodes().into_iter().map(f).collect();
        Self::new(grid.start + grid.offset, grid.step, values)
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, k: usize) -> f64 {
        self.origin + k as f64 * self.step
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.x(k)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.values.iter().enumerate().map(|(k, v)| (self.x(k), *v))
    }

    /// sup-norm distance; `None` when the grids differ.
    pub fn sup_distance(&self, other: &SampledFunction) -> Option<f64> {
        if self.len() != other.len() || self.origin != other.origin || self.step != other.step {
            return None;
        }
        Some(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max),
        )
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}
