//! Uniformly sampled traces over the detection-time difference τ.

use num_complex::Complex64;
use serde::Serialize;

use crate::{Error, Result};

/// Uniform τ grid: values are `t_start + j * t_step` for `j < n_points`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauGrid {
    pub t_start: f64,
    pub t_step: f64,
    pub n_points: usize,
}

impl TauGrid {
    pub fn new(t_start: f64, t_step: f64, n_points: usize) -> Result<Self> {
        if !t_start.is_finite() {
            return Err(Error::InvalidParameter {
                name: "t_start",
                value: t_start,
                reason: "must be finite",
            });
        }
        if !t_step.is_finite() || t_step <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "t_step",
                value: t_step,
                reason: "must be finite and strictly positive",
            });
        }
        if n_points < 2 {
            return Err(Error::InvalidParameter {
                name: "n_points",
                value: n_points as f64,
                reason: "grid needs at least two points",
            });
        }
        Ok(Self {
            t_start,
            t_step,
            n_points,
        })
    }

    /// −5 ns to +15 ns in 0.01 ns steps, spanning the displayed waveforms
    /// with ≥ 35 samples under the jitter kernel.
    pub fn default_waveform() -> Self {
        Self::new(-5e-9, 1e-11, 2001).expect("default grid is valid")
    }

    #[inline]
    pub fn value(&self, j: usize) -> f64 {
        self.t_start + j as f64 * self.t_step
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_points).map(move |j| self.value(j))
    }
}

/// Complex-valued trace (velocity-integral amplitudes).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTrace {
    pub grid: TauGrid,
    pub values: Vec<Complex64>,
}

impl ComplexTrace {
    pub fn new(grid: TauGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(Error::InvalidParameter {
                name: "values",
                value: values.len() as f64,
                reason: "length must equal grid.n_points",
            });
        }
        Ok(Self { grid, values })
    }
}

/// Non-negative real trace (g² values).
#[derive(Debug, Clone, PartialEq)]
pub struct RealTrace {
    pub grid: TauGrid,
    pub values: Vec<f64>,
}

impl RealTrace {
    pub fn new(grid: TauGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(Error::InvalidParameter {
                name: "values",
                value: values.len() as f64,
                reason: "length must equal grid.n_points",
            });
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidParameter {
                name: "values",
                value: bad,
                reason: "trace values must be finite and non-negative",
            });
        }
        Ok(Self { grid, values })
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Trapezoid area of the trace over the full grid.
    pub fn area(&self) -> f64 {
        let dt = self.grid.t_step;
        let mut acc = 0.0;
        for pair in self.values.windows(2) {
            acc += 0.5 * (pair[0] + pair[1]) * dt;
        }
        acc
    }

    /// Fraction of the trace area lying at τ > 0.
    pub fn positive_tau_area_fraction(&self) -> f64 {
        let dt = self.grid.t_step;
        let mut total = 0.0;
        let mut positive = 0.0;
        for (j, pair) in self.values.windows(2).enumerate() {
            let seg = 0.5 * (pair[0] + pair[1]) * dt;
            total += seg;
            // midpoint of the segment decides which side it counts toward
            if self.grid.value(j) + 0.5 * dt > 0.0 {
                positive += seg;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            positive / total
        }
    }
}
