//! Uniform one-dimensional quadrature lattice.
//!
//! Every integral in the crate is a trapezoidal sum over a [`Grid`], and every
//! off-lattice evaluation is a four-point Lagrange cubic through the nearest
//! nodes. Values outside the lattice are zero: states are required to decay
//! before reaching the edges.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QndError, Result};

/// Smallest lattice accepted anywhere in the crate.
pub const MIN_POINTS: usize = 16;

/// Relative tolerance used when deciding that two lattices coincide.
const GRID_MATCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(QndError::InvalidGrid(format!(
                "non-finite bounds [{x_min}, {x_max}]"
            )));
        }
        if x_min >= x_max {
            return Err(QndError::InvalidGrid(format!(
                "x_min {x_min} must be below x_max {x_max}"
            )));
        }
        if n_points < MIN_POINTS {
            return Err(QndError::InvalidGrid(format!(
                "n_points {n_points} is below the minimum {MIN_POINTS}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_points,
        })
    }

    /// Symmetric lattice `center ± half_width`.
    pub fn centered(center: f64, half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(QndError::InvalidGrid(format!(
                "half width {half_width} must be positive"
            )));
        }
        Self::new(center - half_width, center + half_width, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node `k`, computed as `x_min + k * step`.
    #[inline]
    pub fn point(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.step()
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        let step = self.step();
        (0..self.n_points).map(move |k| self.x_min + k as f64 * step)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }

    /// Trapezoidal weight of node `k`.
    #[inline]
    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.n_points {
            0.5 * self.step()
        } else {
            self.step()
        }
    }

    /// Trapezoidal integral of sampled values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n_points);
        let interior: f64 = values[1..values.len() - 1].iter().sum();
        self.step() * (interior + 0.5 * (values[0] + values[values.len() - 1]))
    }

    pub fn integrate_complex(&self, values: &[Complex64]) -> Complex64 {
        debug_assert_eq!(values.len(), self.n_points);
        let interior: Complex64 = values[1..values.len() - 1].iter().sum();
        (interior + (values[0] + values[values.len() - 1]) * 0.5) * self.step()
    }

    /// Same lattice moved by `shift`.
    pub fn translated(&self, shift: f64) -> Self {
        Self {
            x_min: self.x_min + shift,
            x_max: self.x_max + shift,
            n_points: self.n_points,
        }
    }

    /// Same lattice with every node multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        debug_assert!(factor > 0.0);
        Self {
            x_min: self.x_min * factor,
            x_max: self.x_max * factor,
            n_points: self.n_points,
        }
    }

    /// Node `k` maps to `(x_k - offset) / divisor`.
    pub fn affine_preimage(&self, offset: f64, divisor: f64) -> Self {
        debug_assert!(divisor > 0.0);
        Self {
            x_min: (self.x_min - offset) / divisor,
            x_max: (self.x_max - offset) / divisor,
            n_points: self.n_points,
        }
    }

    /// Same node count, bounds equal up to a relative 1e-9.
    pub fn matches(&self, other: &Grid) -> bool {
        let scale = (self.x_max - self.x_min).abs().max(1.0);
        self.n_points == other.n_points
            && (self.x_min - other.x_min).abs() <= GRID_MATCH_TOL * scale
            && (self.x_max - other.x_max).abs() <= GRID_MATCH_TOL * scale
    }

    /// Lattice spanning both inputs with the finer of the two steps.
    pub fn union_fine(&self, other: &Grid) -> Result<Self> {
        let x_min = self.x_min.min(other.x_min);
        let x_max = self.x_max.max(other.x_max);
        let step = self.step().min(other.step());
        let n = ((x_max - x_min) / step).ceil() as usize + 1;
        Self::new(x_min, x_max, n.max(MIN_POINTS))
    }

    /// Stencil start and Lagrange weights for evaluating at `x`, or `None`
    /// when `x` falls outside the lattice.
    #[inline]
    fn stencil(&self, x: f64) -> Option<(usize, [f64; 4])> {
        let h = self.step();
        let u = (x - self.x_min) / h;
        let last = (self.n_points - 1) as f64;
        if !(u >= -1e-9 && u <= last + 1e-9) {
            return None;
        }
        let i = (u.floor() as isize).clamp(1, self.n_points as isize - 3) as usize;
        let t = u - i as f64;
        let w = [
            -t * (t - 1.0) * (t - 2.0) / 6.0,
            (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0,
            (t + 1.0) * t * (t - 1.0) / 6.0,
        ];
        Some((i - 1, w))
    }

    /// Cubic interpolation of real samples; zero outside the lattice.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        match self.stencil(x) {
            Some((s, w)) => {
                w[0] * values[s]
                    + w[1] * values[s + 1]
                    + w[2] * values[s + 2]
                    + w[3] * values[s + 3]
            }
            None => 0.0,
        }
    }

    /// Cubic interpolation of complex samples; zero outside the lattice.
    pub fn interpolate_complex(&self, values: &[Complex64], x: f64) -> Complex64 {
        match self.stencil(x) {
            Some((s, w)) => {
                values[s] * w[0]
                    + values[s + 1] * w[1]
                    + values[s + 2] * w[2]
                    + values[s + 3] * w[3]
            }
            None => Complex64::new(0.0, 0.0),
        }
    }
}
