//! Discretized quadrature wavefunctions and densities.

mod distribution;
mod grid;
mod notation;
mod state;

pub use distribution::{Distribution, MASS_TOL};
pub use grid::{Grid, MIN_POINTS};
pub use notation::{load_amplitude_csv, StateSpec};
pub use state::{
    build_cat, build_gaussian, density, filter_variance_ratio, l2_distance, overlap,
    photon_number_consistent, photon_number_paper, GaussianSpec, WaveFunction, EDGE_DECAY,
    SUPPORT_SIGMAS, VACUUM_VARIANCE,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// How lattices are laid out for states built from a description: each state
/// gets `n_points` nodes over its centre ± `span_sigmas` standard deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPolicy {
    pub n_points: usize,
    pub span_sigmas: f64,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self {
            n_points: 2048,
            span_sigmas: 10.0,
        }
    }
}

impl GridPolicy {
    pub fn new(n_points: usize, span_sigmas: f64) -> Result<Self> {
        crate::error::ensure_positive("grid span", span_sigmas)?;
        Grid::new(-1.0, 1.0, n_points)?;
        Ok(Self {
            n_points,
            span_sigmas,
        })
    }

    pub fn grid_for_gaussian(&self, spec: &GaussianSpec) -> Result<Grid> {
        Grid::centered(spec.mean, self.span_sigmas * spec.std_dev(), self.n_points)
    }

    pub fn grid_for_cat(&self, separation: f64, variance: f64) -> Result<Grid> {
        Grid::centered(
            0.0,
            separation.abs() + self.span_sigmas * variance.sqrt(),
            self.n_points,
        )
    }

    pub fn gaussian(&self, spec: GaussianSpec) -> Result<WaveFunction> {
        build_gaussian(spec, self.grid_for_gaussian(&spec)?)
    }
}
