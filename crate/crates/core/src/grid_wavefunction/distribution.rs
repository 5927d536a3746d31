use serde::Serialize;

use super::grid::Grid;
use crate::error::{QndError, Result};

/// Tolerance on the trapezoidal mass of a [`Distribution`].
pub const MASS_TOL: f64 = 1e-8;

/// Nonnegative density on a [`Grid`] with unit trapezoidal mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    grid: Grid,
    density: Vec<f64>,
}

impl Distribution {
    pub fn new(grid: Grid, density: Vec<f64>) -> Result<Self> {
        if density.len() != grid.n_points() {
            return Err(QndError::InvalidDistribution(format!(
                "{} values for a grid of {} points",
                density.len(),
                grid.n_points()
            )));
        }
        if let Some(v) = density.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(QndError::InvalidDistribution(format!(
                "invalid density value {v}"
            )));
        }
        let mass = grid.integrate(&density);
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(QndError::InvalidDistribution(format!(
                "integrates to {mass}, not 1"
            )));
        }
        Ok(Self { grid, density })
    }

    /// Rescales nonnegative values to unit mass.
    pub fn from_unnormalized(grid: Grid, values: Vec<f64>) -> Result<Self> {
        let values: Vec<f64> = values.into_iter().map(|v| v.max(0.0)).collect();
        let mass = grid.integrate(&values);
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(QndError::InvalidDistribution(format!(
                "mass {mass} cannot be normalized"
            )));
        }
        Self::new(grid, values.into_iter().map(|v| v / mass).collect())
    }

    /// Caller guarantees unit mass up to rounding.
    pub(crate) fn normalized_unchecked(grid: Grid, density: Vec<f64>) -> Self {
        Self { grid, density }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.density
    }

    pub fn mass(&self) -> f64 {
        self.grid.integrate(&self.density)
    }

    /// Cubic interpolation clipped at zero.
    pub fn value_at(&self, x: f64) -> f64 {
        self.grid.interpolate(&self.density, x).max(0.0)
    }

    pub fn moment(&self, f: impl Fn(f64) -> f64) -> f64 {
        let v: Vec<f64> = self
            .grid
            .points()
            .zip(&self.density)
            .map(|(x, p)| f(x) * p)
            .collect();
        self.grid.integrate(&v)
    }

    pub fn mean(&self) -> f64 {
        self.moment(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.moment(|x| (x - m) * (x - m))
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Trapezoidal cumulative at each node, scaled so the last entry is 1.
    pub fn cumulative(&self) -> Vec<f64> {
        let h = self.grid.step();
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.density.len());
        out.push(0.0);
        for w in self.density.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            out.push(acc);
        }
        let total = acc;
        out.iter_mut().for_each(|c| *c /= total);
        out
    }

    /// `∫ |p - q| dx` on a lattice spanning both supports.
    pub fn l1_distance(&self, other: &Distribution) -> Result<f64> {
        if self.grid.matches(&other.grid) {
            let diff: Vec<f64> = self
                .density
                .iter()
                .zip(&other.density)
                .map(|(a, b)| (a - b).abs())
                .collect();
            return Ok(self.grid.integrate(&diff));
        }
        let common = self.grid.union_fine(&other.grid)?;
        let diff: Vec<f64> = common
            .points()
            .map(|x| (self.value_at(x) - other.value_at(x)).abs())
            .collect();
        Ok(common.integrate(&diff))
    }

    /// Bhattacharyya coefficient `∫ √(p q) dx`.
    pub fn bhattacharyya(&self, other: &Distribution) -> Result<f64> {
        let common = if self.grid.matches(&other.grid) {
            self.grid
        } else {
            self.grid.union_fine(&other.grid)?
        };
        let v: Vec<f64> = common
            .points()
            .map(|x| (self.value_at(x) * other.value_at(x)).sqrt())
            .collect();
        Ok(common.integrate(&v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn normal(grid: Grid, m: f64, v: f64) -> Distribution {
        let vals = grid
            .points()
            .map(|x| {
                (-(x - m) * (x - m) / (2.0 * v)).exp() / (2.0 * std::f64::consts::PI * v).sqrt()
            })
            .collect();
        Distribution::from_unnormalized(grid, vals).unwrap()
    }

    #[test]
    fn rejects_negative_and_unnormalized() {
        let g = Grid::new(0.0, 1.0, 16).unwrap();
        let mut v = vec![1.0; 16];
        assert!(Distribution::new(g, v.clone()).is_ok());
        v[3] = -0.1;
        assert!(Distribution::new(g, v).is_err());
        assert!(Distribution::new(g, vec![2.0; 16]).is_err());
        assert!(Distribution::from_unnormalized(g, vec![0.0; 16]).is_err());
    }

    #[test]
    fn moments_and_cumulative() {
        let g = Grid::centered(1.0, 10.0, 2001).unwrap();
        let d = normal(g, 1.0, 2.0);
        assert_abs_diff_eq!(d.mean(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(d.variance(), 2.0, epsilon = 1e-8);
        let c = d.cumulative();
        assert_eq!(c[0], 0.0);
        assert_eq!(*c.last().unwrap(), 1.0);
        assert_abs_diff_eq!(c[1000], 0.5, epsilon = 1e-10);
    }

    #[test]
    fn distances_on_mismatched_grids() {
        let a = normal(Grid::centered(0.0, 8.0, 1001).unwrap(), 0.0, 1.0);
        let b = normal(Grid::centered(0.0, 10.0, 777).unwrap(), 0.0, 1.0);
        assert!(a.l1_distance(&b).unwrap() < 1e-6);
        assert_abs_diff_eq!(a.bhattacharyya(&b).unwrap(), 1.0, epsilon = 1e-6);
        let c = normal(Grid::centered(0.0, 8.0, 1001).unwrap(), 0.0, 2.0);
        // 2√(σ1σ2)/(σ1²+σ2²)^{1/2} for zero-mean normals
        let expected = (2.0 * 2f64.sqrt() / 3.0).sqrt();
        assert_abs_diff_eq!(a.bhattacharyya(&c).unwrap(), expected, epsilon = 1e-7);
    }
}
