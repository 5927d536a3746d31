//! Single-mode quadrature wavefunctions.
//!
//! Quadrature convention: `x = (a + a†)/2`, so the vacuum has variance 1/4.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::distribution::Distribution;
use super::grid::Grid;
use crate::error::{ensure_positive, QndError, Result};

/// Vacuum quadrature variance.
pub const VACUUM_VARIANCE: f64 = 0.25;

/// Edge amplitudes must sit below this fraction of the peak amplitude.
pub const EDGE_DECAY: f64 = 1e-6;

/// Number of standard deviations a constructor requires inside the grid.
pub const SUPPORT_SIGMAS: f64 = 8.0;

/// Mean and variance of a Gaussian quadrature wavefunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianSpec {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        ensure_positive("variance", variance)?;
        if !mean.is_finite() {
            return Err(QndError::InvalidState(format!("non-finite mean {mean}")));
        }
        Ok(Self { mean, variance })
    }

    pub fn vacuum() -> Self {
        Self {
            mean: 0.0,
            variance: VACUUM_VARIANCE,
        }
    }

    /// Squeezed vacuum with quadrature variance `sigma2`.
    pub fn squeezed(sigma2: f64) -> Result<Self> {
        Self::new(0.0, sigma2)
    }

    /// Anti-squeezed vacuum `(Σ²/2π)^{1/4} exp(-Σ² x²/4)`, i.e. variance `1/Σ²`.
    pub fn anti_squeezed(sigma2: f64) -> Result<Self> {
        ensure_positive("variance", sigma2)?;
        Self::new(0.0, 1.0 / sigma2)
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    pub fn amplitude(&self, x: f64) -> f64 {
        let d = x - self.mean;
        (2.0 * PI * self.variance).powf(-0.25) * (-d * d / (4.0 * self.variance)).exp()
    }
}

/// Complex amplitudes on a [`Grid`] with unit trapezoidal L2 norm.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: Grid,
    amplitudes: Vec<Complex64>,
    gaussian: Option<GaussianSpec>,
}

impl WaveFunction {
    /// Normalizes `amplitudes` and checks that the support decays before the
    /// grid edges.
    pub fn new(grid: Grid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.n_points() {
            return Err(QndError::InvalidState(format!(
                "{} amplitudes for a grid of {} points",
                amplitudes.len(),
                grid.n_points()
            )));
        }
        if amplitudes
            .iter()
            .any(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(QndError::InvalidState("non-finite amplitude".into()));
        }
        let norm2 = grid.integrate(&amplitudes.iter().map(|a| a.norm_sqr()).collect::<Vec<_>>());
        if !(norm2 > 0.0) {
            return Err(QndError::InvalidState("zero norm".into()));
        }
        let scale = norm2.sqrt().recip();
        let amplitudes: Vec<Complex64> = amplitudes.into_iter().map(|a| a * scale).collect();
        check_edge_decay(&grid, &amplitudes)?;
        Ok(Self {
            grid,
            amplitudes,
            gaussian: None,
        })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let amps = grid.points().map(f).collect();
        Self::new(grid, amps)
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(
            grid,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Parameters of the Gaussian this state was built from, if any.
    pub fn gaussian_spec(&self) -> Option<GaussianSpec> {
        self.gaussian
    }

    pub fn norm_squared(&self) -> f64 {
        self.grid.integrate(&self.moduli_squared())
    }

    pub fn moduli_squared(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Amplitude at an arbitrary point, cubic interpolation, zero off-grid.
    pub fn value_at(&self, x: f64) -> Complex64 {
        self.grid.interpolate_complex(&self.amplitudes, x)
    }

    pub fn mean(&self) -> f64 {
        density(self).mean()
    }

    pub fn variance(&self) -> f64 {
        density(self).variance()
    }

    /// Re-expresses the state on another lattice.
    pub fn resample(&self, grid: &Grid) -> Result<WaveFunction> {
        if grid.matches(&self.grid) {
            return Ok(WaveFunction {
                grid: *grid,
                amplitudes: self.amplitudes.clone(),
                gaussian: self.gaussian,
            });
        }
        // probability outside the target interval, measured on the source nodes
        let lost: f64 = self
            .grid
            .points()
            .zip(&self.amplitudes)
            .enumerate()
            .filter(|(_, (x, _))| !grid.contains(*x))
            .map(|(k, (_, a))| self.grid.weight(k) * a.norm_sqr())
            .sum();
        if lost > 1e-6 {
            return Err(QndError::GridTooNarrow(format!(
                "resampling onto [{}, {}] drops probability {lost}",
                grid.x_min(),
                grid.x_max()
            )));
        }
        let amps: Vec<Complex64> = grid.points().map(|x| self.value_at(x)).collect();
        let mut out = WaveFunction::new(*grid, amps)?;
        out.gaussian = self.gaussian;
        Ok(out)
    }

    /// Same state with the grid replaced; amplitudes are untouched up to
    /// normalization. Used for exact translations and dilations.
    pub(crate) fn with_grid(&self, grid: Grid, amplitude_scale: f64) -> Result<WaveFunction> {
        let amps = self
            .amplitudes
            .iter()
            .map(|a| a * amplitude_scale)
            .collect();
        WaveFunction::new(grid, amps)
    }

    /// Multiplies every amplitude by `c` and renormalizes.
    pub fn scaled_by(&self, c: Complex64) -> Result<WaveFunction> {
        WaveFunction::new(self.grid, self.amplitudes.iter().map(|a| a * c).collect())
    }
}

fn check_edge_decay(grid: &Grid, amps: &[Complex64]) -> Result<()> {
    let peak = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let edge = amps[0].norm().max(amps[amps.len() - 1].norm());
    if edge >= EDGE_DECAY * peak {
        return Err(QndError::GridTooNarrow(format!(
            "edge amplitude {edge:e} is not below {EDGE_DECAY:e} x peak {peak:e} on [{}, {}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    Ok(())
}

fn ensure_covers(grid: &Grid, lo: f64, hi: f64) -> Result<()> {
    if grid.x_min() > lo || grid.x_max() < hi {
        return Err(QndError::GridTooNarrow(format!(
            "grid [{}, {}] does not cover [{lo}, {hi}]",
            grid.x_min(),
            grid.x_max()
        )));
    }
    Ok(())
}

/// `(2π v)^{-1/4} exp(-(x-m)²/(4v))` sampled on `grid` and renormalized.
pub fn build_gaussian(spec: GaussianSpec, grid: Grid) -> Result<WaveFunction> {
    ensure_positive("variance", spec.variance)?;
    let reach = SUPPORT_SIGMAS * spec.std_dev();
    ensure_covers(&grid, spec.mean - reach, spec.mean + reach)?;
    let mut wf = WaveFunction::from_fn(grid, |x| Complex64::new(spec.amplitude(x), 0.0))?;
    wf.gaussian = Some(spec);
    Ok(wf)
}

/// Even superposition of Gaussians centred at `±separation`.
pub fn build_cat(separation: f64, component_variance: f64, grid: Grid) -> Result<WaveFunction> {
    ensure_positive("variance", component_variance)?;
    if !separation.is_finite() {
        return Err(QndError::InvalidState(format!(
            "non-finite separation {separation}"
        )));
    }
    let reach = separation.abs() + SUPPORT_SIGMAS * component_variance.sqrt();
    ensure_covers(&grid, -reach, reach)?;
    let left = GaussianSpec::new(-separation, component_variance)?;
    let right = GaussianSpec::new(separation, component_variance)?;
    let mut wf = WaveFunction::from_fn(grid, |x| {
        Complex64::new(left.amplitude(x) + right.amplitude(x), 0.0)
    })?;
    if separation == 0.0 {
        wf.gaussian = Some(GaussianSpec::new(0.0, component_variance)?);
    }
    Ok(wf)
}

/// `⟨a|b⟩` by trapezoidal quadrature.
pub fn overlap(a: &WaveFunction, b: &WaveFunction) -> Result<Complex64> {
    if !a.grid.matches(&b.grid) {
        return Err(QndError::GridMismatch);
    }
    let integrand: Vec<Complex64> = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .collect();
    Ok(a.grid.integrate_complex(&integrand))
}

/// L2 distance between two states on matching grids.
pub fn l2_distance(a: &WaveFunction, b: &WaveFunction) -> Result<f64> {
    if !a.grid.matches(&b.grid) {
        return Err(QndError::GridMismatch);
    }
    let diff: Vec<f64> = a
        .amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| (x - y).norm_sqr())
        .collect();
    Ok(a.grid.integrate(&diff).max(0.0).sqrt())
}

/// Quadrature density `|ψ(x)|²`.
pub fn density(a: &WaveFunction) -> Distribution {
    Distribution::normalized_unchecked(a.grid, a.moduli_squared())
}

/// Mean photon number as printed alongside the squeezed-vacuum family:
/// `(Σ² + 1/Σ² - 2)/4`. Its zero sits at `Σ² = 1`, not at the vacuum
/// variance 1/4 of this crate's quadrature convention.
pub fn photon_number_paper(sigma2: f64) -> Result<f64> {
    ensure_positive("variance", sigma2)?;
    Ok((sigma2 + 1.0 / sigma2 - 2.0) / 4.0)
}

/// Mean photon number of a squeezed vacuum with quadrature variance `sigma2`
/// under `x = (a + a†)/2`: `(4Σ² + 1/(4Σ²) - 2)/4`, zero at `Σ² = 1/4`.
pub fn photon_number_consistent(sigma2: f64) -> Result<f64> {
    ensure_positive("variance", sigma2)?;
    let s = 4.0 * sigma2;
    Ok((s + 1.0 / s - 2.0) / 4.0)
}

/// Ratio of the squeezed-probe filter variance `Σ²/tan²φ` to the
/// vacuum-probe filter variance `1/(4 tan²φ)`, i.e. `4Σ²`.
pub fn filter_variance_ratio(sigma2: f64) -> Result<f64> {
    ensure_positive("variance", sigma2)?;
    Ok(4.0 * sigma2)
}
