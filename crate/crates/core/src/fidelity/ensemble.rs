//! Outcome-averaged output state `ρ_out = ∫ dx0 p(x0) |ψ_x0⟩⟨ψ_x0|`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use super::{conditional_vector, fidelity_outcome_grid};
use crate::error::{QndError, Result};
use crate::grid_wavefunction::{Grid, WaveFunction};
use crate::measurement_chain::{HomodyneKernel, Phase};

/// Largest lattice accepted by [`output_ensemble`]; storage is quadratic.
pub const ENSEMBLE_MAX_POINTS: usize = 4096;

/// Kernel `ρ(x, x')` sampled on a lattice, row-major.
#[derive(Debug, Clone)]
pub struct DensityMatrixGrid {
    grid: Grid,
    matrix: Vec<Complex64>,
}

impl DensityMatrixGrid {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> Complex64 {
        self.matrix[i * self.grid.n_points() + k]
    }

    /// `∫ ρ(x, x) dx`.
    pub fn trace(&self) -> f64 {
        let diag: Vec<f64> = (0..self.grid.n_points())
            .map(|i| self.get(i, i).re)
            .collect();
        self.grid.integrate(&diag)
    }

    /// `max |ρ(x, x') − conj ρ(x', x)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.grid.n_points();
        let mut worst = 0.0f64;
        for i in 0..n {
            for k in i..n {
                worst = worst.max((self.get(i, k) - self.get(k, i).conj()).norm());
            }
        }
        worst
    }

    /// `⟨ψ|ρ|ψ⟩` by double trapezoidal quadrature.
    pub fn expectation(&self, psi: &WaveFunction) -> Result<f64> {
        if !psi.grid().matches(&self.grid) {
            return Err(QndError::GridMismatch);
        }
        let a = psi.amplitudes();
        let n = self.grid.n_points();
        let rows: Vec<Complex64> = (0..n)
            .map(|i| {
                let inner: Vec<Complex64> = (0..n).map(|k| self.get(i, k) * a[k]).collect();
                a[i].conj() * self.grid.integrate_complex(&inner)
            })
            .collect();
        Ok(self.grid.integrate_complex(&rows).re)
    }

    /// `max |ρ(x, x') − ψ(x) conj ψ(x')|`.
    pub fn max_deviation_from_pure(&self, psi: &WaveFunction) -> Result<f64> {
        if !psi.grid().matches(&self.grid) {
            return Err(QndError::GridMismatch);
        }
        let a = psi.amplitudes();
        let n = self.grid.n_points();
        let mut worst = 0.0f64;
        for i in 0..n {
            for k in 0..n {
                worst = worst.max((self.get(i, k) - a[i] * a[k].conj()).norm());
            }
        }
        Ok(worst)
    }

    /// Spectrum of the quadrature-weighted operator `W^{1/2} ρ W^{1/2}`,
    /// ascending. Its inertia equals that of the raw kernel and its
    /// eigenvalues sum to the trace.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.grid.n_points();
        let sw: Vec<f64> = (0..n).map(|i| self.grid.weight(i).sqrt()).collect();
        let peak = self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let has_imag = self.matrix.iter().any(|z| z.im.abs() > 1e-14 * peak);
        let mut evals: Vec<f64> = if has_imag {
            // Hermitian A + iB as the real symmetric [[A, -B], [B, A]];
            // every eigenvalue appears twice.
            let m = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
                let (i, k) = (r % n, c % n);
                let z = self.get(i, k) * sw[i] * sw[k];
                match (r < n, c < n) {
                    (true, true) | (false, false) => z.re,
                    (true, false) => -z.im,
                    (false, true) => z.im,
                }
            });
            let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
            v.sort_by(f64::total_cmp);
            v.into_iter().step_by(2).collect()
        } else {
            let m = DMatrix::from_fn(n, n, |i, k| self.get(i, k).re * sw[i] * sw[k]);
            SymmetricEigen::new(m).eigenvalues.iter().copied().collect()
        };
        evals.sort_by(f64::total_cmp);
        evals
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

/// Assembles `ρ_out` on the signal lattice from the conditional outputs at
/// the outcome nodes used by [`super::state_fidelity`].
pub fn output_ensemble(
    signal: &WaveFunction,
    probe: &WaveFunction,
    phi: f64,
) -> Result<DensityMatrixGrid> {
    let grid = *signal.grid();
    let n = grid.n_points();
    if n > ENSEMBLE_MAX_POINTS {
        return Err(QndError::ResourceLimit {
            n,
            cap: ENSEMBLE_MAX_POINTS,
        });
    }
    let kernel = HomodyneKernel::new(signal, probe, Phase::new(phi)?);
    let outcomes = fidelity_outcome_grid(&kernel)?;
    let dist = kernel.tabulate(outcomes)?;
    let xs: Vec<f64> = outcomes.points().collect();
    // (quadrature weight × p, ψ_x0) per contributing outcome
    let members: Vec<(f64, Vec<Complex64>)> = xs
        .par_iter()
        .zip(dist.values())
        .enumerate()
        .filter_map(|(j, (&x0, &p))| {
            conditional_vector(&kernel, &grid, x0, p).map(|v| (outcomes.weight(j) * p, v))
        })
        .collect();

    let mut matrix = vec![Complex64::new(0.0, 0.0); n * n];
    matrix.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
        for (w, v) in &members {
            let vi = v[i];
            if vi == Complex64::new(0.0, 0.0) {
                continue;
            }
            let c = vi * *w;
            for (r, vk) in row.iter_mut().zip(v) {
                *r += c * vk.conj();
            }
        }
    });
    Ok(DensityMatrixGrid { grid, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_wavefunction::{build_gaussian, GaussianSpec};

    #[test]
    fn pure_state_kernel_has_single_unit_eigenvalue() {
        let g = Grid::centered(0.0, 5.0, 128).unwrap();
        let psi = build_gaussian(GaussianSpec::new(0.3, 0.25).unwrap(), g).unwrap();
        let a = psi.amplitudes();
        let n = g.n_points();
        let mut matrix = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                // a complex phase ramp exercises the Hermitian embedding
                let ph = Complex64::from_polar(1.0, 0.7 * g.point(i));
                let pk = Complex64::from_polar(1.0, 0.7 * g.point(k));
                matrix[i * n + k] = a[i] * ph * (a[k] * pk).conj();
            }
        }
        let rho = DensityMatrixGrid { grid: g, matrix };
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!(rho.hermiticity_error() < 1e-15);
        let ev = rho.eigenvalues();
        assert_eq!(ev.len(), n);
        assert!((ev[n - 1] - 1.0).abs() < 1e-10);
        assert!(ev[0].abs() < 1e-10);
    }

    #[test]
    fn resource_cap() {
        let g = Grid::centered(0.0, 5.0, ENSEMBLE_MAX_POINTS + 1).unwrap();
        let psi = build_gaussian(GaussianSpec::vacuum(), g).unwrap();
        assert!(matches!(
            output_ensemble(&psi, &psi, 0.7),
            Err(QndError::ResourceLimit { .. })
        ));
    }
}
