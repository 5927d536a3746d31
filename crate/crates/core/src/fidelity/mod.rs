//! Information gain versus disturbance.
//!
//! * `F = ∫ dx0 p(x0) |⟨ψ_s|ψ_x0⟩|²`, the average state fidelity of the
//!   conditional outputs with the input.
//! * `G = (∫ dx √p(x) |ψ_s(x)|)²`, the squared Bhattacharyya coefficient
//!   between the homodyne statistics and the intrinsic quadrature density.
//!
//! For Gaussian signal and probe both depend only on
//! `x = σ_p / (σ_s tan φ)`.

mod ensemble;

pub use ensemble::{output_ensemble, DensityMatrixGrid, ENSEMBLE_MAX_POINTS};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Result};
use crate::grid_wavefunction::{Grid, WaveFunction};
use crate::measurement_chain::{HomodyneKernel, Phase, NULL_OUTCOME_THRESHOLD};

/// Outer outcome quadrature for `F`: nodes and half-width in combined
/// standard deviations.
pub const FIDELITY_OUTCOME_NODES: usize = 1024;
pub const FIDELITY_OUTCOME_SIGMAS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityPair {
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "G")]
    pub g: f64,
    /// Trade-off parameter `σ_p/(σ_s tan φ)` when the signal is Gaussian.
    pub x: Option<f64>,
}

impl FidelityPair {
    pub fn sum(&self) -> f64 {
        self.f + self.g
    }
}

fn clamp_unit(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// `√2 x / √(1 + 2x²)`.
pub fn gaussian_state_fidelity(x: f64) -> Result<f64> {
    ensure_positive("x", x)?;
    // 1/√(1 + 1/(2x²)) avoids overflow for huge x
    Ok(1.0 / (1.0 + 0.5 / (x * x)).sqrt())
}

/// `2 √(1 + x²) / (2 + x²)`.
pub fn gaussian_distribution_fidelity(x: f64) -> Result<f64> {
    ensure_positive("x", x)?;
    Ok(2.0 * (1.0 + x * x).sqrt() / (2.0 + x * x))
}

/// `exp(−tan²φ (y1 − y2)² / (8 σ_p²))`, `sigma_p` the probe standard deviation.
pub fn transfer_function(y1: f64, y2: f64, phi: f64, sigma_p: f64) -> Result<f64> {
    ensure_positive("probe width", sigma_p)?;
    let t = phi.tan();
    let d = y1 - y2;
    Ok((-t * t * d * d / (8.0 * sigma_p * sigma_p)).exp())
}

/// Lattice for the outer outcome integrals of `F` and `ρ_out`.
pub(crate) fn fidelity_outcome_grid(kernel: &HomodyneKernel<'_>) -> Result<Grid> {
    kernel.outcome_grid(FIDELITY_OUTCOME_SIGMAS, FIDELITY_OUTCOME_NODES)
}

/// Normalized `ψ_x0` on the signal lattice, or `None` for a null outcome.
/// Unlike [`crate::measurement_chain::conditional_output`] this does not
/// insist on edge decay: far-tail outcomes carry negligible weight but may
/// leave the conditional state pressed against the lattice edge.
pub(crate) fn conditional_vector(
    kernel: &HomodyneKernel<'_>,
    grid: &Grid,
    x0: f64,
    p: f64,
) -> Option<Vec<Complex64>> {
    if !(p > NULL_OUTCOME_THRESHOLD) {
        return None;
    }
    let amps = kernel.conditional_amplitudes(x0);
    let norm2 = grid.integrate(&amps.iter().map(|a| a.norm_sqr()).collect::<Vec<_>>());
    if !(norm2 > 0.0) {
        return None;
    }
    let scale = norm2.sqrt().recip();
    Some(amps.into_iter().map(|a| a * scale).collect())
}

/// Average state fidelity by outer quadrature over outcomes.
pub fn state_fidelity(signal: &WaveFunction, probe: &WaveFunction, phi: f64) -> Result<f64> {
    let kernel = HomodyneKernel::new(signal, probe, Phase::new(phi)?);
    let outcomes = fidelity_outcome_grid(&kernel)?;
    let dist = kernel.tabulate(outcomes)?;
    let sgrid = *signal.grid();
    let psi = signal.amplitudes();
    let xs: Vec<f64> = outcomes.points().collect();
    let terms: Vec<f64> = xs
        .par_iter()
        .zip(dist.values())
        .map(
            |(&x0, &p)| match conditional_vector(&kernel, &sgrid, x0, p) {
                Some(v) => {
                    let integrand: Vec<Complex64> =
                        psi.iter().zip(&v).map(|(a, b)| a.conj() * b).collect();
                    p * sgrid.integrate_complex(&integrand).norm_sqr()
                }
                None => 0.0,
            },
        )
        .collect();
    Ok(clamp_unit(outcomes.integrate(&terms)))
}

/// Average distribution fidelity, `p` evaluated at the signal nodes.
pub fn distribution_fidelity(signal: &WaveFunction, probe: &WaveFunction, phi: f64) -> Result<f64> {
    let kernel = HomodyneKernel::new(signal, probe, Phase::new(phi)?);
    let sgrid = signal.grid();
    let xs: Vec<f64> = sgrid.points().collect();
    let terms: Vec<f64> = xs
        .par_iter()
        .zip(signal.amplitudes())
        .map(|(&x, a)| {
            if a.norm() == 0.0 {
                0.0
            } else {
                kernel.density_at(x).sqrt() * a.norm()
            }
        })
        .collect();
    let bc = sgrid.integrate(&terms);
    Ok(clamp_unit(bc * bc))
}

/// Both fidelities for one configuration.
pub fn fidelity_pair(
    signal: &WaveFunction,
    probe: &WaveFunction,
    phi: f64,
) -> Result<FidelityPair> {
    let x = match (signal.gaussian_spec(), probe.gaussian_spec()) {
        (Some(s), Some(p)) => Some(p.std_dev() / (s.std_dev() * Phase::new(phi)?.tan)),
        _ => None,
    };
    Ok(FidelityPair {
        f: state_fidelity(signal, probe, phi)?,
        g: distribution_fidelity(signal, probe, phi)?,
        x,
    })
}

/// `∫∫ |ψ_s(y')|² |ψ_s(y'')|² T_φ(y', y'') dy' dy''`, valid for Gaussian probes
/// of standard deviation `sigma_p`.
pub fn state_fidelity_via_transfer(signal: &WaveFunction, phi: f64, sigma_p: f64) -> Result<f64> {
    ensure_positive("probe width", sigma_p)?;
    let phase = Phase::new(phi)?;
    let grid = signal.grid();
    let rho = signal.moduli_squared();
    let xs: Vec<f64> = grid.points().collect();
    let coef = phase.tan * phase.tan / (8.0 * sigma_p * sigma_p);
    let rows: Vec<f64> = xs
        .par_iter()
        .zip(&rho)
        .map(|(&y1, &r1)| {
            if r1 == 0.0 {
                return 0.0;
            }
            let inner: Vec<f64> = xs
                .iter()
                .zip(&rho)
                .map(|(&y2, &r2)| {
                    let d = y1 - y2;
                    r2 * (-coef * d * d).exp()
                })
                .collect();
            r1 * grid.integrate(&inner)
        })
        .collect();
    Ok(clamp_unit(grid.integrate(&rows)))
}
