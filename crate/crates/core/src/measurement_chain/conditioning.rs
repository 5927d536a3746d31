//! Homodyne statistics and the conditional output state.
//!
//! With `t = tan φ`, the inferred outcome `x0` has density
//!
//! ```text
//! p(x0) = t ∫ dy |ψ_s(y)|² |ψ_p(t (y − x0))|²
//! ```
//!
//! and, after displacement by `x0 sin φ tan φ` and squeezing with
//! `e^{r*} = cos φ`, the signal mode is left in
//! `ψ_x0(x) ∝ ψ_s(x) ψ_p(t (x − x0))`.

use num_complex::Complex64;
use serde::Serialize;

use super::config::Phase;
use crate::error::{QndError, Result};
use crate::grid_wavefunction::{Distribution, Grid, WaveFunction};

/// Conditioning on outcomes with `p(x0)` at or below this is refused.
pub const NULL_OUTCOME_THRESHOLD: f64 = 1e-12;

/// Outcome lattices span this many combined standard deviations by default.
pub const OUTCOME_SPAN_SIGMAS: f64 = 10.0;

/// A registered homodyne event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Outcome {
    /// Inferred signal quadrature.
    pub x0: f64,
    /// Mode-2 homodyne reading, `-x0 sin φ`.
    pub raw_x: f64,
    pub density_at_x0: f64,
}

impl Outcome {
    pub fn new(x0: f64, phi: f64, dist: &Distribution) -> Result<Self> {
        let phase = Phase::new(phi)?;
        Ok(Self {
            x0,
            raw_x: phase.raw_reading(x0),
            density_at_x0: dist.value_at(x0),
        })
    }
}

/// Precomputed moduli used by the homodyne integral.
pub(crate) struct HomodyneKernel<'a> {
    signal: &'a WaveFunction,
    probe: &'a WaveFunction,
    signal_density: Vec<f64>,
    probe_density: Vec<f64>,
    phase: Phase,
    /// Integrate over the probe lattice when it resolves the filter more
    /// finely than the signal lattice does.
    over_probe: bool,
}

impl<'a> HomodyneKernel<'a> {
    pub(crate) fn new(signal: &'a WaveFunction, probe: &'a WaveFunction, phase: Phase) -> Self {
        let over_probe = probe.grid().step() / phase.tan < signal.grid().step();
        Self {
            signal,
            probe,
            signal_density: signal.moduli_squared(),
            probe_density: probe.moduli_squared(),
            phase,
            over_probe,
        }
    }

    /// `p(x0)` without any renormalization.
    pub(crate) fn density_at(&self, x0: f64) -> f64 {
        let t = self.phase.tan;
        let sg = self.signal.grid();
        let pg = self.probe.grid();
        let v = if self.over_probe {
            let vals: Vec<f64> = pg
                .points()
                .zip(&self.probe_density)
                .map(|(u, &q)| {
                    if q == 0.0 {
                        0.0
                    } else {
                        sg.interpolate(&self.signal_density, x0 + u / t) * q
                    }
                })
                .collect();
            pg.integrate(&vals)
        } else {
            let vals: Vec<f64> = sg
                .points()
                .zip(&self.signal_density)
                .map(|(y, &s)| {
                    if s == 0.0 {
                        0.0
                    } else {
                        s * pg.interpolate(&self.probe_density, t * (y - x0))
                    }
                })
                .collect();
            t * sg.integrate(&vals)
        };
        v.max(0.0)
    }

    /// Mean and variance of `p(x0)` from the input moments.
    pub(crate) fn outcome_moments(&self) -> (f64, f64) {
        let s = crate::grid_wavefunction::density(self.signal);
        let p = crate::grid_wavefunction::density(self.probe);
        let t = self.phase.tan;
        (
            s.mean() - p.mean() / t,
            s.variance() + p.variance() / (t * t),
        )
    }

    pub(crate) fn outcome_grid(&self, span_sigmas: f64, n_points: usize) -> Result<Grid> {
        let (m, v) = self.outcome_moments();
        Grid::centered(m, span_sigmas * v.sqrt(), n_points)
    }

    pub(crate) fn check_outcome(&self, x0: f64) -> Result<f64> {
        let p = self.density_at(x0);
        if !(p > NULL_OUTCOME_THRESHOLD) {
            return Err(QndError::NullOutcome { x0, density: p });
        }
        Ok(p)
    }

    pub(crate) fn tabulate(&self, grid: Grid) -> Result<Distribution> {
        tabulate(self, grid)
    }

    /// Unnormalized `ψ_s(x) ψ_p(t (x − x0))` on the signal lattice.
    pub(crate) fn conditional_amplitudes(&self, x0: f64) -> Vec<Complex64> {
        let t = self.phase.tan;
        self.signal
            .grid()
            .points()
            .zip(self.signal.amplitudes())
            .map(|(x, &a)| {
                if a == Complex64::new(0.0, 0.0) {
                    a
                } else {
                    a * self.probe.value_at(t * (x - x0))
                }
            })
            .collect()
    }
}

/// Homodyne outcome density on the default outcome lattice: centred on the
/// outcome mean, ±10 combined standard deviations, as many nodes as the
/// signal lattice.
pub fn homodyne_distribution(
    signal: &WaveFunction,
    probe: &WaveFunction,
    phi: f64,
) -> Result<Distribution> {
    let kernel = HomodyneKernel::new(signal, probe, Phase::new(phi)?);
    let grid = kernel.outcome_grid(OUTCOME_SPAN_SIGMAS, signal.grid().n_points())?;
    tabulate(&kernel, grid)
}

/// Homodyne outcome density on a caller-chosen outcome lattice.
pub fn homodyne_distribution_on(
    signal: &WaveFunction,
    probe: &WaveFunction,
    phi: f64,
    grid: Grid,
) -> Result<Distribution> {
    let kernel = HomodyneKernel::new(signal, probe, Phase::new(phi)?);
    tabulate(&kernel, grid)
}

/// `p(x0)` at a single outcome.
pub fn homodyne_density_at(
    signal: &WaveFunction,
    probe: &WaveFunction,
    phi: f64,
    x0: f64,
) -> Result<f64> {
    Ok(HomodyneKernel::new(signal, probe, Phase::new(phi)?).density_at(x0))
}

fn tabulate(kernel: &HomodyneKernel<'_>, grid: Grid) -> Result<Distribution> {
    use rayon::prelude::*;
    let xs: Vec<f64> = grid.points().collect();
    let vals: Vec<f64> = xs.par_iter().map(|&x0| kernel.density_at(x0)).collect();
    let mass = grid.integrate(&vals);
    if (mass - 1.0).abs() > 1e-6 {
        return Err(QndError::GridTooNarrow(format!(
            "outcome lattice [{}, {}] captures probability {mass}",
            grid.x_min(),
            grid.x_max()
        )));
    }
    Distribution::from_unnormalized(grid, vals)
}

/// Signal-mode state right after the homodyne projection at `X = −x0 sin φ`:
/// `φ_x0(y) ∝ ψ_s(y cos φ + x0 sin²φ) ψ_p(y sin φ − x0 cos φ sin φ)`.
///
/// The state lives on the signal lattice pulled back through
/// `y = (x − x0 sin²φ)/cos φ`, so the signal factor is read at its own nodes.
pub fn conditional_state_raw(
    signal: &WaveFunction,
    probe: &WaveFunction,
    phi: f64,
    x0: f64,
) -> Result<WaveFunction> {
    let phase = Phase::new(phi)?;
    let kernel = HomodyneKernel::new(signal, probe, phase);
    kernel.check_outcome(x0)?;
    let (s, c) = (phase.sin, phase.cos);
    let grid = signal.grid().affine_preimage(x0 * s * s, c);
    let amps = grid
        .points()
        .zip(signal.amplitudes())
        .map(|(y, &a)| a * probe.value_at(y * s - x0 * c * s))
        .collect();
    WaveFunction::new(grid, amps)
}

/// Displacement `D(x0 sin φ tan φ)`: translates the quadrature
/// representation, carrying the lattice along.
pub fn feedback_displace(state: &WaveFunction, x0: f64, phi: f64) -> Result<WaveFunction> {
    let phase = Phase::new(phi)?;
    let d = phase.feedback_displacement(x0);
    state.with_grid(state.grid().translated(d), 1.0)
}

/// Squeezing `S(r*)` with `e^{r*} = cos φ`, using `S(r)|y⟩ = e^{r/2}|e^r y⟩`:
/// `ψ(y) → e^{−r*/2} ψ(e^{−r*} y)`. The lattice is dilated by `cos φ`.
pub fn output_squeeze(state: &WaveFunction, phi: f64) -> Result<WaveFunction> {
    let phase = Phase::new(phi)?;
    state.with_grid(state.grid().scaled(phase.cos), phase.cos.powf(-0.5))
}

/// Closed-form conditional output
/// `ψ_x0(x) = ψ_s(x) ψ_p(t (x − x0)) / √(∫ |ψ_s|² |ψ_p(t (y − x0))|²)` on the
/// signal lattice.
pub fn conditional_output(
    signal: &WaveFunction,
    probe: &WaveFunction,
    phi: f64,
    x0: f64,
) -> Result<WaveFunction> {
    let kernel = HomodyneKernel::new(signal, probe, Phase::new(phi)?);
    kernel.check_outcome(x0)?;
    WaveFunction::new(*signal.grid(), kernel.conditional_amplitudes(x0))
}
