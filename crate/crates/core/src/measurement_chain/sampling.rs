//! Seeded Monte Carlo draws from an outcome density.
//!
//! Generator: xoshiro256++ seeded from a `u64` through SplitMix64 (the
//! reference seeding of the xoshiro family). Each uniform variate is
//! `(next_u64 >> 11) * 2^-53`, a value in `[0, 1)`. It is mapped through the
//! inverse of the trapezoidal cumulative of the density, linearly
//! interpolated between lattice nodes.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{QndError, Result};
use crate::grid_wavefunction::Distribution;

/// Uniform variate in `[0, 1)` with 53 random bits.
#[inline]
pub fn unit_uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inverse-CDF sampler over a fixed density.
pub struct OutcomeSampler<'a> {
    dist: &'a Distribution,
    cumulative: Vec<f64>,
    rng: Xoshiro256PlusPlus,
}

impl<'a> OutcomeSampler<'a> {
    pub fn new(dist: &'a Distribution, seed: u64) -> Self {
        Self {
            dist,
            cumulative: dist.cumulative(),
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    /// Quadrature value at cumulative probability `u`.
    pub fn quantile(&self, u: f64) -> f64 {
        let c = &self.cumulative;
        let grid = self.dist.grid();
        // first node with cumulative > u, then step back into its cell
        let k = c.partition_point(|&v| v <= u).clamp(1, c.len() - 1) - 1;
        let width = c[k + 1] - c[k];
        let frac = if width > 0.0 { (u - c[k]) / width } else { 0.0 };
        grid.point(k) + frac.clamp(0.0, 1.0) * grid.step()
    }

    pub fn draw(&mut self) -> f64 {
        let u = unit_uniform(&mut self.rng);
        self.quantile(u)
    }
}

/// `count` draws from `dist`, reproducible for a fixed `seed`.
pub fn sample_outcomes(dist: &Distribution, count: usize, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(QndError::ZeroCount);
    }
    let mut sampler = OutcomeSampler::new(dist, seed);
    Ok((0..count).map(|_| sampler.draw()).collect())
}
