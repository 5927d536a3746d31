use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{QndError, Result};
use crate::grid_wavefunction::{GaussianSpec, GridPolicy};

/// Smallest admissible `sin φ` and `cos φ`.
pub const PHASE_MARGIN: f64 = 1e-6;

/// Trigonometry of a validated interferometer phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub phi: f64,
    pub sin: f64,
    pub cos: f64,
    pub tan: f64,
}

impl Phase {
    pub fn new(phi: f64) -> Result<Self> {
        if !(phi > 0.0 && phi < FRAC_PI_2) {
            return Err(QndError::DegeneratePhase { phi });
        }
        let (sin, cos) = phi.sin_cos();
        if sin <= PHASE_MARGIN || cos <= PHASE_MARGIN {
            return Err(QndError::DegeneratePhase { phi });
        }
        Ok(Self {
            phi,
            sin,
            cos,
            tan: sin / cos,
        })
    }

    /// Effective beam-splitter transmittivity `cos²φ`.
    pub fn transmittivity(&self) -> f64 {
        self.cos * self.cos
    }

    /// Output squeezing parameter `r*` with `e^{r*} = cos φ`.
    pub fn output_squeeze_parameter(&self) -> f64 {
        self.cos.ln()
    }

    /// Feedback displacement `x0 sin φ tan φ`.
    pub fn feedback_displacement(&self, x0: f64) -> f64 {
        x0 * self.sin * self.tan
    }

    /// Homodyne reading on mode 2 that infers `x0`.
    pub fn raw_reading(&self, x0: f64) -> f64 {
        -x0 * self.sin
    }
}

/// Everything needed to run the chain once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub phi: f64,
    pub probe: GaussianSpec,
    pub grid: GridPolicy,
    pub seed: u64,
}

impl ChainConfig {
    pub fn new(phi: f64, probe: GaussianSpec, grid: GridPolicy, seed: u64) -> Result<Self> {
        Phase::new(phi)?;
        Ok(Self {
            phi,
            probe,
            grid,
            seed,
        })
    }

    pub fn phase(&self) -> Result<Phase> {
        Phase::new(self.phi)
    }

    pub fn transmittivity(&self) -> f64 {
        self.phi.cos().powi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn phase_bounds() {
        for bad in [0.0, -0.1, FRAC_PI_2, 1.6, f64::NAN, 1e-7, FRAC_PI_2 - 1e-7] {
            assert!(
                matches!(Phase::new(bad), Err(QndError::DegeneratePhase { .. })),
                "{bad}"
            );
        }
        assert!(Phase::new(1e-4).is_ok());
        assert!(Phase::new(FRAC_PI_2 - 1e-4).is_ok());
    }

    #[test]
    fn derived_quantities() {
        let p = Phase::new(FRAC_PI_4).unwrap();
        assert!((p.transmittivity() - 0.5).abs() < 1e-15);
        assert!((p.output_squeeze_parameter().exp() - p.cos).abs() < 1e-15);
        assert!((p.feedback_displacement(2.0) - 2.0 * p.sin).abs() < 1e-15);
        assert_eq!(p.raw_reading(1.5), -1.5 * p.sin);
    }
}
