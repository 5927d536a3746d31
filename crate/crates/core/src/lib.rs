//! Simulator for quadrature quantum-nondemolition measurements realized by
//! mixing a signal with a squeezed probe in an interferometer, homodyning one
//! output port and conditioning the other with feedback displacement and
//! squeezing.
//!
//! * [`grid_wavefunction`]: lattices, wavefunctions, densities.
//! * [`measurement_chain`]: the physical pipeline and outcome sampling.
//! * [`fidelity`]: average state fidelity `F`, distribution fidelity `G`,
//!   the output ensemble.
//! * [`optimizer`]: maximizing `F + G`, the `F = G` point, phase tuning.
//! * [`validation`]: limit and consistency checks shared by the CLI.
//! * [`cli`]: the `qnd-sim` command line.

// `!(x > 0.0)` is used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fidelity;
pub mod grid_wavefunction;
pub mod measurement_chain;
pub mod optimizer;
pub mod validation;

pub use error::{QndError, Result};
