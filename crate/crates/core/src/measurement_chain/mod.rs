//! Interferometric mixing, homodyne detection, feedback and output squeezing.

mod conditioning;
mod config;
mod joint;
mod sampling;

pub(crate) use conditioning::HomodyneKernel;
pub use conditioning::{
    conditional_output, conditional_state_raw, feedback_displace, homodyne_density_at,
    homodyne_distribution, homodyne_distribution_on, output_squeeze, Outcome,
    NULL_OUTCOME_THRESHOLD, OUTCOME_SPAN_SIGMAS,
};
pub use config::{ChainConfig, Phase, PHASE_MARGIN};
pub use joint::{beam_splitter_transform, beam_splitter_transform_on, JointWaveFunction};
pub use sampling::{sample_outcomes, unit_uniform, OutcomeSampler};
