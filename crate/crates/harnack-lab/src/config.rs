//! placeholder
pub struct ExperimentConfig;
pub enum Experiment {}
