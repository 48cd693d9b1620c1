//! Monte Carlo harness: empirical tail estimates joined with the asymptotic forms.

mod config;
pub mod csv;
mod harness;
mod wilson;

pub use config::ExperimentConfig;
pub use harness::{
    approx_only, compare, evaluate_form, mc_tail_estimate, CompareOutput, FormSummary,
    HorizonSamples, RunOutput, TailEstimate,
};
pub use wilson::{wilson_interval, Z95};
