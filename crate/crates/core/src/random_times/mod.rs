//! Random times decided from the path prefix and their own randomness.

mod rule;
mod wald;

pub use rule::{Decision, HorizonLaw, Prefix, RuleState, TimeRule};
pub use wald::{wald_check, WaldForm, WaldReport};
