pub mod asymptotics;
pub mod bounds;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod parallel;
pub mod processes;
pub mod quadrature;
pub mod random_times;
pub mod rng;
pub mod selftest;

pub use error::{Error, Result};
