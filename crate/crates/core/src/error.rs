use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "adaptive quadrature on [{lo}, {hi}] did not converge after {evaluations} evaluations"
    )]
    QuadratureNotConverged {
        lo: f64,
        hi: f64,
        evaluations: usize,
    },

    #[error("tail probability underflows at x = {x}")]
    TailUnderflow { x: f64 },

    #[error("convolution mass defect {defect:e} exceeds 1e-6; refine the grid")]
    GridTooCoarse { defect: f64 },

    #[error("cap exceeded before the random time realized ({jumps} jumps, time {time})")]
    CapExceeded { jumps: u64, time: f64 },

    #[error("inconsistent path prefix: {0}")]
    InvalidPrefix(String),

    #[error("no horizon samples supplied")]
    EmptySamples,

    #[error("horizon sample {value} is below one; counting horizons must satisfy tau >= 1")]
    SampleBelowOne { value: u64 },

    #[error("approximation form {form} is not applicable: {reason}")]
    FormMismatch { form: String, reason: String },

    #[error("jump law is light-tailed; the heavy-tail asymptotics do not apply")]
    LightTailedJumps,

    #[error("law has no heavy right tail to test")]
    NotHeavyTailed,

    #[error("drift is not negative (mean increment {mean})")]
    NonNegativeDrift { mean: f64 },

    #[error("model inadmissible: {0}")]
    Inadmissible(String),

    #[error("time rule rejected: {0}")]
    RuleRejected(String),

    #[error("{censored} of {n_reps} replicates censored (limit 0.1%)")]
    Censoring { censored: u64, n_reps: u64 },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used on the CLI error line.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::QuadratureNotConverged { .. } => "QuadratureNotConverged",
            Error::TailUnderflow { .. } => "TailUnderflow",
            Error::GridTooCoarse { .. } => "GridTooCoarse",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::InvalidPrefix(_) => "InvalidPrefix",
            Error::EmptySamples => "EmptySamples",
            Error::SampleBelowOne { .. } => "SampleBelowOne",
            Error::FormMismatch { .. } => "FormMismatch",
            Error::LightTailedJumps => "LightTailedJumps",
            Error::NotHeavyTailed => "NotHeavyTailed",
            Error::NonNegativeDrift { .. } => "NonNegativeDrift",
            Error::Inadmissible(_) => "Inadmissible",
            Error::RuleRejected(_) => "RuleRejected",
            Error::Censoring { .. } => "Censoring",
            Error::Config(_) => "Config",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }

    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
