//! Loads an experiment from JSON, runs it and writes the estimate table.
//!
//! `cargo run --example experiment_config -- path/to/config.json` runs any
//! config; without an argument a small random walk experiment is used.

use htm::experiments::{compare, ExperimentConfig};

const DEFAULT: &str = r#"{
    "process": {"random_walk": {"jump": {"family": {"pareto": {"alpha": 1.5, "xm": 1.0}}, "shift": 4.0}}},
    "rule": {"fixed_jump_count": {"n": 100}},
    "x_grid": [50, 200, 800],
    "n_reps": 100000,
    "master_seed": 1,
    "forms": ["RW_Tau", "FixedTime_ENt", "CRP_NTau"]
}"#;

fn main() -> htm::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(p) => ExperimentConfig::load(p.as_ref())?,
        None => ExperimentConfig::from_json(DEFAULT)?,
    };
    let out = compare(&cfg, None)?;
    print!("{}", out.csv);
    for s in &out.summary {
        eprintln!("{}", s.line());
    }
    Ok(())
}
