//! Draws a few paths of each process class and reports `(tau, N_tau, M_tau, X_tau)`.

use htm::distributions::{SpacingModel, TailModel};
use htm::processes::{simulate_replicate, Caps, ProcessSpec, RunOptions};
use htm::random_times::TimeRule;

fn main() -> htm::Result<()> {
    let jump = TailModel::pareto(2.0, 1.0)?.with_shift(3.0)?;
    let processes = [
        ("random walk", ProcessSpec::random_walk(jump)?),
        (
            "compound renewal",
            ProcessSpec::compound_renewal(0.5, SpacingModel::uniform(0.5, 1.5)?, jump)?,
        ),
        (
            "compound Poisson",
            ProcessSpec::compound_poisson(0.0, 1.0, jump)?,
        ),
        (
            "Levy",
            ProcessSpec::levy(-3.0, 1.0, 1.0, TailModel::pareto(2.0, 1.0)?)?,
        ),
    ];
    let rule = TimeRule::min_of(
        TimeRule::first_passage_below(-10.0),
        TimeRule::fixed_time(100.0),
    );
    println!("rule: {rule}");
    for (name, spec) in &processes {
        println!("{name}: a = {:.4}, m = {:.4}", spec.a(), spec.m());
        for i in 0..3 {
            let s = simulate_replicate(
                spec,
                &rule,
                2024,
                i,
                &Caps::default(),
                RunOptions::default(),
            )?;
            println!(
                "  replicate {i}: tau {:9.4}  N_tau {:4}  M_tau {:9.4}  X_tau {:9.4}",
                s.tau, s.n_tau, s.m_tau, s.x_tau
            );
        }
    }
    Ok(())
}
