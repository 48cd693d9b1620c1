//! Tails, integrated tails and the convolution diagnostic for a few jump laws.

use htm::distributions::{long_tail_ratio, sstar_ratio, TailModel};

fn main() -> htm::Result<()> {
    let models = [
        ("pareto(2, 1)", TailModel::pareto(2.0, 1.0)?),
        ("lognormal(0, 1)", TailModel::lognormal(0.0, 1.0)?),
        ("weibull(0.5, 1)", TailModel::weibull(0.5, 1.0)?),
        ("exponential(1)", TailModel::exponential(1.0)?),
    ];
    println!(
        "{:<18}{:>12}{:>14}{:>14}{:>14}",
        "law", "a+", "tail(50)", "F_I(50)", "sstar(50)"
    );
    for (name, m) in &models {
        println!(
            "{name:<18}{:>12.5}{:>14.4e}{:>14.4e}{:>14.5}",
            m.a_plus(),
            m.tail_bar(50.0),
            m.integrated_tail(50.0),
            sstar_ratio(m, 50.0)?
        );
    }

    let shifted = TailModel::pareto(1.5, 1.0)?.with_mean(-1.0)?;
    println!(
        "\npareto(1.5, 1) centred to mean -1: shift {}",
        shifted.shift()
    );
    for x in [10.0, 1e3, 1e5] {
        println!(
            "  P(Y > x + 1) / P(Y > x) at x = {x:e}: {:.6}",
            long_tail_ratio(&shifted, x)?
        );
    }
    Ok(())
}
