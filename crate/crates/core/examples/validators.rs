//! Runs the numerical validators on small inputs and prints their verdicts.

use htm::bounds::{validate_kesten, validate_sstar, validate_stopping_t, KestenOptions};
use htm::distributions::{SpacingModel, TailModel};
use htm::processes::{Caps, ProcessSpec};
use htm::random_times::{HorizonLaw, TimeRule};

fn main() -> htm::Result<()> {
    let grid = [1e2, 1e3, 1e4, 1e5, 1e6];
    for m in [TailModel::weibull(0.5, 1.0)?, TailModel::exponential(1.0)?] {
        let r = validate_sstar(&m, &grid)?;
        print!("{}", r.to_csv());
        println!("{}\n", r.verdict_line());
    }

    let opts = KestenOptions {
        step: Some(0.1),
        horizon_draws: 64,
        ..Default::default()
    };
    let h = HorizonLaw::Spacing(SpacingModel::exponential(1.0)?);
    let r = validate_kesten(&TailModel::pareto(2.0, 1.0)?, &h, 0.5, 6, &opts)?;
    print!("{}", r.to_csv());
    println!("{}\n", r.verdict_line());

    let spec =
        ProcessSpec::compound_poisson(0.0, 1.0, TailModel::pareto(2.0, 1.0)?.with_shift(3.0)?)?;
    let rules = [
        TimeRule::fixed_time(10.0),
        TimeRule::first_passage_below(-3.0),
    ];
    let r = validate_stopping_t(
        &spec,
        &rules,
        10.0,
        &[10.0, 100.0, 1000.0],
        20_000,
        8,
        &Caps::default(),
        None,
    )?;
    print!("{}", r.to_csv());
    println!("{}", r.verdict_line());
    Ok(())
}
