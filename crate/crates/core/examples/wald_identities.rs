//! Checks both Wald identities for a compound Poisson process at several random times.

use htm::distributions::{SpacingModel, TailModel};
use htm::processes::{Caps, ProcessSpec};
use htm::random_times::{wald_check, HorizonLaw, TimeRule};

fn main() -> htm::Result<()> {
    let spec =
        ProcessSpec::compound_poisson(0.0, 1.0, TailModel::lognormal(0.0, 0.5)?.with_shift(2.0)?)?;
    let indep = TimeRule::independent(HorizonLaw::Spacing(SpacingModel::exponential(0.2)?), 0);
    let rules = [
        TimeRule::fixed_time(5.0),
        TimeRule::first_passage_below(-3.0),
        TimeRule::min_of(TimeRule::first_passage_below(-3.0), indep.clone()),
        indep,
    ];
    for rule in &rules {
        let r = wald_check(&spec, rule, 100_000, 7, &Caps::default(), None)?;
        println!("{rule}");
        println!(
            "  E tau {:.4}  first: {:.5} vs {:.5} (z {:+.2})",
            r.mean_tau, r.first_lhs, r.first_rhs, r.first_z
        );
        println!(
            "  second: {:.5} vs {:.5} (z {:+.2})",
            r.second_lhs, r.second_rhs, r.second_z
        );
    }
    Ok(())
}
