//! Evaluates the asymptotic forms on the same horizon samples and sets
//! them against the simulated tail of `M_tau`.

use htm::asymptotics::ApproxForm;
use htm::distributions::{SpacingModel, TailModel};
use htm::experiments::{compare, ExperimentConfig};
use htm::processes::{Caps, ProcessKind};
use htm::random_times::{HorizonLaw, TimeRule};

fn main() -> htm::Result<()> {
    let cfg = ExperimentConfig {
        process: ProcessKind::CompoundPoisson {
            c: 0.0,
            rate: 1.0,
            jump: TailModel::pareto(2.0, 1.0)?.with_shift(3.0)?,
        },
        rule: TimeRule::independent(HorizonLaw::Spacing(SpacingModel::exponential(1.0)?), 0),
        x_grid: vec![5.0, 10.0, 20.0],
        n_reps: 200_000,
        master_seed: 3,
        caps: Caps::default(),
        forms: vec![
            ApproxForm::CrpNTau,
            ApproxForm::PoissonNTau,
            ApproxForm::PoissonLambdaTau,
            ApproxForm::PoissonX1Tail,
        ],
        output: None,
        regime_guard: None,
    };
    let out = compare(&cfg, None)?;
    for e in &out.run.estimates {
        println!(
            "x = {:5}: P(M_tau > x) ~ {:.4e} [{:.4e}, {:.4e}]",
            e.x, e.p_hat, e.ci_lo, e.ci_hi
        );
        for a in &e.approx {
            println!(
                "    {:<20} {:.4e} (se {:.1e})  ratio {:.3}",
                a.form,
                a.value,
                a.std_error,
                e.p_hat / a.value
            );
        }
    }
    Ok(())
}
