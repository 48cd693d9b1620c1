//! Fixture suite behind `htm selftest`: small worked cases with known answers.

use crate::asymptotics::{approx_crp, approx_fixed_time, approx_levy, approx_rw, X1Tail};
use crate::bounds::{validate_kesten, validate_sstar, KestenOptions};
use crate::distributions::{SpacingModel, TailModel};
use crate::error::Result;
use crate::experiments::{mc_tail_estimate, wilson_interval, ExperimentConfig, Z95};
use crate::processes::{simulate_replicate, Caps, ProcessKind, ProcessSpec, RunOptions};
use crate::random_times::{wald_check, HorizonLaw, TimeRule};

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn detail_suffix(&self) -> String {
        if self.detail.is_empty() {
            String::new()
        } else {
            format!(" ({})", self.detail)
        }
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

type Fixture = (&'static str, fn() -> Result<(bool, String)>);

const FIXTURES: &[Fixture] = &[
    ("integrated_tail_pareto", || {
        let v = TailModel::pareto(2.0, 1.0)?.integrated_tail(4.0);
        Ok((close(v, 0.25, 1e-15), format!("{v}")))
    }),
    ("approx_crp_two_samples", || {
        let v = approx_crp(4.0, &[1, 3], 1.0, &TailModel::pareto(2.0, 1.0)?)?.value;
        Ok((
            close(v, 0.5 * (0.05 + 0.25 - 1.0 / 7.0), 1e-15),
            format!("{v}"),
        ))
    }),
    ("approx_fixed_time_four_jumps", || {
        let v = approx_fixed_time(4.0, 4.0, 1.0, &TailModel::pareto(2.0, 1.0)?)?.value;
        Ok((close(v, 0.125, 1e-15), format!("{v}")))
    }),
    ("approx_rw_single_step", || {
        let v = approx_rw(10.0, &[1, 1], 1.0, &TailModel::pareto(2.0, 1.0)?)?.value;
        Ok((close(v, 0.1 - 1.0 / 11.0, 1e-15), format!("{v}")))
    }),
    ("approx_levy_closed_form", || {
        let j = TailModel::pareto(2.0, 1.0)?.with_shift(2.0)?;
        let m = 1.5;
        let v = approx_levy(
            100.0,
            &[10.0],
            m,
            &X1Tail::BigJumps {
                rate: 1.0,
                jump: &j,
            },
        )?
        .value;
        let want = (j.integrated_tail(100.0) - j.integrated_tail(115.0)) / m;
        Ok((close(v, want, 1e-15), format!("{v}")))
    }),
    ("renewal_fixed_time_event", || {
        let spec = ProcessSpec::compound_renewal(
            -1.0,
            SpacingModel::deterministic(1.0)?,
            TailModel::degenerate(0.5)?,
        )?;
        let s = simulate_replicate(
            &spec,
            &TimeRule::fixed_time(2.5),
            0,
            0,
            &Caps::default(),
            RunOptions::default(),
        )?;
        let ok = s.n_tau == 2 && s.m_tau == 0.0 && close(s.x_tau, -1.5, 1e-15);
        Ok((
            ok,
            format!("x_tau {} n_tau {} m_tau {}", s.x_tau, s.n_tau, s.m_tau),
        ))
    }),
    ("degenerate_walk_no_hits", || {
        let cfg = walk_config(
            TailModel::degenerate(-1.0)?,
            TimeRule::fixed_jump_count(5),
            1000,
        );
        let e = &mc_tail_estimate(&cfg, None)?.estimates[0];
        Ok((e.hits == 0, format!("hits {}", e.hits)))
    }),
    ("two_point_walk_half", || {
        let cfg = walk_config(
            TailModel::two_point(0.5, 1.0, -1.0)?,
            TimeRule::fixed_jump_count(2),
            100_000,
        );
        let e = &mc_tail_estimate(&cfg, None)?.estimates[0];
        Ok((
            e.ci_lo <= 0.5 && 0.5 <= e.ci_hi,
            format!("p_hat {}", e.p_hat),
        ))
    }),
    ("wald_deterministic_walk", || {
        let spec = ProcessSpec::random_walk(TailModel::degenerate(-1.0)?)?;
        let r = wald_check(
            &spec,
            &TimeRule::first_passage_below(-5.0),
            100,
            1,
            &Caps::default(),
            None,
        )?;
        Ok((
            r.first_lhs == -5.0 && r.passes(4.0),
            format!("E X_tau {}", r.first_lhs),
        ))
    }),
    ("sstar_pareto_passes", || {
        let r = validate_sstar(&TailModel::pareto(2.0, 1.0)?, &[1e2, 1e3, 1e4, 1e5, 1e6])?;
        Ok((r.pass, String::new()))
    }),
    ("sstar_exponential_fails", || {
        let r = validate_sstar(&TailModel::exponential(1.0)?, &[1e2, 1e3, 1e4, 1e5, 1e6])?;
        Ok((!r.pass, format!("ratio at 100: {}", r.rows[0].ratio)))
    }),
    ("kesten_single_power", || {
        let opts = KestenOptions {
            step: Some(0.5),
            horizon_draws: 8,
            ..Default::default()
        };
        let h = HorizonLaw::Spacing(SpacingModel::deterministic(2.0)?);
        let r = validate_kesten(&TailModel::pareto(2.0, 1.0)?, &h, 0.5, 1, &opts)?;
        let c_hat = r
            .rows
            .iter()
            .find(|r| r.label == "c_hat")
            .map_or(f64::NAN, |r| r.lhs);
        Ok((r.pass && c_hat <= 1.0, format!("C_hat {c_hat}")))
    }),
    ("wilson_five_of_ten", || {
        let (lo, hi) = wilson_interval(5, 10, Z95);
        Ok((
            close(lo, 0.2366, 5e-5) && close(hi, 0.7634, 5e-5),
            format!("[{lo}, {hi}]"),
        ))
    }),
    ("rerun_is_identical", || {
        let cfg = walk_config(
            TailModel::pareto(1.5, 1.0)?.with_mean(-1.0)?,
            TimeRule::fixed_jump_count(20),
            5000,
        );
        let a = mc_tail_estimate(&cfg, Some(1))?.estimates;
        let b = mc_tail_estimate(&cfg, Some(2))?.estimates;
        Ok((a == b, String::new()))
    }),
];

fn walk_config(jump: TailModel, rule: TimeRule, n_reps: u64) -> ExperimentConfig {
    ExperimentConfig {
        process: ProcessKind::RandomWalk { jump },
        rule,
        x_grid: vec![0.5],
        n_reps,
        master_seed: 20_240_601,
        caps: Caps::default(),
        forms: vec![],
        output: None,
        regime_guard: None,
    }
}

/// Runs every fixture; errors count as failures.
pub fn run() -> Vec<Check> {
    FIXTURES
        .iter()
        .map(|(name, f)| match f() {
            Ok((pass, detail)) => Check { name, pass, detail },
            Err(e) => Check {
                name,
                pass: false,
                detail: e.to_string(),
            },
        })
        .collect()
}
