use htm::asymptotics::ApproxForm;
use htm::distributions::{SpacingModel, TailModel};
use htm::experiments::{
    approx_only, compare, mc_tail_estimate, wilson_interval, ExperimentConfig, Z95,
};
use htm::processes::{Caps, ProcessKind};
use htm::random_times::{HorizonLaw, TimeRule};
use htm::Error;
use proptest::prelude::*;

fn walk(p: f64, rule: TimeRule, grid: Vec<f64>, n_reps: u64) -> ExperimentConfig {
    ExperimentConfig {
        process: ProcessKind::RandomWalk {
            jump: TailModel::two_point(p, 1.0, -1.0).unwrap(),
        },
        rule,
        x_grid: grid,
        n_reps,
        master_seed: 5,
        caps: Caps::default(),
        forms: vec![],
        output: None,
        regime_guard: None,
    }
}

fn poisson(n_reps: u64) -> ExperimentConfig {
    ExperimentConfig {
        process: ProcessKind::CompoundPoisson {
            c: 0.0,
            rate: 1.0,
            jump: TailModel::pareto(2.0, 1.0)
                .unwrap()
                .with_shift(3.0)
                .unwrap(),
        },
        rule: TimeRule::min_of(
            TimeRule::first_passage_below(-4.0),
            TimeRule::independent(
                HorizonLaw::Spacing(SpacingModel::exponential(0.5).unwrap()),
                0,
            ),
        ),
        x_grid: vec![1.0, 5.0, 20.0],
        n_reps,
        master_seed: 77,
        caps: Caps::default(),
        forms: vec![
            ApproxForm::CrpNTau,
            ApproxForm::PoissonLambdaTau,
            ApproxForm::LevyX1Tail,
        ],
        output: None,
        regime_guard: Some(1.0),
    }
}

#[test]
fn two_step_walk_probabilities() {
    // M_2 > 0.5 unless the first step is down: 1/2; M_2 > 1.5 only for up-up: 1/4
    let est = mc_tail_estimate(
        &walk(
            0.5,
            TimeRule::fixed_jump_count(2),
            vec![0.5, 1.5, 2.5],
            200_000,
        ),
        None,
    )
    .unwrap()
    .estimates;
    for (e, p) in est.iter().zip([0.5, 0.25, 0.0]) {
        let se = (e.ci_hi - e.ci_lo) / (2.0 * Z95);
        assert!(
            (e.p_hat - p).abs() <= 4.0 * se,
            "x={} p_hat={} p={p}",
            e.x,
            e.p_hat
        );
    }
    assert_eq!(est[2].hits, 0);
}

#[test]
fn censored_replicates_are_excluded() {
    // P{tau > 40} = 6.09e-4 for the first passage below -1 with up-probability 0.3
    let mut cfg = walk(
        0.3,
        TimeRule::first_passage_below(-1.0),
        vec![0.5, 2.5],
        50_000,
    );
    cfg.caps.max_jumps = 41;
    let est = mc_tail_estimate(&cfg, None).unwrap().estimates;
    let e = &est[0];
    let expected = 6.093312791233086e-4 * 50_000.0;
    assert!(e.censored > 0 && (e.censored as f64 - expected).abs() < 5.0 * expected.sqrt());
    assert_eq!(e.hits + e.misses() + e.censored, e.n_reps);
    assert_eq!(e.p_hat, e.hits as f64 / (e.n_reps - e.censored) as f64);
    assert_eq!(
        (e.ci_lo, e.ci_hi),
        wilson_interval(e.hits, e.n_reps - e.censored, Z95)
    );

    cfg.caps.max_jumps = 5;
    assert!(matches!(
        mc_tail_estimate(&cfg, None),
        Err(Error::Censoring { .. })
    ));
}

#[test]
fn csv_is_byte_identical_across_runs_and_workers() {
    let cfg = poisson(20_000);
    let a = compare(&cfg, Some(1)).unwrap().csv;
    let b = compare(&cfg, Some(1)).unwrap().csv;
    let c = compare(&cfg, Some(3)).unwrap().csv;
    assert_eq!(a, b);
    assert_eq!(a, c);
    let header = a.lines().next().unwrap();
    assert_eq!(
        header,
        "x,hits,n_reps,p_hat,ci_lo,ci_hi,censored,CRP_NTau_approx,CRP_NTau_ratio,\
Poisson_LambdaTau_approx,Poisson_LambdaTau_ratio,Levy_X1Tail_approx,Levy_X1Tail_ratio"
    );
    assert!(a.ends_with('\n') && !a.contains('\r'));
    assert_eq!(a.lines().count(), 4);
}

#[test]
fn approx_only_table() {
    let cfg = poisson(5_000);
    let t = approx_only(&cfg, None).unwrap();
    assert!(t.starts_with("x,CRP_NTau_approx,CRP_NTau_se,Poisson_LambdaTau_approx,"));
    assert_eq!(t, approx_only(&cfg, Some(2)).unwrap());
    let mut none = cfg.clone();
    none.forms.clear();
    assert!(approx_only(&none, None).is_err());
    assert!(matches!(
        compare(&none, None),
        Err(Error::FormMismatch { .. })
    ));
}

#[test]
fn forms_share_the_simulated_horizons() {
    let out = mc_tail_estimate(&poisson(5_000), None).unwrap();
    assert_eq!(out.horizons.counts.len(), 5_000);
    assert_eq!(out.horizons.times.len(), 5_000);
    for e in &out.estimates {
        assert!(e.approx.iter().all(|a| a.n_samples == 5_000));
    }
}

#[test]
fn summary_flags_points_below_the_guard() {
    let out = compare(&poisson(5_000), None).unwrap();
    assert_eq!(out.summary.len(), 3);
    for s in &out.summary {
        assert_eq!(s.x, 20.0);
        let v: serde_json::Value = serde_json::from_str(&s.line()).unwrap();
        assert_eq!(v["form"], s.form.name());
    }
}

#[test]
fn inapplicable_form_is_rejected_before_simulating() {
    let mut cfg = walk(0.5, TimeRule::fixed_jump_count(2), vec![0.5], 10);
    cfg.forms = vec![ApproxForm::RwTau];
    assert!(mc_tail_estimate(&cfg, None).is_err());
}

fn any_config() -> impl Strategy<Value = ExperimentConfig> {
    (
        1.1f64..4.0,
        0.0f64..5.0,
        prop::collection::btree_set(0u32..10_000, 1..6),
        1u64..1_000_000,
        any::<u64>(),
        prop::option::of(0.0f64..100.0),
        1u64..100,
    )
        .prop_map(
            |(alpha, shift, grid, n_reps, seed, guard, n)| ExperimentConfig {
                process: ProcessKind::RandomWalk {
                    jump: TailModel::pareto(alpha, 1.0)
                        .unwrap()
                        .with_shift(shift)
                        .unwrap(),
                },
                rule: TimeRule::min_of(
                    TimeRule::fixed_jump_count(n),
                    TimeRule::first_passage_below(-shift - 1.0),
                ),
                x_grid: grid.into_iter().map(|g| g as f64 * 0.5).collect(),
                n_reps,
                master_seed: seed,
                caps: Caps::default(),
                forms: vec![ApproxForm::CrpNTau],
                output: None,
                regime_guard: guard,
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips(cfg in any_config()) {
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        prop_assert_eq!(back, cfg);
    }

    #[test]
    fn hits_non_increasing_along_the_grid(p in 0.1f64..0.5, n in 1u64..30, seed in any::<u64>()) {
        let mut cfg = walk(p, TimeRule::fixed_jump_count(n), vec![0.5, 1.5, 2.5, 4.5, 8.5], 500);
        cfg.master_seed = seed;
        let est = mc_tail_estimate(&cfg, None).unwrap().estimates;
        for w in est.windows(2) {
            prop_assert!(w[1].hits <= w[0].hits);
        }
        for e in &est {
            prop_assert!(e.ci_lo <= e.p_hat && e.p_hat <= e.ci_hi);
            prop_assert_eq!(e.hits + e.misses() + e.censored, e.n_reps);
        }
    }
}
