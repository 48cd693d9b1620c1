use htm::bounds::{
    horizon_draws, horizon_tail, validate_kesten, validate_lemma_sup, validate_sstar,
    validate_stopping_t, validate_wald, KestenOptions, LemmaSupOptions,
};
use htm::distributions::{SpacingModel, TailModel};
use htm::processes::{Caps, ProcessSpec};
use htm::random_times::{HorizonLaw, TimeRule};
use htm::Error;
use proptest::prelude::*;

const DECADES: [f64; 5] = [1e2, 1e3, 1e4, 1e5, 1e6];

fn p21() -> TailModel {
    TailModel::pareto(2.0, 1.0).unwrap()
}

#[test]
fn degenerate_horizon_tail_is_closed_form() {
    // tau = 3 always: G(x) = (1/x - 1/(x + 3)) for x >= 1
    let h = HorizonLaw::Spacing(SpacingModel::deterministic(3.0).unwrap());
    let draws = horizon_draws(&h, 16, 4);
    assert!(draws.iter().all(|&t| t == 3.0));
    for x in [1.0, 5.0, 40.0] {
        let g = horizon_tail(&p21(), 1.0, &draws, x);
        assert!((g - (1.0 / x - 1.0 / (x + 3.0))).abs() < 1e-15);
    }
    assert_eq!(horizon_tail(&p21(), 1.0, &draws, -10.0), 1.0);
}

#[test]
fn kesten_report_is_self_consistent() {
    let h = HorizonLaw::Spacing(SpacingModel::exponential(1.0).unwrap());
    let opts = KestenOptions {
        step: Some(0.25),
        horizon_draws: 32,
        ..Default::default()
    };
    let r = validate_kesten(&p21(), &h, 0.5, 4, &opts).unwrap();
    assert!(r.pass);
    assert_eq!(r.recheck(), r.pass);
    let c_hat = r.rows.iter().find(|r| r.label == "c_hat").unwrap().lhs;
    for row in r.rows.iter().filter(|r| r.label == "per_n") {
        assert!(row.lhs <= c_hat);
    }
    assert_eq!(r.rows.iter().filter(|r| r.label == "per_n").count(), 4);
    assert!(validate_kesten(&p21(), &h, 0.5, 13, &opts).is_err());
}

#[test]
fn sstar_verdicts() {
    assert!(validate_sstar(&p21(), &DECADES).unwrap().pass);
    let e = validate_sstar(&TailModel::exponential(1.0).unwrap(), &DECADES).unwrap();
    assert!(!e.pass);
    assert!(e.rows[0].ratio > 10.0);
    assert!(matches!(
        validate_sstar(&TailModel::two_point(0.5, 1.0, -1.0).unwrap(), &DECADES),
        Err(Error::NotHeavyTailed)
    ));
    assert!(validate_sstar(&p21(), &[10.0, 5.0]).is_err());
}

#[test]
fn verdicts_are_recomputed_from_rows() {
    let mut r = validate_sstar(&p21(), &DECADES).unwrap();
    assert!(r.recheck());
    r.rows.last_mut().unwrap().ratio = 2.0;
    assert!(!r.recheck());
}

#[test]
fn report_csv_shape() {
    let r = validate_sstar(&p21(), &DECADES).unwrap();
    let csv = r.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "label,point,lhs,rhs,ratio,score");
    assert_eq!(lines.len(), DECADES.len() + 1);
    assert!(lines[1].starts_with("sstar,1.0000000000000000e2,"));
    let v: serde_json::Value = serde_json::from_str(&r.verdict_line()).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["name"], "sstar");
}

#[test]
fn wald_validator_passes_on_walk() {
    let spec = ProcessSpec::random_walk(
        TailModel::lognormal(0.0, 0.5)
            .unwrap()
            .with_shift(2.0)
            .unwrap(),
    )
    .unwrap();
    let r = validate_wald(
        &spec,
        &TimeRule::first_passage_below(-3.0),
        20_000,
        2,
        &Caps::default(),
        None,
    )
    .unwrap();
    assert!(r.pass, "{}", r.to_csv());
    assert_eq!(r.rows.len(), 2);
}

#[test]
fn lemma_sup_bound_holds() {
    let jump = TailModel::pareto(2.5, 1.0)
        .unwrap()
        .with_shift(2.0)
        .unwrap();
    let spec = ProcessSpec::compound_poisson(0.0, 1.0, jump).unwrap();
    let rules = [
        TimeRule::fixed_time(10.0),
        TimeRule::min_of(
            TimeRule::first_passage_below(-2.0),
            TimeRule::fixed_time(30.0),
        ),
    ];
    let opts = LemmaSupOptions {
        seed: 3,
        caps: Caps::default(),
        sup_horizon: 200.0,
    };
    let r = validate_lemma_sup(&spec, 0.2, &rules, 4000, &opts, None).unwrap();
    assert!(r.pass, "{}", r.to_csv());
    assert_eq!(r.rows[0].label, "sup");
    assert_eq!(r.rows.len(), 3);
    assert!(validate_lemma_sup(&spec, 0.0, &rules, 4000, &opts, None).is_err());
}

#[test]
fn stopping_t_needs_compound_poisson() {
    let jump = TailModel::pareto(2.0, 1.0)
        .unwrap()
        .with_shift(3.0)
        .unwrap();
    let walk = ProcessSpec::random_walk(jump).unwrap();
    let rules = [TimeRule::fixed_time(5.0)];
    let r = validate_stopping_t(&walk, &rules, 5.0, &[10.0], 100, 1, &Caps::default(), None);
    assert!(matches!(r, Err(Error::FormMismatch { .. })));
    let cp = ProcessSpec::compound_poisson(0.0, 1.0, jump).unwrap();
    let r = validate_stopping_t(
        &cp,
        &rules,
        5.0,
        &[10.0, 100.0, 1000.0],
        2000,
        1,
        &Caps::default(),
        None,
    )
    .unwrap();
    assert!(r.pass, "{}", r.to_csv());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn horizon_tail_is_a_non_increasing_probability(t in 0.1f64..20.0, c in 0.2f64..3.0, x in -5.0f64..100.0, dx in 0.0f64..50.0) {
        let draws = [t, 2.0 * t, 0.5 * t];
        let g0 = horizon_tail(&p21(), c, &draws, x);
        let g1 = horizon_tail(&p21(), c, &draws, x + dx);
        prop_assert!((0.0..=1.0).contains(&g0));
        prop_assert!(g1 <= g0 + 1e-15);
    }

    #[test]
    fn longer_horizon_means_heavier_tail(t in 0.1f64..20.0, x in 1.0f64..100.0) {
        let short = horizon_tail(&p21(), 1.0, &[t], x);
        let long = horizon_tail(&p21(), 1.0, &[2.0 * t], x);
        prop_assert!(long >= short);
    }
}
