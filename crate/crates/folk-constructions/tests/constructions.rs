use folk_constructions::*;
use market_core::fixtures::{table1, table1_in, table2, TABLE1};
use market_core::{parse_market_document, BigRational, HospitalId, Matching, StudentId};
use repeated_core::fixtures::MU0;
use repeated_core::{
    check_self_enforcing, continuation_values, stationary_process, write_automaton, Lottery, Witness,
};
use static_algorithms::{deferred_acceptance, Proposer};

fn trigger_as_mu0(discount: f64) -> repeated_core::Automaton {
    let t = table1();
    let mut a = build_trigger_process(&t.spec, &t.m0, &t.m_w, discount).unwrap();
    a.name = "mu0".into();
    a.realizations[0].name = "m0".into();
    a.realizations[1].name = "mW".into();
    a
}

#[test]
fn trigger_matches_the_bundled_file() {
    let doc = parse_market_document::<f64>(TABLE1).unwrap();
    assert_eq!(write_automaton(&trigger_as_mu0(0.8), &doc.cohorts), MU0);
}

#[test]
fn trigger_threshold_on_table1() {
    let t = table1();
    assert!(check_self_enforcing(&t.spec, &trigger_as_mu0(0.8)).unwrap().is_self_enforcing());
    assert!(!check_self_enforcing(&t.spec, &trigger_as_mu0(0.7)).unwrap().is_self_enforcing());
}

#[test]
fn trigger_on_a_stable_matching_acts_like_repeating_it() {
    let t = table1();
    let trig = build_trigger_process(&t.spec, &t.m_f, &t.m_f, 0.6).unwrap();
    let stat = stationary_process(&t.spec, &t.m_f, 0.6).unwrap();
    let (vt, vs) = (continuation_values(&[t.spec.clone()], &trig).unwrap(), continuation_values(&[t.spec.clone()], &stat).unwrap());
    for f in t.spec.hospitals() {
        assert!((vt.initial(&trig, f) - vs.initial(&stat, f)).abs() < 1e-12);
    }
    assert!(check_self_enforcing(&t.spec, &trig).unwrap().is_self_enforcing());
}

#[test]
fn bisection_finds_three_quarters() {
    let t = table1();
    let start = std::time::Instant::now();
    let out = min_delta_bisect(
        std::slice::from_ref(&t.spec),
        |d| build_trigger_process(&t.spec, &t.m0, &t.m_w, d),
        0.0,
        0.99,
        1e-4,
    )
    .unwrap();
    let BisectOutcome::Threshold { delta, lower, upper } = out else { panic!("{out:?}") };
    assert!((delta - 0.75).abs() < 1e-3, "{delta}");
    assert!(lower <= 0.75 && 0.75 <= upper);
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn bisection_sentinels() {
    let t = table1();
    let stable = |d| Ok(stationary_process(&t.spec, &t.m_w, d)?);
    assert_eq!(
        min_delta_bisect(std::slice::from_ref(&t.spec), stable, 0.0, 0.99, 1e-3).unwrap(),
        BisectOutcome::PassesEverywhere
    );
    let unstable = |d| Ok(stationary_process(&t.spec, &t.m0, d)?);
    assert_eq!(
        min_delta_bisect(std::slice::from_ref(&t.spec), unstable, 0.0, 0.99, 1e-3).unwrap(),
        BisectOutcome::NeverPasses
    );
    // Passing low and failing high is reported, not bisected.
    let flipped = |d: f64| build_trigger_process(&t.spec, &t.m0, &t.m_w, 0.99 - d);
    assert!(matches!(
        min_delta_bisect(std::slice::from_ref(&t.spec), flipped, 0.0, 0.9, 1e-3),
        Err(FolkError::NonMonotone { .. })
    ));
    assert!(min_delta_bisect(std::slice::from_ref(&t.spec), stable, 0.5, 0.2, 1e-3).is_err());
}

fn table1_scheme() -> PunishmentScheme<f64> {
    let t = table1();
    find_player_specific_punishments(&t.spec, &Lottery::point(t.m0.clone()), SchemeOptions::default()).unwrap()
}

#[test]
fn table1_scheme_certificate() {
    let t = table1();
    let s = table1_scheme();
    assert_eq!(s.hospitals.len(), 3);
    // u(m0) = (6, 8, 5) against reduced minmax values (5, 6, 1).
    let expect = [(6.0, 5.0), (8.0, 6.0), (5.0, 1.0)];
    for (p, (target, low)) in s.hospitals.iter().zip(expect) {
        let f = p.hospital;
        assert_eq!(lottery_value(&t.spec, f, &s.target), target);
        assert_eq!(p.minmax_value, low);
        // The minmax matching leaves f holding its best response.
        assert_eq!(t.spec.best_response(f, &p.minmax).1, low);
        assert_eq!(t.spec.utility_of(f, p.minmax.members(f)), low);
        let own = lottery_value(&t.spec, f, &p.lottery);
        assert!(own < target - 1e-9 && own > low + 1e-9);
        for q in s.hospitals.iter().filter(|q| q.hospital != f) {
            assert!(own < lottery_value(&t.spec, f, &q.lottery) - 1e-9);
        }
    }
    s.verify(&t.spec).unwrap();
    assert!(s.punishment_length >= 1);
}

#[test]
fn exact_scheme_agrees_with_float() {
    let t = table1_in::<BigRational>();
    let s = find_player_specific_punishments(&t.spec, &Lottery::point(t.m0.clone()), SchemeOptions::default()).unwrap();
    let f = table1_scheme();
    assert_eq!(s.punishment_length, f.punishment_length);
    for (a, b) in s.hospitals.iter().zip(&f.hospitals) {
        assert_eq!(a.nu, b.nu);
        assert_eq!(a.minmax, b.minmax);
        assert_eq!(market_core::Scalar::to_f64_lossy(&a.weight), b.weight);
    }
}

#[test]
fn scheme_rejects_targets_outside_the_interior() {
    let t = table1();
    // f1 left empty gets 0, below its minmax value 5.
    let w = StudentId;
    let starve = Matching::from_sets(&t.spec, &[(HospitalId(1), vec![w(0), w(1)]), (HospitalId(2), vec![w(2), w(3)])])
        .unwrap();
    let err = find_player_specific_punishments(&t.spec, &Lottery::point(starve), SchemeOptions::default());
    assert!(matches!(err, Err(FolkError::Input(_))), "{err:?}");
    // f2 gets exactly 6 = its minmax value under mW.
    let err = find_player_specific_punishments(&t.spec, &Lottery::point(t.m_w.clone()), SchemeOptions::default());
    assert!(matches!(err, Err(FolkError::Input(_))), "{err:?}");
}

#[test]
fn scheme_budget_exhaustion_is_reported() {
    let t = table1();
    let opts = SchemeOptions { budget: 2, ..SchemeOptions::default() };
    let err = find_player_specific_punishments(&t.spec, &Lottery::point(t.m0.clone()), opts);
    assert!(matches!(err, Err(FolkError::NotFound(_))), "{err:?}");
}

#[test]
fn everyone_locked_gives_an_empty_scheme() {
    let t = table2();
    let s = find_player_specific_punishments(&t.spec, &Lottery::point(t.m_star.clone()), SchemeOptions::default())
        .unwrap();
    assert!(s.hospitals.is_empty());
    let a = build_folk_automaton(&t.spec, &s, 0.5).unwrap();
    assert_eq!(a.num_states(), 1);
    assert!(check_self_enforcing(&t.spec, &a).unwrap().is_self_enforcing());
}

#[test]
fn folk_automaton_on_table1() {
    let t = table1();
    let s = table1_scheme();
    let start = std::time::Instant::now();
    let high = build_folk_automaton(&t.spec, &s, 0.95).unwrap();
    assert_eq!(high.num_states(), 1 + 3 + 3 * s.punishment_length);
    check_outputs(std::slice::from_ref(&t.spec), &high, true).unwrap();
    assert!(check_self_enforcing(&t.spec, &high).unwrap().is_self_enforcing());
    let low = build_folk_automaton(&t.spec, &s, 0.05).unwrap();
    let v = check_self_enforcing(&t.spec, &low).unwrap();
    // Myopic hospitals take the best response to the unstable m0.
    assert!(matches!(v.witness, Some(Witness::Hospital { state: 0, .. })), "{v:?}");

    let out =
        min_delta_bisect(std::slice::from_ref(&t.spec), |d| build_folk_automaton(&t.spec, &s, d), 0.05, 0.95, 1e-3)
            .unwrap();
    let BisectOutcome::Threshold { lower, upper, .. } = out else { panic!("{out:?}") };
    let at = |d| check_self_enforcing(&t.spec, &build_folk_automaton(&t.spec, &s, d).unwrap()).unwrap();
    assert!(!at(lower).is_self_enforcing());
    assert!(at(upper).is_self_enforcing());
    assert!(start.elapsed().as_secs() < 30);
}

#[test]
fn short_punishments_fail_in_the_reward_regime() {
    let t = table1();
    let s = PunishmentScheme { punishment_length: 1, ..table1_scheme() };
    let found = [0.99, 0.999, 0.9999].iter().find_map(|&d| {
        match check_self_enforcing(&t.spec, &build_folk_automaton(&t.spec, &s, d).unwrap()).unwrap().witness {
            Some(Witness::Hospital { state, hospital, .. }) => Some((state, hospital)),
            _ => None,
        }
    });
    let (state, hospital) = found.expect("a one-period punishment is too short somewhere on the grid");
    // Reward states are 1..=3, ordered like the scheme's hospitals.
    assert!((1..=3).contains(&state));
    assert_eq!(s.hospitals[state - 1].hospital, hospital);
}

#[test]
fn discount_aware_search_returns_a_passing_scheme() {
    let t = table1();
    let opts = SchemeOptions { discount: Some(0.9), ..SchemeOptions::default() };
    let s = find_player_specific_punishments(&t.spec, &Lottery::point(t.m0.clone()), opts).unwrap();
    let a = build_folk_automaton(&t.spec, &s, 0.9).unwrap();
    assert!(check_self_enforcing(&t.spec, &a).unwrap().is_self_enforcing());
}

#[test]
fn stationary_da_audit_is_empty() {
    let cfg = large_market::TierConfig::from_toml(
        "quota = 2\nhospitals = { counts = [2, 18] }\nstudents = { counts = [12, 28] }\ncommon_values = [3.0, 1.0]\n",
    )
    .unwrap();
    let cohorts = sample_cohorts(&cfg, 20, 1, 3).unwrap();
    let m = deferred_acceptance(&cohorts[0].spec, Proposer::Hospitals);
    let a = stationary_process(&cohorts[0].spec, &m, 0.8).unwrap();
    let report = elite_deviation_audit(&cohorts, &a, 0.8, 1.0).unwrap();
    assert!(report.is_empty());
    assert!(report.slack > 0.0);
}
