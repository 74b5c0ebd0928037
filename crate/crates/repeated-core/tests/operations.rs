use market_core::fixtures::{self, Table1, Table2};
use market_core::{parse_market_document, BigRational, EnumerationCap, HospitalId, Market, Matching, StudentId};
use repeated_core::fixtures::{mu0, mu0_in, MU0};
use repeated_core::*;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn ws(spec: &Market, names: &[&str]) -> Vec<StudentId> {
    let mut v: Vec<StudentId> = names.iter().map(|n| spec.student_by_name(n).unwrap()).collect();
    v.sort();
    v
}

#[test]
fn continuation_value_examples() {
    let t = fixtures::table1();
    let a = mu0(0.8);
    let v = continuation_values(std::slice::from_ref(&t.spec), &a).unwrap();
    let f1 = t.spec.hospital_by_name("f1").unwrap();
    assert!((v.get(0, f1) - 6.0).abs() < 1e-10);
    assert!((v.initial(&a, f1) - 6.0).abs() < 1e-10);
    for d in [0.0, 0.3, 0.99] {
        let v = continuation_values(std::slice::from_ref(&t.spec), &mu0(d)).unwrap();
        assert!((v.get(1, f1) - 5.0).abs() < 1e-10);
    }

    let exact = fixtures::table1_in::<BigRational>();
    let a = mu0_in(r(4, 5));
    let v = continuation_values(std::slice::from_ref(&exact.spec), &a).unwrap();
    assert_eq!(*v.get(0, f1), r(6, 1));

    // An empty roster is worth nothing at any patience.
    let lonely: Market = fixtures::parse_market("HOSPITALS\nf 1 : a=1\nSTUDENTS\na :\n");
    for d in [0.0, 0.5, 0.9] {
        let a = stationary_process(&lonely, &Matching::empty_for(&lonely), d).unwrap();
        assert_eq!(*continuation_values(std::slice::from_ref(&lonely), &a).unwrap().get(0, HospitalId(0)), 0.0);
    }
}

#[test]
fn checker_examples() {
    let t = fixtures::table1();
    assert!(check_self_enforcing(&t.spec, &mu0(0.8)).unwrap().is_self_enforcing());

    let verdict = check_self_enforcing(&t.spec, &mu0(0.7)).unwrap();
    match verdict.witness {
        Some(Witness::Hospital { state, hospital, students, gain, .. }) => {
            assert_eq!(state, 0);
            assert_eq!(hospital, t.spec.hospital_by_name("f1").unwrap());
            assert_eq!(students, ws(&t.spec, &["w1", "w2"]));
            assert!((gain - (9.0 - 4.0 * 0.7 - 6.0)).abs() < 1e-9);
        }
        other => panic!("expected a hospital witness, got {other:?}"),
    }

    // Exactly at the threshold the deviation gains nothing.
    let exact = fixtures::table1_in::<BigRational>();
    assert!(check_self_enforcing(&exact.spec, &mu0_in(r(3, 4))).unwrap().is_self_enforcing());
    let verdict = check_self_enforcing(&exact.spec, &mu0_in(r(7, 10))).unwrap();
    assert!(matches!(verdict.witness, Some(Witness::Hospital { gain, .. }) if gain == r(1, 5)));

    for d in [0.0, 0.3, 0.65, 0.99] {
        let a = stationary_process(&t.spec, &t.m_w, d).unwrap();
        assert!(check_self_enforcing(&t.spec, &a).unwrap().is_self_enforcing());
    }
}

#[test]
fn stationary_process_examples() {
    let Table1 { spec, m0, m_w, .. } = fixtures::table1();
    let a = stationary_process(&spec, &m_w, 0.5).unwrap();
    assert_eq!(a.num_states(), 1);
    assert!(check_self_enforcing(&spec, &a).unwrap().is_self_enforcing());

    let a = stationary_process(&spec, &m0, 0.99).unwrap();
    match check_self_enforcing(&spec, &a).unwrap().witness {
        Some(Witness::Hospital { hospital, students, .. }) => {
            assert_eq!(hospital, spec.hospital_by_name("f1").unwrap());
            assert!(students.contains(&spec.student_by_name("w2").unwrap()));
        }
        other => panic!("expected a hospital witness, got {other:?}"),
    }

    let empty: Market = fixtures::parse_market("HOSPITALS\nSTUDENTS\n");
    let a = stationary_process(&empty, &Matching::empty_for(&empty), 0.0).unwrap();
    assert!(check_self_enforcing(&empty, &a).unwrap().is_self_enforcing());
}

#[test]
fn naive_minmax_examples() {
    let t = fixtures::table1();
    let cap = EnumerationCap::default();
    let expect = [("f1", 5.0), ("f2", 6.0), ("fr", 1.0)];
    for (name, value) in expect {
        let f = t.spec.hospital_by_name(name).unwrap();
        let (v, argmin) = naive_minmax(&t.spec, f, cap).unwrap();
        assert_eq!(v, value, "{name}");
        assert!(t.spec.is_individually_rational(&argmin));
        assert_eq!(t.spec.best_response(f, &argmin).1, value);
    }
    assert!(naive_minmax(&t.spec, HospitalId(0), EnumerationCap(3)).is_err());
}

#[test]
fn reduced_minmax_examples() {
    let t = fixtures::table1();
    let cap = EnumerationCap::default();
    let reduced = reduced_minmax(&t.spec, cap).unwrap();
    let naive = naive_minmax_all(&t.spec, cap).unwrap();
    for (entry, (value, argmin)) in reduced.iter().zip(&naive) {
        assert!(!entry.locked);
        assert_eq!(entry.value, *value);
        assert_eq!(entry.argmin.as_ref(), Some(argmin));
    }

    let t2 = fixtures::table2();
    let values: Vec<f64> = reduced_minmax(&t2.spec, cap).unwrap().iter().map(|e| e.value).collect();
    assert_eq!(values, vec![9.0, 8.0, 1.0]);

    let pair: Market = fixtures::parse_market("HOSPITALS\nf 1 : w=7\nSTUDENTS\nw : f\n");
    assert_eq!(reduced_minmax(&pair, cap).unwrap()[0].value, 7.0);
}

#[test]
fn top_coalition_lock_examples() {
    let Table2 { spec, m_star } = fixtures::table2();
    let a = stationary_process(&spec, &m_star, 0.9).unwrap();
    assert_eq!(verify_top_coalition_lock(&spec, &a), Ok(true));

    // Any automaton that plays something else somewhere fails the check first.
    let other = spec
        .apply_deviation(&m_star, spec.hospital_by_name("f1").unwrap(), &ws(&spec, &["w1", "w3"]))
        .unwrap();
    for d in [0.1, 0.5, 0.9, 0.999] {
        let mut a = stationary_process(&spec, &m_star, d).unwrap();
        let r = a.add_realization("other", 0, other.clone());
        let mut state = State::new("twist", Lottery::point(r), Lottery::point(0));
        state.deviation_any = Some(Lottery::point(1));
        a.add_state(state);
        a.states[0].onpath = Lottery::new(vec![(0, 0.5), (1, 0.5)]).unwrap();
        assert!(!check_self_enforcing(&spec, &a).unwrap().is_self_enforcing());
        assert!(matches!(verify_top_coalition_lock(&spec, &a), Err(ProcessError::Precondition(_))));
    }

    let t = fixtures::table1();
    let a = stationary_process(&t.spec, &t.m_w, 0.5).unwrap();
    assert_eq!(verify_top_coalition_lock(&t.spec, &a), Ok(true));
}

#[test]
fn automaton_file_round_trip() {
    let doc = parse_market_document::<f64>(fixtures::TABLE1).unwrap();
    let a = parse_automaton(MU0, &doc.cohorts).unwrap();
    a.validate(&doc.specs()).unwrap();
    assert_eq!(write_automaton(&a, &doc.cohorts), MU0);
    let exact = parse_market_document::<BigRational>(fixtures::TABLE1).unwrap();
    let a = parse_automaton(MU0, &exact.cohorts).unwrap();
    assert_eq!(a.discount, r(4, 5));
    assert_eq!(write_automaton(&a, &exact.cohorts), MU0.replace("0.8", "4/5"));
}

#[test]
fn automaton_references_market_matchings() {
    let doc = parse_market_document::<f64>(fixtures::TABLE1).unwrap();
    let text = "AUTOMATON ref\nDISCOUNT 1/2\nSTATE s\nOUTPUT 1/2 mW\nOUTPUT 1/2 mF\nONPATH s=1\n";
    let a = parse_automaton(text, &doc.cohorts).unwrap();
    assert_eq!(a.discount, 0.5);
    assert_eq!(a.realizations.len(), 2);
    assert!(check_self_enforcing(&doc.primary().spec, &a).unwrap().is_self_enforcing());
}

#[test]
fn automaton_parse_errors_have_positions() {
    let doc = parse_market_document::<f64>(fixtures::TABLE1).unwrap();
    let cases = [
        ("AUTOMATON x\nSTATE s\nOUTPUT 1 nope\nONPATH s=1\n", 3),
        ("AUTOMATON x\nSTATE s\nOUTPUT 1 mW\nONPATH t=1\n", 4),
        ("AUTOMATON x\nSTATE s\nOUTPUT 1 mW\nONPATH s=0.5\n", 4),
        ("AUTOMATON x\nMATCHING a : f1={w9}\nSTATE s\nOUTPUT 1 a\nONPATH s=1\n", 2),
        ("AUTOMATON x\nSTATE s\nOUTPUT 1 mW\nONPATH s=1\nDEVIATION f9 s=1\n", 5),
        ("AUTOMATON x\nSTATE s\nONPATH s=1\n", 2),
        ("AUTOMATON x\nBOGUS\n", 2),
    ];
    for (text, line) in cases {
        let err = parse_automaton(text, &doc.cohorts).unwrap_err();
        assert_eq!(err.line, line, "{text}: {err}");
    }
}
