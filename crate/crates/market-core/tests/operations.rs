use market_core::fixtures::{self, Table1};
use market_core::{
    enumerate_stable_matchings, for_each_subset, Attribution, Coalition, EnumerationCap, HospitalId, Market,
    Matching, StudentId,
};

// Utility rows typed in from the worked example, independent of the fixture file.
const ROWS: [[f64; 5]; 3] = [[5.0, 4.0, 3.0, 2.0, 1.0], [2.0, 4.0, 5.0, 3.0, 1.0], [2.0, 5.0, 3.0, 4.0, 1.0]];

fn h(spec: &Market, name: &str) -> HospitalId {
    spec.hospital_by_name(name).unwrap()
}

fn ws(spec: &Market, names: &[&str]) -> Vec<StudentId> {
    let mut v: Vec<StudentId> = names.iter().map(|n| spec.student_by_name(n).unwrap()).collect();
    v.sort();
    v
}

fn sets(spec: &Market, rosters: &[(&str, &[&str])]) -> Matching {
    let pairs: Vec<(HospitalId, Vec<StudentId>)> = rosters.iter().map(|(f, w)| (h(spec, f), ws(spec, w))).collect();
    Matching::from_sets(spec, &pairs).unwrap()
}

fn oracle_sum(f: usize, students: &[usize]) -> f64 {
    students.iter().map(|w| ROWS[f][*w]).sum()
}

/// Every `(f, W)` that turns `m` into `target`, found by scanning all coalitions.
fn brute_deviators(spec: &Market, m: &Matching, target: &Matching) -> Vec<HospitalId> {
    let mut out = Vec::new();
    let all: Vec<StudentId> = spec.students().collect();
    for f in spec.hospitals() {
        let mut hit = spec.apply_deviation(m, f, &[]).unwrap() == *target;
        for_each_subset(&all, spec.quota(f), |w| hit |= spec.apply_deviation(m, f, w).unwrap() == *target);
        if hit && !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

/// A hospital no student accepts, with everyone unmatched.
fn unwanted_hospital() -> (Market, Matching) {
    let spec: Market = fixtures::parse_market("HOSPITALS\nf 1 : a=1 b=2\nSTUDENTS\na :\nb :\n");
    let m = Matching::empty_for(&spec);
    (spec, m)
}

#[test]
fn fixture_rows_match_typed_table() {
    let t = fixtures::table1();
    for f in t.spec.hospitals() {
        for w in t.spec.students() {
            assert_eq!(*t.spec.utility(f, w), ROWS[f.0][w.0]);
        }
    }
}

#[test]
fn set_utility_examples() {
    let Table1 { spec, .. } = fixtures::table1();
    assert_eq!(spec.set_utility(h(&spec, "f1"), &ws(&spec, &["w1", "w5"])).unwrap(), 6.0);
    assert_eq!(spec.set_utility(h(&spec, "f2"), &ws(&spec, &["w3", "w4"])).unwrap(), oracle_sum(1, &[2, 3]));
    assert_eq!(spec.set_utility(h(&spec, "f2"), &ws(&spec, &["w3", "w4"])).unwrap(), 8.0);
    for f in spec.hospitals() {
        assert_eq!(spec.set_utility(f, &[]).unwrap(), 0.0);
    }
    assert!(spec.set_utility(HospitalId(7), &[]).is_err());
    assert!(spec.set_utility(h(&spec, "f1"), &[StudentId(42)]).is_err());
}

#[test]
fn individual_rationality_examples() {
    let t = fixtures::table1();
    assert!(t.spec.is_individually_rational(&t.m_w));
    assert!(t.spec.is_individually_rational(&Matching::empty_for(&t.spec)));

    // w5 no longer accepts the rural hospital.
    let text = fixtures::TABLE1.replace("w5 : f1 f2 fr", "w5 : f1 f2");
    let modified: Market = fixtures::parse_market(&text);
    let m_w = sets(&modified, &[("f1", &["w3", "w4"]), ("f2", &["w1", "w2"]), ("fr", &["w5"])]);
    assert!(!modified.is_individually_rational(&m_w));
    let blocks = modified.blocking_coalitions(&m_w);
    assert!(blocks.contains(&Coalition { hospital: None, students: ws(&modified, &["w5"]) }));
    assert!(!modified.is_stable(&m_w));
}

#[test]
fn blocking_coalition_examples() {
    let t = fixtures::table1();
    let blocks = t.spec.blocking_coalitions(&t.m0);
    let f1 = h(&t.spec, "f1");
    assert!(blocks.contains(&Coalition { hospital: Some(f1), students: ws(&t.spec, &["w1", "w2"]) }));
    // Strictly ordered by hospital, then student set.
    let keys: Vec<_> = blocks.iter().map(|c| (c.hospital.map(|f| f.0), c.students.clone())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);

    assert!(t.spec.blocking_coalitions(&t.m_f).is_empty());
    let t2 = fixtures::table2();
    assert!(t2.spec.blocking_coalitions(&t2.m_star).is_empty());
}

#[test]
fn stability_examples() {
    let t = fixtures::table1();
    assert!(t.spec.is_stable(&t.m_w));
    assert!(t.spec.is_stable(&t.m_f));
    assert!(!t.spec.is_stable(&t.m0));

    let single: Market = fixtures::parse_market("HOSPITALS\nf 1 : w=1\nSTUDENTS\nw : f\n");
    let matched = Matching::from_assignment(&single, vec![Some(HospitalId(0))]).unwrap();
    assert!(single.is_stable(&matched));
    assert!(!single.is_stable(&Matching::empty_for(&single)));
}

#[test]
fn deviation_examples() {
    let t = fixtures::table1();
    let f1 = h(&t.spec, "f1");
    let dev = t.spec.apply_deviation(&t.m0, f1, &ws(&t.spec, &["w1", "w2"])).unwrap();
    let expected = sets(&t.spec, &[("f1", &["w1", "w2"]), ("f2", &["w3", "w4"])]);
    assert_eq!(dev, expected);
    assert_eq!(dev.assignment(t.spec.student_by_name("w5").unwrap()), None);

    for m in [&t.m0, &t.m_f, &t.m_w] {
        for f in t.spec.hospitals() {
            assert_eq!(t.spec.apply_deviation(m, f, m.members(f)).unwrap(), *m);
        }
    }
    let fr = h(&t.spec, "fr");
    assert_eq!(t.spec.apply_deviation(&t.m_w, fr, &ws(&t.spec, &["w5"])).unwrap(), t.m_w);
    assert!(t.spec.apply_deviation(&t.m0, f1, &ws(&t.spec, &["w1", "w2", "w3"])).is_err());
}

#[test]
fn identify_deviator_examples() {
    let t = fixtures::table1();
    let f1 = h(&t.spec, "f1");
    let dev = t.spec.apply_deviation(&t.m0, f1, &ws(&t.spec, &["w1", "w2"])).unwrap();
    assert_eq!(t.spec.identify_deviator(&t.m0, &dev), Attribution::Hospital(f1));
    assert_eq!(brute_deviators(&t.spec, &t.m0, &dev), vec![f1]);

    assert_eq!(t.spec.identify_deviator(&t.m0, &t.m0), Attribution::Unchanged);

    assert_eq!(t.spec.identify_deviator(&t.m_f, &t.m_w), Attribution::Unattributable);
    assert!(brute_deviators(&t.spec, &t.m_f, &t.m_w).is_empty());
}

#[test]
fn available_set_examples() {
    let t = fixtures::table1();
    let (f1, f2) = (h(&t.spec, "f1"), h(&t.spec, "f2"));
    assert_eq!(t.spec.available_set(f1, &t.m0), ws(&t.spec, &["w1", "w2", "w3", "w4", "w5"]));
    assert_eq!(t.spec.available_set(f2, &t.m0), ws(&t.spec, &["w1", "w2", "w3", "w4"]));

    let (lonely, empty) = unwanted_hospital();
    assert!(lonely.available_set(HospitalId(0), &empty).is_empty());
}

#[test]
fn best_response_examples() {
    let t = fixtures::table1();
    let (f1, f2, fr) = (h(&t.spec, "f1"), h(&t.spec, "f2"), h(&t.spec, "fr"));
    assert_eq!(t.spec.best_response(f1, &t.m0), (ws(&t.spec, &["w1", "w2"]), 9.0));
    assert_eq!(t.spec.best_response(f2, &t.m0), (ws(&t.spec, &["w2", "w3"]), oracle_sum(1, &[1, 2])));
    assert_eq!(t.spec.best_response(fr, &t.m_w), (ws(&t.spec, &["w5"]), 1.0));
    let (lonely, empty) = unwanted_hospital();
    assert_eq!(lonely.best_response(HospitalId(0), &empty), (Vec::new(), 0.0));
}

#[test]
fn stable_set_examples() {
    let t = fixtures::table1();
    let stable = enumerate_stable_matchings(&t.spec, EnumerationCap::default()).unwrap();
    let mut expected = vec![t.m_f.clone(), t.m_w.clone()];
    expected.sort();
    assert_eq!(stable, expected);

    let t2 = fixtures::table2();
    assert_eq!(enumerate_stable_matchings(&t2.spec, EnumerationCap::default()).unwrap(), vec![t2.m_star.clone()]);

    let strangers: Market = fixtures::parse_market("HOSPITALS\nf 1 : a=1 b=2\nSTUDENTS\na :\nb :\n");
    assert_eq!(
        enumerate_stable_matchings(&strangers, EnumerationCap::default()).unwrap(),
        vec![Matching::empty_for(&strangers)]
    );
}

#[test]
fn exact_and_float_markets_agree() {
    let exact = fixtures::table1_in::<market_core::BigRational>();
    let float = fixtures::table1();
    let stable_exact = enumerate_stable_matchings(&exact.spec, EnumerationCap::default()).unwrap();
    let stable_float = enumerate_stable_matchings(&float.spec, EnumerationCap::default()).unwrap();
    assert_eq!(stable_exact, stable_float);
    let single = fixtures::table1_in::<f32>();
    assert!(single.spec.is_stable(&single.m_w));
}

#[test]
fn bundled_fixtures_round_trip() {
    for text in [fixtures::TABLE1, fixtures::TABLE2, fixtures::EXAMPLE1] {
        let doc = market_core::parse_market_document::<f64>(text).unwrap();
        assert_eq!(market_core::write_market_document(&doc), text);
        let exact = market_core::parse_market_document::<market_core::BigRational>(text).unwrap();
        assert_eq!(market_core::write_market_document(&exact), text);
    }
}
