use market_core::fixtures::{self, Table1, Table2};
use market_core::{HospitalId, Market, Matching, StudentId};
use static_algorithms::*;

fn ws(spec: &Market, names: &[&str]) -> Vec<StudentId> {
    let mut v: Vec<StudentId> = names.iter().map(|n| spec.student_by_name(n).unwrap()).collect();
    v.sort();
    v
}

fn h(spec: &Market, name: &str) -> HospitalId {
    spec.hospital_by_name(name).unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn deferred_acceptance_examples() {
    let Table1 { spec, m_f, m_w, .. } = fixtures::table1();
    assert_eq!(deferred_acceptance(&spec, Proposer::Students), m_w);
    assert_eq!(deferred_acceptance(&spec, Proposer::Hospitals), m_f);
    assert_eq!(m_w.members(h(&spec, "f1")), ws(&spec, &["w3", "w4"]).as_slice());
    assert_eq!(m_f.members(h(&spec, "f2")), ws(&spec, &["w2", "w4"]).as_slice());

    let Table2 { spec, m_star } = fixtures::table2();
    assert_eq!(deferred_acceptance(&spec, Proposer::Students), m_star);
    assert_eq!(deferred_acceptance(&spec, Proposer::Hospitals), m_star);

    let exact = fixtures::table1_in::<market_core::BigRational>();
    assert_eq!(deferred_acceptance(&exact.spec, Proposer::Students), exact.m_w);
}

#[test]
fn top_coalition_examples() {
    let Table2 { spec, .. } = fixtures::table2();
    let tcs = top_coalition_sequence(&spec);
    let expected = vec![
        (h(&spec, "f1"), ws(&spec, &["w1", "w2"])),
        (h(&spec, "f2"), ws(&spec, &["w3", "w4"])),
        (h(&spec, "fr"), ws(&spec, &["w5"])),
    ];
    assert_eq!(tcs.pairs, expected);
    assert!(tcs.residual_hospitals.is_empty() && tcs.residual_students.is_empty());

    let example = fixtures::example1();
    let tcs = top_coalition_sequence(&example);
    assert!(tcs.is_empty());
    assert_eq!(tcs.residual_students, example.students().collect::<Vec<_>>());

    let t1 = fixtures::table1();
    let tcs = top_coalition_sequence(&t1.spec);
    assert!(tcs.is_empty());
    assert_eq!(tcs.residual_hospitals.len(), 3);
}

#[test]
fn top_coalition_partition_is_order_invariant_on_tables() {
    let t1 = fixtures::table1().spec;
    let t2 = fixtures::table2().spec;
    for spec in [&t1, &t2] {
        let base = top_coalition_sequence(spec);
        let mut base_pairs = base.pairs.clone();
        base_pairs.sort();
        for p in permutations(spec.num_hospitals()) {
            let order: Vec<HospitalId> = p.into_iter().map(HospitalId).collect();
            let tcs = top_coalition_sequence_by(spec, &order).unwrap();
            let mut pairs = tcs.pairs.clone();
            pairs.sort();
            assert_eq!(pairs, base_pairs);
            assert_eq!(tcs.residual_students, base.residual_students);
        }
    }
}

#[test]
fn punitive_examples() {
    // Both students prefer f2; f1 is punished and ends with its second choice.
    let spec: Market =
        fixtures::parse_market("HOSPITALS\nf1 1 : wa=2 wb=1\nf2 1 : wa=1 wb=2\nSTUDENTS\nwa : f2 f1\nwb : f2 f1\n");
    let m = punitive_matching(&spec, &Submarket::full(&spec), h(&spec, "f1")).unwrap();
    assert_eq!(m.members(h(&spec, "f1")), ws(&spec, &["wb"]).as_slice());
    assert_eq!(m.members(h(&spec, "f2")), ws(&spec, &["wa"]).as_slice());

    let single: Market = fixtures::parse_market("HOSPITALS\nf 1 : w=1\nSTUDENTS\nw : f\n");
    let m = punitive_matching(&single, &Submarket::full(&single), HospitalId(0)).unwrap();
    assert_eq!(m.members(HospitalId(0)), &[StudentId(0)]);

    let t = fixtures::table1();
    let all_h: Vec<HospitalId> = t.spec.hospitals().collect();
    let no_students = Submarket::new(&t.spec, &all_h, &[]).unwrap();
    assert_eq!(punitive_matching(&t.spec, &no_students, HospitalId(0)).unwrap(), Matching::empty_for(&t.spec));
    let without_target = Submarket::new(&t.spec, &all_h[1..], &[]).unwrap();
    assert!(punitive_matching(&t.spec, &without_target, HospitalId(0)).is_err());
}

#[test]
fn serial_dictatorship_examples() {
    let t = fixtures::table1();
    let f1 = h(&t.spec, "f1");
    let all: Vec<StudentId> = t.spec.students().collect();
    let sub = Submarket::new(&t.spec, &[f1], &all).unwrap();
    let m = serial_dictatorship_seats(&t.spec, &sub, &SeatOrder::Identity).unwrap();
    assert_eq!(m.members(f1), ws(&t.spec, &["w1", "w2"]).as_slice());

    let twins: Market =
        fixtures::parse_market("HOSPITALS\nf1 1 : wa=2 wb=1\nf2 1 : wa=2 wb=1\nSTUDENTS\nwa : f1 f2\nwb : f1 f2\n");
    let full = Submarket::full(&twins);
    let m = serial_dictatorship_seats(&twins, &full, &SeatOrder::Given(vec![1, 0])).unwrap();
    assert_eq!(m.members(h(&twins, "f2")), ws(&twins, &["wa"]).as_slice());

    let draws = 100_000u64;
    let wa = twins.student_by_name("wa").unwrap();
    let mut f1_wins = 0u64;
    for seed in 0..draws {
        let m = serial_dictatorship_seats(&twins, &full, &SeatOrder::Seeded(seed)).unwrap();
        f1_wins += u64::from(m.assignment(wa) == Some(HospitalId(0)));
    }
    let freq = f1_wins as f64 / draws as f64;
    assert!((freq - 0.5).abs() <= 0.01, "f1 got the favorite with frequency {freq}");
}

#[test]
fn layered_examples() {
    let t = fixtures::table1();
    let one = Tiers::single(t.spec.num_hospitals());
    let layered = layered_matching(&t.spec, &one, 1, &InnerRule::Rsd(SeatOrder::Identity)).unwrap();
    let direct = serial_dictatorship_seats(&t.spec, &Submarket::full(&t.spec), &SeatOrder::Identity).unwrap();
    assert_eq!(layered, direct);

    let unit: Market =
        fixtures::parse_market("HOSPITALS\nf1 1 : a=2 b=1\nf2 1 : a=1 b=2\nSTUDENTS\na : f2 f1\nb : f1 f2\n");
    let m = layered_matching(&unit, &Tiers::single(2), 1, &InnerRule::ReducedCapacity).unwrap();
    assert_eq!(m, Matching::empty_for(&unit));

    let f1 = h(&t.spec, "f1");
    let m = layered_matching(&t.spec, &one, 1, &InnerRule::ZeroQuota(f1)).unwrap();
    assert!(m.members(f1).is_empty());
    let sub = Submarket::full(&t.spec).with_capacity(&t.spec, f1, 0).unwrap();
    assert_eq!(m, deferred_acceptance_in(&t.spec, &sub, Proposer::Students));
}
