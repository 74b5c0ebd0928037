use market_core::testing::{arb_market, Shape};
use market_core::{enumerate_stable_matchings, for_each_subset, EnumerationCap, HospitalId, Market, Matching, StudentId};
use proptest::prelude::*;
use static_algorithms::*;

const SMALL: Shape = Shape::new(3, 6, 2);

/// Whether `target` can form a coalition with willing students that beats its
/// current roster.
fn profitable_deviation(spec: &Market, m: &Matching, target: HospitalId) -> Option<Vec<StudentId>> {
    let all: Vec<StudentId> = spec.students().collect();
    let current = spec.utility_of(target, m.members(target));
    let mut found = None;
    for_each_subset(&all, spec.quota(target), |set| {
        let willing = set.iter().all(|&w| m.assignment(w) == Some(target) || spec.prefers(w, Some(target), m.assignment(w)));
        if found.is_none() && willing && spec.utility_of(target, set) > current {
            found = Some(set.to_vec());
        }
    });
    found
}

fn tiered() -> impl Strategy<Value = (Market, Tiers, usize)> {
    arb_market(SMALL).prop_flat_map(|spec| {
        let h = spec.num_hospitals();
        (Just(spec), proptest::collection::vec(1..=h, h)).prop_map(|(spec, raw)| {
            // Relabel to a contiguous 1..=K range.
            let mut labels: Vec<usize> = raw.clone();
            labels.sort();
            labels.dedup();
            let tiers = Tiers::new(raw.iter().map(|r| labels.binary_search(r).unwrap() + 1).collect()).unwrap();
            let k = 1 + raw[0] % tiers.num_tiers();
            (spec, tiers, k)
        })
    })
}

proptest! {
    #[test]
    fn deferred_acceptance_is_side_optimal(spec in arb_market(SMALL)) {
        let stable = enumerate_stable_matchings(&spec, EnumerationCap::default()).unwrap();
        let ms = deferred_acceptance(&spec, Proposer::Students);
        let mh = deferred_acceptance(&spec, Proposer::Hospitals);
        prop_assert!(spec.is_stable(&ms));
        prop_assert!(spec.is_stable(&mh));
        prop_assert!(stable.contains(&ms) && stable.contains(&mh));
        for m in &stable {
            for w in spec.students() {
                prop_assert!(!spec.prefers(w, m.assignment(w), ms.assignment(w)));
                prop_assert!(!spec.prefers(w, mh.assignment(w), m.assignment(w)));
            }
            for f in spec.hospitals() {
                prop_assert!(spec.utility_of(f, mh.members(f)) >= spec.utility_of(f, m.members(f)));
            }
        }
    }

    #[test]
    fn top_coalition_pairs_replay(spec in arb_market(SMALL)) {
        let tcs = top_coalition_sequence(&spec);
        let mut hospitals_left = vec![true; spec.num_hospitals()];
        let mut students_left = vec![true; spec.num_students()];
        for (f, group) in &tcs.pairs {
            prop_assert!(is_top_coalition(&spec, &hospitals_left, &students_left, *f, group));
            hospitals_left[f.0] = false;
            for w in group {
                students_left[w.0] = false;
            }
        }
        for f in spec.hospitals() {
            if hospitals_left[f.0] {
                prop_assert!(top_coalition_for(&spec, &hospitals_left, &students_left, f).is_none());
            }
        }
        // Top coalition members keep their partners in every stable matching.
        for m in enumerate_stable_matchings(&spec, EnumerationCap::default()).unwrap() {
            for (f, group) in &tcs.pairs {
                prop_assert_eq!(m.members(*f), group.as_slice());
            }
        }
    }

    #[test]
    fn punitive_matching_admits_no_target_deviation(spec in arb_market(SMALL), pick in any::<usize>()) {
        let target = HospitalId(pick % spec.num_hospitals());
        let m = punitive_matching(&spec, &Submarket::full(&spec), target).unwrap();
        prop_assert!(spec.is_individually_rational(&m));
        prop_assert_eq!(profitable_deviation(&spec, &m, target), None);
    }

    #[test]
    fn serial_dictatorship_is_seat_efficient(spec in arb_market(SMALL), seed in any::<u64>()) {
        let m = serial_dictatorship_seats(&spec, &Submarket::full(&spec), &SeatOrder::Seeded(seed)).unwrap();
        prop_assert!(spec.is_individually_rational(&m));
        for f in spec.hospitals() {
            for &w in m.members(f) {
                // No seat of f would rather hold a free student who accepts f.
                for v in spec.students() {
                    let better = spec.utility(f, v) > spec.utility(f, w);
                    prop_assert!(!(better && m.assignment(v).is_none() && spec.is_acceptable(v, f)));
                }
                // No two seats gain by swapping their students.
                for g in spec.hospitals() {
                    for &v in m.members(g) {
                        let f_gains = spec.utility(f, v) > spec.utility(f, w) && spec.is_acceptable(v, f);
                        let g_gains = spec.utility(g, w) > spec.utility(g, v) && spec.is_acceptable(w, g);
                        prop_assert!(!(f_gains && g_gains));
                    }
                }
            }
            // A seat left empty means nobody acceptable was free.
            if m.members(f).len() < spec.quota(f) {
                prop_assert!(spec.students().all(|v| m.assignment(v).is_some() || !spec.is_acceptable(v, f)));
            }
        }
    }

    #[test]
    fn layered_steps_respect_tiers((spec, tiers, k) in tiered(), seed in any::<u64>()) {
        let members = tiers.members(k);
        let f = members[seed as usize % members.len()];
        let rules = [
            InnerRule::ReducedCapacity,
            InnerRule::ZeroQuota(f),
            InnerRule::Punitive(f),
            InnerRule::Rsd(SeatOrder::Seeded(seed)),
        ];
        let upper: Vec<HospitalId> = spec.hospitals().filter(|g| tiers.tier_of(*g) < k).collect();
        let all: Vec<StudentId> = spec.students().collect();
        let upper_da = deferred_acceptance_in(&spec, &Submarket::new(&spec, &upper, &all).unwrap(), Proposer::Students);
        for rule in &rules {
            let m = layered_matching(&spec, &tiers, k, rule).unwrap();
            prop_assert!(spec.is_individually_rational(&m));
            for g in &upper {
                prop_assert_eq!(m.members(*g), upper_da.members(*g));
            }
            match rule {
                InnerRule::ZeroQuota(f) => prop_assert!(m.members(*f).is_empty()),
                InnerRule::ReducedCapacity => {
                    for g in &members {
                        prop_assert!(m.members(*g).len() < spec.quota(*g));
                    }
                }
                _ => {}
            }
        }
    }
}
