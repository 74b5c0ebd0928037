use large_market::{generate_market, no_deviation_from_punishment, TierConfig, TierSizes};
use proptest::prelude::*;

fn arb_config() -> impl Strategy<Value = TierConfig> {
    (1..=3usize, 1..=3usize, 1..=3usize, 0.5..2.0f64).prop_flat_map(|(k, l, quota, beta)| {
        let hospitals = proptest::collection::vec(0..=3usize, k);
        let students = proptest::collection::vec(0..=6usize, l);
        let gaps = proptest::collection::vec(1.0..3.0f64, l);
        let tier = 1..=k;
        (hospitals, students, gaps, tier, any::<bool>()).prop_map(move |(h, s, gaps, tier, by_share)| {
            let mut cfg = TierConfig::single_tier(quota, beta);
            cfg.hospitals = if by_share { TierSizes::Shares(vec![1.0 / k as f64; k]) } else { TierSizes::Counts(h) };
            let weights: Vec<f64> = s.iter().map(|x| *x as f64 + 1.0).collect();
            let total: f64 = weights.iter().sum();
            let mut shares: Vec<f64> = weights.iter().map(|x| x / total).collect();
            shares[0] += 1.0 - shares.iter().sum::<f64>();
            cfg.students = TierSizes::Shares(shares);
            // Build upward from C_L = 0, then list best tier first.
            let mut values: Vec<f64> = gaps.iter().scan(0.0, |c, g| { let v = *c; *c += g; Some(v) }).collect();
            values.reverse();
            cfg.common_values = values;
            cfg.experiment.tier = tier;
            cfg
        })
    })
}

fn usable(cfg: &TierConfig) -> bool {
    cfg.validate().is_ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generation_is_reproducible(cfg in arb_config(), n in 0..6usize, seed in any::<u64>()) {
        prop_assume!(usable(&cfg));
        prop_assert_eq!(generate_market(&cfg, n, seed).unwrap(), generate_market(&cfg, n, seed).unwrap());
    }

    #[test]
    fn tiers_dominate(cfg in arb_config(), n in 0..6usize, seed in any::<u64>()) {
        prop_assume!(usable(&cfg));
        let m = generate_market(&cfg, n, seed).unwrap();
        let hospitals: usize = cfg.hospital_counts(n).iter().sum();
        if matches!(cfg.students, TierSizes::Shares(_)) {
            let expected = (cfg.beta * (hospitals * cfg.quota) as f64 - 1e-9).ceil() as usize;
            prop_assert_eq!(m.spec.num_students(), expected);
        }
        for w in m.spec.students() {
            let tiers: Vec<usize> = m.spec.acceptable(w).iter().map(|f| m.hospital_tier[f.0]).collect();
            prop_assert_eq!(tiers.len(), hospitals);
            prop_assert!(tiers.windows(2).all(|p| p[0] <= p[1]));
        }
        for f in m.spec.hospitals() {
            for a in m.spec.students() {
                for b in m.spec.students() {
                    if m.student_tier[a.0] < m.student_tier[b.0] {
                        prop_assert!(m.spec.utility(f, a) > m.spec.utility(f, b));
                    }
                }
                let z = m.zeta[f.0][a.0];
                prop_assert!(z > 0.0 && z < 1.0);
            }
        }
    }

    #[test]
    fn punitive_matchings_admit_no_profitable_deviation(cfg in arb_config(), n in 1..6usize, seed in any::<u64>()) {
        prop_assume!(usable(&cfg));
        let counts = cfg.hospital_counts(n);
        prop_assume!(counts[cfg.experiment.tier - 1] > 0);
        let r = no_deviation_from_punishment(&cfg, n, 8, seed, false).unwrap();
        prop_assert!(r.passed(), "{:?}", r.counterexample);
    }
}
