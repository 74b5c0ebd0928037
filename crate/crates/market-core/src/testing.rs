//! Proptest strategies for random small markets.

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

use crate::market::{HospitalId, HospitalSpec, Matching, MarketSpec, StudentSpec};

/// Size limits for generated markets.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_hospitals: usize,
    pub max_students: usize,
    pub max_quota: usize,
}

impl Shape {
    pub const fn new(max_hospitals: usize, max_students: usize, max_quota: usize) -> Self {
        Shape { max_hospitals, max_students, max_quota }
    }
}

fn build(quotas: Vec<usize>, rows: Vec<Vec<u32>>, orders: Vec<(Vec<usize>, usize)>) -> MarketSpec<f64> {
    let hospitals = quotas
        .into_iter()
        .zip(rows)
        .enumerate()
        .map(|(i, (quota, row))| HospitalSpec {
            name: format!("f{}", i + 1),
            quota,
            utilities: row.into_iter().map(f64::from).collect(),
        })
        .collect();
    let students = orders
        .into_iter()
        .enumerate()
        .map(|(i, (perm, len))| StudentSpec {
            name: format!("w{}", i + 1),
            acceptable: perm.into_iter().take(len).map(HospitalId).collect(),
        })
        .collect();
    MarketSpec::new(hospitals, students).expect("generated market is valid")
}

/// Markets with permutation utilities `1..=n` per hospital and random
/// acceptable lists; about half the students accept every hospital.
pub fn arb_market(shape: Shape) -> impl Strategy<Value = MarketSpec<f64>> {
    (1..=shape.max_hospitals.max(1), 0..=shape.max_students).prop_flat_map(move |(h, s)| {
        let quotas = proptest::collection::vec(1..=shape.max_quota.max(1), h);
        let row = Just((1..=s as u32).collect::<Vec<u32>>()).prop_shuffle();
        let rows = proptest::collection::vec(row, h);
        let order = (Just((0..h).collect::<Vec<usize>>()).prop_shuffle(), prop_oneof![Just(h), 0..=h]);
        let orders = proptest::collection::vec(order, s);
        (quotas, rows, orders).prop_map(|(q, r, o)| build(q, r, o))
    })
}

/// A market together with an arbitrary quota-respecting matching (not
/// necessarily individually rational).
pub fn arb_market_and_matching(shape: Shape) -> impl Strategy<Value = (MarketSpec<f64>, Matching)> {
    arb_market(shape).prop_flat_map(|spec| {
        let h = spec.num_hospitals();
        let picks = proptest::collection::vec(0..=h, spec.num_students());
        (Just(spec), picks).prop_map(|(spec, picks)| {
            let mut load = vec![0usize; spec.num_hospitals()];
            let assign = picks
                .into_iter()
                .map(|p| {
                    let f = HospitalId(p.checked_sub(1)?);
                    (load[f.0] < spec.quota(f)).then(|| {
                        load[f.0] += 1;
                        f
                    })
                })
                .collect();
            let m = Matching::from_assignment(&spec, assign).expect("loads respect quotas");
            (spec, m)
        })
    })
}

/// Draws `count` markets from a deterministic runner, for loops outside
/// proptest (acceptance suites).
pub fn sample_markets(shape: Shape, count: usize, seed: [u8; 32]) -> Vec<MarketSpec<f64>> {
    let config = proptest::test_runner::Config::default();
    let rng = proptest::test_runner::TestRng::from_seed(proptest::test_runner::RngAlgorithm::ChaCha, &seed);
    let mut runner = TestRunner::new_with_rng(config, rng);
    let strategy = arb_market(shape);
    (0..count)
        .map(|_| strategy.new_tree(&mut runner).expect("strategy yields values").current())
        .collect()
}
