//! Seat-proposing serial dictatorship: each seat, in turn, takes its
//! hospital's favorite remaining student among those who accept it.

use market_core::{HospitalId, Matching, MarketSpec, Scalar};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{AlgorithmError, Submarket};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SeatOrder {
    /// Seats in [`seat_list`] order.
    Identity,
    /// A permutation of indices into [`seat_list`].
    Given(Vec<usize>),
    /// A uniform random permutation drawn from ChaCha8 with this seed.
    Seeded(u64),
}

/// Seats of the submarket, hospital-major: `capacity(f)` copies of each
/// member hospital, by increasing id.
pub fn seat_list<S: Scalar>(spec: &MarketSpec<S>, sub: &Submarket) -> Vec<HospitalId> {
    spec.hospitals().flat_map(|f| std::iter::repeat_n(f, sub.capacity(f))).collect()
}

pub fn serial_dictatorship_seats<S: Scalar>(
    spec: &MarketSpec<S>,
    sub: &Submarket,
    order: &SeatOrder,
) -> Result<Matching, AlgorithmError> {
    let seats = seat_list(spec, sub);
    let perm: Vec<usize> = match order {
        SeatOrder::Identity => (0..seats.len()).collect(),
        SeatOrder::Given(p) => {
            let mut seen = vec![false; seats.len()];
            if p.len() != seats.len() || p.iter().any(|&i| i >= seats.len() || std::mem::replace(&mut seen[i], true)) {
                return Err(AlgorithmError::InvalidSeatOrder { seats: seats.len() });
            }
            p.clone()
        }
        SeatOrder::Seeded(seed) => {
            let mut p: Vec<usize> = (0..seats.len()).collect();
            p.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
            p
        }
    };
    Ok(run(spec, sub, perm.iter().map(|&i| seats[i])))
}

/// Uniform random seat order drawn from a caller-supplied generator.
pub fn serial_dictatorship_with_rng<S: Scalar, R: Rng + ?Sized>(
    spec: &MarketSpec<S>,
    sub: &Submarket,
    rng: &mut R,
) -> Matching {
    let mut seats = seat_list(spec, sub);
    seats.shuffle(rng);
    run(spec, sub, seats.into_iter())
}

fn run<S: Scalar>(spec: &MarketSpec<S>, sub: &Submarket, seats: impl Iterator<Item = HospitalId>) -> Matching {
    let mut taken: Vec<bool> = spec.students().map(|w| !sub.contains_student(w)).collect();
    let mut assign = vec![None; spec.num_students()];
    for f in seats {
        let pick = spec.ranked_students(f).iter().copied().find(|w| !taken[w.0] && spec.is_acceptable(*w, f));
        if let Some(w) = pick {
            taken[w.0] = true;
            assign[w.0] = Some(f);
        }
    }
    Matching::from_assignment(spec, assign).expect("one student per seat")
}
