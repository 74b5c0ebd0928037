//! Tiered three-step template: a stable matching for the higher tiers, an
//! inner rule for tier `k` on the students they leave, then a stable
//! matching for the lower tiers on what remains.

use market_core::{HospitalId, Matching, MarketSpec, Scalar};

use crate::{
    deferred_acceptance_in, punitive_matching_with, serial_dictatorship_seats, AlgorithmError, Proposer,
    PunitiveOrder, SeatOrder, Submarket,
};

/// Hospital quality tiers, labelled `1..=K` with 1 the best.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tiers {
    hospital_tier: Vec<usize>,
    count: usize,
}

impl Tiers {
    pub fn new(hospital_tier: Vec<usize>) -> Result<Self, AlgorithmError> {
        let expected = hospital_tier.len();
        let count = hospital_tier.iter().copied().max().unwrap_or(0);
        let shape = |reason: String| AlgorithmError::TierShape { expected, reason };
        if hospital_tier.contains(&0) {
            return Err(shape("labels start at 1".into()));
        }
        if let Some(k) = (1..=count).find(|k| !hospital_tier.contains(k)) {
            return Err(shape(format!("tier {k} has no hospitals")));
        }
        Ok(Tiers { hospital_tier, count })
    }

    /// Every hospital in tier 1.
    pub fn single(num_hospitals: usize) -> Self {
        Tiers { hospital_tier: vec![1; num_hospitals], count: usize::from(num_hospitals > 0) }
    }

    pub fn num_tiers(&self) -> usize {
        self.count
    }

    pub fn tier_of(&self, f: HospitalId) -> usize {
        self.hospital_tier[f.0]
    }

    pub fn members(&self, k: usize) -> Vec<HospitalId> {
        (0..self.hospital_tier.len()).filter(|&i| self.hospital_tier[i] == k).map(HospitalId).collect()
    }

    pub fn check(&self, k: usize) -> Result<(), AlgorithmError> {
        if (1..=self.count).contains(&k) {
            Ok(())
        } else {
            Err(AlgorithmError::InvalidTier { tier: k, tiers: self.count })
        }
    }
}

/// What tier `k` does with the students the higher tiers leave behind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InnerRule {
    /// Student-proposing DA with every tier-`k` hospital hiring at most `q - 1`.
    ReducedCapacity,
    /// Student-proposing DA with `f` closed and the others at full quota.
    ZeroQuota(HospitalId),
    /// Punitive matching for `f`.
    Punitive(HospitalId),
    /// Punitive matching with the draft order reversed (regression oracle).
    PunitiveReversed(HospitalId),
    /// Seat-proposing serial dictatorship.
    Rsd(SeatOrder),
}

/// Outer steps use student-proposing deferred acceptance.
pub fn layered_matching<S: Scalar>(
    spec: &MarketSpec<S>,
    tiers: &Tiers,
    k: usize,
    rule: &InnerRule,
) -> Result<Matching, AlgorithmError> {
    layered_matching_with(spec, tiers, k, rule, Proposer::Students)
}

pub fn layered_matching_with<S: Scalar>(
    spec: &MarketSpec<S>,
    tiers: &Tiers,
    k: usize,
    rule: &InnerRule,
    outer: Proposer,
) -> Result<Matching, AlgorithmError> {
    if tiers.hospital_tier.len() != spec.num_hospitals() {
        return Err(AlgorithmError::TierShape {
            expected: spec.num_hospitals(),
            reason: format!("{} labels supplied", tiers.hospital_tier.len()),
        });
    }
    tiers.check(k)?;
    let named = match rule {
        InnerRule::ZeroQuota(f) | InnerRule::Punitive(f) | InnerRule::PunitiveReversed(f) => Some(*f),
        _ => None,
    };
    if let Some(f) = named {
        spec.check_hospital(f)?;
        if tiers.tier_of(f) != k {
            return Err(AlgorithmError::NotInTier { hospital: f, tier: k });
        }
    }

    let mut students: Vec<_> = spec.students().collect();
    let mut assign = vec![None; spec.num_students()];
    let mut absorb = |m: &Matching, students: &mut Vec<_>| {
        for (w, f) in m.assignments().iter().enumerate() {
            if f.is_some() {
                assign[w] = *f;
            }
        }
        students.retain(|w: &market_core::StudentId| m.assignment(*w).is_none());
    };

    let upper: Vec<HospitalId> = spec.hospitals().filter(|f| tiers.tier_of(*f) < k).collect();
    if !upper.is_empty() {
        let m = deferred_acceptance_in(spec, &Submarket::new(spec, &upper, &students)?, outer);
        absorb(&m, &mut students);
    }

    let inner = Submarket::new(spec, &tiers.members(k), &students)?;
    let m = match rule {
        InnerRule::ReducedCapacity => {
            let mut sub = inner;
            for f in tiers.members(k) {
                sub = sub.with_capacity(spec, f, spec.quota(f) - 1)?;
            }
            deferred_acceptance_in(spec, &sub, Proposer::Students)
        }
        InnerRule::ZeroQuota(f) => {
            deferred_acceptance_in(spec, &inner.with_capacity(spec, *f, 0)?, Proposer::Students)
        }
        InnerRule::Punitive(f) => punitive_matching_with(spec, &inner, *f, PunitiveOrder::Priority)?,
        InnerRule::PunitiveReversed(f) => punitive_matching_with(spec, &inner, *f, PunitiveOrder::Reversed)?,
        InnerRule::Rsd(order) => serial_dictatorship_seats(spec, &inner, order)?,
    };
    absorb(&m, &mut students);

    let lower: Vec<HospitalId> = spec.hospitals().filter(|f| tiers.tier_of(*f) > k).collect();
    if !lower.is_empty() {
        let m = deferred_acceptance_in(spec, &Submarket::new(spec, &lower, &students)?, outer);
        absorb(&m, &mut students);
    }
    Ok(Matching::from_assignment(spec, assign)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use market_core::fixtures;

    #[test]
    fn tier_labels_validated() {
        assert!(Tiers::new(vec![1, 2, 2]).is_ok());
        assert!(Tiers::new(vec![0, 1]).is_err());
        assert!(Tiers::new(vec![1, 3]).is_err());
        let t = Tiers::new(vec![2, 1, 2]).unwrap();
        assert_eq!(t.members(2), vec![HospitalId(0), HospitalId(2)]);
        assert_eq!(t.check(3), Err(AlgorithmError::InvalidTier { tier: 3, tiers: 2 }));
    }

    #[test]
    fn named_hospital_must_sit_in_tier() {
        let t = fixtures::table1();
        let tiers = Tiers::new(vec![1, 1, 2]).unwrap();
        let err = layered_matching(&t.spec, &tiers, 1, &InnerRule::Punitive(HospitalId(2))).unwrap_err();
        assert_eq!(err, AlgorithmError::NotInTier { hospital: HospitalId(2), tier: 1 });
        assert!(layered_matching(&t.spec, &Tiers::single(2), 1, &InnerRule::ReducedCapacity).is_err());
    }

    #[test]
    fn unit_quota_reduction_empties_tier() {
        let spec: market_core::Market =
            fixtures::parse_market("HOSPITALS\nf1 1 : a=2 b=1\nf2 1 : a=1 b=2\nSTUDENTS\na : f1 f2\nb : f2 f1\n");
        let m = layered_matching(&spec, &Tiers::single(2), 1, &InnerRule::ReducedCapacity).unwrap();
        assert_eq!(m, Matching::empty_for(&spec));
    }
}
