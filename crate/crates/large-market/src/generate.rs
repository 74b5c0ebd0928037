//! Sampling one tiered market.

use market_core::{HospitalId, HospitalSpec, Market, StudentId, StudentSpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use static_algorithms::Tiers;

use crate::{LargeMarketError, TierConfig};

/// A sampled market together with the tier labels and shocks behind it.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizedMarket {
    pub spec: Market,
    pub tiers: Tiers,
    /// 1-based hospital tier per hospital id.
    pub hospital_tier: Vec<usize>,
    /// 1-based student tier per student id.
    pub student_tier: Vec<usize>,
    /// `zeta[f][w]`, in the open interval (0, 1).
    pub zeta: Vec<Vec<f64>>,
    /// `C_l` per student tier, copied from the config.
    pub common_values: Vec<f64>,
    pub n: usize,
}

impl RealizedMarket {
    pub fn hospitals_in(&self, k: usize) -> Vec<HospitalId> {
        (0..self.hospital_tier.len()).filter(|&f| self.hospital_tier[f] == k).map(HospitalId).collect()
    }

    /// Label of configured tier `k` inside `tiers`, which skips empty tiers.
    pub fn layered_tier(&self, k: usize) -> Option<usize> {
        self.hospitals_in(k).first().map(|f| self.tiers.tier_of(*f))
    }

    pub fn students_in(&self, l: usize) -> Vec<StudentId> {
        (0..self.student_tier.len()).filter(|&w| self.student_tier[w] == l).map(StudentId).collect()
    }

    /// First hospital of tier `k`.
    pub fn designated(&self, k: usize) -> Result<HospitalId, LargeMarketError> {
        self.hospitals_in(k)
            .first()
            .copied()
            .ok_or_else(|| LargeMarketError::Parameter(format!("hospital tier {k} is empty at this size")))
    }
}

pub fn generate_market(cfg: &TierConfig, n: usize, seed: u64) -> Result<RealizedMarket, LargeMarketError> {
    generate_market_with(cfg, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Hospitals and students are numbered tier by tier. Shocks are drawn
/// hospital-major, then each student's order shuffles every hospital tier.
pub fn generate_market_with<R: Rng + ?Sized>(
    cfg: &TierConfig,
    n: usize,
    rng: &mut R,
) -> Result<RealizedMarket, LargeMarketError> {
    cfg.validate()?;
    let hospital_tier = labels(&cfg.hospital_counts(n));
    let student_tier = labels(&cfg.student_counts(n));
    let (nh, ns) = (hospital_tier.len(), student_tier.len());

    let mut zeta = vec![vec![0.0; ns]; nh];
    let mut utilities = vec![vec![0.0; ns]; nh];
    for f in 0..nh {
        for w in 0..ns {
            let c = cfg.common_value(student_tier[w]);
            // Open interval keeps tiers strictly apart after rounding.
            let (z, v) = loop {
                let z: f64 = rng.random();
                let v = cfg.value_form.value(c, z);
                if z > 0.0 && v > c && v < c + 1.0 {
                    break (z, v);
                }
            };
            zeta[f][w] = z;
            utilities[f][w] = v;
        }
        break_ties(&mut utilities[f]);
    }

    let groups: Vec<Vec<HospitalId>> = (1..=cfg.num_hospital_tiers())
        .map(|k| (0..nh).filter(|&f| hospital_tier[f] == k).map(HospitalId).collect())
        .collect();
    let students = (0..ns)
        .map(|w| {
            let mut acceptable = Vec::with_capacity(nh);
            for group in &groups {
                let mut g = group.clone();
                g.shuffle(rng);
                acceptable.extend(g);
            }
            StudentSpec { name: format!("w{}", w + 1), acceptable }
        })
        .collect();
    let hospitals = utilities
        .into_iter()
        .enumerate()
        .map(|(f, utilities)| HospitalSpec { name: format!("f{}", f + 1), quota: cfg.quota, utilities })
        .collect();
    let spec = Market::new(hospitals, students)?;
    let tiers = if nh == 0 { Tiers::single(0) } else { Tiers::new(nonempty_labels(&hospital_tier))? };
    Ok(RealizedMarket { spec, tiers, hospital_tier, student_tier, zeta, common_values: cfg.common_values.clone(), n })
}

fn labels(counts: &[usize]) -> Vec<usize> {
    counts.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i + 1, c)).collect()
}

/// `Tiers` wants contiguous labels; empty tiers at this size are skipped.
/// The `hospital_tier` field keeps the configured labels.
fn nonempty_labels(labels: &[usize]) -> Vec<usize> {
    let mut present: Vec<usize> = labels.to_vec();
    present.dedup();
    labels.iter().map(|l| present.iter().position(|p| p == l).unwrap() + 1).collect()
}

/// Equal values keep their index order and are nudged up by one ulp.
fn break_ties(row: &mut [f64]) {
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
    for i in 1..order.len() {
        let (prev, cur) = (row[order[i - 1]], row[order[i]]);
        if cur <= prev {
            row[order[i]] = prev.next_up();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_become_strict() {
        let mut row = vec![1.0, 0.5, 1.0, 1.0];
        break_ties(&mut row);
        assert!(row[0] < row[2] && row[2] < row[3]);
        assert_eq!(row[1], 0.5);
    }

    #[test]
    fn empty_tiers_are_relabelled() {
        assert_eq!(nonempty_labels(&[1, 1, 3, 3]), vec![1, 1, 2, 2]);
    }
}
