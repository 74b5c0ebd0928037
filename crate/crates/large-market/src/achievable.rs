//! Which student tiers a hospital tier can reach in a stable matching.

use crate::{LargeMarketError, TierConfig};

/// Student tiers `l` with `Q_W(l) >= Q_F(k-1)` and `Q_W(l-1) <= Q_F(k)`,
/// where `Q_W` counts students and `Q_F` seats cumulatively from the top.
pub fn achievable_classes(cfg: &TierConfig, k: usize, n: usize) -> Result<Vec<usize>, LargeMarketError> {
    cfg.validate()?;
    if k == 0 || k > cfg.num_hospital_tiers() {
        return Err(LargeMarketError::Parameter(format!("hospital tier {k} is out of range")));
    }
    let seats = cumulative(&cfg.hospital_counts(n), cfg.quota);
    let students = cumulative(&cfg.student_counts(n), 1);
    Ok((1..=cfg.num_student_tiers()).filter(|&l| students[l] >= seats[k - 1] && students[l - 1] <= seats[k]).collect())
}

/// Prefix sums with a leading zero, scaled by `unit`.
fn cumulative(counts: &[usize], unit: usize) -> Vec<usize> {
    std::iter::once(0).chain(counts.iter().scan(0, |acc, c| {
        *acc += c * unit;
        Some(*acc)
    })).collect()
}
