//! Locating the smallest discount factor at which a family of automata
//! becomes self-enforcing.

use market_core::{MarketSpec, Scalar};
use repeated_core::{check_self_enforcing_cohorts, ProcessAutomaton, ScanMode};

use crate::FolkError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BisectOutcome {
    /// Fails at `lower`, passes at `upper`; `delta` is their midpoint.
    Threshold { delta: f64, lower: f64, upper: f64 },
    PassesEverywhere,
    NeverPasses,
}

/// Bisects on `[lo, hi]`, assuming the verdict is monotone in the discount
/// factor. Only the endpoints are checked for monotonicity: passing at `lo`
/// but failing at `hi` is an error.
pub fn min_delta_bisect<S: Scalar, F>(
    cohorts: &[MarketSpec<S>],
    build: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<BisectOutcome, FolkError>
where
    F: Fn(S) -> Result<ProcessAutomaton<S>, FolkError>,
{
    if !(0.0 <= lo && lo < hi && hi < 1.0) || !(tol > 0.0) {
        return Err(FolkError::Input(format!("need 0 <= lo < hi < 1 and tol > 0, got [{lo}, {hi}] and {tol}")));
    }
    let passes = |d: f64| -> Result<bool, FolkError> {
        let a = build(S::from_f64_lossy(d))?;
        Ok(check_self_enforcing_cohorts(cohorts, &a, ScanMode::Pruned)?.is_self_enforcing())
    };
    match (passes(lo)?, passes(hi)?) {
        (true, true) => return Ok(BisectOutcome::PassesEverywhere),
        (false, false) => return Ok(BisectOutcome::NeverPasses),
        (true, false) => return Err(FolkError::NonMonotone { lo, hi }),
        (false, true) => {}
    }
    let (mut lower, mut upper) = (lo, hi);
    while upper - lower > tol {
        let mid = 0.5 * (lower + upper);
        if passes(mid)? {
            upper = mid;
        } else {
            lower = mid;
        }
    }
    Ok(BisectOutcome::Threshold { delta: 0.5 * (lower + upper), lower, upper })
}
