//! The two-state trigger process: recommend a target matching until some
//! hospital is identified as deviating, then a stable fallback forever.

use market_core::{Matching, MarketSpec, Scalar};
use repeated_core::{Lottery, ProcessAutomaton, State};

use crate::FolkError;

pub fn build_trigger_process<S: Scalar>(
    spec: &MarketSpec<S>,
    target: &Matching,
    fallback: &Matching,
    discount: S,
) -> Result<ProcessAutomaton<S>, FolkError> {
    target.validate(spec)?;
    fallback.validate(spec)?;
    if !spec.is_stable(fallback) {
        return Err(FolkError::Input("the fallback matching is not stable".into()));
    }
    let mut a = ProcessAutomaton::new("trigger", discount);
    let t = a.add_realization("target", 0, target.clone());
    let b = a.add_realization("fallback", 0, fallback.clone());
    let mut cooperate = State::new("cooperate", Lottery::point(t), Lottery::point(0));
    cooperate.deviation_any = Some(Lottery::point(1));
    let mut revert = State::new("revert", Lottery::point(b), Lottery::point(1));
    revert.default = Some(Lottery::point(1));
    a.add_state(cooperate);
    a.add_state(revert);
    a.validate(std::slice::from_ref(spec))?;
    Ok(a)
}
