//! The folk-theorem automaton: play `λ⁰`; a hospital identified as deviating
//! is held at its minmax matching for `L` periods and then moved to its own
//! punishment lottery `λᶠ`, where it stays until someone else deviates.

use market_core::{Matching, MarketSpec, Scalar};
use repeated_core::{Lottery, ProcessAutomaton};

use crate::machine::{assemble, Regimes};
use crate::structure::check_outputs;
use crate::{FolkError, PunishmentScheme};

fn realize<S: Scalar>(
    a: &mut ProcessAutomaton<S>,
    prefix: &str,
    l: &Lottery<Matching, S>,
) -> Result<Lottery<usize, S>, FolkError> {
    let entries = l
        .iter()
        .enumerate()
        .map(|(i, (m, w))| (a.add_realization(format!("{prefix}{i}"), 0, m.clone()), w.clone()))
        .collect();
    Ok(Lottery::new(entries)?)
}

pub fn build_folk_automaton<S: Scalar>(
    spec: &MarketSpec<S>,
    scheme: &PunishmentScheme<S>,
    discount: S,
) -> Result<ProcessAutomaton<S>, FolkError> {
    scheme.verify(spec)?;
    let mut a = ProcessAutomaton::new("folk", discount);
    let normal = realize(&mut a, "target", &scheme.target)?;
    let mut hospitals = Vec::with_capacity(scheme.hospitals.len());
    for p in &scheme.hospitals {
        let name = spec.hospital_name(p.hospital).to_string();
        let reward = realize(&mut a, &format!("reward_{name}_"), &p.lottery)?;
        let punish = Lottery::point(a.add_realization(format!("minmax_{name}"), 0, p.minmax.clone()));
        hospitals.push((p.hospital, name, reward, punish));
    }
    assemble(&mut a, Regimes { normal, hospitals, length: scheme.punishment_length })?;
    check_outputs(std::slice::from_ref(spec), &a, true)?;
    Ok(a)
}
