use std::path::PathBuf;

use anyhow::Result;
use market_core::{enumerate_stable_matchings, write_matching, BigRational, Cohort, EnumerationCap, Matching, Scalar};
use repeated_core::{naive_minmax_all, reduced_minmax};
use serde_json::{json, Map, Value};
use static_algorithms::{deferred_acceptance, top_coalition_sequence, Proposer};

use crate::common::{load_document, pretty, scalar_json, Outcome};
use crate::manifest::RunManifest;

#[derive(clap::Args)]
pub struct Args {
    #[arg(long)]
    market: PathBuf,
    /// Exact rational arithmetic instead of f64.
    #[arg(long)]
    exact: bool,
    /// Largest number of free students the exhaustive enumerations accept.
    #[arg(long, default_value_t = EnumerationCap::default().0)]
    cap: usize,
}

pub fn run(args: Args) -> Result<Outcome> {
    let mut man = RunManifest::new(None);
    let cap = EnumerationCap(args.cap);
    let cohorts = if args.exact {
        let doc = load_document::<BigRational>(&mut man, &args.market)?;
        doc.cohorts.iter().map(|c| cohort_report(c, cap)).collect::<Result<Vec<_>>>()?
    } else {
        let doc = load_document::<f64>(&mut man, &args.market)?;
        doc.cohorts.iter().map(|c| cohort_report(c, cap)).collect::<Result<Vec<_>>>()?
    };
    let report = json!({ "manifest": man.json(), "cohorts": cohorts });
    print!("{}", pretty(&report));
    Ok(Outcome::Positive)
}

fn cohort_report<S: Scalar>(cohort: &Cohort<S>, cap: EnumerationCap) -> Result<Value> {
    let spec = &cohort.spec;
    let describe = |m: &Matching| {
        let name = cohort.matchings.iter().find(|(_, n)| n == m).map(|(name, _)| name.clone());
        json!({ "matching": write_matching(spec, m), "name": name })
    };
    let hospital = |f| spec.hospital_name(f).to_string();

    let stable = enumerate_stable_matchings(spec, cap)?;
    let tcs = top_coalition_sequence(spec);
    let sequence: Vec<Value> = tcs
        .pairs
        .iter()
        .map(|(f, ws)| {
            json!({
                "hospital": hospital(*f),
                "students": ws.iter().map(|w| spec.student_name(*w)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let candidates: Vec<Value> = cohort
        .matchings
        .iter()
        .map(|(name, m)| {
            json!({
                "name": name,
                "matching": write_matching(spec, m),
                "stable": spec.is_stable(m),
                "individually_rational": spec.is_individually_rational(m),
            })
        })
        .collect();

    let mut naive = Map::new();
    for (f, (value, _)) in spec.hospitals().zip(naive_minmax_all(spec, cap)?) {
        naive.insert(hospital(f), scalar_json(&value));
    }
    let mut reduced = Map::new();
    for e in reduced_minmax(spec, cap)? {
        let argmin = e.argmin.as_ref().map(|m| write_matching(spec, m));
        reduced.insert(
            hospital(e.hospital),
            json!({ "value": scalar_json(&e.value), "locked": e.locked, "argmin": argmin }),
        );
    }

    Ok(json!({
        "name": cohort.name,
        "hospitals": spec.num_hospitals(),
        "students": spec.num_students(),
        "stable_matchings": stable.iter().map(describe).collect::<Vec<_>>(),
        "student_proposing": describe(&deferred_acceptance(spec, Proposer::Students)),
        "hospital_proposing": describe(&deferred_acceptance(spec, Proposer::Hospitals)),
        "top_coalition_sequence": sequence,
        "candidates": candidates,
        "naive_minmax": naive,
        "reduced_minmax": reduced,
    }))
}
