//! The two-state trigger process on the Table 1 market.

use market_core::{parse_market_document, Scalar};

use crate::{parse_automaton, ProcessAutomaton};

pub const MU0: &str = include_str!("../../../fixtures/mu0.automaton");

/// The bundled trigger automaton parsed against the Table 1 market, with the
/// given discount factor.
pub fn mu0_in<S: Scalar>(discount: S) -> ProcessAutomaton<S> {
    let doc = parse_market_document::<S>(market_core::fixtures::TABLE1).expect("bundled market parses");
    parse_automaton(MU0, &doc.cohorts).expect("bundled automaton parses").with_discount(discount)
}

pub fn mu0(discount: f64) -> ProcessAutomaton<f64> {
    mu0_in(discount)
}
