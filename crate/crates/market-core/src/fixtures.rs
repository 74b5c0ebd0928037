//! The small worked markets bundled under `fixtures/`.

use crate::format::{parse_market_document, MarketDocument};
use crate::market::{Matching, MarketSpec};
use crate::scalar::Scalar;

pub const TABLE1: &str = include_str!("../../../fixtures/table1.market");
pub const TABLE2: &str = include_str!("../../../fixtures/table2.market");
pub const EXAMPLE1: &str = include_str!("../../../fixtures/example1.market");

/// Two stable matchings that disagree on who the urban hospitals hire, plus
/// the unstable `m0` that sends the rural hospital a better student.
pub struct Table1<S> {
    pub spec: MarketSpec<S>,
    pub m0: Matching,
    pub m_f: Matching,
    pub m_w: Matching,
}

/// Same utilities as [`Table1`] with a common student ranking f1 > f2 > fr.
pub struct Table2<S> {
    pub spec: MarketSpec<S>,
    pub m_star: Matching,
}

pub fn parse_market<S: Scalar>(text: &str) -> MarketSpec<S> {
    let doc: MarketDocument<S> = parse_market_document(text).expect("bundled fixture parses");
    doc.cohorts.into_iter().next().expect("one cohort").spec
}

fn named<S: Scalar>(doc: &MarketDocument<S>, name: &str) -> Matching {
    doc.primary().matching(name).expect("bundled matching").clone()
}

pub fn table1_in<S: Scalar>() -> Table1<S> {
    let doc = parse_market_document::<S>(TABLE1).expect("bundled fixture parses");
    Table1 {
        m0: named(&doc, "m0"),
        m_f: named(&doc, "mF"),
        m_w: named(&doc, "mW"),
        spec: doc.primary().spec.clone(),
    }
}

pub fn table2_in<S: Scalar>() -> Table2<S> {
    let doc = parse_market_document::<S>(TABLE2).expect("bundled fixture parses");
    Table2 { m_star: named(&doc, "mstar"), spec: doc.primary().spec.clone() }
}

pub fn table1() -> Table1<f64> {
    table1_in()
}

pub fn table2() -> Table2<f64> {
    table2_in()
}

/// Two identical hospitals; odd students prefer the first, even the second.
pub fn example1() -> MarketSpec<f64> {
    parse_market(EXAMPLE1)
}
