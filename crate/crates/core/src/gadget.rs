//! Audit records for the auxiliary elements, tuples and cliques created by
//! the constructions in [`crate::reduct`] and [`crate::geometry`].
//!
//! Each record prints as one line with a fixed field order.

use std::fmt;

use crate::structures::{fmt_clique, fmt_tuple, Clique, Element, RTuple};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GadgetRecord {
    /// Two new elements replacing a tuple of `B ∖ A` by three tuples in D
    /// and supplementing it by two tuples in C.
    Pathology { source: Vec<Element>, x: Element, y: Element, c_tuples: Vec<Vec<Element>>, d_tuples: Vec<Vec<Element>> },
    /// The clique of r-tuple blocks of a new tuple.
    TupleClique { source: Vec<Element>, clique: Clique },
    /// The prefix f(K) chosen for a clique, and the tuples it generates.
    Choice { clique: Clique, extends_base: bool, prefix: Vec<RTuple>, tuples: Vec<Vec<Element>> },
    /// The witness tuple of a clique, reused or fresh, and the tuples added.
    Witness { clique: Clique, witness: Vec<Element>, fresh: bool, tuples: Vec<Vec<Element>> },
}

fn tuples(ts: &[Vec<Element>]) -> String {
    if ts.is_empty() {
        "-".into()
    } else {
        ts.iter().map(|t| fmt_tuple(t)).collect()
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl fmt::Display for GadgetRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GadgetRecord::Pathology { source, x, y, c_tuples, d_tuples } => write!(
                f,
                "pathology source={} x={x} y={y} C={} D={}",
                fmt_tuple(source),
                tuples(c_tuples),
                tuples(d_tuples)
            ),
            GadgetRecord::TupleClique { source, clique } => {
                write!(f, "tuple-clique source={} clique={}", fmt_tuple(source), fmt_clique(clique))
            }
            GadgetRecord::Choice { clique, extends_base, prefix, tuples: ts } => {
                let pre: String = prefix.iter().map(|t| t.to_string()).collect();
                write!(f, "choice clique={} base={} f={} tuples={}", fmt_clique(clique), yes_no(*extends_base), pre, tuples(ts))
            }
            GadgetRecord::Witness { clique, witness, fresh, tuples: ts } => write!(
                f,
                "witness clique={} y={} fresh={} tuples={}",
                fmt_clique(clique),
                fmt_tuple(witness),
                yes_no(*fresh),
                tuples(ts)
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GadgetReport {
    /// New elements, ascending.
    pub fresh: Vec<Element>,
    pub records: Vec<GadgetRecord>,
}

impl GadgetReport {
    /// All tuples added, in record order.
    pub fn added_tuples(&self) -> Vec<Vec<Element>> {
        let mut out = Vec::new();
        for r in &self.records {
            match r {
                GadgetRecord::Pathology { c_tuples, d_tuples, .. } => {
                    out.extend(c_tuples.iter().cloned());
                    out.extend(d_tuples.iter().cloned());
                }
                GadgetRecord::Choice { tuples, .. } | GadgetRecord::Witness { tuples, .. } => out.extend(tuples.iter().cloned()),
                GadgetRecord::TupleClique { .. } => {}
            }
        }
        out
    }
}

impl fmt::Display for GadgetReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.fresh.iter().map(|e| e.to_string()).collect();
        writeln!(f, "fresh {}", if ids.is_empty() { "-".to_string() } else { ids.join(" ") })?;
        for r in &self.records {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_lines() {
        let e = |v: &[u32]| v.iter().map(|&x| Element(x)).collect::<Vec<_>>();
        let report = GadgetReport {
            fresh: e(&[4, 5]),
            records: vec![GadgetRecord::Pathology {
                source: e(&[0, 1, 2, 3]),
                x: Element(4),
                y: Element(5),
                c_tuples: vec![e(&[0, 1, 4, 5]), e(&[2, 3, 5, 4])],
                d_tuples: vec![e(&[0, 1, 2, 4]), e(&[1, 2, 3, 5]), e(&[0, 3, 4, 5])],
            }],
        };
        assert_eq!(
            report.to_string(),
            "fresh 4 5\npathology source=(0,1,2,3) x=4 y=5 C=(0,1,4,5)(2,3,5,4) D=(0,1,2,4)(1,2,3,5)(0,3,4,5)\n"
        );
        assert_eq!(report.added_tuples().len(), 5);
    }
}
