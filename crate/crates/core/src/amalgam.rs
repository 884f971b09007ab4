//! Free amalgams of n-ary structures and standard amalgams of clique
//! structures. Factors must already be renamed apart: their universes meet
//! exactly in the base.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::structures::{Clique, CliqueStructure, Element, ElementSet, Embedding, NaryStructure, Structure};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamResult<S> {
    pub amalgam: S,
    pub left: Embedding,
    pub right: Embedding,
}

fn check_factors<S: Structure>(a1: &S, a2: &S, base: &ElementSet) -> Result<()> {
    if a1.params() != a2.params() {
        return Err(Error::Precondition("factors have different parameters".into()));
    }
    let common: ElementSet = a1.universe().intersection(a2.universe()).copied().collect();
    if &common != base {
        return Err(Error::Precondition(format!(
            "factor universes meet in {} rather than the base {}",
            crate::structures::fmt_set(&common),
            crate::structures::fmt_set(base)
        )));
    }
    if a1.induced(base)? != a2.induced(base)? {
        return Err(Error::Precondition("factors disagree on the base".into()));
    }
    Ok(())
}

fn identities<S: Structure>(a1: &S, a2: &S, amalgam: S) -> AmalgamResult<S> {
    AmalgamResult { left: Embedding::identity(a1.universe()), right: Embedding::identity(a2.universe()), amalgam }
}

/// Union of universes and relations.
pub fn free_amalgam(a1: &NaryStructure, a2: &NaryStructure, base: &ElementSet) -> Result<AmalgamResult<NaryStructure>> {
    a1.ensure_valid()?;
    a2.ensure_valid()?;
    check_factors(a1, a2, base)?;
    let amalgam = a1.extended(a2.universe().iter().copied(), a2.relation().iter().cloned());
    Ok(identities(a1, a2, amalgam))
}

/// Cliques meeting the base in fewer than s tuples are kept; cliques of the
/// two factors sharing at least s tuples are merged.
pub fn standard_amalgam(
    a1: &CliqueStructure,
    a2: &CliqueStructure,
    base: &ElementSet,
) -> Result<AmalgamResult<CliqueStructure>> {
    a1.ensure_valid()?;
    a2.ensure_valid()?;
    check_factors(a1, a2, base)?;
    let s = a1.params().s();
    let in_base = |k: &Clique| k.iter().filter(|t| t.0.iter().all(|e| base.contains(e))).count();
    let mut cliques: BTreeSet<Clique> = a1.cliques().iter().chain(a2.cliques()).filter(|k| in_base(k) < s).cloned().collect();
    for k1 in a1.cliques() {
        for k2 in a2.cliques() {
            if k1.intersection(k2).count() >= s {
                cliques.insert(k1.union(k2).cloned().collect());
            }
        }
    }
    let universe: ElementSet = a1.universe().union(a2.universe()).copied().collect();
    let amalgam = CliqueStructure::new(a1.params(), universe, cliques);
    let report = amalgam.validate();
    if !report.is_valid() {
        return Err(Error::Precondition(format!("standard amalgam is not a valid clique structure: {report}")));
    }
    Ok(identities(a1, a2, amalgam))
}

/// Structures with an amalgamation operation: free for n-ary, standard for
/// clique structures.
pub trait Amalgamate: Structure {
    fn amalgamate(a1: &Self, a2: &Self, base: &ElementSet) -> Result<AmalgamResult<Self>>;
}

impl Amalgamate for NaryStructure {
    fn amalgamate(a1: &Self, a2: &Self, base: &ElementSet) -> Result<AmalgamResult<Self>> {
        free_amalgam(a1, a2, base)
    }
}

impl Amalgamate for CliqueStructure {
    fn amalgamate(a1: &Self, a2: &Self, base: &ElementSet) -> Result<AmalgamResult<Self>> {
        standard_amalgam(a1, a2, base)
    }
}

/// The `count` smallest non-negative ids outside `used`.
pub fn fresh_ids(used: &ElementSet, count: usize) -> Vec<Element> {
    (0u32..).map(Element).filter(|e| !used.contains(e)).take(count).collect()
}

/// Renaming of `b` that sends `over` into `target` along `over_map` and every
/// other element to a fresh id avoiding `avoid`.
pub fn rename_apart(
    b: &ElementSet,
    over_map: &BTreeMap<Element, Element>,
    avoid: &ElementSet,
) -> BTreeMap<Element, Element> {
    let rest: Vec<Element> = b.iter().filter(|e| !over_map.contains_key(e)).copied().collect();
    let fresh = fresh_ids(avoid, rest.len());
    let mut map: BTreeMap<Element, Element> = over_map.iter().filter(|(k, _)| b.contains(k)).map(|(k, v)| (*k, *v)).collect();
    map.extend(rest.into_iter().zip(fresh));
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predim::{is_strong, predim_rel};
    use crate::structures::{set_of, ClassParams};

    fn p(n: usize, r: usize) -> ClassParams {
        ClassParams::new(n, r).unwrap()
    }

    #[test]
    fn free_examples() {
        let a1 = NaryStructure::from_ids(p(3, 1), &[0, 1, 2, 3], &[&[0, 1, 2], &[1, 2, 3]]).unwrap();
        let b = a1.induced(&set_of([1, 2])).unwrap();
        assert_eq!(free_amalgam(&a1, &b, &set_of([1, 2])).unwrap().amalgam, a1);
        let a2 = NaryStructure::from_ids(p(3, 1), &[1, 2, 4, 5], &[&[4, 1, 2], &[4, 5, 1]]).unwrap();
        let d = free_amalgam(&a1, &a2, &set_of([1, 2])).unwrap().amalgam;
        assert_eq!(d.relation().len(), 4);
        let rel = predim_rel(d.universe(), a1.universe(), &d).unwrap();
        assert_eq!(rel, predim_rel(a2.universe(), &set_of([1, 2]), &a2).unwrap());
        let far = NaryStructure::from_ids(p(3, 1), &[7, 8, 9], &[&[7, 8, 9]]).unwrap();
        let union = free_amalgam(&a1, &far, &set_of([])).unwrap().amalgam;
        assert_eq!(union.len(), 7);
        assert!(free_amalgam(&a1, &far, &set_of([1])).is_err());
    }

    #[test]
    fn free_rejects_disagreeing_base() {
        let a1 = NaryStructure::from_ids(p(2, 1), &[0, 1, 2], &[&[0, 1]]).unwrap();
        let a2 = NaryStructure::from_ids(p(2, 1), &[0, 1, 3], &[]).unwrap();
        assert!(matches!(free_amalgam(&a1, &a2, &set_of([0, 1])), Err(Error::Precondition(_))));
    }

    #[test]
    fn standard_examples() {
        let a1 = CliqueStructure::from_ids(p(2, 1), &[0, 1, 2], &[&[&[0], &[1], &[2]]]).unwrap();
        let a2 = CliqueStructure::from_ids(p(2, 1), &[1, 2, 3], &[&[&[1], &[2], &[3]]]).unwrap();
        let d = standard_amalgam(&a1, &a2, &set_of([1, 2])).unwrap().amalgam;
        let merged = CliqueStructure::from_ids(p(2, 1), &[0, 1, 2, 3], &[&[&[0], &[1], &[2], &[3]]]).unwrap();
        assert_eq!(d, merged);
        // A2 = B is absorbed
        let b = a1.induced(&set_of([1, 2])).unwrap();
        assert_eq!(standard_amalgam(&a1, &b, &set_of([1, 2])).unwrap().amalgam, a1);
        // cliques meeting the base in one tuple stay separate
        let c1 = CliqueStructure::from_ids(p(2, 1), &[0, 1], &[&[&[0], &[1]]]).unwrap();
        let c2 = CliqueStructure::from_ids(p(2, 1), &[1, 2], &[&[&[1], &[2]]]).unwrap();
        let d = standard_amalgam(&c1, &c2, &set_of([1])).unwrap().amalgam;
        assert_eq!(d.cliques().len(), 2);
        // the relative pre-dimension identity and strongness of the left factor
        let rel = predim_rel(d.universe(), c1.universe(), &d).unwrap();
        assert_eq!(rel, predim_rel(c2.universe(), &set_of([1]), &c2).unwrap());
        assert!(is_strong(c1.universe(), &d).unwrap().strong);
    }

    #[test]
    fn fresh_allocation() {
        assert_eq!(fresh_ids(&set_of([0, 2]), 3), vec![Element(1), Element(3), Element(4)]);
        let over: BTreeMap<Element, Element> = [(Element(0), Element(10))].into_iter().collect();
        let map = rename_apart(&set_of([0, 1, 2]), &over, &set_of([0, 1, 10]));
        assert_eq!(map[&Element(0)], Element(10));
        assert_eq!(map[&Element(1)], Element(2));
        assert_eq!(map[&Element(2)], Element(3));
    }
}
