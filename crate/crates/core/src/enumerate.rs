//! Exhaustive enumeration of small structures on the universe `0..m`.
//!
//! Both validity and class membership are preserved under removing a tuple
//! or a clique, so every structure is reached by adding relation items one
//! at a time to a smaller valid structure. Labeled enumeration adds items
//! in increasing index order. Enumeration up to isomorphism proceeds level
//! by level and keeps one canonical representative per class.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::iso::{canonical_form, Encode};
use crate::structures::{ClassParams, Clique, CliqueStructure, Element, ElementSet, NaryStructure, RTuple, Structure};

/// Largest universe handled here.
pub const MAX_SIZE: usize = 8;
/// Largest number of r-tuples over which clique items are generated.
pub const MAX_RTUPLES: usize = 16;

pub trait Enumerable: Encode {
    type Item: Clone;
    /// Every relation item over `0..size`.
    fn candidate_items(params: ClassParams, size: usize) -> Result<Vec<Self::Item>>;
    fn has_item(&self, item: &Self::Item) -> bool;
    /// `self` with `item` added, if the result is valid (and in the class
    /// when `class_only`). `self` is assumed valid (and in the class).
    fn with_item(&self, item: &Self::Item, class_only: bool) -> Option<Self>;
    /// The structure with no relation items on `universe`.
    fn blank(params: ClassParams, universe: ElementSet) -> Self;
}

fn distinct_tuples(len: usize, size: usize) -> Vec<Vec<Element>> {
    fn go(len: usize, size: usize, cur: &mut Vec<Element>, out: &mut Vec<Vec<Element>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in 0..size as u32 {
            if !cur.contains(&Element(i)) {
                cur.push(Element(i));
                go(len, size, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(len, size, &mut Vec::new(), &mut out);
    out
}

fn mask_of(es: impl IntoIterator<Item = Element>) -> u32 {
    es.into_iter().fold(0, |m, e| m | (1 << e.0))
}

fn check_size(size: usize) -> Result<()> {
    if size > MAX_SIZE {
        return Err(Error::TooLarge { what: "enumerated universe", size, limit: MAX_SIZE });
    }
    Ok(())
}

fn universe(size: usize) -> ElementSet {
    (0..size as u32).map(Element).collect()
}

impl Enumerable for NaryStructure {
    type Item = Vec<Element>;

    fn blank(params: ClassParams, universe: ElementSet) -> Self {
        NaryStructure::new(params, universe, BTreeSet::new())
    }

    fn candidate_items(params: ClassParams, size: usize) -> Result<Vec<Self::Item>> {
        check_size(size)?;
        Ok(distinct_tuples(params.n(), size))
    }

    fn has_item(&self, item: &Self::Item) -> bool {
        self.contains_tuple(item)
    }

    fn with_item(&self, item: &Self::Item, class_only: bool) -> Option<Self> {
        if self.contains_tuple(item) {
            return None;
        }
        if class_only {
            let masks: Vec<u32> = self.relation().iter().map(|t| mask_of(t.iter().copied())).collect();
            let tm = mask_of(item.iter().copied());
            let full = mask_of(self.universe().iter().copied());
            // only sets containing the new tuple lose anything
            let rest = full & !tm;
            let mut sub = rest;
            loop {
                let x = sub | tm;
                let tuples = 1 + masks.iter().filter(|&&m| m & x == m).count();
                if (x.count_ones() as usize) < tuples {
                    return None;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        Some(self.extended([], [item.clone()]))
    }
}

impl Enumerable for CliqueStructure {
    type Item = Clique;

    fn blank(params: ClassParams, universe: ElementSet) -> Self {
        CliqueStructure::new(params, universe, BTreeSet::new())
    }

    fn candidate_items(params: ClassParams, size: usize) -> Result<Vec<Self::Item>> {
        check_size(size)?;
        let tuples: Vec<RTuple> = distinct_tuples(params.r(), size).into_iter().map(RTuple).collect();
        if tuples.len() > MAX_RTUPLES {
            return Err(Error::TooLarge { what: "r-tuples for clique enumeration", size: tuples.len(), limit: MAX_RTUPLES });
        }
        let mut items = Vec::new();
        for mask in 1u32..(1 << tuples.len()) {
            if mask.count_ones() as usize >= params.s() {
                items.push((0..tuples.len()).filter(|&i| mask & (1 << i) != 0).map(|i| tuples[i].clone()).collect());
            }
        }
        // smaller cliques first, then lexicographic
        items.sort_by(|a: &Clique, b: &Clique| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(items)
    }

    fn has_item(&self, item: &Self::Item) -> bool {
        self.cliques().contains(item)
    }

    fn with_item(&self, item: &Self::Item, class_only: bool) -> Option<Self> {
        let s = self.params().s();
        if self.cliques().iter().any(|k| k.intersection(item).count() >= s) {
            return None;
        }
        let next = self.extended([], [item.clone()]);
        if class_only {
            let cliques: Vec<Vec<u32>> =
                next.cliques().iter().map(|k| k.iter().map(|t| mask_of(t.0.iter().copied())).collect()).collect();
            let full = mask_of(next.universe().iter().copied());
            let mut x = full;
            loop {
                let mut lambda = x.count_ones() as i64;
                for k in &cliques {
                    let inside = k.iter().filter(|&&m| m & x == m).count() as i64;
                    lambda -= (inside - (s as i64 - 1)).max(0);
                }
                if lambda < 0 {
                    return None;
                }
                if x == 0 {
                    break;
                }
                x = (x - 1) & full;
            }
        }
        Some(next)
    }
}

/// Every valid structure on `0..size` (in the class when `class_only`),
/// labeled, in a fixed order.
pub fn for_each_labeled<S: Enumerable>(
    params: ClassParams,
    size: usize,
    class_only: bool,
    mut visit: impl FnMut(&S),
) -> Result<()> {
    let items = S::candidate_items(params, size)?;
    fn go<S: Enumerable>(a: &S, items: &[S::Item], from: usize, class_only: bool, visit: &mut dyn FnMut(&S)) {
        visit(a);
        for i in from..items.len() {
            if let Some(b) = a.with_item(&items[i], class_only) {
                go(&b, items, i + 1, class_only, visit);
            }
        }
    }
    let start = empty_on::<S>(params, size);
    go(&start, &items, 0, class_only, &mut visit);
    Ok(())
}

fn empty_on<S: Enumerable>(params: ClassParams, size: usize) -> S {
    S::blank(params, universe(size))
}

/// One representative per isomorphism class of valid structures on
/// `0..size` (in the class when `class_only`). Representatives are
/// canonically relabelled; the list is ordered by number of relation items,
/// then by canonical code.
pub fn iso_classes<S: Enumerable>(params: ClassParams, size: usize, class_only: bool) -> Result<Vec<S>> {
    let items = S::candidate_items(params, size)?;
    let start: S = empty_on(params, size);
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    seen.insert(canonical_form(&start, None).0);
    let mut all = vec![start.clone()];
    let mut level = vec![start];
    while !level.is_empty() {
        let mut next: Vec<(Vec<u32>, S)> = Vec::new();
        for a in &level {
            for item in &items {
                if a.has_item(item) {
                    continue;
                }
                if let Some(b) = a.with_item(item, class_only) {
                    let (code, order) = canonical_form(&b, None);
                    if seen.insert(code.clone()) {
                        let map = order.iter().enumerate().map(|(i, &e)| (e, Element(i as u32))).collect();
                        next.push((code, b.rename(&map)));
                    }
                }
            }
        }
        next.sort_by(|x, y| x.0.cmp(&y.0));
        level = next.into_iter().map(|(_, b)| b).collect();
        all.extend(level.iter().cloned());
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predim::in_class;

    fn p(n: usize, r: usize) -> ClassParams {
        ClassParams::new(n, r).unwrap()
    }

    #[test]
    fn labeled_counts_small() {
        // n=2 on 2 points: subsets of {(0,1),(1,0)}, all in the class
        let mut count = 0;
        for_each_labeled::<NaryStructure>(p(2, 1), 2, true, |_| count += 1).unwrap();
        assert_eq!(count, 4);
        // n=3 on 3 points in the class: at most 3 of the 6 triples
        let mut count = 0;
        for_each_labeled::<NaryStructure>(p(3, 1), 3, true, |a| {
            assert!(in_class(a).unwrap());
            count += 1;
        })
        .unwrap();
        assert_eq!(count, 1 + 6 + 15 + 20);
        // clique r=1, s=2 on 3 points: none, three pairs chosen freely, or the triple
        let mut count = 0;
        for_each_labeled::<CliqueStructure>(p(2, 1), 3, false, |a| {
            assert!(a.validate().is_valid());
            count += 1;
        })
        .unwrap();
        assert_eq!(count, 8 + 1);
    }

    #[test]
    fn iso_counts_small() {
        // digraphs on 3 points with at most one arc per pair orientation and δ ≥ 0
        let classes = iso_classes::<NaryStructure>(p(3, 1), 3, true).unwrap();
        // 0 tuples: 1; 1: 1; 2: 3 kinds of pairs of permutations; 3: up to S3 action
        let mut labeled = 0;
        for_each_labeled::<NaryStructure>(p(3, 1), 3, true, |_| labeled += 1).unwrap();
        assert!(classes.len() < labeled);
        for a in &classes {
            assert!(in_class(a).unwrap());
        }
        let cliques = iso_classes::<CliqueStructure>(p(2, 1), 3, false).unwrap();
        // empty, one pair, two pairs, three pairs, the triple
        assert_eq!(cliques.len(), 5);
    }

    #[test]
    fn oversize_rejected() {
        assert!(iso_classes::<NaryStructure>(p(2, 1), 9, true).is_err());
        assert!(iso_classes::<CliqueStructure>(p(3, 2), 5, true).is_err());
    }
}
