//! Embedding and isomorphism search by backtracking, and canonical forms.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::structures::{CliqueStructure, Element, ElementSet, Embedding, NaryStructure, Structure};

/// Relational encoding of a structure under an ordering of its universe.
/// Comparing encodings of one structure under different orderings picks
/// out a canonical ordering.
pub trait Encode: Structure {
    fn encode(&self, position: &BTreeMap<Element, u32>) -> Vec<u32>;
    /// Relation items (tuples or cliques) as element lists, for ordering the
    /// search.
    fn items(&self) -> Vec<Vec<Element>>;
}

impl Encode for NaryStructure {
    fn encode(&self, position: &BTreeMap<Element, u32>) -> Vec<u32> {
        let mut tuples: Vec<Vec<u32>> =
            self.relation().iter().map(|t| t.iter().map(|e| position[e]).collect()).collect();
        tuples.sort_unstable();
        let mut code = vec![tuples.len() as u32];
        code.extend(tuples.into_iter().flatten());
        code
    }

    fn items(&self) -> Vec<Vec<Element>> {
        self.relation().iter().cloned().collect()
    }
}

impl Encode for CliqueStructure {
    fn encode(&self, position: &BTreeMap<Element, u32>) -> Vec<u32> {
        let mut cliques: Vec<Vec<Vec<u32>>> = self
            .cliques()
            .iter()
            .map(|k| {
                let mut ts: Vec<Vec<u32>> = k.iter().map(|t| t.0.iter().map(|e| position[e]).collect()).collect();
                ts.sort_unstable();
                ts
            })
            .collect();
        cliques.sort_unstable();
        let mut code = vec![cliques.len() as u32];
        for k in cliques {
            code.push(k.len() as u32);
            code.extend(k.into_iter().flatten());
        }
        code
    }

    fn items(&self) -> Vec<Vec<Element>> {
        self.cliques()
            .iter()
            .map(|k| {
                let mut es: Vec<Element> = k.iter().flat_map(|t| t.0.iter().copied()).collect();
                es.sort_unstable();
                es.dedup();
                es
            })
            .collect()
    }
}

/// Order in which source elements are assigned: the fixed ones first, then
/// greedily the element sharing most relation items with those already
/// placed (smallest id on ties).
fn search_order<S: Encode>(source: &S, fixed: &BTreeMap<Element, Element>) -> Vec<Element> {
    let items = source.items();
    let mut order: Vec<Element> = fixed.keys().copied().collect();
    let mut placed: ElementSet = order.iter().copied().collect();
    let mut rest: Vec<Element> = source.universe().iter().filter(|e| !placed.contains(e)).copied().collect();
    while !rest.is_empty() {
        let score = |e: Element| items.iter().filter(|it| it.contains(&e) && it.iter().any(|x| placed.contains(x))).count();
        let best = (0..rest.len()).max_by_key(|&i| (score(rest[i]), std::cmp::Reverse(rest[i]))).expect("non-empty");
        let e = rest.remove(best);
        placed.insert(e);
        order.push(e);
    }
    order
}

struct Search<'a, S: Encode> {
    source: &'a S,
    target: &'a S,
    order: Vec<Element>,
    start: usize,
    exact_profiles: bool,
    fwd: BTreeMap<Element, Element>,
    inv: BTreeMap<Element, Element>,
}

impl<S: Encode> Search<'_, S> {
    fn run(&mut self, depth: usize, visit: &mut dyn FnMut(&Embedding) -> bool) -> bool {
        if depth == self.order.len() {
            let emb = Embedding::new(self.fwd.clone());
            if emb.is_embedding(self.source, self.target) {
                return visit(&emb);
            }
            return true;
        }
        let x = self.order[depth];
        let candidates: Vec<Element> =
            self.target.universe().iter().filter(|y| !self.inv.contains_key(y)).copied().collect();
        for y in candidates {
            if self.exact_profiles && self.source.profile(x) != self.target.profile(y) {
                continue;
            }
            self.fwd.insert(x, y);
            self.inv.insert(y, x);
            let ok = self.source.partial_embedding_ok(self.target, &self.fwd, &self.inv, x);
            let keep_going = !ok || self.run(depth + 1, visit);
            self.fwd.remove(&x);
            self.inv.remove(&y);
            if !keep_going {
                return false;
            }
        }
        true
    }
}

fn search<S: Encode>(
    source: &S,
    target: &S,
    fixed: &BTreeMap<Element, Element>,
    exact_profiles: bool,
    visit: &mut dyn FnMut(&Embedding) -> bool,
) -> Result<()> {
    let missing: Vec<Element> = fixed.keys().filter(|e| !source.universe().contains(e)).copied().collect();
    if !missing.is_empty() {
        return Err(Error::NotInUniverse(missing));
    }
    let missing: Vec<Element> = fixed.values().filter(|e| !target.universe().contains(e)).copied().collect();
    if !missing.is_empty() {
        return Err(Error::NotInUniverse(missing));
    }
    let inv: BTreeMap<Element, Element> = fixed.iter().map(|(a, b)| (*b, *a)).collect();
    if inv.len() != fixed.len() || source.len() > target.len() {
        return Ok(());
    }
    let order = search_order(source, fixed);
    // the fixed part must already be a partial embedding
    let mut fwd = BTreeMap::new();
    let mut inv_acc = BTreeMap::new();
    for (&a, &b) in fixed {
        fwd.insert(a, b);
        inv_acc.insert(b, a);
        if !source.partial_embedding_ok(target, &fwd, &inv_acc, a) {
            return Ok(());
        }
    }
    let mut s = Search { source, target, start: fixed.len(), order, exact_profiles, fwd, inv: inv_acc };
    let start = s.start;
    s.run(start, visit);
    Ok(())
}

/// Visit embeddings of `source` into `target` extending `fixed`, in a
/// deterministic order, until `visit` returns false.
pub fn for_each_embedding<S: Encode>(
    source: &S,
    target: &S,
    fixed: &BTreeMap<Element, Element>,
    mut visit: impl FnMut(&Embedding) -> bool,
) -> Result<()> {
    search(source, target, fixed, false, &mut visit)
}

/// First embedding extending `fixed` accepted by `accept`.
pub fn find_embedding<S: Encode>(
    source: &S,
    target: &S,
    fixed: &BTreeMap<Element, Element>,
    mut accept: impl FnMut(&Embedding) -> bool,
) -> Result<Option<Embedding>> {
    let mut found = None;
    search(source, target, fixed, false, &mut |e| {
        if accept(e) {
            found = Some(e.clone());
            false
        } else {
            true
        }
    })?;
    Ok(found)
}

/// An isomorphism from `a` onto `b` fixing `f` pointwise, if one exists.
pub fn isomorphic_over<S: Encode>(a: &S, b: &S, f: &ElementSet) -> Result<Option<Embedding>> {
    if a.params() != b.params() {
        return Err(Error::Precondition("structures have different parameters".into()));
    }
    if a.induced(f)? != b.induced(f)? {
        return Err(Error::Precondition("induced structures on the common set disagree".into()));
    }
    if a.len() != b.len() || a.relation_size() != b.relation_size() {
        return Ok(None);
    }
    let fixed: BTreeMap<Element, Element> = f.iter().map(|&e| (e, e)).collect();
    let mut found = None;
    search(a, b, &fixed, true, &mut |e| {
        found = Some(e.clone());
        false
    })?;
    Ok(found)
}

/// Canonical code of a structure: the least encoding over all orderings of
/// the universe that list `first` (if given) before the other elements and
/// respect the profile classes. Returns the code and a minimising ordering.
pub fn canonical_form<S: Encode>(a: &S, first: Option<&ElementSet>) -> (Vec<u32>, Vec<Element>) {
    let key = |e: &Element| (first.map_or(false, |f| !f.contains(e)), a.profile(*e));
    let mut elems: Vec<Element> = a.universe().iter().copied().collect();
    elems.sort_by_key(|e| key(e));
    // blocks of elements with equal keys
    let mut blocks: Vec<Vec<Element>> = Vec::new();
    for e in elems {
        match blocks.last_mut() {
            Some(b) if key(&b[0]) == key(&e) => b.push(e),
            _ => blocks.push(vec![e]),
        }
    }
    let mut header: Vec<u32> = vec![a.len() as u32, first.map_or(0, |f| f.len() as u32)];
    for b in &blocks {
        let (outside, profile) = key(&b[0]);
        header.push(b.len() as u32);
        header.push(outside as u32);
        header.push(profile.len() as u32);
        header.extend(profile.iter().map(|&p| p as u32));
    }
    let mut best: Option<(Vec<u32>, Vec<Element>)> = None;
    let mut current: Vec<Element> = Vec::with_capacity(a.len());
    fn permute_blocks<S: Encode>(
        a: &S,
        blocks: &mut [Vec<Element>],
        bi: usize,
        current: &mut Vec<Element>,
        best: &mut Option<(Vec<u32>, Vec<Element>)>,
    ) {
        if bi == blocks.len() {
            let position: BTreeMap<Element, u32> = current.iter().enumerate().map(|(i, &e)| (e, i as u32)).collect();
            let code = a.encode(&position);
            if best.as_ref().map_or(true, |(c, _)| code < *c) {
                *best = Some((code, current.clone()));
            }
            return;
        }
        let block = blocks[bi].clone();
        permute(a, blocks, bi, &block, &mut vec![false; block.len()], current, best);
    }
    fn permute<S: Encode>(
        a: &S,
        blocks: &mut [Vec<Element>],
        bi: usize,
        block: &[Element],
        used: &mut Vec<bool>,
        current: &mut Vec<Element>,
        best: &mut Option<(Vec<u32>, Vec<Element>)>,
    ) {
        if used.iter().all(|&u| u) {
            permute_blocks(a, blocks, bi + 1, current, best);
            return;
        }
        for i in 0..block.len() {
            if !used[i] {
                used[i] = true;
                current.push(block[i]);
                permute(a, blocks, bi, block, used, current, best);
                current.pop();
                used[i] = false;
            }
        }
    }
    permute_blocks(a, &mut blocks, 0, &mut current, &mut best);
    let (code, order) = best.unwrap_or_default();
    header.extend(code);
    (header, order)
}

/// Relabel `a` onto `0..|a|` along its canonical ordering.
pub fn canonical_relabel<S: Encode>(a: &S) -> S {
    let (_, order) = canonical_form(a, None);
    let map: BTreeMap<Element, Element> = order.iter().enumerate().map(|(i, &e)| (e, Element(i as u32))).collect();
    a.rename(&map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{set_of, ClassParams};

    fn p(n: usize, r: usize) -> ClassParams {
        ClassParams::new(n, r).unwrap()
    }

    #[test]
    fn identity_and_relabelling() {
        let a = NaryStructure::from_ids(p(3, 1), &[0, 1, 2, 3], &[&[0, 1, 2], &[1, 2, 3]]).unwrap();
        let id = isomorphic_over(&a, &a, &set_of([])).unwrap().unwrap();
        assert!(id.is_embedding(&a, &a));
        let map: BTreeMap<Element, Element> =
            [(0, 7), (1, 5), (2, 6), (3, 4)].iter().map(|&(x, y)| (Element(x), Element(y))).collect();
        let b = a.rename(&map);
        let iso = isomorphic_over(&a, &b, &set_of([])).unwrap().unwrap();
        assert_eq!(iso.map, map);
    }

    #[test]
    fn extra_tuple_not_isomorphic_over_base() {
        let f = set_of([0]);
        let a = NaryStructure::from_ids(p(3, 1), &[0, 1, 2, 3], &[]).unwrap();
        let b = NaryStructure::from_ids(p(3, 1), &[0, 1, 2, 3], &[&[1, 2, 3]]).unwrap();
        assert!(isomorphic_over(&a, &b, &f).unwrap().is_none());
        let c = NaryStructure::from_ids(p(3, 1), &[0, 1, 2, 3], &[&[0, 1, 2]]).unwrap();
        assert!(matches!(isomorphic_over(&b, &c, &f), Ok(None)));
        assert!(isomorphic_over(&c, &b, &set_of([0, 1, 2])).is_err());
    }

    #[test]
    fn fixing_matters() {
        // a tuple through 0 versus a tuple avoiding 0
        let a = NaryStructure::from_ids(p(2, 1), &[0, 1, 2], &[&[0, 1]]).unwrap();
        let b = NaryStructure::from_ids(p(2, 1), &[0, 1, 2], &[&[2, 1]]).unwrap();
        assert!(isomorphic_over(&a, &b, &set_of([])).unwrap().is_some());
        assert!(isomorphic_over(&a, &b, &set_of([0])).unwrap().is_none());
    }

    #[test]
    fn clique_embeddings() {
        let small = CliqueStructure::from_ids(p(2, 1), &[0, 1], &[&[&[0], &[1]]]).unwrap();
        let big = CliqueStructure::from_ids(p(2, 1), &[5, 6, 7, 8], &[&[&[5], &[6], &[7]]]).unwrap();
        let mut count = 0;
        for_each_embedding(&small, &big, &BTreeMap::new(), |e| {
            assert!(e.is_embedding(&small, &big));
            count += 1;
            true
        })
        .unwrap();
        assert_eq!(count, 6);
        // a two-point clique cannot land on a pair that is not in a clique
        let fixed: BTreeMap<Element, Element> = [(Element(0), Element(8))].into_iter().collect();
        assert!(find_embedding(&small, &big, &fixed, |_| true).unwrap().is_none());
    }

    #[test]
    fn canonical_forms_agree_on_isomorphic_copies() {
        let a = CliqueStructure::from_ids(p(2, 1), &[0, 1, 2, 3], &[&[&[0], &[1], &[2]], &[&[2], &[3]]]).unwrap();
        let map: BTreeMap<Element, Element> =
            [(0, 3), (1, 0), (2, 1), (3, 2)].iter().map(|&(x, y)| (Element(x), Element(y))).collect();
        let b = a.rename(&map);
        assert_eq!(canonical_form(&a, None).0, canonical_form(&b, None).0);
        assert_eq!(canonical_relabel(&a), canonical_relabel(&b));
        let c = CliqueStructure::from_ids(p(2, 1), &[0, 1, 2, 3], &[&[&[0], &[1], &[2]]]).unwrap();
        assert_ne!(canonical_form(&a, None).0, canonical_form(&c, None).0);
        // distinguished subsets separate otherwise isomorphic pairs
        assert_ne!(canonical_form(&a, Some(&set_of([3]))).0, canonical_form(&a, Some(&set_of([0]))).0);
        assert_eq!(canonical_form(&a, Some(&set_of([0]))).0, canonical_form(&a, Some(&set_of([1]))).0);
    }
}
