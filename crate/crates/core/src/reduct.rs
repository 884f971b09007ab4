//! The formulas φ_k, the clique reduct of an n-ary structure, and the
//! constructions relating the two classes.
//!
//! An n-ary tuple is read as a witness prefix ȳ of length s−1 followed by a
//! member r-tuple x̄. A set of k ≥ s members is related by φ_k when some ȳ,
//! disjoint from the members, satisfies: the tuples inside X = ȳ ∪ members
//! are exactly the (ȳ, x̄_i), and X is strong in every superset adding at
//! most s elements.

use std::collections::{BTreeMap, BTreeSet};

use crate::amalgam::fresh_ids;
use crate::error::{Error, Result};
use crate::gadget::{GadgetRecord, GadgetReport};
use crate::iso::isomorphic_over;
use crate::predim::{in_class, is_strong};
use crate::structures::{fmt_set, Clique, CliqueStructure, Element, ElementSet, NaryStructure, RTuple, Structure};

/// Members sharing one witness prefix are enumerated exhaustively; this is
/// the largest such group handled.
pub const MAX_MEMBER_GROUP: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductCertificate {
    pub members: Vec<RTuple>,
    pub witness: Vec<Element>,
    pub checked: ElementSet,
}

/// Is `x` strong in every superset adding at most `bound` elements of `m`?
pub fn bounded_strong(m: &NaryStructure, x: &ElementSet, bound: usize) -> bool {
    // A minimal violating extension is a union of the outside parts of the
    // tuples it completes, so only such unions need checking.
    let parts: BTreeSet<ElementSet> = m
        .relation()
        .iter()
        .map(|t| t.iter().filter(|e| !x.contains(e)).copied().collect::<ElementSet>())
        .filter(|p| !p.is_empty() && p.len() <= bound)
        .collect();
    let parts: Vec<ElementSet> = parts.into_iter().collect();
    let count = |z: &ElementSet| -> usize {
        m.relation()
            .iter()
            .filter(|t| t.iter().any(|e| !x.contains(e)) && t.iter().all(|e| x.contains(e) || z.contains(e)))
            .count()
    };
    let mut seen: BTreeSet<ElementSet> = BTreeSet::new();
    fn go(
        parts: &[ElementSet],
        start: usize,
        z: &ElementSet,
        bound: usize,
        seen: &mut BTreeSet<ElementSet>,
        count: &dyn Fn(&ElementSet) -> usize,
    ) -> bool {
        for i in start..parts.len() {
            if parts[i].is_subset(z) {
                continue;
            }
            let next: ElementSet = z.union(&parts[i]).copied().collect();
            if next.len() > bound || !seen.insert(next.clone()) {
                continue;
            }
            if count(&next) > next.len() || !go(parts, i + 1, &next, bound, seen, count) {
                return false;
            }
        }
        true
    }
    go(&parts, 0, &ElementSet::new(), bound, &mut seen, &count)
}

fn split(m: &NaryStructure, t: &[Element]) -> (Vec<Element>, RTuple) {
    let w = m.params().s() - 1;
    (t[..w].to_vec(), RTuple(t[w..].to_vec()))
}

fn elements_of<'a>(members: impl IntoIterator<Item = &'a RTuple>) -> ElementSet {
    members.into_iter().flat_map(|t| t.0.iter().copied()).collect()
}

/// Does `witness` certify the member set?
fn certifies(m: &NaryStructure, witness: &[Element], members: &BTreeSet<RTuple>) -> Option<ElementSet> {
    let mut x = elements_of(members);
    if witness.iter().any(|e| x.contains(e)) {
        return None;
    }
    x.extend(witness.iter().copied());
    // every (ȳ, x̄_i) is present by choice of witness; any other tuple inside X is too many
    let inside = m.relation().iter().filter(|t| t.iter().all(|e| x.contains(e))).count();
    let all_present = members.iter().all(|mem| {
        let mut t = witness.to_vec();
        t.extend(mem.0.iter().copied());
        m.contains_tuple(&t)
    });
    if !all_present || inside != members.len() {
        return None;
    }
    bounded_strong(m, &x, m.params().s()).then_some(x)
}

/// Evaluate φ_k on the given members (k = number of members).
pub fn phi_k(m: &NaryStructure, members: &[RTuple]) -> Result<Option<ReductCertificate>> {
    let p = m.params();
    if members.len() < p.s() {
        return Err(Error::Precondition(format!("φ_k needs k ≥ s = {}, got {} members", p.s(), members.len())));
    }
    for t in members {
        if t.0.len() != p.r() || t.0.iter().enumerate().any(|(i, e)| t.0[i + 1..].contains(e)) {
            return Err(Error::InvalidStructure(format!("member {t} is not an r-tuple of distinct elements")));
        }
        let missing: Vec<Element> = t.0.iter().filter(|e| !m.universe().contains(e)).copied().collect();
        if !missing.is_empty() {
            return Err(Error::NotInUniverse(missing));
        }
    }
    let set: BTreeSet<RTuple> = members.iter().cloned().collect();
    if set.len() != members.len() {
        return Ok(None);
    }
    let mut found: Vec<(Vec<Element>, ElementSet)> = Vec::new();
    for t in m.relation() {
        let (y, x1) = split(m, t);
        if x1 != members[0] {
            continue;
        }
        if let Some(x) = certifies(m, &y, &set) {
            found.push((y, x));
        }
    }
    if found.len() > 1 {
        return Err(Error::Assertion(format!("φ_k has {} witnesses for one member set", found.len())));
    }
    Ok(found.pop().map(|(witness, checked)| ReductCertificate { members: members.to_vec(), witness, checked }))
}

/// Member sets satisfying some φ_k, with their witnesses. Members are drawn
/// from `allowed`^r when given.
fn related_sets(m: &NaryStructure, allowed: Option<&ElementSet>) -> Result<BTreeMap<BTreeSet<RTuple>, Vec<Element>>> {
    let s = m.params().s();
    let mut groups: BTreeMap<Vec<Element>, Vec<RTuple>> = BTreeMap::new();
    for t in m.relation() {
        let (y, x) = split(m, t);
        if allowed.map_or(true, |a| x.0.iter().all(|e| a.contains(e))) {
            groups.entry(y).or_default().push(x);
        }
    }
    let mut related: BTreeMap<BTreeSet<RTuple>, Vec<Element>> = BTreeMap::new();
    for (y, members) in groups {
        if members.len() < s {
            continue;
        }
        if members.len() > MAX_MEMBER_GROUP {
            return Err(Error::TooLarge { what: "tuples sharing a witness prefix", size: members.len(), limit: MAX_MEMBER_GROUP });
        }
        for mask in 1u32..(1 << members.len()) {
            if (mask.count_ones() as usize) < s {
                continue;
            }
            let set: BTreeSet<RTuple> =
                (0..members.len()).filter(|&i| mask & (1 << i) != 0).map(|i| members[i].clone()).collect();
            if certifies(m, &y, &set).is_some() {
                if let Some(other) = related.insert(set, y.clone()) {
                    return Err(Error::Assertion(format!(
                        "two witnesses {} and {} for one member set",
                        crate::structures::fmt_tuple(&other),
                        crate::structures::fmt_tuple(&y)
                    )));
                }
            }
        }
    }
    Ok(related)
}

/// Maximal sets all of whose subsets of size ≥ s are related.
fn cliques_of(related: &BTreeMap<BTreeSet<RTuple>, Vec<Element>>, s: usize) -> BTreeSet<Clique> {
    let mut cliques: Vec<&BTreeSet<RTuple>> = Vec::new();
    for set in related.keys() {
        let v: Vec<&RTuple> = set.iter().collect();
        let all = (1u32..(1 << v.len())).filter(|m| m.count_ones() as usize >= s).all(|mask| {
            let sub: BTreeSet<RTuple> = (0..v.len()).filter(|&i| mask & (1 << i) != 0).map(|i| v[i].clone()).collect();
            related.contains_key(&sub)
        });
        if all {
            cliques.push(set);
        }
    }
    cliques
        .iter()
        .filter(|k| !cliques.iter().any(|other| other.len() > k.len() && k.is_subset(other)))
        .map(|k| (*k).clone())
        .collect()
}

/// The clique reduct A^T.
///
/// For inputs in the class the result is checked to be a valid clique
/// structure; for other inputs it is returned as computed.
pub fn reduct_of(m: &NaryStructure) -> Result<CliqueStructure> {
    m.ensure_valid()?;
    let related = related_sets(m, None)?;
    let out = CliqueStructure::new(m.params(), m.universe().clone(), cliques_of(&related, m.params().s()));
    if !out.validate().is_valid() && in_class(m)? {
        return Err(Error::Assertion(format!("reduct of a structure in the class is invalid: {}", out.validate())));
    }
    Ok(out)
}

/// The reduct of `m` restricted to `a`, evaluated inside `m`. For strong
/// `a` this coincides with the reduct of the induced structure; both are
/// computed and compared.
pub fn reduct_within(m: &NaryStructure, a: &ElementSet) -> Result<CliqueStructure> {
    m.ensure_valid()?;
    let strong = is_strong(a, m)?;
    if !strong.strong {
        return Err(Error::Precondition(format!("{} is not strong in the ambient structure", fmt_set(a))));
    }
    let induced = m.induced(a)?;
    if !in_class(&induced)? {
        return Err(Error::Precondition("the induced structure is not in the class".into()));
    }
    let related = related_sets(m, Some(a))?;
    let within = CliqueStructure::new(m.params(), a.clone(), cliques_of(&related, m.params().s()));
    let direct = reduct_of(&induced)?;
    if within != direct {
        return Err(Error::Assertion(format!("reduct within the ambient structure differs: {within} vs {direct}")));
    }
    Ok(within)
}

/// `b` together with the elements of every prefix ȳ whose members inside
/// `b` form a maximal clique of the reduct induced on `b`.
pub fn witness_hull(b: &ElementSet, a: &NaryStructure) -> Result<ElementSet> {
    let bc = reduct_of(a)?.induced(b)?;
    let mut groups: BTreeMap<Vec<Element>, Clique> = BTreeMap::new();
    for t in a.relation() {
        let (y, x) = split(a, t);
        let entry = groups.entry(y).or_default();
        if x.0.iter().all(|e| b.contains(e)) {
            entry.insert(x);
        }
    }
    let mut hull = b.clone();
    for (y, members) in groups {
        if bc.cliques().contains(&members) {
            hull.extend(y);
        }
    }
    Ok(hull)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    pub c: NaryStructure,
    pub report: GadgetReport,
}

/// Given A in the class and a clique structure B_c in which the reduct of A
/// is strong, build C ≥ A whose reduct contains B_c strongly: cliques of
/// the reduct are extended along their witnesses, and every other clique
/// of B_c gets a fresh witness block.
pub fn lift(a: &NaryStructure, bc: &CliqueStructure) -> Result<Lift> {
    a.ensure_valid()?;
    bc.ensure_valid()?;
    if a.params() != bc.params() {
        return Err(Error::Precondition("structures have different parameters".into()));
    }
    if !in_class(a)? || !in_class(bc)? {
        return Err(Error::Precondition("both structures must be in their classes".into()));
    }
    if !a.universe().is_subset(bc.universe()) {
        return Err(Error::Precondition("the n-ary universe is not contained in the clique universe".into()));
    }
    let ac = reduct_of(a)?;
    if bc.induced(a.universe())? != ac || !is_strong(a.universe(), bc)?.strong {
        return Err(Error::Precondition("the reduct of A is not a strong substructure of B_c".into()));
    }
    let related = related_sets(a, None)?;
    let in_a = |t: &RTuple| t.0.iter().all(|e| a.universe().contains(e));
    let mut relation = a.relation().clone();
    let mut records = Vec::new();
    for k in ac.cliques() {
        let witness = related
            .get(k)
            .cloned()
            .ok_or_else(|| Error::Assertion(format!("clique {} of the reduct has no witness", crate::structures::fmt_clique(k))))?;
        let khat = bc.extend_clique(a.universe(), k)?;
        let mut added = Vec::new();
        for b in khat.difference(k) {
            let mut t = witness.clone();
            t.extend(b.0.iter().copied());
            if t.iter().enumerate().any(|(i, e)| t[i + 1..].contains(e)) {
                return Err(Error::Precondition(format!(
                    "extending the witness {} by {b} repeats an entry",
                    crate::structures::fmt_tuple(&witness)
                )));
            }
            relation.insert(t.clone());
            added.push(t);
        }
        records.push(GadgetRecord::Witness { clique: khat, witness, fresh: false, tuples: added });
    }
    let mut used = bc.universe().clone();
    let mut fresh_all = Vec::new();
    for l in bc.cliques() {
        let trace: Clique = l.iter().filter(|t| in_a(t)).cloned().collect();
        if ac.cliques().contains(&trace) {
            continue;
        }
        let z = fresh_ids(&used, a.params().s() - 1);
        used.extend(z.iter().copied());
        fresh_all.extend(z.iter().copied());
        let mut added = Vec::new();
        for b in l {
            let mut t = z.clone();
            t.extend(b.0.iter().copied());
            relation.insert(t.clone());
            added.push(t);
        }
        records.push(GadgetRecord::Witness { clique: l.clone(), witness: z, fresh: true, tuples: added });
    }
    let c = NaryStructure::new(a.params(), used, relation);
    let report = GadgetReport { fresh: fresh_all, records };

    c.ensure_valid().map_err(|e| Error::Assertion(format!("lifted structure invalid: {e}")))?;
    if !in_class(&c)? {
        return Err(Error::Assertion("lifted structure is not in the class".into()));
    }
    if !is_strong(a.universe(), &c)?.strong {
        return Err(Error::Assertion("A is not strong in the lifted structure".into()));
    }
    let ct = reduct_of(&c)?;
    if ct.induced(bc.universe())? != *bc {
        return Err(Error::Assertion("B_c is not a substructure of the reduct of the lift".into()));
    }
    if !is_strong(bc.universe(), &ct)?.strong {
        return Err(Error::Assertion("B_c is not strong in the reduct of the lift".into()));
    }
    Ok(Lift { c, report })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nondef {
    pub a: NaryStructure,
    pub b: NaryStructure,
    /// The n new elements, which form the single new tuple of B.
    pub tuple: Vec<Element>,
}

/// Two extensions of F by n new points, without and with the tuple on them.
/// They are not isomorphic over F, but their reducts coincide.
pub fn nondef_witness(f: &NaryStructure) -> Result<Nondef> {
    f.ensure_valid()?;
    if !in_class(f)? {
        return Err(Error::Precondition("F is not in the class".into()));
    }
    let tuple = fresh_ids(f.universe(), f.params().n());
    let a = f.extended(tuple.iter().copied(), []);
    let b = f.extended(tuple.iter().copied(), [tuple.clone()]);
    let fail = |what: &str| Err(Error::Assertion(what.to_string()));
    if !in_class(&a)? || !in_class(&b)? {
        return fail("an extension left the class");
    }
    if !is_strong(f.universe(), &a)?.strong || !is_strong(f.universe(), &b)?.strong {
        return fail("F is not strong in an extension");
    }
    if isomorphic_over(&a, &b, f.universe())?.is_some() {
        return fail("the extensions are isomorphic over F");
    }
    let (ra, rb) = (reduct_of(&a)?, reduct_of(&b)?);
    if ra != rb {
        return fail("the reducts differ");
    }
    if isomorphic_over(&ra, &rb, f.universe())?.is_none() {
        return fail("the reducts are not isomorphic over F");
    }
    Ok(Nondef { a, b, tuple })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predim::delta;
    use crate::structures::{set_of, ClassParams};

    fn p(n: usize, r: usize) -> ClassParams {
        ClassParams::new(n, r).unwrap()
    }

    fn t(ids: &[u32]) -> RTuple {
        RTuple::from_ids(ids.iter().copied())
    }

    // y1=0, y2=1, a=2, b=3, c=4
    fn five_point() -> NaryStructure {
        NaryStructure::from_ids(p(3, 1), &[0, 1, 2, 3, 4], &[&[0, 1, 2], &[0, 1, 3], &[0, 1, 4]]).unwrap()
    }

    #[test]
    fn phi_examples() {
        let m = five_point();
        let cert = phi_k(&m, &[t(&[2]), t(&[3]), t(&[4])]).unwrap().unwrap();
        assert_eq!(cert.witness, vec![Element(0), Element(1)]);
        assert_eq!(cert.checked, set_of([0, 1, 2, 3, 4]));
        assert!(phi_k(&m, &[t(&[2]), t(&[2]), t(&[3])]).unwrap().is_none());
        assert!(phi_k(&m, &[t(&[2]), t(&[3])]).is_err());
        // d with (y1,y2,d) and two more tuples through d and a: adding d costs more than it brings
        let bad = NaryStructure::from_ids(
            p(3, 1),
            &[0, 1, 2, 3, 4, 5],
            &[&[0, 1, 2], &[0, 1, 3], &[0, 1, 4], &[0, 1, 5], &[5, 2, 3], &[5, 3, 4]],
        )
        .unwrap();
        assert!(phi_k(&bad, &[t(&[2]), t(&[3]), t(&[4])]).unwrap().is_none());
    }

    #[test]
    fn related_sets_need_not_come_from_cliques() {
        // star (0,1) over members 2..=6; the block W = {7,8,9} makes every
        // member set containing 2, 3 and 4 lose strongness, and nothing else
        let a = NaryStructure::from_ids(
            p(3, 1),
            &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
            &[&[0, 1, 2], &[0, 1, 3], &[0, 1, 4], &[0, 1, 5], &[0, 1, 6], &[7, 8, 2], &[8, 9, 3], &[9, 7, 4], &[7, 8, 9]],
        )
        .unwrap();
        assert!(in_class(&a).unwrap());
        assert!(phi_k(&a, &[t(&[2]), t(&[3]), t(&[4])]).unwrap().is_none());
        for triple in [[2, 3, 5], [2, 4, 5], [3, 4, 6], [2, 5, 6]] {
            assert!(phi_k(&a, &triple.map(|e| t(&[e]))).unwrap().is_some());
        }
        // the maximal related sets {2,3,5,6}, {2,4,5,6}, {3,4,5,6} meet in s tuples
        assert!(matches!(reduct_of(&a), Err(Error::Assertion(_))));
    }

    #[test]
    fn lift_fails_when_a_new_clique_meets_a_tight_set() {
        // {0,1} has δ = 0, so any block containing 1 but not 0 shrinks when 0
        // is added, and a block containing 0 holds a stray tuple
        let a = NaryStructure::from_ids(p(2, 1), &[0, 1, 2], &[&[0, 1], &[1, 0], &[2, 1]]).unwrap();
        let bc = CliqueStructure::from_ids(p(2, 1), &[0, 1, 2, 3, 4, 5], &[&[&[1], &[5]], &[&[3], &[4], &[5]]]).unwrap();
        assert!(reduct_of(&a).unwrap().cliques().is_empty());
        assert!(is_strong(a.universe(), &bc).unwrap().strong);
        assert!(!bounded_strong(&a, &set_of([1]), 2));
        assert!(matches!(lift(&a, &bc), Err(Error::Assertion(_))));
    }

    #[test]
    fn bounded_strongness() {
        let m = five_point();
        assert!(bounded_strong(&m, &set_of([0, 1, 2, 3, 4]), 3));
        // {a,b,c} gains y1,y2 for a net loss of one
        assert!(!bounded_strong(&m, &set_of([2, 3, 4]), 3));
        assert!(bounded_strong(&m, &set_of([2, 3, 4]), 1));
    }

    #[test]
    fn reduct_examples() {
        let m = five_point();
        let r = reduct_of(&m).unwrap();
        let expected = CliqueStructure::from_ids(p(3, 1), &[0, 1, 2, 3, 4], &[&[&[2], &[3], &[4]]]).unwrap();
        assert_eq!(r, expected);
        let free = NaryStructure::from_ids(p(3, 1), &[0, 1, 2], &[]).unwrap();
        assert!(reduct_of(&free).unwrap().cliques().is_empty());
    }

    #[test]
    fn reduct_within_examples() {
        let m = five_point();
        assert_eq!(reduct_within(&m, m.universe()).unwrap(), reduct_of(&m).unwrap());
        assert!(matches!(reduct_within(&m, &set_of([2, 3, 4])), Err(Error::Precondition(_))));
        let small = reduct_within(&m, &set_of([0, 1, 2])).unwrap();
        assert!(small.cliques().is_empty());
    }

    #[test]
    fn witness_hull_examples() {
        let m = five_point();
        assert_eq!(witness_hull(&set_of([2, 3, 4]), &m).unwrap(), set_of([0, 1, 2, 3, 4]));
        assert_eq!(witness_hull(&set_of([]), &m).unwrap(), set_of([]));
        let free = NaryStructure::from_ids(p(3, 1), &[0, 1, 2], &[]).unwrap();
        assert_eq!(witness_hull(&set_of([0, 2]), &free).unwrap(), set_of([0, 2]));
    }

    #[test]
    fn lift_examples() {
        let m = five_point();
        let same = lift(&m, &reduct_of(&m).unwrap()).unwrap();
        assert_eq!(same.c, m);
        assert!(same.report.fresh.is_empty());

        // R_0: extend the clique by d = 5
        let bc = CliqueStructure::from_ids(p(3, 1), &[0, 1, 2, 3, 4, 5], &[&[&[2], &[3], &[4], &[5]]]).unwrap();
        let lifted = lift(&m, &bc).unwrap();
        assert_eq!(lifted.c.relation().len(), 4);
        assert!(lifted.c.contains_tuple(&[Element(0), Element(1), Element(5)]));
        assert!(lifted.report.fresh.is_empty());

        // R_1: a fresh witness block for a new clique. With A on all of
        // {a,b,c} its reduct would not be a substructure of B_c.
        let free3 = NaryStructure::from_ids(p(3, 1), &[0, 1, 2], &[]).unwrap();
        let bc = CliqueStructure::from_ids(p(3, 1), &[0, 1, 2], &[&[&[0], &[1], &[2]]]).unwrap();
        assert!(matches!(lift(&free3, &bc), Err(Error::Precondition(_))));
        let free = NaryStructure::from_ids(p(3, 1), &[0, 1], &[]).unwrap();
        let lifted = lift(&free, &bc).unwrap();
        assert_eq!(lifted.report.fresh, vec![Element(3), Element(4)]);
        assert_eq!(lifted.c.relation().len(), 3);
        assert_eq!(reduct_of(&lifted.c).unwrap().induced(&set_of([0, 1, 2])).unwrap(), bc);
    }

    #[test]
    fn nondef_example() {
        let empty = NaryStructure::empty(p(3, 1));
        let w = nondef_witness(&empty).unwrap();
        assert_eq!(delta(&w.a).unwrap(), 3);
        assert_eq!(delta(&w.b).unwrap(), 2);
        assert!(reduct_of(&w.a).unwrap().cliques().is_empty());
        assert_eq!(w.b.relation().len(), w.a.relation().len() + 1);
    }
}
