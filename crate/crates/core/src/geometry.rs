//! Constructions matching pregeometries of n-ary structures of arity rs and
//! clique structures, and back-and-forth extension of rank-preserving
//! partial maps between stages of the two classes.
//!
//! An rs-tuple is read as s consecutive blocks of r-tuples. Every
//! construction checks its stated postconditions and reports a failure as
//! [`Error::Assertion`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::amalgam::{free_amalgam, fresh_ids, rename_apart, standard_amalgam};
use crate::error::{Error, Result};
use crate::gadget::{GadgetRecord, GadgetReport};
use crate::predim::{in_class, is_strong, Mask};
use crate::pregeometry::{rank_table, MAX_TABLE_GROUND};
use crate::structures::{fmt_clique, fmt_set, Clique, CliqueStructure, Element, ElementSet, NaryStructure, RTuple, Structure};

fn blocks(t: &[Element], r: usize) -> Vec<RTuple> {
    t.chunks(r).map(|c| RTuple(c.to_vec())).collect()
}

fn tuple_in(t: &RTuple, set: &ElementSet) -> bool {
    t.0.iter().all(|e| set.contains(e))
}

fn assertion(msg: impl Into<String>) -> Error {
    Error::Assertion(msg.into())
}

fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

fn check_table_size(len: usize) -> Result<()> {
    if len > MAX_TABLE_GROUND {
        return Err(Error::TooLarge { what: "pregeometry comparison ground set", size: len, limit: MAX_TABLE_GROUND });
    }
    Ok(())
}

/// Do two structures on the same universe have the same pregeometry?
pub fn same_pregeometry<S: Structure, T: Structure>(a: &S, b: &T) -> Result<bool> {
    if a.universe() != b.universe() {
        return Ok(false);
    }
    Ok(rank_table(a)? == rank_table(b)?)
}

fn all_permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            if !cur.contains(&i) {
                cur.push(i);
                go(k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(k, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pathologies {
    pub c: NaryStructure,
    pub d: NaryStructure,
    pub report: GadgetReport,
}

/// Replace every tuple of B ∖ A by a gadget on two new points. C keeps B and
/// adds two tuples per gadget; D keeps only A and adds three. C and D have
/// the same pregeometry, and no new tuple of D has a block permutation in D.
pub fn remove_pathologies(a: &NaryStructure, b: &NaryStructure) -> Result<Pathologies> {
    a.ensure_valid()?;
    b.ensure_valid()?;
    let params = b.params();
    let (n, r) = (params.n(), params.r());
    if a.params() != params {
        return Err(precondition("structures have different parameters"));
    }
    if n < 4 || n % r != 0 {
        return Err(precondition(format!("arity {n} must be at least 4 and a multiple of r = {r}")));
    }
    if !a.universe().is_subset(b.universe()) || b.induced(a.universe())? != *a {
        return Err(precondition("A is not a substructure of B"));
    }
    if !in_class(b)? {
        return Err(precondition("B is not in the class"));
    }
    if !is_strong(a.universe(), b)?.strong {
        return Err(precondition("A is not strong in B"));
    }
    let new: Vec<Vec<Element>> = b.relation().difference(a.relation()).cloned().collect();
    let fresh = fresh_ids(b.universe(), 2 * new.len());
    let mut rc = b.relation().clone();
    let mut rd = a.relation().clone();
    let mut records = Vec::new();
    for (i, t) in new.iter().enumerate() {
        let (x, y) = (fresh[2 * i], fresh[2 * i + 1]);
        let cat = |parts: &[&[Element]]| parts.concat();
        let c_tuples = vec![cat(&[&t[..n - 2], &[x, y]]), cat(&[&t[2..], &[y, x]])];
        let d_tuples = vec![
            cat(&[&t[..n - 1], &[x]]),
            cat(&[&t[1..], &[y]]),
            cat(&[&t[..1], &t[2..n - 2], &t[n - 1..], &[x, y]]),
        ];
        rc.extend(c_tuples.iter().cloned());
        rd.extend(d_tuples.iter().cloned());
        records.push(GadgetRecord::Pathology { source: t.clone(), x, y, c_tuples, d_tuples });
    }
    let mut universe = b.universe().clone();
    universe.extend(fresh.iter().copied());
    let c = NaryStructure::new(params, universe.clone(), rc);
    let d = NaryStructure::new(params, universe, rd);
    let report = GadgetReport { fresh, records };

    for (name, x) in [("C", &c), ("D", &d)] {
        if !x.validate().is_valid() || !in_class(x)? {
            return Err(assertion(format!("{name} is not a valid structure in the class")));
        }
    }
    if !is_strong(b.universe(), &c)?.strong {
        return Err(assertion("B is not strong in C"));
    }
    if !is_strong(a.universe(), &d)?.strong {
        return Err(assertion("A is not strong in D"));
    }
    check_table_size(c.len())?;
    if !same_pregeometry(&c, &d)? {
        return Err(assertion("C and D have different pregeometries"));
    }
    let perms = all_permutations(n / r);
    for t in d.relation().difference(a.relation()) {
        let bs = blocks(t, r);
        for p in perms.iter().skip(1) {
            let moved: Vec<Element> = p.iter().flat_map(|&i| bs[i].0.iter().copied()).collect();
            if d.contains_tuple(&moved) {
                return Err(assertion(format!("tuple {:?} of D has a permuted companion", t)));
            }
        }
    }
    Ok(Pathologies { c, d, report })
}

fn check_pair(ars: &NaryStructure, ac: &CliqueStructure) -> Result<()> {
    ars.ensure_valid()?;
    ac.ensure_valid()?;
    if ars.params() != ac.params().rs_class() {
        return Err(precondition(format!("n-ary parameters {} do not match clique parameters {}", ars.params(), ac.params())));
    }
    if ars.universe() != ac.universe() {
        return Err(precondition("the two structures have different universes"));
    }
    if !in_class(ars)? || !in_class(ac)? {
        return Err(precondition("both structures must be in their classes"));
    }
    check_table_size(ars.len())?;
    if !same_pregeometry(ars, ac)? {
        return Err(precondition("the two structures have different pregeometries"));
    }
    Ok(())
}

/// Check predim(X/X∩A) of `left` against `right` for every X on the shared
/// universe, restricted to sets accepted by `filter`. Returns the first
/// counterexample.
fn relative_mismatch<S: Structure, T: Structure>(
    left: &S,
    right: &T,
    base: &ElementSet,
    mut filter: impl FnMut(Mask) -> bool,
) -> Result<Option<ElementSet>> {
    check_table_size(left.len())?;
    let (el, er) = (left.engine()?, right.engine()?);
    if el.elements() != er.elements() {
        return Err(assertion("universes differ"));
    }
    let am = el.mask(base)?;
    for x in 0..(1 as Mask) << el.len() {
        if filter(x) && el.relative(x, x & am) != er.relative(x, x & am) {
            return Ok(Some(el.set(x)));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaryToClique {
    /// B extended by the gadgets, keeping B.
    pub c: NaryStructure,
    /// A extended by the gadgets.
    pub d: NaryStructure,
    /// Cliques of A_c plus one clique of blocks per new tuple of D.
    pub cc: CliqueStructure,
    pub report: GadgetReport,
}

/// Given A and A_c with equal pregeometries on one universe and A ≤ B,
/// build C ≥ B and D ≥ A (via [`remove_pathologies`]) and C_c ≥ A_c on
/// their common universe with PG(C) = PG(D) = PG(C_c).
pub fn nary_to_clique(a: &NaryStructure, ac: &CliqueStructure, b: &NaryStructure) -> Result<NaryToClique> {
    check_pair(a, ac)?;
    let Pathologies { c, d, mut report } = remove_pathologies(a, b)?;
    let r = ac.params().r();
    let mut cliques = ac.cliques().clone();
    for t in d.relation().difference(a.relation()) {
        let k: Clique = blocks(t, r).into_iter().collect();
        cliques.insert(k.clone());
        report.records.push(GadgetRecord::TupleClique { source: t.clone(), clique: k });
    }
    let cc = CliqueStructure::new(ac.params(), d.universe().clone(), cliques);

    let v = cc.validate();
    if !v.is_valid() {
        return Err(assertion(format!("C_c is not a valid clique structure: {v}")));
    }
    if !in_class(&cc)? {
        return Err(assertion("C_c is not in the class"));
    }
    if !is_strong(ac.universe(), &cc)?.strong {
        return Err(assertion("A_c is not strong in C_c"));
    }
    if let Some(x) = relative_mismatch(&d, &cc, a.universe(), |_| true)? {
        return Err(assertion(format!("relative pre-dimensions differ on {}", fmt_set(&x))));
    }
    if !same_pregeometry(&d, &cc)? {
        return Err(assertion("D and C_c have different pregeometries"));
    }
    Ok(NaryToClique { c, d, cc, report })
}

/// The prefix chosen for one maximal clique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixChoice {
    pub clique: Clique,
    /// Whether the clique's trace on A is a maximal clique of A_c.
    pub extends_base: bool,
    /// f(K), in ascending order; E_K is its set of entries.
    pub prefix: Vec<RTuple>,
}

impl PrefixChoice {
    fn e_k(&self) -> impl Iterator<Item = &RTuple> {
        self.prefix.iter()
    }
}

/// X is good when, for every clique, E_K ⊆ X^r iff |K ∩ X^r| ≥ s.
pub fn is_good(choices: &[PrefixChoice], x: &ElementSet, s: usize) -> bool {
    choices.iter().all(|c| {
        let e_inside = c.e_k().all(|t| tuple_in(t, x));
        let count = c.clique.iter().filter(|t| tuple_in(t, x)).count();
        e_inside == (count >= s)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueToNary {
    pub b_rs: NaryStructure,
    pub choices: Vec<PrefixChoice>,
    pub report: GadgetReport,
    /// Whether PG(B_rs) = PG(B_c). Not guaranteed by the construction: a
    /// non-good set can have smaller closure rank on the clique side.
    pub same_pregeometry: bool,
}

fn combinations(len: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(len: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            cur.push(i);
            go(len, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(len, k, 0, &mut Vec::new(), &mut out);
    out
}

fn disjoint(a: &[Element], b: &[Element]) -> bool {
    a.iter().all(|e| !b.contains(e))
}

/// Given A_c and A_rs with equal pregeometries on A, and A_c ≤ B_c, build
/// B_rs on the universe of B_c with A_rs ≤ B_rs and equal relative
/// pre-dimensions on good sets. Whether the pregeometries agree is reported.
///
/// E_K is the lexicographically least (s−1)-subset of K that lies in A^r
/// when K extends a clique of A_c and whose tuples, together with each
/// tuple they are concatenated with, have pairwise distinct entries.
pub fn clique_to_nary(ac: &CliqueStructure, ars: &NaryStructure, bc: &CliqueStructure) -> Result<CliqueToNary> {
    check_pair(ars, ac)?;
    bc.ensure_valid()?;
    if bc.params() != ac.params() || !ac.universe().is_subset(bc.universe()) || bc.induced(ac.universe())? != *ac {
        return Err(precondition("A_c is not a substructure of B_c"));
    }
    if !in_class(bc)? || !is_strong(ac.universe(), bc)?.strong {
        return Err(precondition("A_c is not strong in B_c"));
    }
    let (r, s) = (ac.params().r(), ac.params().s());
    let a = ac.universe();
    let mut choices = Vec::new();
    let mut records = Vec::new();
    let mut relation = ars.relation().clone();
    for k in bc.cliques() {
        let members: Vec<&RTuple> = k.iter().collect();
        let trace: Clique = k.iter().filter(|t| tuple_in(t, a)).cloned().collect();
        let extends_base = ac.cliques().contains(&trace);
        let mut chosen = None;
        for idx in combinations(members.len(), s - 1) {
            let e: Vec<RTuple> = idx.iter().map(|&i| members[i].clone()).collect();
            if extends_base && !e.iter().all(|t| tuple_in(t, a)) {
                continue;
            }
            let flat: Vec<Element> = e.iter().flat_map(|t| t.0.iter().copied()).collect();
            if flat.iter().collect::<BTreeSet<_>>().len() != flat.len() {
                continue;
            }
            let used: Vec<&RTuple> =
                members.iter().copied().filter(|t| if extends_base { !tuple_in(t, a) } else { !e.contains(t) }).collect();
            if used.iter().all(|t| disjoint(&t.0, &flat)) {
                chosen = Some((e, flat, used));
                break;
            }
        }
        let Some((prefix, flat, used)) = chosen else {
            return Err(precondition(format!(
                "no prefix for clique {} keeps the entries of its tuples distinct",
                fmt_clique(k)
            )));
        };
        let tuples: Vec<Vec<Element>> = used.iter().map(|b| [flat.as_slice(), &b.0].concat()).collect();
        relation.extend(tuples.iter().cloned());
        records.push(GadgetRecord::Choice { clique: k.clone(), extends_base, prefix: prefix.clone(), tuples });
        choices.push(PrefixChoice { clique: k.clone(), extends_base, prefix });
    }
    let b_rs = NaryStructure::new(ars.params(), bc.universe().clone(), relation);
    let report = GadgetReport { fresh: Vec::new(), records };

    let v = b_rs.validate();
    if !v.is_valid() {
        return Err(assertion(format!("B_rs is not valid: {v}")));
    }
    for t in report.added_tuples() {
        let (pre, last) = t.split_at(r * (s - 1));
        let owners = choices
            .iter()
            .filter(|c| c.prefix.iter().flat_map(|x| x.0.iter()).eq(pre.iter()) && c.clique.contains(&RTuple(last.to_vec())))
            .count();
        if owners != 1 {
            return Err(assertion(format!("tuple {:?} belongs to {owners} cliques", t)));
        }
    }
    if b_rs.induced(a)? != *ars {
        return Err(assertion("B_rs does not induce A_rs on A"));
    }
    if !in_class(&b_rs)? || !is_strong(a, &b_rs)?.strong {
        return Err(assertion("A_rs is not strong in B_rs"));
    }
    let engine = bc.engine()?;
    let good = |x: Mask| is_good(&choices, &engine.set(x), s);
    if let Some(x) = relative_mismatch(bc, &b_rs, a, good)? {
        return Err(assertion(format!("relative pre-dimensions differ on the good set {}", fmt_set(&x))));
    }
    let same_pregeometry = same_pregeometry(&b_rs, bc)?;
    Ok(CliqueToNary { b_rs, choices, report, same_pregeometry })
}

/// A bijection between subsets of two structures preserving rank in both
/// directions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialPgIso {
    pub domain: ElementSet,
    pub codomain: ElementSet,
    pub map: BTreeMap<Element, Element>,
}

impl PartialPgIso {
    pub fn new(map: BTreeMap<Element, Element>) -> Self {
        PartialPgIso { domain: map.keys().copied().collect(), codomain: map.values().copied().collect(), map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn inverse(&self) -> BTreeMap<Element, Element> {
        self.map.iter().map(|(a, b)| (*b, *a)).collect()
    }

    /// Both sides strong in their structures, and the induced pregeometries
    /// agree along the map, compared by full rank tables.
    pub fn verify<S: Structure, T: Structure>(&self, left: &S, right: &T) -> Result<()> {
        if self.map.keys().copied().collect::<ElementSet>() != self.domain
            || self.map.values().copied().collect::<ElementSet>() != self.codomain
            || self.domain.len() != self.codomain.len()
        {
            return Err(assertion("partial map is not a bijection between its domain and codomain"));
        }
        if !is_strong(&self.domain, left)?.strong || !is_strong(&self.codomain, right)?.strong {
            return Err(assertion("domain or codomain is not strong"));
        }
        let (l, rt) = (left.induced(&self.domain)?, right.induced(&self.codomain)?);
        check_table_size(l.len())?;
        let (tl, tr) = (rank_table(&l)?, rank_table(&rt)?);
        let dom: Vec<Element> = self.domain.iter().copied().collect();
        let cod: Vec<Element> = self.codomain.iter().copied().collect();
        let pos: Vec<usize> = dom.iter().map(|e| cod.binary_search(&self.map[e]).expect("codomain")).collect();
        for (m, &rank) in tl.iter().enumerate() {
            let image = (0..dom.len()).filter(|&i| m & (1 << i) != 0).fold(0usize, |acc, i| acc | 1 << pos[i]);
            if tr[image] != rank {
                let set = (0..dom.len()).filter(|&i| m & (1 << i) != 0).map(|i| dom[i]).collect();
                return Err(assertion(format!("rank of {} is not preserved", fmt_set(&set))));
            }
        }
        Ok(())
    }
}

impl fmt::Display for PartialPgIso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self.map.iter().map(|(a, b)| format!("{a}:{b}")).collect();
        f.write_str(if pairs.is_empty() { "-" } else { "" })?;
        f.write_str(&pairs.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Extend the domain in the n-ary stage.
    Forth,
    /// Extend the codomain in the clique stage.
    Back,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Forth => "forth",
            Direction::Back => "back",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundRecord {
    pub direction: Direction,
    /// The strong extension chosen in the stage being extended, minus the old side.
    pub extension: ElementSet,
    /// Whether the extension had to be added to the stage as a fresh point.
    pub fresh_point: bool,
    /// Domain size after the round.
    pub domain_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackAndForth {
    pub iso: PartialPgIso,
    pub s1: NaryStructure,
    pub s2: CliqueStructure,
    pub rounds: Vec<RoundRecord>,
}

/// Largest number of new elements in the extension chosen per round.
pub const DEFAULT_MAX_DELTA: usize = 3;

/// Sets `base ∪ Δ` strong in `m` with 1 ≤ |Δ| ≤ max_delta, ordered by the
/// number of relation items gained (descending), then Δ lexicographically.
fn strong_extensions<S: Structure>(
    m: &S,
    base: &ElementSet,
    max_delta: usize,
    gain: impl Fn(&ElementSet) -> usize,
) -> Result<Vec<ElementSet>> {
    let rest: Vec<Element> = m.universe().difference(base).copied().collect();
    let mut found: Vec<(usize, Vec<Element>, ElementSet)> = Vec::new();
    for k in 1..=max_delta.min(rest.len()) {
        for idx in combinations(rest.len(), k) {
            let delta: Vec<Element> = idx.iter().map(|&i| rest[i]).collect();
            let mut b = base.clone();
            b.extend(delta.iter().copied());
            if is_strong(&b, m)?.strong {
                found.push((gain(&b), delta, b));
            }
        }
    }
    found.sort_by(|x, y| y.0.cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
    Ok(found.into_iter().map(|f| f.2).collect())
}

fn forth(s1: &NaryStructure, s2: &CliqueStructure, iso: &PartialPgIso, max_delta: usize) -> Result<(BackAndForth, RoundRecord)> {
    let a = s1.induced(&iso.domain)?;
    let ac = s2.induced(&iso.codomain)?.rename(&iso.inverse());
    let in_dom = a.relation().len();
    let gain = |b: &ElementSet| s1.relation().iter().filter(|t| t.iter().all(|e| b.contains(e))).count() - in_dom;
    let mut s1 = s1.clone();
    let mut fresh_point = false;
    let b_set = match strong_extensions(&s1, &iso.domain, max_delta, gain)?.into_iter().next() {
        Some(b) => b,
        None => {
            let p = fresh_ids(s1.universe(), 1)[0];
            s1 = s1.extended([p], []);
            fresh_point = true;
            let mut b = iso.domain.clone();
            b.insert(p);
            b
        }
    };
    let b = s1.induced(&b_set)?;
    let ntc = nary_to_clique(&a, &ac, &b)?;
    // gadget points must avoid the whole stage, not just B
    let to_s1 = rename_apart(ntc.c.universe(), &b_set.iter().map(|&e| (e, e)).collect(), s1.universe());
    let c = ntc.c.rename(&to_s1);
    let s1_next = free_amalgam(&s1, &c, &b_set)?.amalgam;
    let to_s2 = rename_apart(ntc.cc.universe(), &iso.map, s2.universe());
    let cc = ntc.cc.rename(&to_s2);
    let s2_next = standard_amalgam(s2, &cc, &iso.codomain)?.amalgam;
    let map: BTreeMap<Element, Element> = ntc.c.universe().iter().map(|v| (to_s1[v], to_s2[v])).collect();
    let next = PartialPgIso::new(map);
    let record = RoundRecord {
        direction: Direction::Forth,
        extension: b_set.difference(&iso.domain).copied().collect(),
        fresh_point,
        domain_size: next.len(),
    };
    Ok((BackAndForth { iso: next, s1: s1_next, s2: s2_next, rounds: Vec::new() }, record))
}

fn back(s1: &NaryStructure, s2: &CliqueStructure, iso: &PartialPgIso, max_delta: usize) -> Result<(BackAndForth, RoundRecord)> {
    let ac = s2.induced(&iso.codomain)?;
    let ars = s1.induced(&iso.domain)?.rename(&iso.map);
    let img = &iso.codomain;
    let in_img = ac.cliques().iter().map(|k| k.len()).sum::<usize>();
    let gain = |b: &ElementSet| {
        s2.cliques().iter().map(|k| k.iter().filter(|t| tuple_in(t, b)).count()).sum::<usize>().saturating_sub(in_img)
    };
    let mut chosen = None;
    for b_set in strong_extensions(s2, img, max_delta, gain)? {
        match clique_to_nary(&ac, &ars, &s2.induced(&b_set)?) {
            Ok(out) if out.same_pregeometry => {
                chosen = Some((s2.clone(), b_set, out, false));
                break;
            }
            Ok(_) | Err(Error::Precondition(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    let (s2_next, b_set, out, fresh_point) = match chosen {
        Some(c) => c,
        None => {
            let p = fresh_ids(s2.universe(), 1)[0];
            let s2_next = s2.extended([p], []);
            let mut b = img.clone();
            b.insert(p);
            let out = clique_to_nary(&ac, &ars, &s2_next.induced(&b)?)?;
            if !out.same_pregeometry {
                return Err(assertion("adding an isolated point changed the pregeometry"));
            }
            (s2_next, b, out, true)
        }
    };
    let to_s1 = rename_apart(&b_set, &iso.inverse(), s1.universe());
    let b_rs = out.b_rs.rename(&to_s1);
    let s1_next = free_amalgam(s1, &b_rs, &iso.domain)?.amalgam;
    let map: BTreeMap<Element, Element> = b_set.iter().map(|v| (to_s1[v], *v)).collect();
    let next = PartialPgIso::new(map);
    let record = RoundRecord {
        direction: Direction::Back,
        extension: b_set.difference(img).copied().collect(),
        fresh_point,
        domain_size: next.len(),
    };
    Ok((BackAndForth { iso: next, s1: s1_next, s2: s2_next, rounds: Vec::new() }, record))
}

/// Alternately extend `f0` forth (even rounds) and back (odd rounds). Each
/// round picks the best strong extension of at most `max_delta` new points
/// in the current stage, or adds a fresh point when there is none, and
/// amalgamates the constructed structures into both stages. The map is
/// re-verified after every round.
pub fn back_and_forth(
    s1: &NaryStructure,
    s2: &CliqueStructure,
    f0: &PartialPgIso,
    rounds: usize,
    max_delta: usize,
) -> Result<BackAndForth> {
    if s1.params() != s2.params().rs_class() {
        return Err(precondition(format!("n-ary parameters {} do not match clique parameters {}", s1.params(), s2.params())));
    }
    if !in_class(s1)? || !in_class(s2)? {
        return Err(precondition("both stages must be in their classes"));
    }
    f0.verify(s1, s2).map_err(|e| precondition(format!("initial map: {e}")))?;
    let mut state = BackAndForth { iso: f0.clone(), s1: s1.clone(), s2: s2.clone(), rounds: Vec::new() };
    for round in 0..rounds {
        let (next, record) = if round % 2 == 0 {
            forth(&state.s1, &state.s2, &state.iso, max_delta)?
        } else {
            back(&state.s1, &state.s2, &state.iso, max_delta)?
        };
        if !in_class(&next.s1)? || !in_class(&next.s2)? {
            return Err(assertion(format!("round {round}: a stage left its class")));
        }
        if !is_strong(state.s1.universe(), &next.s1)?.strong || !is_strong(state.s2.universe(), &next.s2)?.strong {
            return Err(assertion(format!("round {round}: a stage is not strong in its extension")));
        }
        if !state.iso.map.iter().all(|(a, b)| next.iso.map.get(a) == Some(b)) {
            return Err(assertion(format!("round {round}: the map was not extended")));
        }
        next.iso.verify(&next.s1, &next.s2).map_err(|e| assertion(format!("round {round}: {e}")))?;
        state.iso = next.iso;
        state.s1 = next.s1;
        state.s2 = next.s2;
        state.rounds.push(record);
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predim::{delta, lambda};
    use crate::pregeometry::dims;
    use crate::structures::{set_of, ClassParams};

    fn p(n: usize, r: usize) -> ClassParams {
        ClassParams::new(n, r).unwrap()
    }

    #[test]
    fn pathologies_trivial_and_single_tuple() {
        let a = NaryStructure::from_ids(p(4, 2), &[0, 1, 2, 3], &[]).unwrap();
        let out = remove_pathologies(&a, &a).unwrap();
        assert_eq!((out.c.clone(), out.d.clone()), (a.clone(), a.clone()));
        assert!(out.report.records.is_empty());
        let a = NaryStructure::from_ids(p(4, 2), &[0, 1, 2], &[]).unwrap();
        let b = NaryStructure::from_ids(p(4, 2), &[0, 1, 2, 3], &[&[0, 1, 2, 3]]).unwrap();
        let out = remove_pathologies(&a, &b).unwrap();
        assert_eq!(out.c.len(), 6);
        assert_eq!(out.c.relation().len(), 3);
        assert_eq!(out.d.relation().len(), 3);
        assert_eq!(
            out.report.to_string(),
            "fresh 4 5\npathology source=(0,1,2,3) x=4 y=5 C=(0,1,4,5)(2,3,5,4) D=(0,1,2,4)(1,2,3,5)(0,3,4,5)\n"
        );
    }

    #[test]
    fn pathologies_closed_sets_agree() {
        let a = NaryStructure::from_ids(p(4, 2), &[0, 1, 2], &[]).unwrap();
        let b = NaryStructure::from_ids(p(4, 2), &[0, 1, 2, 3, 4], &[&[0, 1, 3, 4], &[4, 3, 2, 0]]).unwrap();
        let out = remove_pathologies(&a, &b).unwrap();
        let (pc, pd) = (crate::pregeometry_of(&out.c).unwrap(), crate::pregeometry_of(&out.d).unwrap());
        for m in 0..1u128 << out.c.len() {
            assert_eq!(pc.is_closed(m), pd.is_closed(m));
        }
    }

    #[test]
    fn pathologies_rejects_small_arity() {
        let a = NaryStructure::from_ids(p(3, 1), &[0, 1, 2], &[]).unwrap();
        assert!(matches!(remove_pathologies(&a, &a), Err(Error::Precondition(_))));
    }

    #[test]
    fn to_clique_single_tuple() {
        let a = NaryStructure::from_ids(p(4, 2), &[], &[]).unwrap();
        let ac = CliqueStructure::from_ids(p(3, 2), &[], &[]).unwrap();
        let b = NaryStructure::from_ids(p(4, 2), &[0, 1, 2, 3], &[&[0, 1, 2, 3]]).unwrap();
        let out = nary_to_clique(&a, &ac, &b).unwrap();
        assert_eq!(out.cc.cliques().len(), 3);
        assert!(out.cc.cliques().iter().all(|k| k.len() == 2));
        assert_eq!(delta(&out.d).unwrap(), lambda(&out.cc).unwrap());
        let same = nary_to_clique(&a, &ac, &a).unwrap();
        assert_eq!((same.d, same.cc), (a, ac));
    }

    #[test]
    fn to_nary_example() {
        let ac = CliqueStructure::from_ids(p(2, 1), &[], &[]).unwrap();
        let ars = NaryStructure::from_ids(p(2, 1), &[], &[]).unwrap();
        let bc = CliqueStructure::from_ids(p(2, 1), &[0, 1, 2], &[&[&[0], &[1], &[2]]]).unwrap();
        let out = clique_to_nary(&ac, &ars, &bc).unwrap();
        let expect = NaryStructure::from_ids(p(2, 1), &[0, 1, 2], &[&[0, 1], &[0, 2]]).unwrap();
        assert_eq!(out.b_rs, expect);
        assert_eq!(delta(&out.b_rs).unwrap(), 1);
        assert_eq!(lambda(&bc).unwrap(), 1);
        assert_eq!(out.report.to_string(), "fresh -\nchoice clique=(0)(1)(2) base=no f=(0) tuples=(0,1)(0,2)\n");
        assert!(out.same_pregeometry);
        let same = clique_to_nary(&ac, &ars, &ac).unwrap();
        assert_eq!(same.b_rs, ars);
    }

    #[test]
    fn to_nary_can_change_the_pregeometry() {
        // K = {(2,3),(4,1),(5,2)}: only (4,1) avoids repeated entries, and then
        // {2,3,5} has rank 2 on the clique side but 3 on the n-ary side
        let ac = CliqueStructure::from_ids(p(3, 2), &[0, 1, 2], &[]).unwrap();
        let ars = NaryStructure::from_ids(p(4, 2), &[0, 1, 2], &[]).unwrap();
        let bc = CliqueStructure::from_ids(p(3, 2), &[0, 1, 2, 3, 4, 5], &[&[&[0, 5], &[4, 2]], &[&[2, 3], &[4, 1], &[5, 2]]])
            .unwrap();
        let out = clique_to_nary(&ac, &ars, &bc).unwrap();
        assert_eq!(out.choices[1].prefix, vec![RTuple::from_ids([4, 1])]);
        assert!(!out.same_pregeometry);
        let x = set_of([2, 3, 5]);
        assert_eq!(dims(&bc, &x).unwrap(), 2);
        assert_eq!(dims(&out.b_rs, &x).unwrap(), 3);
    }

    #[test]
    fn to_nary_prefers_base_tuples() {
        // the clique {1,2} of A_c extends to {0,1,2} in B_c; E_K must avoid 0
        let ac = CliqueStructure::from_ids(p(2, 1), &[1, 2], &[&[&[1], &[2]]]).unwrap();
        let ars = NaryStructure::from_ids(p(2, 1), &[1, 2], &[&[1, 2]]).unwrap();
        let bc = CliqueStructure::from_ids(p(2, 1), &[0, 1, 2], &[&[&[0], &[1], &[2]]]).unwrap();
        let out = clique_to_nary(&ac, &ars, &bc).unwrap();
        assert_eq!(out.choices[0].prefix, vec![RTuple::from_ids([1])]);
        assert!(out.b_rs.contains_tuple(&[Element(1), Element(0)]));
        assert_eq!(out.b_rs.relation().len(), 2);
    }

    #[test]
    fn to_nary_without_distinct_prefix() {
        let ac = CliqueStructure::from_ids(p(3, 2), &[], &[]).unwrap();
        let ars = NaryStructure::from_ids(p(4, 2), &[], &[]).unwrap();
        let bc = CliqueStructure::from_ids(p(3, 2), &[0, 1, 2], &[&[&[0, 1], &[1, 2]]]).unwrap();
        assert!(matches!(clique_to_nary(&ac, &ars, &bc), Err(Error::Precondition(_))));
    }

    #[test]
    fn partial_iso_checks() {
        let s1 = NaryStructure::from_ids(p(4, 2), &[0, 1, 2, 3], &[&[0, 1, 2, 3]]).unwrap();
        let s2 = CliqueStructure::from_ids(p(3, 2), &[10, 11, 12, 13], &[]).unwrap();
        let empty = PartialPgIso::default();
        empty.verify(&s1, &s2).unwrap();
        let one = PartialPgIso::new([(Element(0), Element(10))].into_iter().collect());
        one.verify(&s1, &s2).unwrap();
        // the 4-tuple has rank 3, four free points have rank 4
        let bad = PartialPgIso::new((0..4).map(|i| (Element(i), Element(10 + i))).collect());
        assert!(bad.verify(&s1, &s2).is_err());
        assert_eq!(one.to_string(), "0:10");
    }

    #[test]
    fn back_and_forth_rounds() {
        let s1 = NaryStructure::from_ids(p(4, 2), &[0, 1, 2, 3, 4], &[&[0, 1, 2, 3]]).unwrap();
        let s2 = CliqueStructure::from_ids(p(3, 2), &[0, 1, 2, 3], &[&[&[0, 1], &[2, 3]]]).unwrap();
        let zero = back_and_forth(&s1, &s2, &PartialPgIso::default(), 0, 3).unwrap();
        assert!(zero.iso.is_empty());
        let out = back_and_forth(&s1, &s2, &PartialPgIso::default(), 4, 3).unwrap();
        assert_eq!(out.rounds.len(), 4);
        let sizes: Vec<usize> = out.rounds.iter().map(|r| r.domain_size).collect();
        assert!(sizes.windows(2).all(|w| w[0] < w[1]));
        out.iso.verify(&out.s1, &out.s2).unwrap();
        assert!(out.iso.len() >= 6);
        let _ = set_of([]);
    }
}
