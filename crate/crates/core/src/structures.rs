//! Finite structures of the two classes: n-ary relational structures and
//! clique structures (maximal-clique antichains of r-tuples).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{ensure, Error, Result};
use crate::predim::PredimEngine;

/// An opaque point of a universe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element(pub u32);

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for Element {
    fn from(id: u32) -> Self {
        Element(id)
    }
}

pub type ElementSet = BTreeSet<Element>;

/// Build an [`ElementSet`] from raw ids.
pub fn set_of<I: IntoIterator<Item = u32>>(ids: I) -> ElementSet {
    ids.into_iter().map(Element).collect()
}

pub fn fmt_set(set: &ElementSet) -> String {
    let ids: Vec<String> = set.iter().map(|e| e.to_string()).collect();
    format!("{{{}}}", ids.join(","))
}

/// The triple (n, r, s) with s = n - r + 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassParams {
    n: usize,
    r: usize,
}

impl ClassParams {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        if n < 2 || r == 0 || r >= n {
            return Err(Error::InvalidParams { n, r });
        }
        Ok(ClassParams { n, r })
    }

    /// Arity of the relation R.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Size of the tuples that make up cliques.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Clique threshold.
    pub fn s(&self) -> usize {
        self.n - self.r + 1
    }

    /// Parameters for n-ary structures of arity r*s whose tuples are read as
    /// s blocks of r-tuples.
    pub fn rs_class(&self) -> ClassParams {
        ClassParams { n: self.r * self.s(), r: self.r }
    }
}

impl fmt::Display for ClassParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} r={} s={}", self.n, self.r, self.s())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RTuple(pub Vec<Element>);

impl RTuple {
    pub fn from_ids<I: IntoIterator<Item = u32>>(ids: I) -> Self {
        RTuple(ids.into_iter().map(Element).collect())
    }

    pub fn elements(&self) -> &[Element] {
        &self.0
    }

    fn map(&self, f: impl Fn(Element) -> Element) -> RTuple {
        RTuple(self.0.iter().map(|&e| f(e)).collect())
    }
}

impl fmt::Display for RTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "({})", ids.join(","))
    }
}

pub type Clique = BTreeSet<RTuple>;

pub fn fmt_clique(k: &Clique) -> String {
    k.iter().map(|t| t.to_string()).collect()
}

pub fn fmt_tuple(t: &[Element]) -> String {
    let ids: Vec<String> = t.iter().map(|e| e.to_string()).collect();
    format!("({})", ids.join(","))
}

fn has_repeats(t: &[Element]) -> bool {
    t.iter().enumerate().any(|(i, a)| t[i + 1..].contains(a))
}

fn check_subset(universe: &ElementSet, set: &ElementSet) -> Result<()> {
    let missing: Vec<Element> = set.difference(universe).copied().collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(Error::NotInUniverse(missing))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Nary,
    Clique,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Nary => "nary",
            Kind::Clique => "clique",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    WrongArity { tuple: Vec<Element>, expected: usize },
    RepeatedEntry { tuple: Vec<Element> },
    OutsideUniverse { tuple: Vec<Element>, element: Element },
    CliqueTooSmall { clique: Clique, min: usize },
    NotAntichain { smaller: Clique, larger: Clique },
    LargeIntersection { first: Clique, second: Clique, shared: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WrongArity { tuple, expected } => {
                write!(f, "tuple {} has length {}, expected {}", fmt_tuple(tuple), tuple.len(), expected)
            }
            Violation::RepeatedEntry { tuple } => write!(f, "tuple {} repeats an entry", fmt_tuple(tuple)),
            Violation::OutsideUniverse { tuple, element } => {
                write!(f, "tuple {} uses {} outside the universe", fmt_tuple(tuple), element)
            }
            Violation::CliqueTooSmall { clique, min } => {
                write!(f, "clique {} has fewer than {} members", fmt_clique(clique), min)
            }
            Violation::NotAntichain { smaller, larger } => {
                write!(f, "clique {} is contained in {}", fmt_clique(smaller), fmt_clique(larger))
            }
            Violation::LargeIntersection { first, second, shared } => write!(
                f,
                "cliques {} and {} share {} tuples",
                fmt_clique(first),
                fmt_clique(second),
                shared
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport(pub Vec<Violation>);

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.0.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.0
    }

    fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidStructure(self.to_string()))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&lines.join("; "))
    }
}

/// Behaviour shared by both structure kinds.
pub trait Structure: Clone + PartialEq + Eq + fmt::Debug + Send + Sync + Sized {
    const KIND: Kind;

    fn empty(params: ClassParams) -> Self;
    fn params(&self) -> ClassParams;
    fn universe(&self) -> &ElementSet;
    fn validate(&self) -> ValidationReport;
    /// The induced substructure on `set`.
    fn induced(&self, set: &ElementSet) -> Result<Self>;
    /// Apply an injective renaming; `map` must cover the universe.
    fn rename(&self, map: &BTreeMap<Element, Element>) -> Self;
    /// Number of relation tuples (n-ary) or maximal cliques (clique).
    fn relation_size(&self) -> usize;
    /// Evaluator for the pre-dimension of induced substructures.
    fn engine(&self) -> Result<PredimEngine>;
    /// Cheap forward check used while growing a partial embedding into
    /// `target`: every relation item of `self` whose elements are all mapped
    /// must be compatible with `target`.
    fn partial_embedding_ok(
        &self,
        target: &Self,
        fwd: &BTreeMap<Element, Element>,
        inv: &BTreeMap<Element, Element>,
        newest: Element,
    ) -> bool;
    /// Per-element invariant that an isomorphism must preserve.
    fn profile(&self, e: Element) -> Vec<usize>;

    fn ensure_valid(&self) -> Result<()> {
        self.validate().into_result()
    }

    fn len(&self) -> usize {
        self.universe().len()
    }

    fn is_empty(&self) -> bool {
        self.universe().is_empty()
    }

    fn max_id(&self) -> Option<u32> {
        self.universe().iter().next_back().map(|e| e.0)
    }
}

// ---------------------------------------------------------------------------
// n-ary structures

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NaryStructure {
    params: ClassParams,
    universe: ElementSet,
    relation: BTreeSet<Vec<Element>>,
}

impl NaryStructure {
    /// Build without checking; call [`NaryStructure::validate`] or use
    /// [`NaryStructure::checked`].
    pub fn new(params: ClassParams, universe: ElementSet, relation: BTreeSet<Vec<Element>>) -> Self {
        NaryStructure { params, universe, relation }
    }

    pub fn checked(params: ClassParams, universe: ElementSet, relation: BTreeSet<Vec<Element>>) -> Result<Self> {
        let a = Self::new(params, universe, relation);
        a.ensure_valid()?;
        Ok(a)
    }

    /// Convenience constructor from raw ids.
    pub fn from_ids(params: ClassParams, universe: &[u32], relation: &[&[u32]]) -> Result<Self> {
        Self::checked(
            params,
            set_of(universe.iter().copied()),
            relation.iter().map(|t| t.iter().map(|&i| Element(i)).collect()).collect(),
        )
    }

    pub fn arity(&self) -> usize {
        self.params.n()
    }

    pub fn relation(&self) -> &BTreeSet<Vec<Element>> {
        &self.relation
    }

    pub fn contains_tuple(&self, t: &[Element]) -> bool {
        self.relation.contains(t)
    }

    /// Copy with extra elements and tuples; the result is not validated.
    pub fn extended(&self, elements: impl IntoIterator<Item = Element>, tuples: impl IntoIterator<Item = Vec<Element>>) -> Self {
        let mut out = self.clone();
        out.universe.extend(elements);
        out.relation.extend(tuples);
        out
    }

    /// Same universe, relation replaced.
    pub fn with_relation(&self, relation: BTreeSet<Vec<Element>>) -> Self {
        NaryStructure { params: self.params, universe: self.universe.clone(), relation }
    }
}

impl Structure for NaryStructure {
    const KIND: Kind = Kind::Nary;

    fn empty(params: ClassParams) -> Self {
        NaryStructure { params, universe: ElementSet::new(), relation: BTreeSet::new() }
    }

    fn params(&self) -> ClassParams {
        self.params
    }

    fn universe(&self) -> &ElementSet {
        &self.universe
    }

    fn validate(&self) -> ValidationReport {
        let n = self.params.n();
        let mut out = Vec::new();
        for t in &self.relation {
            if t.len() != n {
                out.push(Violation::WrongArity { tuple: t.clone(), expected: n });
            }
            if has_repeats(t) {
                out.push(Violation::RepeatedEntry { tuple: t.clone() });
            }
            if let Some(&e) = t.iter().find(|e| !self.universe.contains(e)) {
                out.push(Violation::OutsideUniverse { tuple: t.clone(), element: e });
            }
        }
        ValidationReport(out)
    }

    fn induced(&self, set: &ElementSet) -> Result<Self> {
        check_subset(&self.universe, set)?;
        let relation = self
            .relation
            .iter()
            .filter(|t| t.iter().all(|e| set.contains(e)))
            .cloned()
            .collect();
        Ok(NaryStructure { params: self.params, universe: set.clone(), relation })
    }

    fn rename(&self, map: &BTreeMap<Element, Element>) -> Self {
        let f = |e: Element| map[&e];
        NaryStructure {
            params: self.params,
            universe: self.universe.iter().map(|&e| f(e)).collect(),
            relation: self.relation.iter().map(|t| t.iter().map(|&e| f(e)).collect()).collect(),
        }
    }

    fn relation_size(&self) -> usize {
        self.relation.len()
    }

    fn engine(&self) -> Result<PredimEngine> {
        PredimEngine::for_nary(self)
    }

    fn partial_embedding_ok(
        &self,
        target: &Self,
        fwd: &BTreeMap<Element, Element>,
        inv: &BTreeMap<Element, Element>,
        newest: Element,
    ) -> bool {
        for t in self.relation.iter().filter(|t| t.contains(&newest)) {
            if let Some(img) = t.iter().map(|e| fwd.get(e).copied()).collect::<Option<Vec<_>>>() {
                if !target.relation.contains(&img) {
                    return false;
                }
            }
        }
        let image = fwd[&newest];
        for t in target.relation.iter().filter(|t| t.contains(&image)) {
            if let Some(pre) = t.iter().map(|e| inv.get(e).copied()).collect::<Option<Vec<_>>>() {
                if !self.relation.contains(&pre) {
                    return false;
                }
            }
        }
        true
    }

    fn profile(&self, e: Element) -> Vec<usize> {
        let mut deg = vec![0; self.params.n()];
        for t in &self.relation {
            for (i, x) in t.iter().enumerate() {
                if *x == e && i < deg.len() {
                    deg[i] += 1;
                }
            }
        }
        deg
    }
}

// ---------------------------------------------------------------------------
// clique structures

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CliqueStructure {
    params: ClassParams,
    universe: ElementSet,
    cliques: BTreeSet<Clique>,
}

impl CliqueStructure {
    pub fn new(params: ClassParams, universe: ElementSet, cliques: BTreeSet<Clique>) -> Self {
        CliqueStructure { params, universe, cliques }
    }

    pub fn checked(params: ClassParams, universe: ElementSet, cliques: BTreeSet<Clique>) -> Result<Self> {
        let a = Self::new(params, universe, cliques);
        a.ensure_valid()?;
        Ok(a)
    }

    /// Convenience constructor: each clique is a list of r-tuples given as id slices.
    pub fn from_ids(params: ClassParams, universe: &[u32], cliques: &[&[&[u32]]]) -> Result<Self> {
        Self::checked(
            params,
            set_of(universe.iter().copied()),
            cliques
                .iter()
                .map(|k| k.iter().map(|t| RTuple::from_ids(t.iter().copied())).collect())
                .collect(),
        )
    }

    pub fn cliques(&self) -> &BTreeSet<Clique> {
        &self.cliques
    }

    /// The maximal elements of `family` among sets of size at least s.
    fn maximal(family: impl IntoIterator<Item = Clique>, s: usize) -> BTreeSet<Clique> {
        let fam: Vec<Clique> = family.into_iter().filter(|k| k.len() >= s).collect::<BTreeSet<_>>().into_iter().collect();
        fam.iter()
            .filter(|k| !fam.iter().any(|l| l.len() > k.len() && k.is_subset(l)))
            .cloned()
            .collect()
    }

    /// Build from any family of candidate cliques, keeping the maximal ones.
    pub fn from_family(params: ClassParams, universe: ElementSet, family: impl IntoIterator<Item = Clique>) -> Self {
        let cliques = Self::maximal(family, params.s());
        CliqueStructure { params, universe, cliques }
    }

    /// Copy with extra elements and cliques; not validated.
    pub fn extended(&self, elements: impl IntoIterator<Item = Element>, cliques: impl IntoIterator<Item = Clique>) -> Self {
        let mut out = self.clone();
        out.universe.extend(elements);
        out.cliques.extend(cliques);
        out
    }

    pub fn with_cliques(&self, cliques: BTreeSet<Clique>) -> Self {
        CliqueStructure { params: self.params, universe: self.universe.clone(), cliques }
    }

    /// The maximal clique of `self` extending `k`, where `k` is a maximal
    /// clique of the substructure induced on `sub`. Unique for valid inputs.
    pub fn extend_clique(&self, sub: &ElementSet, k: &Clique) -> Result<Clique> {
        self.ensure_valid()?;
        let induced = self.induced(sub)?;
        ensure!(
            induced.cliques.contains(k),
            Precondition,
            "{} is not a maximal clique of the induced substructure",
            fmt_clique(k)
        );
        let mut found = self.cliques.iter().filter(|big| k.is_subset(big));
        let first = found
            .next()
            .ok_or_else(|| Error::Assertion(format!("no extension of {}", fmt_clique(k))))?;
        if found.next().is_some() {
            return Err(Error::Assertion(format!("two extensions of {}", fmt_clique(k))));
        }
        Ok(first.clone())
    }
}

impl Structure for CliqueStructure {
    const KIND: Kind = Kind::Clique;

    fn empty(params: ClassParams) -> Self {
        CliqueStructure { params, universe: ElementSet::new(), cliques: BTreeSet::new() }
    }

    fn params(&self) -> ClassParams {
        self.params
    }

    fn universe(&self) -> &ElementSet {
        &self.universe
    }

    fn validate(&self) -> ValidationReport {
        let r = self.params.r();
        let s = self.params.s();
        let mut out = Vec::new();
        for k in &self.cliques {
            for t in k {
                if t.0.len() != r {
                    out.push(Violation::WrongArity { tuple: t.0.clone(), expected: r });
                }
                if has_repeats(&t.0) {
                    out.push(Violation::RepeatedEntry { tuple: t.0.clone() });
                }
                if let Some(&e) = t.0.iter().find(|e| !self.universe.contains(e)) {
                    out.push(Violation::OutsideUniverse { tuple: t.0.clone(), element: e });
                }
            }
            if k.len() < s {
                out.push(Violation::CliqueTooSmall { clique: k.clone(), min: s });
            }
        }
        let all: Vec<&Clique> = self.cliques.iter().collect();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                let shared = a.intersection(b).count();
                if shared == a.len() || shared == b.len() {
                    let (smaller, larger) = if a.len() <= b.len() { (a, b) } else { (b, a) };
                    out.push(Violation::NotAntichain { smaller: (*smaller).clone(), larger: (*larger).clone() });
                } else if shared >= s {
                    out.push(Violation::LargeIntersection { first: (*a).clone(), second: (*b).clone(), shared });
                }
            }
        }
        ValidationReport(out)
    }

    fn induced(&self, set: &ElementSet) -> Result<Self> {
        check_subset(&self.universe, set)?;
        let family = self.cliques.iter().map(|k| {
            k.iter()
                .filter(|t| t.0.iter().all(|e| set.contains(e)))
                .cloned()
                .collect::<Clique>()
        });
        Ok(Self::from_family(self.params, set.clone(), family))
    }

    fn rename(&self, map: &BTreeMap<Element, Element>) -> Self {
        let f = |e: Element| map[&e];
        CliqueStructure {
            params: self.params,
            universe: self.universe.iter().map(|&e| f(e)).collect(),
            cliques: self.cliques.iter().map(|k| k.iter().map(|t| t.map(f)).collect()).collect(),
        }
    }

    fn relation_size(&self) -> usize {
        self.cliques.len()
    }

    fn engine(&self) -> Result<PredimEngine> {
        PredimEngine::for_clique(self)
    }

    fn partial_embedding_ok(
        &self,
        target: &Self,
        fwd: &BTreeMap<Element, Element>,
        _inv: &BTreeMap<Element, Element>,
        newest: Element,
    ) -> bool {
        // Each fully mapped clique must land inside a clique of the target.
        for k in self.cliques.iter().filter(|k| k.iter().any(|t| t.0.contains(&newest))) {
            let img: Option<Clique> = k
                .iter()
                .map(|t| t.0.iter().map(|e| fwd.get(e).copied()).collect::<Option<Vec<_>>>().map(RTuple))
                .collect();
            if let Some(img) = img {
                if !target.cliques.iter().any(|big| img.is_subset(big)) {
                    return false;
                }
            }
        }
        true
    }

    fn profile(&self, e: Element) -> Vec<usize> {
        let mut sizes: Vec<usize> = self
            .cliques
            .iter()
            .filter(|k| k.iter().any(|t| t.0.contains(&e)))
            .map(|k| k.len())
            .collect();
        sizes.sort_unstable();
        sizes
    }
}

impl fmt::Display for NaryStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rel ", fmt_set(&self.universe))?;
        if self.relation.is_empty() {
            return f.write_str("-");
        }
        for t in &self.relation {
            f.write_str(&fmt_tuple(t))?;
        }
        Ok(())
    }
}

impl fmt::Display for CliqueStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} cliques", fmt_set(&self.universe))?;
        if self.cliques.is_empty() {
            return f.write_str(" -");
        }
        for k in &self.cliques {
            write!(f, " [{}]", fmt_clique(k))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// embeddings

/// An injective map on elements. It is an embedding of `source` into
/// `target` when the renamed source equals the substructure of `target`
/// induced on the image.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Embedding {
    pub map: BTreeMap<Element, Element>,
}

impl Embedding {
    pub fn new(map: BTreeMap<Element, Element>) -> Self {
        Embedding { map }
    }

    pub fn identity(set: &ElementSet) -> Self {
        Embedding { map: set.iter().map(|&e| (e, e)).collect() }
    }

    pub fn image(&self) -> ElementSet {
        self.map.values().copied().collect()
    }

    pub fn apply(&self, e: Element) -> Option<Element> {
        self.map.get(&e).copied()
    }

    pub fn is_injective(&self) -> bool {
        self.image().len() == self.map.len()
    }

    pub fn is_embedding<S: Structure>(&self, source: &S, target: &S) -> bool {
        let domain: ElementSet = self.map.keys().copied().collect();
        if &domain != source.universe() || !self.is_injective() {
            return false;
        }
        let image = self.image();
        if !image.is_subset(target.universe()) {
            return false;
        }
        match target.induced(&image) {
            Ok(t) => source.rename(&self.map) == t,
            Err(_) => false,
        }
    }

    pub fn fixes(&self, set: &ElementSet) -> bool {
        set.iter().all(|e| self.map.get(e) == Some(e))
    }
}

impl fmt::Display for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self.map.iter().map(|(a, b)| format!("{a}:{b}")).collect();
        f.write_str(&pairs.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, r: usize) -> ClassParams {
        ClassParams::new(n, r).unwrap()
    }

    #[test]
    fn params_bounds() {
        assert!(ClassParams::new(1, 0).is_err());
        assert!(ClassParams::new(3, 3).is_err());
        assert!(ClassParams::new(3, 0).is_err());
        let q = p(3, 2);
        assert_eq!(q.s(), 2);
        assert_eq!(q.rs_class().n(), 4);
        assert_eq!(p(3, 1).s(), 3);
    }

    #[test]
    fn validate_nary_examples() {
        let e = NaryStructure::empty(p(3, 1));
        assert!(e.validate().is_valid());
        let a = NaryStructure::new(p(3, 1), set_of([0, 1, 2]), [vec![Element(0), Element(1), Element(2)]].into());
        assert!(a.validate().is_valid());
        let bad = NaryStructure::new(p(3, 1), set_of([0, 1]), [vec![Element(0), Element(0), Element(1)]].into());
        let report = bad.validate();
        assert_eq!(report.violations(), &[Violation::RepeatedEntry { tuple: vec![Element(0), Element(0), Element(1)] }]);
        let outside = NaryStructure::new(p(3, 1), set_of([0, 1]), [vec![Element(0), Element(1), Element(5)]].into());
        assert!(matches!(outside.validate().violations(), [Violation::OutsideUniverse { element: Element(5), .. }]));
        let short = NaryStructure::new(p(3, 1), set_of([0, 1]), [vec![Element(0), Element(1)]].into());
        assert!(matches!(short.validate().violations(), [Violation::WrongArity { expected: 3, .. }]));
    }

    #[test]
    fn validate_clique_examples() {
        let q = p(2, 1); // r=1, s=2
        assert!(CliqueStructure::from_ids(q, &[0, 1], &[&[&[0], &[1]]]).is_ok());
        let bad = CliqueStructure::from_ids(q, &[0, 1, 2, 3], &[&[&[0], &[1], &[2]], &[&[1], &[2], &[3]]]);
        assert!(matches!(bad, Err(Error::InvalidStructure(_))));
        let raw = CliqueStructure::new(
            q,
            set_of([0, 1, 2, 3]),
            [
                [0u32, 1, 2].iter().map(|&i| RTuple::from_ids([i])).collect(),
                [1u32, 2, 3].iter().map(|&i| RTuple::from_ids([i])).collect(),
            ]
            .into(),
        );
        assert!(matches!(raw.validate().violations(), [Violation::LargeIntersection { shared: 2, .. }]));
        let q3 = p(3, 1); // s=3
        let small = CliqueStructure::new(q3, set_of([0, 1]), [[0u32, 1].iter().map(|&i| RTuple::from_ids([i])).collect()].into());
        assert!(matches!(small.validate().violations(), [Violation::CliqueTooSmall { min: 3, .. }]));
    }

    #[test]
    fn induced_nary_examples() {
        let q = p(3, 1);
        let a = NaryStructure::from_ids(q, &[0, 1, 2, 3], &[&[0, 1, 2]]).unwrap();
        assert_eq!(a.induced(a.universe()).unwrap(), a);
        assert!(a.induced(&set_of([0, 1, 3])).unwrap().relation().is_empty());
        let b = NaryStructure::from_ids(q, &[0, 1, 2, 3], &[&[0, 1, 2], &[1, 2, 3]]).unwrap();
        let sub = b.induced(&set_of([1, 2, 3])).unwrap();
        assert_eq!(sub.relation().iter().cloned().collect::<Vec<_>>(), vec![vec![Element(1), Element(2), Element(3)]]);
        assert!(matches!(b.induced(&set_of([7])), Err(Error::NotInUniverse(_))));
    }

    #[test]
    fn induced_clique_examples() {
        let q = p(2, 1);
        let a = CliqueStructure::from_ids(q, &[0, 1, 2], &[&[&[0], &[1], &[2]]]).unwrap();
        assert_eq!(a.induced(a.universe()).unwrap(), a);
        let two = a.induced(&set_of([0, 1])).unwrap();
        assert_eq!(two, CliqueStructure::from_ids(q, &[0, 1], &[&[&[0], &[1]]]).unwrap());
        assert!(a.induced(&set_of([0])).unwrap().cliques().is_empty());
    }

    #[test]
    fn extend_clique_examples() {
        let q = p(2, 1);
        let a = CliqueStructure::from_ids(q, &[0, 1, 2], &[&[&[0], &[1], &[2]]]).unwrap();
        let k: Clique = [RTuple::from_ids([0]), RTuple::from_ids([1])].into();
        let full = a.extend_clique(&set_of([0, 1]), &k).unwrap();
        assert_eq!(full.len(), 3);
        // already maximal
        let k3 = a.cliques().iter().next().unwrap().clone();
        assert_eq!(a.extend_clique(a.universe(), &k3).unwrap(), k3);
        // not a clique of the induced structure
        let single: Clique = [RTuple::from_ids([0])].into();
        assert!(a.extend_clique(&set_of([0, 1]), &single).is_err());
    }

    #[test]
    fn embedding_check() {
        let q = p(3, 1);
        let a = NaryStructure::from_ids(q, &[0, 1, 2], &[&[0, 1, 2]]).unwrap();
        let b = NaryStructure::from_ids(q, &[5, 6, 7, 8], &[&[6, 7, 5]]).unwrap();
        let good = Embedding::new([(0, 6), (1, 7), (2, 5)].iter().map(|&(x, y)| (Element(x), Element(y))).collect());
        assert!(good.is_embedding(&a, &b));
        let bad = Embedding::new([(0, 5), (1, 6), (2, 7)].iter().map(|&(x, y)| (Element(x), Element(y))).collect());
        assert!(!bad.is_embedding(&a, &b));
    }
}
