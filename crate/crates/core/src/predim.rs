//! Pre-dimension functions, relative pre-dimension and self-sufficiency.
//!
//! Both pre-dimensions share one shape. Over a finite universe, with the
//! relation split into groups of element sets,
//!
//! ```text
//! f(X) = |X| - sum over groups g of max(0, #{members of g inside X} - slack(g))
//! ```
//!
//! For an n-ary structure every tuple is its own group with slack 0, which
//! gives `|X| - |R^X|`. For a clique structure every maximal clique is a group
//! of r-tuples with slack `s - 1`, which gives `|X| - t(X)`.
//!
//! Minimising `f` over `B ⊆ X ⊆ U` is a project-selection problem: elements
//! cost 1, a group costs its slack to "open", and each member earns 1 once its
//! group is open and all its elements are selected. A single max-flow yields
//! the minimum together with the least and greatest minimisers.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::flow::{FlowNetwork, INF};
use crate::structures::{CliqueStructure, Element, ElementSet, NaryStructure, Structure};

/// Bit set over the positions of a universe in ascending element order.
pub type Mask = u128;

/// Largest universe the engine accepts.
pub const MAX_ELEMENTS: usize = 128;

/// `max(0, size - (s - 1))`.
pub fn cardstar(size: usize, s: usize) -> i64 {
    (size as i64 - (s as i64 - 1)).max(0)
}

pub fn bit(i: usize) -> Mask {
    1 << i
}

pub fn popcount(m: Mask) -> usize {
    m.count_ones() as usize
}

#[derive(Clone, Debug)]
struct Group {
    slack: i64,
    members: Vec<Mask>,
}

/// Evaluator for the pre-dimension of every induced substructure of one
/// fixed structure.
#[derive(Clone, Debug)]
pub struct PredimEngine {
    elements: Vec<Element>,
    index: BTreeMap<Element, usize>,
    groups: Vec<Group>,
}

/// Result of minimising the pre-dimension over an interval of sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Minimum {
    pub value: i64,
    /// Inclusion-least minimiser.
    pub least: Mask,
    /// Inclusion-greatest minimiser.
    pub greatest: Mask,
}

impl PredimEngine {
    fn with_universe(universe: &ElementSet) -> Result<Self> {
        if universe.len() > MAX_ELEMENTS {
            return Err(Error::TooLarge { what: "universe", size: universe.len(), limit: MAX_ELEMENTS });
        }
        let elements: Vec<Element> = universe.iter().copied().collect();
        let index = elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        Ok(PredimEngine { elements, index, groups: Vec::new() })
    }

    fn mask_of_tuple(&self, t: &[Element]) -> Mask {
        t.iter().fold(0, |m, e| m | bit(self.index[e]))
    }

    pub fn for_nary(a: &NaryStructure) -> Result<Self> {
        a.ensure_valid()?;
        let mut eng = Self::with_universe(a.universe())?;
        eng.groups = a
            .relation()
            .iter()
            .map(|t| Group { slack: 0, members: vec![eng.mask_of_tuple(t)] })
            .collect();
        Ok(eng)
    }

    pub fn for_clique(a: &CliqueStructure) -> Result<Self> {
        a.ensure_valid()?;
        let mut eng = Self::with_universe(a.universe())?;
        let slack = a.params().s() as i64 - 1;
        eng.groups = a
            .cliques()
            .iter()
            .map(|k| Group { slack, members: k.iter().map(|t| eng.mask_of_tuple(&t.0)).collect() })
            .collect();
        Ok(eng)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn full(&self) -> Mask {
        if self.elements.len() == 128 {
            Mask::MAX
        } else {
            bit(self.elements.len()) - 1
        }
    }

    pub fn position(&self, e: Element) -> Option<usize> {
        self.index.get(&e).copied()
    }

    pub fn mask(&self, set: &ElementSet) -> Result<Mask> {
        let mut m = 0;
        let mut missing = Vec::new();
        for e in set {
            match self.index.get(e) {
                Some(&i) => m |= bit(i),
                None => missing.push(*e),
            }
        }
        if missing.is_empty() {
            Ok(m)
        } else {
            Err(Error::NotInUniverse(missing))
        }
    }

    pub fn set(&self, mask: Mask) -> ElementSet {
        self.elements
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & bit(*i) != 0)
            .map(|(_, &e)| e)
            .collect()
    }

    /// Pre-dimension of the substructure induced on `mask`.
    pub fn value(&self, mask: Mask) -> i64 {
        let mut v = popcount(mask) as i64;
        for g in &self.groups {
            let inside = g.members.iter().filter(|&&m| m & mask == m).count() as i64;
            v -= (inside - g.slack).max(0);
        }
        v
    }

    /// `f(x ∪ over) - f(over)`.
    pub fn relative(&self, x: Mask, over: Mask) -> i64 {
        self.value(x | over) - self.value(over)
    }

    /// Minimise the pre-dimension over all `X` with `include ⊆ X ⊆ allowed`.
    pub fn minimize(&self, include: Mask, allowed: Mask) -> Minimum {
        let allowed = allowed | include;
        let m = self.elements.len();
        let (source, sink) = (0, 1);
        let mut net = FlowNetwork::new(2 + m);
        let elem = |i: usize| 2 + i;
        for i in 0..m {
            if allowed & bit(i) == 0 {
                continue;
            }
            net.add_edge(elem(i), sink, 1);
            if include & bit(i) != 0 {
                net.add_edge(source, elem(i), INF);
            }
        }
        let mut profit = 0;
        for g in &self.groups {
            let usable: Vec<Mask> = g.members.iter().copied().filter(|&mm| mm & allowed == mm).collect();
            if (usable.len() as i64) <= g.slack {
                continue;
            }
            let gate = if g.slack > 0 {
                let node = net.add_node();
                net.add_edge(node, sink, g.slack);
                Some(node)
            } else {
                None
            };
            for mm in usable {
                let node = net.add_node();
                net.add_edge(source, node, 1);
                profit += 1;
                if let Some(gate) = gate {
                    net.add_edge(node, gate, INF);
                }
                for i in 0..m {
                    if mm & bit(i) != 0 {
                        net.add_edge(node, elem(i), INF);
                    }
                }
            }
        }
        let cut = net.max_flow(source, sink);
        let collect = |side: Vec<bool>| -> Mask {
            (0..m).filter(|&i| side[elem(i)]).fold(0, |acc, i| acc | bit(i))
        };
        let least = collect(net.least_source_side(source)) | include;
        let greatest = collect(net.greatest_source_side(sink)) | include;
        let value = cut - profit;
        debug_assert_eq!(self.value(least), value);
        debug_assert_eq!(self.value(greatest), value);
        Minimum { value, least, greatest }
    }

    /// `B ≤ A` for the set `b`.
    pub fn is_strong_mask(&self, b: Mask) -> bool {
        self.minimize(b, self.full()).value >= self.value(b)
    }

    /// Self-sufficient closure of `b`: the least strong superset.
    pub fn hull(&self, b: Mask) -> Mask {
        self.minimize(b, self.full()).least
    }
}

/// `|A| - |R^A|`.
pub fn delta(a: &NaryStructure) -> Result<i64> {
    a.ensure_valid()?;
    Ok(a.universe().len() as i64 - a.relation().len() as i64)
}

/// `|A| - Σ_K max(0, |K| - (s-1))` over maximal cliques; requires the
/// clique structure to satisfy the intersection bound.
pub fn lambda(a: &CliqueStructure) -> Result<i64> {
    a.ensure_valid()?;
    let s = a.params().s();
    let t: i64 = a.cliques().iter().map(|k| cardstar(k.len(), s)).sum();
    Ok(a.universe().len() as i64 - t)
}

/// Pre-dimension of either kind.
pub fn predim<S: Structure>(a: &S) -> Result<i64> {
    let eng = a.engine()?;
    Ok(eng.value(eng.full()))
}

/// `predim(X ∪ B) - predim(B)` computed inside `d`.
pub fn predim_rel<S: Structure>(x: &ElementSet, over: &ElementSet, d: &S) -> Result<i64> {
    let eng = d.engine()?;
    Ok(eng.relative(eng.mask(x)?, eng.mask(over)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongWitness {
    /// A superset of the base with negative relative pre-dimension.
    pub set: ElementSet,
    pub relative: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongReport {
    pub strong: bool,
    pub witness: Option<StrongWitness>,
}

/// Decide `B ≤ A`. When B is not strong the witness is the inclusion-least
/// set among those with the most negative relative pre-dimension.
pub fn is_strong<S: Structure>(b: &ElementSet, a: &S) -> Result<StrongReport> {
    let eng = a.engine()?;
    let bm = eng.mask(b)?;
    let min = eng.minimize(bm, eng.full());
    let base = eng.value(bm);
    if min.value >= base {
        Ok(StrongReport { strong: true, witness: None })
    } else {
        Ok(StrongReport {
            strong: false,
            witness: Some(StrongWitness { set: eng.set(min.least), relative: min.value - base }),
        })
    }
}

/// Membership in the amalgamation class: `∅ ≤ A`.
pub fn in_class<S: Structure>(a: &S) -> Result<bool> {
    let eng = a.engine()?;
    Ok(eng.minimize(0, eng.full()).value >= 0)
}
