//! Naive reference implementations by full subset enumeration. They
//! evaluate pre-dimensions of induced substructures through the direct
//! formulas and share no code with the min-cut engine.

use crate::error::{Error, Result};
use crate::pregeometry::Pregeometry;
use crate::predim::{delta, lambda};
use crate::structures::{CliqueStructure, Element, ElementSet, NaryStructure, Structure};

/// Largest universe the oracles accept.
pub const MAX_ORACLE_SIZE: usize = 16;

/// Pre-dimension by the defining formula.
pub trait DirectPredim: Structure {
    fn direct_predim(&self) -> Result<i64>;
}

impl DirectPredim for NaryStructure {
    fn direct_predim(&self) -> Result<i64> {
        delta(self)
    }
}

impl DirectPredim for CliqueStructure {
    fn direct_predim(&self) -> Result<i64> {
        lambda(self)
    }
}

/// The universe in ascending order and the pre-dimension of every induced
/// substructure, indexed by mask.
pub fn predim_table<S: DirectPredim>(a: &S) -> Result<(Vec<Element>, Vec<i64>)> {
    if a.len() > MAX_ORACLE_SIZE {
        return Err(Error::TooLarge { what: "oracle universe", size: a.len(), limit: MAX_ORACLE_SIZE });
    }
    let ground: Vec<Element> = a.universe().iter().copied().collect();
    let mut table = Vec::with_capacity(1 << ground.len());
    for m in 0u32..(1 << ground.len()) {
        table.push(a.induced(&set_from_mask(&ground, m))?.direct_predim()?);
    }
    Ok((ground, table))
}

pub fn set_from_mask(ground: &[Element], m: u32) -> ElementSet {
    (0..ground.len()).filter(|&i| m & (1 << i) != 0).map(|i| ground[i]).collect()
}

pub fn mask_from_set(ground: &[Element], set: &ElementSet) -> Result<u32> {
    let mut m = 0;
    for e in set {
        let i = ground.binary_search(e).map_err(|_| Error::NotInUniverse(vec![*e]))?;
        m |= 1 << i;
    }
    Ok(m)
}

fn supersets(base: u32, full: u32) -> impl Iterator<Item = u32> {
    let rest = full & !base;
    let mut sub = Some(rest);
    std::iter::from_fn(move || {
        let cur = sub?;
        sub = if cur == 0 { None } else { Some((cur - 1) & rest) };
        Some(cur | base)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveStrong {
    pub strong: bool,
    /// Least value of predim(X) − predim(B) over supersets X of B.
    pub min_relative: i64,
    /// Intersection of all supersets attaining that value.
    pub least_minimiser: ElementSet,
    /// Union of all supersets attaining that value.
    pub greatest_minimiser: ElementSet,
}

/// The full pre-dimension table of one structure, for repeated queries.
#[derive(Clone, Debug)]
pub struct Oracle {
    pub ground: Vec<Element>,
    pub table: Vec<i64>,
}

impl Oracle {
    pub fn new<S: DirectPredim>(a: &S) -> Result<Self> {
        let (ground, table) = predim_table(a)?;
        Ok(Oracle { ground, table })
    }

    fn full(&self) -> u32 {
        ((1u64 << self.ground.len()) - 1) as u32
    }

    /// Scan every superset of `b`.
    pub fn strong(&self, b: &ElementSet) -> Result<NaiveStrong> {
        let bm = mask_from_set(&self.ground, b)?;
        let full = self.full();
        let min = supersets(bm, full).map(|x| self.table[x as usize]).min().expect("B itself");
        let (mut least, mut greatest) = (full, 0u32);
        for x in supersets(bm, full).filter(|&x| self.table[x as usize] == min) {
            least &= x;
            greatest |= x;
        }
        Ok(NaiveStrong {
            strong: min >= self.table[bm as usize],
            min_relative: min - self.table[bm as usize],
            least_minimiser: set_from_mask(&self.ground, least),
            greatest_minimiser: set_from_mask(&self.ground, greatest),
        })
    }

    /// The closure as a union: every X with predim(X) − predim(X ∩ B) ≤ 0.
    pub fn union_closure(&self, b: &ElementSet) -> Result<ElementSet> {
        let bm = mask_from_set(&self.ground, b)?;
        let mut union = bm;
        for x in 0..=self.full() {
            if self.table[x as usize] - self.table[(x & bm) as usize] <= 0 {
                union |= x;
            }
        }
        Ok(set_from_mask(&self.ground, union))
    }

    /// d(B) = min predim over supersets, with its greatest minimiser.
    pub fn d_closure(&self, b: &ElementSet) -> Result<(i64, ElementSet)> {
        let n = self.strong(b)?;
        let bm = mask_from_set(&self.ground, b)?;
        Ok((self.table[bm as usize] + n.min_relative, n.greatest_minimiser))
    }

    /// min { |X| : X ⊆ B, cl(X) = cl(B) } with cl the d-closure.
    pub fn dims(&self, b: &ElementSet) -> Result<usize> {
        let target = self.d_closure(b)?.1;
        let elems: Vec<Element> = b.iter().copied().collect();
        let mut best = elems.len();
        for m in 0u32..(1 << elems.len()) {
            if (m.count_ones() as usize) < best && self.d_closure(&set_from_mask(&elems, m))?.1 == target {
                best = m.count_ones() as usize;
            }
        }
        Ok(best)
    }
}

pub fn naive_strong<S: DirectPredim>(b: &ElementSet, a: &S) -> Result<NaiveStrong> {
    Oracle::new(a)?.strong(b)
}

pub fn union_closure<S: DirectPredim>(a: &S, b: &ElementSet) -> Result<ElementSet> {
    Oracle::new(a)?.union_closure(b)
}

pub fn d_closure<S: DirectPredim>(a: &S, b: &ElementSet) -> Result<(i64, ElementSet)> {
    Oracle::new(a)?.d_closure(b)
}

pub fn dims_by_definition<S: DirectPredim>(a: &S, b: &ElementSet) -> Result<usize> {
    Oracle::new(a)?.dims(b)
}

/// Pairs (A, B) of subsets violating f(A∪B) + f(A∩B) ≤ f(A) + f(B).
pub fn submodularity_violations(table: &[i64]) -> usize {
    let len = table.len() as u32;
    let mut count = 0;
    for a in 0..len {
        for b in a..len {
            if table[(a | b) as usize] + table[(a & b) as usize] > table[a as usize] + table[b as usize] {
                count += 1;
            }
        }
    }
    count
}

/// Triples (A, B, C) with A ⊆ B ⊆ C ⊆ universe, A ≤ B and B ≤ C, but not A ≤ C.
/// Strongness of X in Y is read off the table: no Z with X ⊆ Z ⊆ Y is
/// smaller than X.
pub fn transitivity_violations(table: &[i64]) -> usize {
    let n = table.len().trailing_zeros() as usize;
    // strong[x][y] for x ⊆ y, stored densely
    let mut strong = vec![false; 1usize << (2 * n)];
    let at = |x: u32, y: u32| ((y as usize) << n) | x as usize;
    for y in 0u32..(1 << n) {
        for x in subsets(y) {
            strong[at(x, y)] = supersets(x, y).all(|z| table[z as usize] >= table[x as usize]);
        }
    }
    let mut count = 0;
    for c in 0u32..(1 << n) {
        for b in subsets(c) {
            if !strong[at(b, c)] {
                continue;
            }
            for a in subsets(b) {
                if strong[at(a, b)] && !strong[at(a, c)] {
                    count += 1;
                }
            }
        }
    }
    count
}

fn subsets(m: u32) -> impl Iterator<Item = u32> {
    let mut sub = Some(m);
    std::iter::from_fn(move || {
        let cur = sub?;
        sub = if cur == 0 { None } else { Some((cur - 1) & m) };
        Some(cur)
    })
}

/// Violations of the matroid rank axioms and of the closure axioms
/// (extensive, monotone, idempotent, exchange) of a pregeometry, checked on
/// every subset. Returns human-readable descriptions.
pub fn pregeometry_violations(pg: &Pregeometry) -> Vec<String> {
    let n = pg.len();
    let mut out = Vec::new();
    let rank = |m: u32| pg.rank_mask(m as u128) as i64;
    let cl = |m: u32| pg.closure_mask(m as u128) as u32;
    if rank(0) != 0 {
        out.push("rank of the empty set is not 0".into());
    }
    for x in 0u32..(1 << n) {
        let cx = cl(x);
        if cx & x != x {
            out.push(format!("closure of {x:#b} does not contain it"));
        }
        if cl(cx) != cx {
            out.push(format!("closure of {x:#b} is not idempotent"));
        }
        for a in 0..n {
            let xa = x | (1 << a);
            if xa == x {
                continue;
            }
            if rank(xa) < rank(x) || rank(xa) > rank(x) + 1 {
                out.push(format!("rank step from {x:#b} by {a} out of range"));
            }
            if cl(xa) & cx != cx {
                out.push(format!("closure not monotone from {x:#b} by {a}"));
            }
            for b in a + 1..n {
                let xb = x | (1 << b);
                if xb == x {
                    continue;
                }
                if rank(xa) + rank(xb) < rank(xa | xb) + rank(x) {
                    out.push(format!("rank not submodular at {x:#b} with {a},{b}"));
                }
                // exchange, in both directions
                for (p, q) in [(a, b), (b, a)] {
                    let in_p = cl(x | (1 << q)) & (1 << p) != 0 && cx & (1 << p) == 0;
                    if in_p && cl(x | (1 << p)) & (1 << q) == 0 {
                        out.push(format!("exchange fails at {x:#b} with {p},{q}"));
                    }
                }
            }
        }
    }
    out
}
