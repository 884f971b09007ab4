//! Closure, dimension and the pregeometry induced by a pre-dimension.
//!
//! For a structure A with `∅ ≤ A`, write `d(B) = min { predim(X) : B ⊆ X ⊆ A }`.
//! Then `d` is the rank function of the pregeometry, and `cl(B)` is the
//! inclusion-greatest X attaining that minimum.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::predim::{bit, Mask, PredimEngine};
use crate::structures::{Element, ElementSet, Structure};

/// Ground sets up to this size get a full rank table at construction.
pub const TABLE_LIMIT: usize = 16;

/// Default cap on the ground-set size for [`pregeometry_of`].
pub const DEFAULT_MAX_GROUND: usize = 18;

fn class_engine<S: Structure>(a: &S) -> Result<PredimEngine> {
    let eng = a.engine()?;
    let min = eng.minimize(0, eng.full());
    if min.value < 0 {
        return Err(Error::Precondition(format!(
            "structure is not in its class (a subset has pre-dimension {})",
            min.value
        )));
    }
    Ok(eng)
}

/// `cl_A(B)`.
pub fn closure<S: Structure>(a: &S, b: &ElementSet) -> Result<ElementSet> {
    let eng = class_engine(a)?;
    let bm = eng.mask(b)?;
    Ok(eng.set(eng.minimize(bm, eng.full()).greatest))
}

/// Dimension of B: the least size of a subset with the same closure, which
/// equals `d(B)`.
pub fn dims<S: Structure>(a: &S, b: &ElementSet) -> Result<usize> {
    let eng = class_engine(a)?;
    let bm = eng.mask(b)?;
    Ok(eng.minimize(bm, eng.full()).value as usize)
}

/// A pregeometry on a finite ground set, given by its rank function.
pub struct Pregeometry {
    ground: Vec<Element>,
    ranks: Ranks,
}

enum Ranks {
    Table(Vec<u32>),
    Lazy { engine: PredimEngine, memo: Mutex<HashMap<Mask, u32>> },
}

impl Clone for Pregeometry {
    fn clone(&self) -> Self {
        let ranks = match &self.ranks {
            Ranks::Table(t) => Ranks::Table(t.clone()),
            Ranks::Lazy { engine, memo } => Ranks::Lazy {
                engine: engine.clone(),
                memo: Mutex::new(memo.lock().expect("rank memo poisoned").clone()),
            },
        };
        Pregeometry { ground: self.ground.clone(), ranks }
    }
}

impl std::fmt::Debug for Pregeometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Pregeometry").field("ground", &self.ground).finish_non_exhaustive()
    }
}

/// Minimum over supersets, in place, for a table indexed by masks of `n` bits.
pub(crate) fn superset_min(values: &mut [i64], n: usize) {
    for i in 0..n {
        let b = 1usize << i;
        for m in 0..values.len() {
            if m & b == 0 && values[m | b] < values[m] {
                values[m] = values[m | b];
            }
        }
    }
}

impl Pregeometry {
    /// Wrap an explicit rank table indexed by masks over `ground` (ascending).
    pub fn from_rank_table(ground: Vec<Element>, ranks: Vec<u32>) -> Result<Self> {
        if ground.len() > 24 || ranks.len() != 1usize << ground.len() {
            return Err(Error::Precondition("rank table size does not match the ground set".into()));
        }
        Ok(Pregeometry { ground, ranks: Ranks::Table(ranks) })
    }

    pub fn ground(&self) -> &[Element] {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    pub fn full(&self) -> Mask {
        if self.ground.is_empty() {
            0
        } else {
            Mask::MAX >> (128 - self.ground.len())
        }
    }

    pub fn mask(&self, set: &ElementSet) -> Result<Mask> {
        let mut m = 0;
        let mut missing = Vec::new();
        for e in set {
            match self.ground.binary_search(e) {
                Ok(i) => m |= bit(i),
                Err(_) => missing.push(*e),
            }
        }
        if missing.is_empty() {
            Ok(m)
        } else {
            Err(Error::NotInUniverse(missing))
        }
    }

    pub fn set(&self, mask: Mask) -> ElementSet {
        (0..self.ground.len()).filter(|&i| mask & bit(i) != 0).map(|i| self.ground[i]).collect()
    }

    pub fn rank_mask(&self, mask: Mask) -> u32 {
        match &self.ranks {
            Ranks::Table(t) => t[mask as usize],
            Ranks::Lazy { engine, memo } => {
                if let Some(&r) = memo.lock().expect("rank memo poisoned").get(&mask) {
                    return r;
                }
                let r = engine.minimize(mask, engine.full()).value as u32;
                memo.lock().expect("rank memo poisoned").insert(mask, r);
                r
            }
        }
    }

    pub fn rank(&self, set: &ElementSet) -> Result<u32> {
        Ok(self.rank_mask(self.mask(set)?))
    }

    pub fn closure_mask(&self, mask: Mask) -> Mask {
        let r = self.rank_mask(mask);
        (0..self.ground.len())
            .filter(|&i| mask & bit(i) != 0 || self.rank_mask(mask | bit(i)) == r)
            .fold(0, |acc, i| acc | bit(i))
    }

    pub fn closure(&self, set: &ElementSet) -> Result<ElementSet> {
        Ok(self.set(self.closure_mask(self.mask(set)?)))
    }

    /// Every rank, indexed by mask. Only sensible for small ground sets.
    pub fn rank_table(&self) -> Vec<u32> {
        match &self.ranks {
            Ranks::Table(t) => t.clone(),
            Ranks::Lazy { .. } => (0..1u128 << self.ground.len()).map(|m| self.rank_mask(m)).collect(),
        }
    }

    /// Rank table re-indexed by element sets, for comparing pregeometries on
    /// the same ground set.
    pub fn same_as(&self, other: &Pregeometry) -> bool {
        self.ground == other.ground && self.rank_table() == other.rank_table()
    }

    /// Is `mask` a flat (closed set)?
    pub fn is_closed(&self, mask: Mask) -> bool {
        self.closure_mask(mask) == mask
    }

    fn signature(&self, i: usize) -> Vec<u32> {
        // counts of (subset size, rank) over subsets of size <= 3 containing i
        let n = self.ground.len();
        let mut sig = vec![0u32; 16];
        sig[self.rank_mask(bit(i)) as usize] += 1;
        for j in 0..n {
            if j == i {
                continue;
            }
            let two = bit(i) | bit(j);
            sig[4 + self.rank_mask(two) as usize] += 1;
            for k in j + 1..n {
                if k == i {
                    continue;
                }
                sig[8 + self.rank_mask(two | bit(k)) as usize] += 1;
            }
        }
        sig
    }
}

/// Largest ground set for which [`rank_table`] builds a full table.
pub const MAX_TABLE_GROUND: usize = 24;

/// The full rank table of a structure in its class, indexed by masks over
/// its universe in ascending order. Intended for exact comparisons of
/// pregeometries on a shared universe.
pub fn rank_table<S: Structure>(a: &S) -> Result<Vec<u32>> {
    if a.len() > MAX_TABLE_GROUND {
        return Err(Error::TooLarge { what: "rank table ground set", size: a.len(), limit: MAX_TABLE_GROUND });
    }
    let engine = class_engine(a)?;
    let n = engine.len();
    let mut values: Vec<i64> = (0..1u128 << n).map(|m| engine.value(m)).collect();
    superset_min(&mut values, n);
    Ok(values.into_iter().map(|v| v as u32).collect())
}

/// Pregeometry of a structure in its class, with the default ground cap.
pub fn pregeometry_of<S: Structure>(a: &S) -> Result<Pregeometry> {
    pregeometry_of_bounded(a, DEFAULT_MAX_GROUND)
}

pub fn pregeometry_of_bounded<S: Structure>(a: &S, max_ground: usize) -> Result<Pregeometry> {
    if a.len() > max_ground {
        return Err(Error::TooLarge { what: "pregeometry ground set", size: a.len(), limit: max_ground });
    }
    let engine = class_engine(a)?;
    let ground = engine.elements().to_vec();
    if ground.len() <= TABLE_LIMIT {
        Ok(Pregeometry { ground, ranks: Ranks::Table(rank_table(a)?) })
    } else {
        Ok(Pregeometry { ground, ranks: Ranks::Lazy { engine, memo: Mutex::new(HashMap::new()) } })
    }
}

/// A bijection of ground sets preserving the rank of every subset, if any.
/// Among all such bijections the lexicographically least (images listed in
/// ascending order of the source elements) is returned.
pub fn pg_isomorphic(p: &Pregeometry, q: &Pregeometry) -> Option<BTreeMap<Element, Element>> {
    let n = p.len();
    if n != q.len() {
        return None;
    }
    if p.rank_mask(p.full()) != q.rank_mask(q.full()) {
        return None;
    }
    let sp: Vec<Vec<u32>> = (0..n).map(|i| p.signature(i)).collect();
    let sq: Vec<Vec<u32>> = (0..n).map(|i| q.signature(i)).collect();
    let mut image = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn consistent(p: &Pregeometry, q: &Pregeometry, image: &[usize], i: usize) -> bool {
        // every subset of {0..i} containing i
        for low in 0..(1u64 << i) {
            let mut pm: Mask = bit(i);
            let mut qm: Mask = bit(image[i]);
            let mut rest = low;
            while rest != 0 {
                let j = rest.trailing_zeros() as usize;
                pm |= bit(j);
                qm |= bit(image[j]);
                rest &= rest - 1;
            }
            if p.rank_mask(pm) != q.rank_mask(qm) {
                return false;
            }
        }
        true
    }

    fn go(
        p: &Pregeometry,
        q: &Pregeometry,
        sp: &[Vec<u32>],
        sq: &[Vec<u32>],
        image: &mut Vec<usize>,
        used: &mut Vec<bool>,
        i: usize,
    ) -> bool {
        if i == image.len() {
            return true;
        }
        for c in 0..image.len() {
            if used[c] || sp[i] != sq[c] {
                continue;
            }
            image[i] = c;
            if consistent(p, q, image, i) {
                used[c] = true;
                if go(p, q, sp, sq, image, used, i + 1) {
                    return true;
                }
                used[c] = false;
            }
        }
        image[i] = usize::MAX;
        false
    }

    if go(p, q, &sp, &sq, &mut image, &mut used, 0) {
        Some((0..n).map(|i| (p.ground[i], q.ground[image[i]])).collect())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{set_of, ClassParams, CliqueStructure, NaryStructure};

    fn p(n: usize, r: usize) -> ClassParams {
        ClassParams::new(n, r).unwrap()
    }

    #[test]
    fn closure_examples() {
        let clq = CliqueStructure::from_ids(p(2, 1), &[0, 1, 2], &[&[&[0], &[1], &[2]]]).unwrap();
        assert_eq!(closure(&clq, &set_of([0])).unwrap(), set_of([0, 1, 2]));
        assert_eq!(closure(&clq, clq.universe()).unwrap(), *clq.universe());
        assert_eq!(closure(&clq, &set_of([])).unwrap(), set_of([]));
        let free = NaryStructure::from_ids(p(3, 1), &[0, 1, 2, 3], &[]).unwrap();
        for b in [set_of([]), set_of([1]), set_of([0, 3])] {
            assert_eq!(closure(&free, &b).unwrap(), b);
        }
    }

    #[test]
    fn dims_examples() {
        let clq = CliqueStructure::from_ids(p(2, 1), &[0, 1, 2], &[&[&[0], &[1], &[2]]]).unwrap();
        assert_eq!(dims(&clq, &set_of([])).unwrap(), 0);
        assert_eq!(dims(&clq, &set_of([0, 1, 2])).unwrap(), 1);
        let free = NaryStructure::from_ids(p(3, 1), &[0, 1, 2, 3], &[]).unwrap();
        assert_eq!(dims(&free, &set_of([0, 2, 3])).unwrap(), 3);
    }

    #[test]
    fn out_of_class_rejected() {
        let bad = NaryStructure::from_ids(p(3, 1), &[0, 1, 2], &[&[0, 1, 2], &[0, 2, 1], &[1, 0, 2], &[2, 1, 0]]).unwrap();
        assert!(matches!(closure(&bad, &set_of([0])), Err(Error::Precondition(_))));
        assert!(pregeometry_of(&bad).is_err());
    }

    #[test]
    fn free_pregeometry() {
        let free = NaryStructure::from_ids(p(3, 1), &[0, 1, 2, 3], &[]).unwrap();
        let pg = pregeometry_of(&free).unwrap();
        for m in 0..16u128 {
            assert_eq!(pg.rank_mask(m), m.count_ones());
        }
        let empty = pregeometry_of(&NaryStructure::empty(p(3, 1))).unwrap();
        assert_eq!(empty.rank_table(), vec![0]);
        // lexicographic bijection for free pregeometries
        let iso = pg_isomorphic(&pg, &pg).unwrap();
        assert!(iso.iter().all(|(a, b)| a == b));
    }

    #[test]
    fn lazy_matches_table() {
        let a = NaryStructure::from_ids(
            p(3, 1),
            &(0..17).collect::<Vec<_>>(),
            &[&[0, 1, 2], &[0, 1, 3], &[0, 1, 4], &[5, 6, 7], &[8, 9, 10], &[8, 10, 9]],
        )
        .unwrap();
        let lazy = pregeometry_of(&a).unwrap();
        assert!(matches!(lazy.ranks, Ranks::Lazy { .. }));
        let eng = a.engine().unwrap();
        for m in [0u128, 0b111, 0b11100, 1 << 16 | 0b1, 0x1ffff] {
            assert_eq!(lazy.rank_mask(m) as i64, eng.minimize(m, eng.full()).value);
        }
        assert!(matches!(pregeometry_of_bounded(&a, 16), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn relabelled_copy_is_isomorphic() {
        let a = NaryStructure::from_ids(p(3, 1), &[0, 1, 2, 3, 4], &[&[0, 1, 2], &[0, 1, 3], &[0, 1, 4]]).unwrap();
        let map: BTreeMap<Element, Element> = [(0, 14), (1, 13), (2, 12), (3, 11), (4, 10)]
            .iter()
            .map(|&(x, y)| (Element(x), Element(y)))
            .collect();
        let b = a.rename(&map);
        let pa = pregeometry_of(&a).unwrap();
        let pb = pregeometry_of(&b).unwrap();
        let iso = pg_isomorphic(&pa, &pb).unwrap();
        // verify rank preservation rather than the exact map: 0 and 1 are interchangeable
        for m in 0..32u128 {
            let img: ElementSet = pa.set(m).iter().map(|e| iso[e]).collect();
            assert_eq!(pa.rank_mask(m), pb.rank(&img).unwrap());
        }
        let free = pregeometry_of(&NaryStructure::from_ids(p(3, 1), &[0, 1, 2, 3, 4], &[]).unwrap()).unwrap();
        assert!(pg_isomorphic(&pa, &free).is_none());
    }
}
