//! Seeded random structures for property tests and experiment drivers.
//!
//! Structures in the class are built by proposing random relation items and
//! keeping those that leave the structure in the class.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::enumerate::Enumerable;
use crate::predim::Mask;
use crate::structures::{ClassParams, Clique, CliqueStructure, Element, ElementSet, NaryStructure, RTuple, Structure};

fn distinct<R: Rng>(pool: &[Element], len: usize, rng: &mut R) -> Option<Vec<Element>> {
    if pool.len() < len {
        return None;
    }
    Some(pool.choose_multiple(rng, len).copied().collect())
}

/// Proposes `attempts` random tuples on `universe`, keeping each one that is
/// new and (when `class_only`) keeps the structure in the class.
pub fn add_random_tuples<R: Rng>(
    a: &NaryStructure,
    pool: &[Element],
    attempts: usize,
    class_only: bool,
    rng: &mut R,
) -> NaryStructure {
    let mut out = a.clone();
    for _ in 0..attempts {
        let Some(t) = distinct(pool, a.arity(), rng) else { break };
        if class_only {
            if let Some(next) = grow_nary(&out, &t) {
                out = next;
            }
        } else if !out.contains_tuple(&t) {
            out = out.extended([], [t]);
        }
    }
    out
}

// the enumeration helpers work on masks of ids below 32; fall back to a
// direct class check otherwise
fn grow_nary(a: &NaryStructure, t: &[Element]) -> Option<NaryStructure> {
    if a.universe().iter().all(|e| e.0 < 32) {
        return a.with_item(&t.to_vec(), true);
    }
    if a.contains_tuple(t) {
        return None;
    }
    let next = a.extended([], [t.to_vec()]);
    crate::in_class(&next).ok().filter(|&ok| ok).map(|_| next)
}

/// A random structure in the class on `0..size`.
pub fn random_nary<R: Rng>(params: ClassParams, size: usize, attempts: usize, rng: &mut R) -> NaryStructure {
    let universe: ElementSet = (0..size as u32).map(Element).collect();
    let pool: Vec<Element> = universe.iter().copied().collect();
    add_random_tuples(&NaryStructure::new(params, universe, Default::default()), &pool, attempts, true, rng)
}

/// A random valid structure on `0..size`, not necessarily in the class.
pub fn random_nary_any<R: Rng>(params: ClassParams, size: usize, tuples: usize, rng: &mut R) -> NaryStructure {
    let universe: ElementSet = (0..size as u32).map(Element).collect();
    let pool: Vec<Element> = universe.iter().copied().collect();
    add_random_tuples(&NaryStructure::new(params, universe, Default::default()), &pool, tuples, false, rng)
}

/// A random clique of s to s+2 distinct r-tuples over `pool`, with at least
/// one tuple meeting `must_meet` when that is non-empty.
pub fn random_clique<R: Rng>(params: ClassParams, pool: &[Element], must_meet: &ElementSet, rng: &mut R) -> Option<Clique> {
    let (r, s) = (params.r(), params.s());
    let size = rng.gen_range(s..=s + 2);
    let mut k = Clique::new();
    for _ in 0..4 * size {
        if k.len() == size {
            break;
        }
        k.insert(RTuple(distinct(pool, r, rng)?));
    }
    if k.len() < s {
        return None;
    }
    if !must_meet.is_empty() && !k.iter().any(|t| t.0.iter().any(|e| must_meet.contains(e))) {
        return None;
    }
    Some(k)
}

/// Proposes `attempts` random cliques, keeping each one that leaves the
/// structure valid and in the class.
pub fn add_random_cliques<R: Rng>(
    a: &CliqueStructure,
    pool: &[Element],
    must_meet: &ElementSet,
    attempts: usize,
    rng: &mut R,
) -> CliqueStructure {
    let mut out = a.clone();
    for _ in 0..attempts {
        let Some(k) = random_clique(a.params(), pool, must_meet, rng) else { continue };
        if let Some(next) = grow_clique(&out, &k) {
            out = next;
        }
    }
    out
}

fn grow_clique(a: &CliqueStructure, k: &Clique) -> Option<CliqueStructure> {
    if a.universe().iter().all(|e| e.0 < 32) {
        return a.with_item(k, true);
    }
    let next = a.extended([], [k.clone()]);
    (next.validate().is_valid() && crate::in_class(&next).unwrap_or(false)).then_some(next)
}

/// A random clique structure in the class on `0..size`.
pub fn random_clique_structure<R: Rng>(params: ClassParams, size: usize, attempts: usize, rng: &mut R) -> CliqueStructure {
    let universe: ElementSet = (0..size as u32).map(Element).collect();
    let pool: Vec<Element> = universe.iter().copied().collect();
    add_random_cliques(&CliqueStructure::new(params, universe, Default::default()), &pool, &ElementSet::new(), attempts, rng)
}

/// Each element of `universe` independently with probability 1/2.
pub fn random_subset<R: Rng>(universe: &ElementSet, rng: &mut R) -> ElementSet {
    universe.iter().filter(|_| rng.gen_bool(0.5)).copied().collect()
}

/// The least strong superset of a random subset.
pub fn random_strong_subset<S: Structure, R: Rng>(a: &S, rng: &mut R) -> ElementSet {
    let engine = a.engine().expect("small structure");
    let b = random_subset(a.universe(), rng);
    let m: Mask = engine.mask(&b).expect("subset");
    engine.set(engine.hull(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predim::{in_class, is_strong};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_structures_are_in_class() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for size in 0..9 {
            let a = random_nary(ClassParams::new(3, 1).unwrap(), size, 20, &mut rng);
            assert!(a.validate().is_valid() && in_class(&a).unwrap());
            let c = random_clique_structure(ClassParams::new(3, 2).unwrap(), size, 6, &mut rng);
            assert!(c.validate().is_valid() && in_class(&c).unwrap());
            let b = random_strong_subset(&c, &mut rng);
            assert!(is_strong(&b, &c).unwrap().strong);
        }
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let p = ClassParams::new(2, 1).unwrap();
        let a = random_nary(p, 8, 10, &mut ChaCha8Rng::seed_from_u64(3));
        let b = random_nary(p, 8, 10, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
    }
}
