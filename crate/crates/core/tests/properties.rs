use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pregeom::amalgam::{free_amalgam, fresh_ids, standard_amalgam};
use pregeom::format::{parse, AnyStructure};
use pregeom::gadget::GadgetRecord;
use pregeom::oracle::{naive_strong, predim_table, pregeometry_violations, submodularity_violations, Oracle};
use pregeom::random::{
    add_random_cliques, add_random_tuples, random_clique_structure, random_nary, random_nary_any, random_strong_subset,
    random_subset,
};
use pregeom::reduct::{lift, reduct_of, reduct_within, witness_hull};
use pregeom::{
    closure, delta, dims, in_class, is_strong, lambda, predim, predim_rel, pregeometry_of, ClassParams, CliqueStructure,
    Element, ElementSet, Error, NaryStructure, Structure,
};

fn p(n: usize, r: usize) -> ClassParams {
    ClassParams::new(n, r).unwrap()
}

const NARY: [(usize, usize); 3] = [(2, 1), (3, 1), (4, 2)];
const CLIQUE: [(usize, usize); 3] = [(2, 1), (3, 1), (3, 2)];

fn nary(seed: u64, size: usize, which: usize) -> NaryStructure {
    let (n, r) = NARY[which % NARY.len()];
    random_nary(p(n, r), size, 3 * size, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn clique(seed: u64, size: usize, which: usize) -> CliqueStructure {
    let (n, r) = CLIQUE[which % CLIQUE.len()];
    random_clique_structure(p(n, r), size, 6, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn oracle_check<S: pregeom::oracle::DirectPredim>(a: &S, b: &ElementSet) -> Result<(), TestCaseError> {
    let oracle = Oracle::new(a).unwrap();
    let naive = oracle.strong(b).unwrap();
    let fast = is_strong(b, a).unwrap();
    prop_assert_eq!(fast.strong, naive.strong);
    if let Some(w) = fast.witness {
        prop_assert_eq!(w.set, naive.least_minimiser);
        prop_assert_eq!(w.relative, naive.min_relative);
    }
    let (d, greatest) = oracle.d_closure(b).unwrap();
    prop_assert_eq!(closure(a, b).unwrap(), greatest);
    prop_assert_eq!(dims(a, b).unwrap() as i64, d);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn strongness_and_closure_match_enumeration(seed in any::<u64>(), size in 0usize..=9, which in 0usize..3, kind in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        if kind {
            let a = nary(seed, size, which);
            let b = random_subset(a.universe(), &mut rng);
            oracle_check(&a, &b)?;
        } else {
            let a = clique(seed, size, which);
            let b = random_subset(a.universe(), &mut rng);
            oracle_check(&a, &b)?;
        }
    }

    #[test]
    fn literal_union_is_the_closure_of_strong_sets(seed in any::<u64>(), size in 0usize..=9, which in 0usize..3) {
        let a = clique(seed, size, which);
        let b = random_strong_subset(&a, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(closure(&a, &b).unwrap(), pregeom::oracle::union_closure(&a, &b).unwrap());
    }

    #[test]
    fn predimensions_are_submodular(seed in any::<u64>(), size in 0usize..=8, tuples in 0usize..=16) {
        let a = random_nary_any(p(3, 1), size, tuples, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(submodularity_violations(&predim_table(&a).unwrap().1), 0);
        let c = clique(seed, size, seed as usize);
        prop_assert_eq!(submodularity_violations(&predim_table(&c).unwrap().1), 0);
    }

    #[test]
    fn pregeometries_satisfy_the_axioms(seed in any::<u64>(), size in 0usize..=8, which in 0usize..3) {
        let a = nary(seed, size, which);
        prop_assert!(pregeometry_violations(&pregeometry_of(&a).unwrap()).is_empty());
        let c = clique(seed, size, which);
        prop_assert!(pregeometry_violations(&pregeometry_of(&c).unwrap()).is_empty());
    }

    #[test]
    fn serialization_round_trips(seed in any::<u64>(), size in 0usize..=10, which in 0usize..3) {
        let a: AnyStructure = nary(seed, size, which).into();
        prop_assert_eq!(parse(&a.serialize()).unwrap(), a);
        let c: AnyStructure = clique(seed, size, which).into();
        prop_assert_eq!(parse(&c.serialize()).unwrap(), c);
    }

    #[test]
    fn renaming_preserves_predim_and_strongness(seed in any::<u64>(), size in 1usize..=9, which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = clique(seed, size, which);
        let mut ids: Vec<u32> = (0..40).collect();
        rand::seq::SliceRandom::shuffle(ids.as_mut_slice(), &mut rng);
        let map: BTreeMap<Element, Element> = a.universe().iter().zip(ids).map(|(e, i)| (*e, Element(i))).collect();
        let b = a.rename(&map);
        prop_assert_eq!(predim(&a).unwrap(), predim(&b).unwrap());
        let x = random_subset(a.universe(), &mut rng);
        let y: ElementSet = x.iter().map(|e| map[e]).collect();
        prop_assert_eq!(is_strong(&x, &a).unwrap().strong, is_strong(&y, &b).unwrap().strong);
    }

    #[test]
    fn free_amalgam_is_additive_and_keeps_strongness(seed in any::<u64>(), k1 in 0usize..=6, extra in 1usize..=4, which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a1 = nary(seed, k1, which);
        let b = random_strong_subset(&a1, &mut rng);
        let fresh = fresh_ids(a1.universe(), extra);
        let base = a1.induced(&b).unwrap().extended(fresh.iter().copied(), []);
        let pool: Vec<Element> = base.universe().iter().copied().collect();
        let a2 = add_random_tuples(&base, &pool, 6, true, &mut rng);
        let d = free_amalgam(&a1, &a2, &b).unwrap().amalgam;
        let rel = |x: &NaryStructure, over: &ElementSet| predim_rel(x.universe(), over, x).unwrap();
        prop_assert_eq!(rel(&d, a1.universe()), rel(&a2, &b));
        if is_strong(&b, &a2).unwrap().strong {
            prop_assert!(is_strong(a1.universe(), &d).unwrap().strong);
            prop_assert!(in_class(&d).unwrap());
        }
    }

    #[test]
    fn standard_amalgam_relative_predim(seed in any::<u64>(), k1 in 0usize..=6, extra in 1usize..=4, which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a1 = clique(seed, k1, which);
        let b = random_subset(a1.universe(), &mut rng);
        let fresh: ElementSet = fresh_ids(a1.universe(), extra).into_iter().collect();
        let base = a1.induced(&b).unwrap().extended(fresh.iter().copied(), []);
        let pool: Vec<Element> = base.universe().iter().copied().collect();
        let a2 = add_random_cliques(&base, &pool, &fresh, 4, &mut rng);
        match standard_amalgam(&a1, &a2, &b) {
            Ok(d) => {
                let d = d.amalgam;
                prop_assert_eq!(lambda(&d).unwrap() - lambda(&a1).unwrap(), lambda(&a2).unwrap() - lambda(&a2.induced(&b).unwrap()).unwrap());
                prop_assert_eq!(d.induced(a1.universe()).unwrap(), a1);
                prop_assert_eq!(d.induced(a2.universe()).unwrap(), a2);
            }
            Err(e) => prop_assert!(matches!(e, Error::Precondition(_)), "{}", e),
        }
    }

    #[test]
    fn witness_hull_bounds_the_reduct(seed in any::<u64>(), size in 0usize..=9) {
        let a = nary(seed, size, 1);
        let ac = match reduct_of(&a) {
            Ok(ac) => ac,
            // related sets that are not a clique family have no clique reduct
            Err(Error::Assertion(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let b = random_subset(a.universe(), &mut ChaCha8Rng::seed_from_u64(seed));
        let hull = witness_hull(&b, &a).unwrap();
        let d = delta(&a.induced(&hull).unwrap()).unwrap();
        prop_assert!(0 <= d);
        prop_assert!(d <= lambda(&ac.induced(&b).unwrap()).unwrap());
    }

    #[test]
    fn reduct_commutes_with_strong_restriction(seed in any::<u64>(), size in 0usize..=10, which in 0usize..2) {
        let a = nary(seed, size, which);
        let b = random_strong_subset(&a, &mut ChaCha8Rng::seed_from_u64(seed));
        match reduct_within(&a, &b) {
            Ok(r) => prop_assert_eq!(r, reduct_of(&a.induced(&b).unwrap()).unwrap()),
            Err(Error::Assertion(m)) => prop_assert!(m.contains("invalid"), "{}", m),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn fresh_witness_blocks_are_free_over_the_clique_structure(seed in any::<u64>(), size in 0usize..=4, new in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = nary(seed, size, rng.gen_range(0..2));
        let ac = reduct_of(&a).unwrap();
        let fresh: ElementSet = fresh_ids(ac.universe(), new).into_iter().collect();
        let base = ac.extended(fresh.iter().copied(), []);
        let pool: Vec<Element> = base.universe().iter().copied().collect();
        let bc = add_random_cliques(&base, &pool, &fresh, 3, &mut rng);
        prop_assume!(bc.induced(a.universe()).unwrap() == ac && is_strong(a.universe(), &bc).unwrap().strong);
        let Ok(out) = lift(&a, &bc) else { return Ok(()) };
        let ct = reduct_of(&out.c).unwrap();
        let blocks: Vec<Vec<Element>> = out
            .report
            .records
            .iter()
            .filter_map(|r| match r {
                GadgetRecord::Witness { fresh: true, witness, .. } => Some(witness.clone()),
                _ => None,
            })
            .collect();
        for mask in 0u32..(1 << blocks.len()) {
            let z0: ElementSet = (0..blocks.len()).filter(|i| mask & (1 << i) != 0).flat_map(|i| blocks[i].clone()).collect();
            let with: ElementSet = z0.union(bc.universe()).copied().collect();
            prop_assert_eq!(predim_rel(&with, bc.universe(), &ct).unwrap(), z0.len() as i64);
        }
    }
}

#[test]
fn naive_strong_on_a_fixed_example() {
    let a = NaryStructure::from_ids(p(3, 1), &[0, 1, 2, 3, 4], &[&[0, 1, 2], &[0, 1, 3], &[0, 1, 4]]).unwrap();
    let r = naive_strong(&pregeom::set_of([2, 3, 4]), &a).unwrap();
    assert!(!r.strong);
    assert_eq!(r.min_relative, -1);
    assert_eq!(r.least_minimiser, pregeom::set_of([0, 1, 2, 3, 4]));
}
