//! Drivers for the acceptance criteria.
//!
//! Each criterion is a deterministic experiment over exhaustive families of
//! small structures and seeded random samples. [`Level::Full`] runs the
//! stated scales; [`Level::Quick`] shrinks ranges and sample counts.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amalgam::{free_amalgam, fresh_ids, standard_amalgam};
use crate::enumerate::{for_each_labeled, iso_classes};
use crate::error::{Error, Result};
use crate::generic::{genericity_check, grow, Growable, GrowthSchedule};
use crate::geometry::{
    back_and_forth, clique_to_nary, is_good, nary_to_clique, remove_pathologies, CliqueToNary, PartialPgIso,
    DEFAULT_MAX_DELTA,
};
use crate::oracle::{predim_table, pregeometry_violations, submodularity_violations, transitivity_violations, DirectPredim, Oracle};
use crate::predim::{in_class, is_strong, lambda, Mask};
use crate::pregeometry::{closure, dims, pregeometry_of};
use crate::random::{
    add_random_cliques, random_clique, random_clique_structure, random_nary, random_nary_any, random_strong_subset,
    random_subset,
};
use crate::reduct::{lift, nondef_witness, reduct_of, reduct_within};
use crate::structures::{ClassParams, CliqueStructure, Element, ElementSet, Kind, NaryStructure, Structure};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    fn pick<T>(self, quick: T, full: T) -> T {
        match self {
            Level::Quick => quick,
            Level::Full => full,
        }
    }
}

impl std::str::FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(Error::Precondition(format!("unknown level {s:?}"))),
        }
    }
}

pub const CRITERIA: [(usize, &str); 13] = [
    (1, "clique pre-dimension submodularity"),
    (2, "delta submodularity and strong transitivity"),
    (3, "pregeometry axioms"),
    (4, "reduct lands in the clique class"),
    (5, "reduct within a strong subset"),
    (6, "lift postconditions"),
    (7, "non-definability witness"),
    (8, "pathology removal keeps closed sets"),
    (9, "standard amalgam relative pre-dimension"),
    (10, "pre-dimension correspondences"),
    (11, "finite-stage genericity"),
    (12, "back-and-forth"),
    (13, "oracle equivalence"),
];

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    /// Every failure is an instance of a known counterexample to the
    /// statement being checked, rather than a defect of the implementation.
    pub explained: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {}: {} ({}) [{} ms]",
            self.id,
            self.name,
            match (self.passed, self.explained) {
                (true, _) => "PASS",
                (false, true) => "FAIL, counterexamples to the statement",
                (false, false) => "FAIL",
            },
            self.detail,
            self.elapsed.as_millis()
        )
    }
}

struct Outcome {
    passed: bool,
    explained: bool,
    detail: String,
}

/// Counts checks and keeps the first failure.
#[derive(Default)]
struct Tally {
    checked: usize,
    failed: usize,
    first: Option<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    fn outcome(self, what: &str, extra: String) -> Outcome {
        let mut detail = format!("{}/{} {what}", self.checked - self.failed, self.checked);
        if !extra.is_empty() {
            detail.push_str("; ");
            detail.push_str(&extra);
        }
        if let Some(first) = self.first {
            detail.push_str("; first failure: ");
            detail.push_str(&first);
        }
        Outcome { passed: self.failed == 0 && self.checked > 0, explained: false, detail }
    }
}

fn rng_for(seed: u64, id: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(id as u64))
}

fn p(n: usize, r: usize) -> ClassParams {
    ClassParams::new(n, r).expect("fixed parameters")
}

pub fn run_criterion(id: usize, level: Level, seed: u64) -> CriterionResult {
    let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
    let start = Instant::now();
    let out = match id {
        1 => c1(level),
        2 => c2(level, seed),
        3 => c3(level, seed),
        4 => c4(level, seed),
        5 => c5(level, seed),
        6 => c6(level, seed),
        7 => c7(level, seed),
        8 => c8(level, seed),
        9 => c9(level),
        10 => c10(level, seed),
        11 => c11(seed),
        12 => c12(seed),
        13 => c13(level, seed),
        _ => Err(Error::Precondition(format!("no criterion {id}"))),
    };
    let elapsed = start.elapsed();
    let (passed, explained, detail) = match out {
        Ok(o) => (o.passed, o.explained, o.detail),
        Err(e) => (false, false, format!("error: {e}")),
    };
    CriterionResult { id, name, passed, explained, detail, elapsed }
}

/// Every criterion in order, calling `report` as each one finishes.
pub fn run_all(level: Level, seed: u64, mut report: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .map(|&(id, _)| {
            let r = run_criterion(id, level, seed);
            report(&r);
            r
        })
        .collect()
}

fn timed(mut o: Outcome, start: Instant, limit: Duration) -> Outcome {
    let secs = start.elapsed();
    if secs > limit {
        o.passed = false;
        o.detail.push_str(&format!("; exceeded the {}s target", limit.as_secs()));
    }
    o
}

fn c1(level: Level) -> Result<Outcome> {
    let start = Instant::now();
    let max = level.pick(4, 5);
    let mut tally = Tally::default();
    let mut pairs = 0usize;
    let mut err = None;
    for size in 0..=max {
        for_each_labeled::<CliqueStructure>(p(2, 1), size, false, |a| match predim_table(a) {
            Ok((_, table)) => {
                let n = table.len();
                pairs += n * (n + 1) / 2;
                let v = submodularity_violations(&table);
                tally.record(v == 0, || format!("{a}: {v} violating pairs"));
            }
            Err(e) => err = Some(e),
        })?;
    }
    if let Some(e) = err {
        return Err(e);
    }
    let o = tally.outcome("structures", format!("r=1 s=2, all valid structures on up to {max} points, {pairs} subset pairs"));
    Ok(timed(o, start, Duration::from_secs(60)))
}

fn c2(level: Level, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed, 2);
    let params = p(3, 1);
    let max = level.pick(4, 5);
    let mut tally = Tally::default();
    let check = |a: &NaryStructure, tally: &mut Tally| -> Result<()> {
        let (_, table) = predim_table(a)?;
        let (s, t) = (submodularity_violations(&table), transitivity_violations(&table));
        tally.record(s == 0 && t == 0, || format!("{a}: {s} submodularity and {t} transitivity violations"));
        Ok(())
    };
    let mut exhaustive = 0;
    for size in 0..=max {
        for a in iso_classes::<NaryStructure>(params, size, true)? {
            check(&a, &mut tally)?;
            exhaustive += 1;
        }
    }
    let samples = level.pick(100, 1000);
    for _ in 0..samples {
        let size = rng.gen_range(1..=10);
        let tuples = rng.gen_range(0..=2 * size);
        let a = random_nary_any(params, size, tuples, &mut rng);
        check(&a, &mut tally)?;
    }
    Ok(tally.outcome(
        "structures",
        format!("n=3, {exhaustive} isomorphism types in the class on up to {max} points, {samples} random on up to 10 points"),
    ))
}

fn pg_check<S: Structure + fmt::Display>(a: &S, tally: &mut Tally) -> Result<()> {
    let v = pregeometry_violations(&pregeometry_of(a)?);
    tally.record(v.is_empty(), || format!("{a}: {}", v[0]));
    Ok(())
}

fn c3(level: Level, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed, 3);
    let mut tally = Tally::default();
    let mut parts = Vec::new();
    let nary_exhaustive = [(p(2, 1), level.pick(5, 6)), (p(3, 1), level.pick(4, 5))];
    for (params, max) in nary_exhaustive {
        for size in 0..=max {
            for a in iso_classes::<NaryStructure>(params, size, true)? {
                pg_check(&a, &mut tally)?;
            }
        }
        parts.push(format!("nary {params} exhaustive to {max}"));
    }
    let clique_exhaustive = [(p(2, 1), level.pick(5, 6)), (p(3, 1), level.pick(5, 6)), (p(3, 2), level.pick(3, 4))];
    for (params, max) in clique_exhaustive {
        for size in 0..=max {
            for a in iso_classes::<CliqueStructure>(params, size, true)? {
                pg_check(&a, &mut tally)?;
            }
        }
        parts.push(format!("clique {params} exhaustive to {max}"));
    }
    let samples = level.pick(50, 300);
    for _ in 0..samples {
        let a = random_nary(p(3, 1), 6, 12, &mut rng);
        pg_check(&a, &mut tally)?;
        let size = rng.gen_range(4..=6);
        let c = random_clique_structure(p(3, 2), size, 6, &mut rng);
        pg_check(&c, &mut tally)?;
    }
    parts.push(format!("{samples} random each of nary n=3 r=1 on 6 points and clique n=3 r=2 on 4 to 6 points"));
    Ok(tally.outcome("structures", parts.join(", ")))
}

/// A witness prefix ȳ on two fresh points and `k` fresh members, each
/// forming the tuple (ȳ, x); amalgamated into `m` over the empty set.
fn plant_star(m: &NaryStructure, k: usize) -> Result<NaryStructure> {
    let arity = m.arity();
    let s = m.params().s();
    let ids = fresh_ids(m.universe(), (s - 1) + k * (arity - (s - 1)));
    let (y, rest) = ids.split_at(s - 1);
    let tuples: Vec<Vec<Element>> = rest.chunks(arity - (s - 1)).map(|x| [y, x].concat()).collect();
    let star = NaryStructure::new(m.params(), ids.iter().copied().collect(), tuples.into_iter().collect());
    Ok(free_amalgam(m, &star, &ElementSet::new())?.amalgam)
}

/// Validity and class membership of the reduct, with its clique count.
/// `reduct_of` rejects an in-class input whose related member sets are not
/// the subsets of a family of cliques meeting in fewer than s tuples; that
/// is recorded as a failure of the statement, not an error.
struct ReductCheck {
    ok: bool,
    cliques: usize,
    not_clique_family: bool,
}

fn reduct_ok(a: &NaryStructure) -> Result<ReductCheck> {
    match reduct_of(a) {
        Ok(r) => Ok(ReductCheck { ok: r.validate().is_valid() && in_class(&r)?, cliques: r.cliques().len(), not_clique_family: false }),
        Err(Error::Assertion(_)) => Ok(ReductCheck { ok: false, cliques: 0, not_clique_family: true }),
        Err(e) => Err(e),
    }
}

fn c4(level: Level, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed, 4);
    let params = p(3, 1);
    let max = level.pick(4, 5);
    let mut tally = Tally::default();
    let (mut with_cliques, mut exhaustive, mut explained) = (0, 0, 0);
    for size in 0..=max {
        for a in iso_classes::<NaryStructure>(params, size, true)? {
            let c = reduct_ok(&a)?;
            with_cliques += (c.cliques > 0) as usize;
            explained += c.not_clique_family as usize;
            tally.record(c.ok, || format!("{a}"));
            exhaustive += 1;
        }
    }
    let at_six = level.pick(200, 2000);
    let larger = level.pick(50, 500);
    for i in 0..at_six + larger {
        let size = if i < at_six { 6 } else { rng.gen_range(7..=12) };
        let mut a = random_nary(params, size, 3 * size, &mut rng);
        if rng.gen_bool(0.5) {
            a = plant_star(&a, rng.gen_range(3..=4))?;
            a = crate::random::add_random_tuples(&a, &a.universe().iter().copied().collect::<Vec<_>>(), 4, true, &mut rng);
        }
        let c = reduct_ok(&a)?;
        with_cliques += (c.cliques > 0) as usize;
        explained += c.not_clique_family as usize;
        tally.record(c.ok, || format!("{a}"));
    }
    let failed = tally.failed;
    let mut o = tally.outcome(
        "reducts valid and in the class",
        format!(
            "n=3 r=1: {exhaustive} isomorphism types on up to {max} points, {at_six} random on 6 points, {larger} random on 7 to 12 points plus planted stars; {with_cliques} reducts have cliques; {explained}/{failed} failures have related member sets that no clique family produces"
        ),
    );
    o.explained = failed > 0 && explained == failed;
    Ok(o)
}

fn c5(level: Level, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed, 5);
    let mut stages: Vec<NaryStructure> = Vec::new();
    for params in [p(3, 1), p(2, 1)] {
        let schedule = GrowthSchedule { kind: Kind::Nary, params, max_stage_size: 20, extension_size_bound: 3, seed };
        let chain = grow::<NaryStructure>(&schedule)?;
        let half = chain.stages.len() / 2;
        stages.extend(chain.stages[half..].iter().cloned());
    }
    let count = level.pick(20, 100);
    let mut tally = Tally::default();
    let mut nontrivial = 0;
    for i in 0..count {
        let mut m = stages[rng.gen_range(0..stages.len())].clone();
        // every other stage is extended by a witness configuration
        if i % 2 == 1 {
            m = plant_star(&m, rng.gen_range(3..=4))?;
        }
        let a = random_strong_subset(&m, &mut rng);
        let direct = reduct_of(&m.induced(&a)?)?;
        nontrivial += (!direct.cliques().is_empty()) as usize;
        match reduct_within(&m, &a) {
            Ok(within) => tally.record(within == direct, || format!("{m} over {}", crate::structures::fmt_set(&a))),
            Err(e) => tally.record(false, || format!("{e}")),
        }
    }
    Ok(tally.outcome("equal", format!("stages grown at n=3 and n=2 with r=1, half extended by a star; {nontrivial} with cliques")))
}

/// Extend `ac` by `new` fresh points and random cliques meeting them, and
/// sometimes enlarge a clique of `ac` by a tuple through a new point,
/// keeping `ac` strong and induced.
fn random_clique_extension<R: Rng>(ac: &CliqueStructure, new: usize, rng: &mut R) -> Result<CliqueStructure> {
    let fresh: ElementSet = fresh_ids(ac.universe(), new).into_iter().collect();
    let mut bc = ac.extended(fresh.iter().copied(), []);
    let pool: Vec<Element> = bc.universe().iter().copied().collect();
    let keeps_base = |c: &CliqueStructure| -> Result<bool> {
        Ok(c.validate().is_valid()
            && in_class(c)?
            && c.induced(ac.universe())? == *ac
            && is_strong(ac.universe(), c)?.strong)
    };
    for _ in 0..4 {
        let candidate = if rng.gen_bool(0.4) && !bc.cliques().is_empty() {
            let ks: Vec<_> = bc.cliques().iter().cloned().collect();
            let k = ks[rng.gen_range(0..ks.len())].clone();
            let Some(extra) = random_clique(ac.params(), &pool, &fresh, rng) else { continue };
            let Some(t) = extra.into_iter().find(|t| t.0.iter().any(|e| fresh.contains(e))) else { continue };
            let mut cliques = bc.cliques().clone();
            cliques.remove(&k);
            let mut bigger = k.clone();
            bigger.insert(t);
            cliques.insert(bigger);
            bc.with_cliques(cliques)
        } else {
            add_random_cliques(&bc, &pool, &fresh, 1, rng)
        };
        if keeps_base(&candidate)? {
            bc = candidate;
        }
    }
    Ok(bc)
}

/// Extend `a` by `new` fresh points and random tuples meeting them, keeping
/// `a` strong and induced.
fn random_nary_extension<R: Rng>(a: &NaryStructure, new: usize, attempts: usize, rng: &mut R) -> Result<NaryStructure> {
    let fresh: Vec<Element> = fresh_ids(a.universe(), new);
    let mut b = a.extended(fresh.iter().copied(), []);
    let pool: Vec<Element> = b.universe().iter().copied().collect();
    for _ in 0..attempts {
        if pool.len() < a.arity() {
            break;
        }
        let t: Vec<Element> = rand::seq::SliceRandom::choose_multiple(pool.as_slice(), rng, a.arity()).copied().collect();
        if !t.iter().any(|e| fresh.contains(e)) || b.contains_tuple(&t) {
            continue;
        }
        let next = b.extended([], [t]);
        if in_class(&next)? && is_strong(a.universe(), &next)?.strong {
            b = next;
        }
    }
    Ok(b)
}

/// Some clique of `bc` not extending a clique of `ac` meets A in a set P
/// that a superset adding at most s points of A makes smaller. A fresh block
/// X for that clique meets A in P, so X fails the strongness clause of the
/// formula and the clique cannot appear in the reduct of the lift.
fn blocked_new_clique(a: &NaryStructure, ac: &CliqueStructure, bc: &CliqueStructure) -> bool {
    bc.cliques().iter().any(|l| {
        let trace: crate::structures::Clique =
            l.iter().filter(|t| t.0.iter().all(|e| a.universe().contains(e))).cloned().collect();
        if ac.cliques().contains(&trace) {
            return false;
        }
        let points: ElementSet = l.iter().flat_map(|t| t.0.iter().copied()).filter(|e| a.universe().contains(e)).collect();
        !crate::reduct::bounded_strong(a, &points, a.params().s())
    })
}

fn c6(level: Level, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed, 6);
    let count = level.pick(20, 100);
    let mut tally = Tally::default();
    let (mut skipped, mut extended, mut fresh_blocks, mut obstructed) = (0, 0, 0, 0);
    while tally.checked < count {
        let params = if rng.gen_bool(0.5) { p(3, 1) } else { p(2, 1) };
        let mut a = random_nary(params, rng.gen_range(0..=4), 6, &mut rng);
        if rng.gen_bool(0.6) {
            a = plant_star(&a, rng.gen_range(params.s()..=params.s() + 1))?;
        }
        let ac = reduct_of(&a)?;
        let bc = random_clique_extension(&ac, rng.gen_range(1..=3), &mut rng)?;
        match lift(&a, &bc) {
            Ok(out) => {
                let ct = reduct_of(&out.c)?;
                let ok = is_strong(a.universe(), &out.c)?.strong
                    && ct.induced(bc.universe())? == bc
                    && is_strong(bc.universe(), &ct)?.strong;
                for r in &out.report.records {
                    match r {
                        crate::gadget::GadgetRecord::Witness { fresh: true, .. } => fresh_blocks += 1,
                        crate::gadget::GadgetRecord::Witness { tuples, .. } if !tuples.is_empty() => extended += 1,
                        _ => {}
                    }
                }
                tally.record(ok, || format!("{a} with {bc}"));
            }
            Err(Error::Precondition(_)) => skipped += 1,
            Err(e) => {
                obstructed += blocked_new_clique(&a, &ac, &bc) as usize;
                tally.record(false, || format!("{a} with {bc}: {e}"))
            }
        }
    }
    let failed = tally.failed;
    let mut o = tally.outcome(
        "lifts satisfy A ≤ C and B_c ≤ reduct(C)",
        format!(
            "n=3 and n=2 with r=1; {extended} reduct cliques extended, {fresh_blocks} fresh witness blocks; {skipped} generated pairs failed the hypothesis and were redrawn; {obstructed}/{failed} failures have a new clique whose points in A are not strong in A within s added points, so no fresh witness block for it can satisfy the formula"
        ),
    );
    o.explained = failed > 0 && obstructed == failed;
    Ok(o)
}

fn c7(level: Level, seed: u64) -> Result<Outcome> {
    let mut tally = Tally::default();
    for i in 0..level.pick(10, 50) {
        let mut rng = rng_for(seed.wrapping_add(i), 7);
        let f = random_nary(p(3, 1), rng.gen_range(0..=6), 8, &mut rng);
        match nondef_witness(&f) {
            Ok(_) => tally.record(true, String::new),
            Err(e) => tally.record(false, || format!("{f}: {e}")),
        }
    }
    Ok(tally.outcome("assertion bundles hold", "F random in the class n=3 r=1 on up to 6 points".into()))
}

fn c8(level: Level, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed, 8);
    let params = p(4, 2);
    let count = level.pick(10, 50);
    let mut tally = Tally::default();
    let mut gadgets = 0;
    let mut largest = 0;
    while tally.checked < count {
        let b = random_nary(params, rng.gen_range(4..=7), 6, &mut rng);
        let mut a_set = random_strong_subset(&b, &mut rng);
        let a = b.induced(&a_set)?;
        let new = b.relation().len() - a.relation().len();
        if b.len() + 2 * new > 9 || (new == 0 && rng.gen_bool(0.8)) {
            continue;
        }
        a_set.clear();
        let out = match remove_pathologies(&a, &b) {
            Ok(out) => out,
            Err(e) => {
                tally.record(false, || format!("{b}: {e}"));
                continue;
            }
        };
        gadgets += new;
        largest = largest.max(out.c.len());
        let (pc, pd) = (pregeometry_of(&out.c)?, pregeometry_of(&out.d)?);
        let same = (0..(1 as Mask) << out.c.len()).all(|m| pc.is_closed(m) == pd.is_closed(m));
        tally.record(same, || format!("{b} over {a}"));
    }
    Ok(tally.outcome(
        "closed-set families equal",
        format!("rs=4 with r=s=2; {gadgets} gadgets; largest V has {largest} points"),
    ))
}

fn c9(level: Level) -> Result<Outcome> {
    let mut tally = Tally::default();
    let mut parts = Vec::new();
    for (params, max) in [(p(2, 1), 4), (p(3, 1), 4), (p(3, 2), level.pick(2, 3))] {
        let mut by_size: Vec<Vec<CliqueStructure>> = Vec::new();
        for size in 0..=max {
            let mut all = Vec::new();
            for_each_labeled::<CliqueStructure>(params, size, true, |a| all.push(a.clone()))?;
            by_size.push(all);
        }
        let before = tally.checked;
        for b in 0..=max.min(2) {
            let base: ElementSet = (0..b as u32).map(Element).collect();
            for k1 in b..=max {
                for a1 in &by_size[k1] {
                    let a1_base = a1.induced(&base)?;
                    for k2 in b..=max {
                        let shift: BTreeMap<Element, Element> = (0..k2 as u32)
                            .map(|i| (Element(i), Element(if (i as usize) < b { i } else { i + (k1 - b) as u32 })))
                            .collect();
                        for a2 in &by_size[k2] {
                            if a2.induced(&base)? != a1_base {
                                continue;
                            }
                            let a2 = a2.rename(&shift);
                            let ok = match standard_amalgam(a1, &a2, &base) {
                                Ok(d) => {
                                    lambda(&d.amalgam)? - lambda(a1)? == lambda(&a2)? - lambda(&a1_base)?
                                        && d.amalgam.induced(a1.universe())? == *a1
                                        && d.amalgam.induced(a2.universe())? == a2
                                }
                                Err(_) => false,
                            };
                            tally.record(ok, || format!("{a1} and {a2} over {}", crate::structures::fmt_set(&base)));
                        }
                    }
                }
            }
        }
        parts.push(format!("{params}: {} triples, factors up to {max} points", tally.checked - before));
    }
    Ok(tally.outcome("identities hold", parts.join(", ")))
}

/// Pairs of structures of the two classes with one universe and equal
/// pregeometries, built from the constructions themselves or taken
/// relation-free.
fn seed_pair<R: Rng>(clique: ClassParams, rng: &mut R) -> Result<(NaryStructure, CliqueStructure)> {
    let nary = clique.rs_class();
    loop {
        match rng.gen_range(0..3) {
            0 => {
                let k = rng.gen_range(0..=3);
                let u: ElementSet = (0..k).map(Element).collect();
                return Ok((NaryStructure::new(nary, u.clone(), Default::default()), CliqueStructure::new(clique, u, Default::default())));
            }
            1 => {
                let b0 = random_nary(nary, rng.gen_range(4..=5), 2, rng);
                if b0.relation().len() > 1 {
                    continue;
                }
                let out = nary_to_clique(&NaryStructure::empty(nary), &CliqueStructure::empty(clique), &b0)?;
                return Ok((out.d, out.cc));
            }
            _ => {
                let bc0 = random_clique_structure(clique, rng.gen_range(3..=5), 2, rng);
                match clique_to_nary(&CliqueStructure::empty(clique), &NaryStructure::empty(nary), &bc0) {
                    Ok(out) => return Ok((out.b_rs, bc0)),
                    Err(Error::Precondition(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
        }
    }
}

/// For each non-good X: is there a good X̄ ⊇ X with δ(X̄) − δ(X) < 0, and
/// one with ≤ 0? Returns (non-good sets, strict witnesses, weak witnesses).
pub fn good_extension_claim(out: &CliqueToNary, s: usize) -> Result<(usize, usize, usize)> {
    let engine = out.b_rs.engine()?;
    let n = engine.len();
    let good: Vec<bool> = (0..(1 as Mask) << n).map(|m| is_good(&out.choices, &engine.set(m), s)).collect();
    let value: Vec<i64> = (0..(1 as Mask) << n).map(|m| engine.value(m)).collect();
    let (mut non_good, mut strict, mut weak) = (0, 0, 0);
    let full = engine.full();
    for x in 0..(1 as Mask) << n {
        if good[x as usize] {
            continue;
        }
        non_good += 1;
        let rest = full & !x;
        let mut sub = rest;
        let (mut has_strict, mut has_weak) = (false, false);
        loop {
            let y = sub | x;
            if good[y as usize] {
                let d = value[y as usize] - value[x as usize];
                has_strict |= d < 0;
                has_weak |= d <= 0;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        strict += has_strict as usize;
        weak += has_weak as usize;
    }
    Ok((non_good, strict, weak))
}

fn c10(level: Level, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed, 10);
    let count = level.pick(10, 50);
    let mut tally = Tally::default();
    let param_choices = [p(3, 2), p(4, 1)];
    let mut new_tuples = 0;
    while tally.checked < count {
        let clique = param_choices[tally.checked % 2];
        let (a, ac) = seed_pair(clique, &mut rng)?;
        if a.len() >= 8 {
            continue;
        }
        let new = rng.gen_range(1..=(8 - a.len()).min(3));
        let b = random_nary_extension(&a, new, 6, &mut rng)?;
        new_tuples += b.relation().len() - a.relation().len();
        match nary_to_clique(&a, &ac, &b) {
            Ok(_) => tally.record(true, String::new),
            Err(e) => tally.record(false, || format!("{a} / {ac} / {b}: {e}")),
        }
    }
    let forth = tally.checked;
    let (mut redrawn, mut non_good, mut strict, mut weak, mut added, mut pg_differs) = (0, 0, 0, 0, 0, 0);
    while tally.checked < 2 * count {
        let clique = param_choices[tally.checked % 2];
        let (ars, ac) = seed_pair(clique, &mut rng)?;
        if ac.len() >= 8 {
            continue;
        }
        let new = rng.gen_range(1..=(8 - ac.len()).min(3));
        let bc = random_clique_extension(&ac, new, &mut rng)?;
        match clique_to_nary(&ac, &ars, &bc) {
            Ok(out) => {
                added += out.report.added_tuples().len();
                pg_differs += !out.same_pregeometry as usize;
                let (g, st, w) = good_extension_claim(&out, clique.s())?;
                non_good += g;
                strict += st;
                weak += w;
                tally.record(true, String::new)
            }
            Err(Error::Precondition(_)) => redrawn += 1,
            Err(e) => tally.record(false, || format!("{ac} / {ars} / {bc}: {e}")),
        }
    }
    let back = tally.checked - forth;
    Ok(tally.outcome(
        "constructions verified",
        format!(
            "{forth} nary-to-clique ({new_tuples} new tuples) and {} clique-to-nary ({added} new tuples) at n=3 r=2 and n=4 r=1 on up to 8 points; {redrawn} clique extensions redrawn for lack of a distinct-entry prefix; non-good sets with a good extension of negative relative delta: {strict}/{non_good}, of non-positive: {weak}/{non_good}; pregeometries of B_rs and B_c differ in {pg_differs} clique-to-nary instances",
            back
        ),
    ))
}

fn generic_coverage<S: Growable>(params: ClassParams, kind: Kind, seed: u64) -> Result<(usize, usize, usize)> {
    let schedule = GrowthSchedule { kind, params, max_stage_size: 40, extension_size_bound: 3, seed };
    let chain = grow::<S>(&schedule)?;
    let m = chain.last();
    let (mut types, mut found) = (0, 0);
    for size in 0..=3 {
        for b in iso_classes::<S>(params, size, true)? {
            types += 1;
            found += genericity_check(m, &ElementSet::new(), &b)?.is_some() as usize;
        }
    }
    Ok((types, found, m.len()))
}

fn c11(seed: u64) -> Result<Outcome> {
    let (nt, nf, nsize) = generic_coverage::<NaryStructure>(p(3, 1), Kind::Nary, seed)?;
    let (ct, cf, csize) = generic_coverage::<CliqueStructure>(p(2, 1), Kind::Clique, seed)?;
    let mut tally = Tally::default();
    for _ in 0..nf {
        tally.record(true, String::new);
    }
    for _ in nf..nt {
        tally.record(false, || "an n-ary type has no strong copy".into());
    }
    for _ in 0..cf {
        tally.record(true, String::new);
    }
    for _ in cf..ct {
        tally.record(false, || "a clique type has no strong copy".into());
    }
    Ok(tally.outcome(
        "types with strong copies",
        format!("n-ary n=3 r=1: {nf}/{nt} in a {nsize}-point stage; clique r=1 s=2: {cf}/{ct} in a {csize}-point stage"),
    ))
}

fn c12(seed: u64) -> Result<Outcome> {
    let start = Instant::now();
    let clique = p(3, 2);
    let s1 = grow::<NaryStructure>(&GrowthSchedule {
        kind: Kind::Nary,
        params: clique.rs_class(),
        max_stage_size: 10,
        extension_size_bound: 4,
        seed,
    })?;
    let s2 = grow::<CliqueStructure>(&GrowthSchedule {
        kind: Kind::Clique,
        params: clique,
        max_stage_size: 10,
        extension_size_bound: 3,
        seed,
    })?;
    let out = back_and_forth(s1.last(), s2.last(), &PartialPgIso::default(), 4, DEFAULT_MAX_DELTA)?;
    out.iso.verify(&out.s1, &out.s2)?;
    let rounds: Vec<String> = out.rounds.iter().map(|r| format!("{} +{}", r.direction, r.extension.len())).collect();
    let ok = out.iso.len() >= 6;
    let o = Outcome {
        passed: ok,
        explained: false,
        detail: format!(
            "domain {} after rounds [{}]; stages grew from {} and {} to {} and {} points",
            out.iso.len(),
            rounds.join(", "),
            s1.last().len(),
            s2.last().len(),
            out.s1.len(),
            out.s2.len()
        ),
    };
    Ok(timed(o, start, Duration::from_secs(300)))
}

fn oracle_agrees<S: DirectPredim + fmt::Display>(a: &S, b: &ElementSet, tally: &mut Tally) -> Result<()> {
    let oracle = Oracle::new(a)?;
    let naive = oracle.strong(b)?;
    let fast = is_strong(b, a)?;
    let mut ok = fast.strong == naive.strong;
    if let Some(w) = &fast.witness {
        ok &= w.set == naive.least_minimiser && w.relative == naive.min_relative;
    }
    let cl = closure(a, b)?;
    let (d, greatest) = oracle.d_closure(b)?;
    ok &= cl == greatest && dims(a, b)? as i64 == d;
    if naive.strong {
        ok &= cl == oracle.union_closure(b)?;
    }
    if b.len() <= 6 {
        ok &= dims(a, b)? == oracle.dims(b)?;
    }
    tally.record(ok, || format!("{a} at {}", crate::structures::fmt_set(b)));
    Ok(())
}

fn c13(level: Level, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed, 13);
    let mut tally = Tally::default();
    let mut strong = 0;
    for i in 0..level.pick(100, 1000) {
        let size = rng.gen_range(1..=10);
        let pick_strong = rng.gen_bool(0.3);
        let choose = |a: &dyn Fn(&mut ChaCha8Rng) -> ElementSet, rng: &mut ChaCha8Rng| a(rng);
        match i % 5 {
            0 | 1 => {
                let params = if i % 5 == 0 { p(2, 1) } else { p(3, 1) };
                let a = random_nary(params, size, 2 * size, &mut rng);
                let b = choose(&|r| if pick_strong { random_strong_subset(&a, r) } else { random_subset(a.universe(), r) }, &mut rng);
                strong += is_strong(&b, &a)?.strong as usize;
                oracle_agrees(&a, &b, &mut tally)?;
            }
            k => {
                let params = [p(2, 1), p(3, 1), p(3, 2)][k - 2];
                let a = random_clique_structure(params, size, 5, &mut rng);
                let b = choose(&|r| if pick_strong { random_strong_subset(&a, r) } else { random_subset(a.universe(), r) }, &mut rng);
                strong += is_strong(&b, &a)?.strong as usize;
                oracle_agrees(&a, &b, &mut tally)?;
            }
        }
    }
    Ok(tally.outcome(
        "instances agree",
        format!("random structures of both kinds on up to 10 points; {strong} of the tested sets are strong"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_reports_first_failure() {
        let mut t = Tally::default();
        t.record(true, String::new);
        t.record(false, || "x".into());
        t.record(false, || "y".into());
        let o = t.outcome("checks", String::new());
        assert!(!o.passed);
        assert_eq!(o.detail, "1/3 checks; first failure: x");
    }

    #[test]
    fn quick_oracle_criterion_passes() {
        let r = run_criterion(13, Level::Quick, 0);
        assert!(r.passed, "{r}");
    }
}
