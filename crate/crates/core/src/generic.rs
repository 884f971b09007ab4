//! Finite approximations of the generic structures, grown by repeated
//! strong amalgamation, and a finite-stage check of the extension property.
//!
//! Extension types are pairs A ≤ B in the class up to isomorphism, with B
//! stored on `0..|B|` and A on `0..|A|`. Growth runs in passes; in each pass
//! every type realizes B over at most one strong copy of A that does not
//! already extend to a strong copy of B. Growth stops after a pass that
//! realizes nothing.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::amalgam::{rename_apart, Amalgamate};
use crate::enumerate::{iso_classes, Enumerable, MAX_SIZE};
use crate::error::{Error, Result};
use crate::format::{parse, parse_ids, AnyStructure};
use crate::iso::{canonical_form, find_embedding, for_each_embedding};
use crate::predim::{in_class, is_strong};
use crate::structures::{fmt_set, ClassParams, Element, ElementSet, Embedding, Kind, Structure};

/// Structures that can be grown, amalgamated and persisted.
pub trait Growable: Enumerable + Amalgamate + Into<AnyStructure> + TryFrom<AnyStructure, Error = Error> {}

impl<S> Growable for S where S: Enumerable + Amalgamate + Into<AnyStructure> + TryFrom<AnyStructure, Error = Error> {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrowthSchedule {
    pub kind: Kind,
    pub params: ClassParams,
    pub max_stage_size: usize,
    pub extension_size_bound: usize,
    pub seed: u64,
}

impl GrowthSchedule {
    pub fn check(&self) -> Result<()> {
        if self.extension_size_bound == 0 {
            return Err(Error::Precondition("extension size bound must be positive".into()));
        }
        if self.extension_size_bound > MAX_SIZE {
            return Err(Error::TooLarge { what: "extension size bound", size: self.extension_size_bound, limit: MAX_SIZE });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionType<S> {
    /// `0..|A|`.
    pub base: ElementSet,
    /// B on `0..|B|`, with `base ≤ ext`.
    pub ext: S,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionRecord<S> {
    /// Index of the stage produced by this step.
    pub step: usize,
    /// The copy of A in the previous stage.
    pub base: ElementSet,
    /// B, on `0..|B|`.
    pub ext: S,
    /// Embedding of `ext` into the new stage, sending the type's base onto `base`.
    pub map: Embedding,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain<S> {
    pub stages: Vec<S>,
    pub log: Vec<ExtensionRecord<S>>,
    /// Set when some pending extension did not fit under the size bound.
    pub truncated: bool,
}

impl<S> Chain<S> {
    pub fn last(&self) -> &S {
        self.stages.last().expect("a chain has at least one stage")
    }
}

fn mask_set(m: u32, size: usize) -> ElementSet {
    (0..size as u32).filter(|i| m & (1 << i) != 0).map(Element).collect()
}

/// All extension types with `1 ≤ |B| ≤ bound` and A ≠ B, ordered by |B|, then
/// |A|, then canonical code. The seed shuffles types with equal |B| and |A|.
pub fn extension_types<S: Growable>(params: ClassParams, bound: usize, seed: u64) -> Result<Vec<ExtensionType<S>>> {
    let mut seen = HashSet::new();
    let mut found: Vec<(usize, usize, Vec<u32>, ExtensionType<S>)> = Vec::new();
    for size in 1..=bound {
        for b in iso_classes::<S>(params, size, true)? {
            for m in 0u32..(1 << size) - 1 {
                let a = mask_set(m, size);
                if !is_strong(&a, &b)?.strong {
                    continue;
                }
                let (code, order) = canonical_form(&b, Some(&a));
                if !seen.insert(code.clone()) {
                    continue;
                }
                let map: BTreeMap<Element, Element> =
                    order.iter().enumerate().map(|(i, &e)| (e, Element(i as u32))).collect();
                let base = (0..a.len() as u32).map(Element).collect();
                found.push((size, a.len(), code, ExtensionType { base, ext: b.rename(&map) }));
            }
        }
    }
    found.sort_by(|x, y| (x.0, x.1, &x.2).cmp(&(y.0, y.1, &y.2)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(found.len());
    let mut i = 0;
    while i < found.len() {
        let j = (i..found.len()).find(|&j| (found[j].0, found[j].1) != (found[i].0, found[i].1)).unwrap_or(found.len());
        let mut group: Vec<ExtensionType<S>> = found[i..j].iter().map(|t| t.3.clone()).collect();
        group.shuffle(&mut rng);
        out.extend(group);
        i = j;
    }
    Ok(out)
}

fn strong_in<S: Structure>(set: &ElementSet, m: &S) -> bool {
    is_strong(set, m).map(|r| r.strong).unwrap_or(false)
}

/// An embedding of `b` into `m` over `fixed` whose image is strong in `m`.
fn extend_strongly<S: Growable>(m: &S, b: &S, fixed: &BTreeMap<Element, Element>) -> Result<Option<Embedding>> {
    find_embedding(b, m, fixed, |e| strong_in(&e.image(), m))
}

/// Search `m` for a strong copy of `b` over `a`, fixing `a` pointwise.
/// `None` only says this finite structure lacks such a copy.
pub fn genericity_check<S: Growable>(m: &S, a: &ElementSet, b: &S) -> Result<Option<Embedding>> {
    if m.params() != b.params() {
        return Err(Error::Precondition("structures have different parameters".into()));
    }
    if !is_strong(a, m)?.strong {
        return Err(Error::Precondition(format!("{} is not strong in the stage", fmt_set(a))));
    }
    if !a.is_subset(b.universe()) || m.induced(a)? != b.induced(a)? {
        return Err(Error::Precondition("the extension does not extend the structure induced on the base".into()));
    }
    if !is_strong(a, b)?.strong {
        return Err(Error::Precondition("the base is not strong in the extension".into()));
    }
    if !in_class(b)? {
        return Err(Error::Precondition("the extension is not in the class".into()));
    }
    let fixed = a.iter().map(|&e| (e, e)).collect();
    extend_strongly(m, b, &fixed)
}

/// Amalgamate `ext` into `m` along `fixed` (type base to stage), with fresh
/// ids for the rest. Returns the new stage and the embedding of `ext`.
fn realize<S: Growable>(m: &S, ext: &S, fixed: &BTreeMap<Element, Element>) -> Result<(S, Embedding)> {
    let map = rename_apart(ext.universe(), fixed, m.universe());
    let renamed = ext.rename(&map);
    let base: ElementSet = fixed.values().copied().collect();
    let next = S::amalgamate(m, &renamed, &base)?.amalgam;
    if !in_class(&next)? {
        return Err(Error::Assertion("grown stage left the class".into()));
    }
    if !is_strong(m.universe(), &next)?.strong {
        return Err(Error::Assertion("previous stage is not strong in the next".into()));
    }
    Ok((next, Embedding::new(map)))
}

pub fn grow<S: Growable>(schedule: &GrowthSchedule) -> Result<Chain<S>> {
    schedule.check()?;
    if schedule.kind != S::KIND {
        return Err(Error::Precondition(format!("schedule is for {} structures", schedule.kind)));
    }
    let mut m = S::empty(schedule.params);
    let mut chain = Chain { stages: vec![m.clone()], log: Vec::new(), truncated: false };
    if schedule.max_stage_size == 0 {
        return Ok(chain);
    }
    let types = extension_types::<S>(schedule.params, schedule.extension_size_bound, schedule.seed)?;
    let bases: Vec<S> = types.iter().map(|t| t.ext.induced(&t.base)).collect::<Result<_>>()?;
    // strongness of a set and "already extends" are both stable under
    // passing to a later stage, so both are cached across the chain
    let mut strong: HashMap<ElementSet, bool> = HashMap::new();
    let mut done: HashSet<(usize, Vec<Element>)> = HashSet::new();
    loop {
        let mut realized = false;
        for (ti, ty) in types.iter().enumerate() {
            let mut pending: Option<BTreeMap<Element, Element>> = None;
            let mut failure: Option<Error> = None;
            for_each_embedding(&bases[ti], &m, &BTreeMap::new(), |e| {
                let key = (ti, e.map.values().copied().collect::<Vec<_>>());
                if done.contains(&key) {
                    return true;
                }
                let image = e.image();
                if !*strong.entry(image.clone()).or_insert_with(|| strong_in(&image, &m)) {
                    return true;
                }
                match extend_strongly(&m, &ty.ext, &e.map) {
                    Ok(Some(_)) => {
                        done.insert(key);
                        true
                    }
                    Ok(None) => {
                        pending = Some(e.map.clone());
                        false
                    }
                    Err(err) => {
                        failure = Some(err);
                        false
                    }
                }
            })?;
            if let Some(err) = failure {
                return Err(err);
            }
            let Some(fixed) = pending else { continue };
            if m.len() + ty.ext.len() - ty.base.len() > schedule.max_stage_size {
                chain.truncated = true;
                continue;
            }
            let (next, map) = realize(&m, &ty.ext, &fixed)?;
            done.insert((ti, fixed.values().copied().collect()));
            chain.log.push(ExtensionRecord {
                step: chain.stages.len(),
                base: fixed.values().copied().collect(),
                ext: ty.ext.clone(),
                map,
            });
            chain.stages.push(next.clone());
            m = next;
            realized = true;
        }
        if !realized {
            return Ok(chain);
        }
    }
}

const CHAIN_FILE: &str = "chain.txt";

fn ids_text(set: &ElementSet) -> String {
    if set.is_empty() {
        "-".into()
    } else {
        set.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
    }
}

/// Write `chain.txt` (final stage followed by log lines) and one
/// `ext-<k>.txt` file per step into `dir`.
pub fn save_chain<S: Growable>(chain: &Chain<S>, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut text: String = chain.last().clone().into().serialize();
    for rec in &chain.log {
        let file = format!("ext-{}.txt", rec.step);
        let any: AnyStructure = rec.ext.clone().into();
        std::fs::write(dir.join(&file), any.serialize()).map_err(|e| Error::Io(format!("{file}: {e}")))?;
        let _ = writeln!(text, "step {} A {} B-file {} map {}", rec.step, ids_text(&rec.base), file, rec.map);
    }
    let _ = writeln!(text, "truncated {}", if chain.truncated { "yes" } else { "no" });
    let path = dir.join(CHAIN_FILE);
    std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_map(tokens: &[&str], line: usize) -> Result<BTreeMap<Element, Element>> {
    let mut map = BTreeMap::new();
    for t in tokens {
        let (a, b) = t.split_once(':').ok_or_else(|| perr(line, format!("bad map pair {t:?}")))?;
        let a: u32 = a.parse().map_err(|_| perr(line, format!("bad id {a:?}")))?;
        let b: u32 = b.parse().map_err(|_| perr(line, format!("bad id {b:?}")))?;
        if map.insert(Element(a), Element(b)).is_some() {
            return Err(perr(line, format!("{a} mapped twice")));
        }
    }
    Ok(map)
}

/// Read a chain written by [`save_chain`], replaying every step from the
/// empty structure and re-checking the chain invariants.
pub fn load_chain<S: Growable>(dir: &Path) -> Result<Chain<S>> {
    let path = dir.join(CHAIN_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let lines: Vec<&str> = text.lines().collect();
    let end = lines.iter().position(|l| l.trim() == "end").ok_or_else(|| perr(lines.len(), "missing `end`"))?;
    let last = S::try_from(parse(&lines[..=end].join("\n"))?)?;
    let mut m = S::empty(last.params());
    let mut chain = Chain { stages: vec![m.clone()], log: Vec::new(), truncated: false };
    for (i, raw) in lines.iter().enumerate().skip(end + 1) {
        let no = i + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = l.split_whitespace().collect();
        match tokens.as_slice() {
            ["truncated", flag] => {
                chain.truncated = match *flag {
                    "yes" => true,
                    "no" => false,
                    _ => return Err(perr(no, "expected yes or no")),
                }
            }
            ["step", k, "A", ids, "B-file", file, "map", pairs @ ..] => {
                let k: usize = k.parse().map_err(|_| perr(no, "bad step number"))?;
                if k != chain.stages.len() {
                    return Err(perr(no, format!("expected step {}", chain.stages.len())));
                }
                let base = if *ids == "-" { ElementSet::new() } else { parse_ids(ids).map_err(|_| perr(no, "bad id list"))? };
                let ext = S::try_from(crate::format::read_file(&dir.join(file))?)?;
                let map = parse_map(pairs, no)?;
                let emb = Embedding::new(map.clone());
                if map.keys().copied().collect::<ElementSet>() != *ext.universe() || !emb.is_injective() {
                    return Err(perr(no, "map is not a bijection from the extension's universe"));
                }
                let fixed: BTreeMap<Element, Element> = map.iter().filter(|(_, v)| base.contains(v)).map(|(a, b)| (*a, *b)).collect();
                let ext_base: ElementSet = fixed.keys().copied().collect();
                if fixed.len() != base.len() || !strong_in(&base, &m) || !strong_in(&ext_base, &ext) {
                    return Err(Error::Precondition(format!("step {k}: base is not a strong copy in both structures")));
                }
                let renamed = ext.rename(&map);
                let outside: Vec<Element> = renamed.universe().difference(&base).copied().collect();
                if outside.iter().any(|e| m.universe().contains(e)) {
                    return Err(Error::Precondition(format!("step {k}: new elements already in the stage")));
                }
                let next = S::amalgamate(&m, &renamed, &base)?.amalgam;
                if !in_class(&next)? || !strong_in(m.universe(), &next) {
                    return Err(Error::Precondition(format!("step {k}: stage invariants fail")));
                }
                chain.log.push(ExtensionRecord { step: k, base, ext, map: emb });
                chain.stages.push(next.clone());
                m = next;
            }
            _ => return Err(perr(no, format!("unrecognised log line {l:?}"))),
        }
    }
    if m != last {
        return Err(Error::Precondition("replayed chain does not end in the stored stage".into()));
    }
    Ok(chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::iso::isomorphic_over;
    use crate::structures::{CliqueStructure, NaryStructure};

    fn schedule(kind: Kind, n: usize, r: usize, max: usize, bound: usize) -> GrowthSchedule {
        GrowthSchedule { kind, params: ClassParams::new(n, r).unwrap(), max_stage_size: max, extension_size_bound: bound, seed: 0 }
    }

    #[test]
    fn empty_schedule() {
        let c: Chain<NaryStructure> = grow(&schedule(Kind::Nary, 3, 1, 0, 3)).unwrap();
        assert_eq!(c.stages.len(), 1);
        assert!(c.last().is_empty());
        assert!(grow::<CliqueStructure>(&schedule(Kind::Nary, 3, 1, 5, 3)).is_err());
    }

    #[test]
    fn single_tuple_extension() {
        // only types of size 3 over the empty set fit in 3 elements after the first step
        let c: Chain<NaryStructure> = grow(&schedule(Kind::Nary, 3, 1, 3, 3)).unwrap();
        let first = &c.log[0];
        assert!(first.base.is_empty());
        let stage1 = &c.stages[1];
        assert!(isomorphic_over(&first.ext.rename(&first.map.map), stage1, &ElementSet::new()).unwrap().is_some());
        assert!(c.truncated);
    }

    #[test]
    fn stages_are_strong_chain() {
        let c: Chain<CliqueStructure> = grow(&schedule(Kind::Clique, 2, 1, 12, 3)).unwrap();
        for w in c.stages.windows(2) {
            assert!(in_class(&w[1]).unwrap());
            assert!(strong_in(w[0].universe(), &w[1]));
            assert!(w[1].validate().is_valid());
        }
        for rec in &c.log {
            let stage = &c.stages[rec.step];
            assert!(rec.map.is_embedding(&rec.ext, stage));
            assert!(strong_in(&rec.map.image(), stage));
        }
    }

    #[test]
    fn determinism_and_seed() {
        let s = schedule(Kind::Nary, 3, 1, 14, 3);
        let a: Chain<NaryStructure> = grow(&s).unwrap();
        let b: Chain<NaryStructure> = grow(&s).unwrap();
        assert_eq!(a, b);
        let t0 = extension_types::<NaryStructure>(s.params, 3, 0).unwrap();
        let t1 = extension_types::<NaryStructure>(s.params, 3, 1).unwrap();
        assert_eq!(t0.len(), t1.len());
        for (x, y) in t0.iter().zip(&t1) {
            assert_eq!((x.ext.len(), x.base.len()), (y.ext.len(), y.base.len()));
        }
    }

    #[test]
    fn genericity_check_examples() {
        let p = ClassParams::new(3, 1).unwrap();
        let m = NaryStructure::from_ids(p, &[0, 1, 2, 3], &[&[0, 1, 2]]).unwrap();
        let a = crate::structures::set_of([0, 1]);
        let b = m.induced(&a).unwrap();
        let e = genericity_check(&m, &a, &b).unwrap().unwrap();
        assert!(e.fixes(&a));
        let big = NaryStructure::from_ids(p, &[0, 1, 5, 6, 7], &[]).unwrap();
        assert!(genericity_check(&m, &a, &big).unwrap().is_none());
    }

    #[test]
    fn save_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let c: Chain<CliqueStructure> = grow(&schedule(Kind::Clique, 2, 1, 10, 3)).unwrap();
        save_chain(&c, dir.path()).unwrap();
        let back: Chain<CliqueStructure> = load_chain(dir.path()).unwrap();
        assert_eq!(back, c);
        assert!(load_chain::<NaryStructure>(dir.path()).is_err());
        let text = std::fs::read_to_string(dir.path().join(CHAIN_FILE)).unwrap();
        std::fs::write(dir.path().join(CHAIN_FILE), text.replace("step 1 ", "step 2 ")).unwrap();
        assert!(load_chain::<CliqueStructure>(dir.path()).is_err());
    }
}
