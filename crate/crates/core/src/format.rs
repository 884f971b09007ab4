//! Line-oriented text format for structures.
//!
//! ```text
//! kind nary
//! params n=3 r=1
//! universe 0 1 2
//! rel 0 1 2
//! end
//! ```
//!
//! Clique bodies use `clique (0,1)(1,2)` lines, one group per r-tuple.
//! Lines starting with `#` and blank lines are ignored.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::structures::{ClassParams, Clique, CliqueStructure, Element, ElementSet, Kind, NaryStructure, RTuple, Structure};

/// A structure of either kind, as read from a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyStructure {
    Nary(NaryStructure),
    Clique(CliqueStructure),
}

impl AnyStructure {
    pub fn kind(&self) -> Kind {
        match self {
            AnyStructure::Nary(_) => Kind::Nary,
            AnyStructure::Clique(_) => Kind::Clique,
        }
    }

    pub fn params(&self) -> ClassParams {
        match self {
            AnyStructure::Nary(a) => a.params(),
            AnyStructure::Clique(a) => a.params(),
        }
    }

    pub fn universe(&self) -> &ElementSet {
        match self {
            AnyStructure::Nary(a) => a.universe(),
            AnyStructure::Clique(a) => a.universe(),
        }
    }

    pub fn serialize(&self) -> String {
        match self {
            AnyStructure::Nary(a) => serialize_nary(a),
            AnyStructure::Clique(a) => serialize_clique(a),
        }
    }
}

impl From<NaryStructure> for AnyStructure {
    fn from(a: NaryStructure) -> Self {
        AnyStructure::Nary(a)
    }
}

impl From<CliqueStructure> for AnyStructure {
    fn from(a: CliqueStructure) -> Self {
        AnyStructure::Clique(a)
    }
}

impl TryFrom<AnyStructure> for NaryStructure {
    type Error = Error;
    fn try_from(a: AnyStructure) -> Result<Self> {
        match a {
            AnyStructure::Nary(a) => Ok(a),
            AnyStructure::Clique(_) => Err(Error::Precondition("expected an n-ary structure".into())),
        }
    }
}

impl TryFrom<AnyStructure> for CliqueStructure {
    type Error = Error;
    fn try_from(a: AnyStructure) -> Result<Self> {
        match a {
            AnyStructure::Clique(a) => Ok(a),
            AnyStructure::Nary(_) => Err(Error::Precondition("expected a clique structure".into())),
        }
    }
}

fn header<S: Structure>(a: &S, out: &mut String) {
    let p = a.params();
    let _ = writeln!(out, "kind {}", S::KIND);
    let _ = writeln!(out, "params n={} r={}", p.n(), p.r());
    let ids: Vec<String> = a.universe().iter().map(|e| e.to_string()).collect();
    if ids.is_empty() {
        out.push_str("universe\n");
    } else {
        let _ = writeln!(out, "universe {}", ids.join(" "));
    }
}

pub fn serialize_nary(a: &NaryStructure) -> String {
    let mut out = String::new();
    header(a, &mut out);
    for t in a.relation() {
        let ids: Vec<String> = t.iter().map(|e| e.to_string()).collect();
        let _ = writeln!(out, "rel {}", ids.join(" "));
    }
    out.push_str("end\n");
    out
}

pub fn serialize_clique(a: &CliqueStructure) -> String {
    let mut out = String::new();
    header(a, &mut out);
    for k in a.cliques() {
        let _ = writeln!(out, "clique {}", crate::structures::fmt_clique(k));
    }
    out.push_str("end\n");
    out
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_id(tok: &str, line: usize) -> Result<Element> {
    tok.parse::<u32>().map(Element).map_err(|_| perr(line, format!("expected a non-negative integer id, got `{tok}`")))
}

fn parse_param(tok: Option<&str>, key: &str, line: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| perr(line, format!("missing `{key}=`")))?;
    let val = tok.strip_prefix(key).and_then(|t| t.strip_prefix('=')).ok_or_else(|| perr(line, format!("expected `{key}=<int>`, got `{tok}`")))?;
    val.parse().map_err(|_| perr(line, format!("expected an integer after `{key}=`")))
}

fn parse_groups(text: &str, r: usize, line: usize) -> Result<Clique> {
    let mut clique = Clique::new();
    let mut rest = text.trim();
    if rest.is_empty() {
        return Err(perr(line, "empty clique"));
    }
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(|| perr(line, "expected `(`"))?;
        let close = body.find(')').ok_or_else(|| perr(line, "unclosed `(`"))?;
        let ids: Vec<Element> =
            body[..close].split(',').map(|t| parse_id(t.trim(), line)).collect::<Result<_>>()?;
        if ids.len() != r {
            return Err(perr(line, format!("tuple has {} entries, expected r={r}", ids.len())));
        }
        if !clique.insert(RTuple(ids)) {
            return Err(perr(line, "repeated tuple in clique"));
        }
        rest = body[close + 1..].trim_start();
    }
    Ok(clique)
}

/// Parse one structure. Validation of the class invariants is left to
/// [`Structure::validate`]; only syntax and arities are checked here.
pub fn parse(text: &str) -> Result<AnyStructure> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (ln, l) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let kind = match l.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["kind", "nary"] => Kind::Nary,
        ["kind", "clique"] => Kind::Clique,
        _ => return Err(perr(ln, "expected `kind nary` or `kind clique`")),
    };

    let (ln, l) = lines.next().ok_or_else(|| perr(ln + 1, "missing `params` line"))?;
    let mut toks = l.split_whitespace();
    if toks.next() != Some("params") {
        return Err(perr(ln, "expected `params n=<int> r=<int>`"));
    }
    let n = parse_param(toks.next(), "n", ln)?;
    let r = parse_param(toks.next(), "r", ln)?;
    if toks.next().is_some() {
        return Err(perr(ln, "trailing tokens after params"));
    }
    let params = ClassParams::new(n, r).map_err(|e| perr(ln, e.to_string()))?;

    let (ln, l) = lines.next().ok_or_else(|| perr(ln + 1, "missing `universe` line"))?;
    let mut toks = l.split_whitespace();
    if toks.next() != Some("universe") {
        return Err(perr(ln, "expected `universe <ids>`"));
    }
    let ids: Vec<Element> = toks.map(|t| parse_id(t, ln)).collect::<Result<_>>()?;
    if ids.windows(2).any(|w| w[0] >= w[1]) {
        return Err(perr(ln, "universe ids must be strictly ascending"));
    }
    let universe: ElementSet = ids.into_iter().collect();

    let mut tuples: BTreeSet<Vec<Element>> = BTreeSet::new();
    let mut cliques: BTreeSet<Clique> = BTreeSet::new();
    let mut last = ln;
    let mut ended = false;
    for (ln, l) in lines.by_ref() {
        last = ln;
        if l == "end" {
            ended = true;
            break;
        }
        match (kind, l.split_once(char::is_whitespace)) {
            (Kind::Nary, Some(("rel", rest))) => {
                let t: Vec<Element> = rest.split_whitespace().map(|x| parse_id(x, ln)).collect::<Result<_>>()?;
                if t.len() != n {
                    return Err(perr(ln, format!("tuple has {} entries, expected n={n}", t.len())));
                }
                if !tuples.insert(t) {
                    return Err(perr(ln, "repeated tuple"));
                }
            }
            (Kind::Clique, Some(("clique", rest))) => {
                if !cliques.insert(parse_groups(rest, r, ln)?) {
                    return Err(perr(ln, "repeated clique"));
                }
            }
            (Kind::Nary, _) => return Err(perr(ln, "expected `rel <ids>` or `end`")),
            (Kind::Clique, _) => return Err(perr(ln, "expected `clique (..)..` or `end`")),
        }
    }
    if !ended {
        return Err(perr(last + 1, "missing `end`"));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(perr(ln, "content after `end`"));
    }
    Ok(match kind {
        Kind::Nary => AnyStructure::Nary(NaryStructure::new(params, universe, tuples)),
        Kind::Clique => AnyStructure::Clique(CliqueStructure::new(params, universe, cliques)),
    })
}

pub fn parse_nary(text: &str) -> Result<NaryStructure> {
    match parse(text)? {
        AnyStructure::Nary(a) => Ok(a),
        AnyStructure::Clique(_) => Err(perr(1, "expected an n-ary structure")),
    }
}

pub fn parse_clique(text: &str) -> Result<CliqueStructure> {
    match parse(text)? {
        AnyStructure::Clique(a) => Ok(a),
        AnyStructure::Nary(_) => Err(perr(1, "expected a clique structure")),
    }
}

pub fn read_file(path: &Path) -> Result<AnyStructure> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn write_file(path: &Path, a: &AnyStructure) -> Result<()> {
    std::fs::write(path, a.serialize()).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Parse a whitespace- or comma-separated id list such as `0 3 5` or `0,3,5`.
pub fn parse_ids(text: &str) -> Result<ElementSet> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| parse_id(t, 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_nary() {
        let text = "kind nary\nparams n=3 r=1\nuniverse 0 1 2 3\nrel 0 1 2\nrel 1 2 3\nend\n";
        let a = parse(text).unwrap();
        assert_eq!(a.serialize(), text);
    }

    #[test]
    fn round_trip_clique() {
        let text = "kind clique\nparams n=3 r=2\nuniverse 0 1 2 3\nclique (0,1)(1,2)(2,3)\nend\n";
        let a = parse(text).unwrap();
        assert_eq!(a.serialize(), text);
    }

    #[test]
    fn canonical_sorting_and_comments() {
        let text = "# comment\nkind nary\nparams n=2 r=1\n\nuniverse 0 1 2\nrel 2 1\nrel 0 1\nend\n";
        let a = parse(text).unwrap();
        assert_eq!(a.serialize(), "kind nary\nparams n=2 r=1\nuniverse 0 1 2\nrel 0 1\nrel 2 1\nend\n");
        let empty = parse("kind clique\nparams n=2 r=1\nuniverse\nend\n").unwrap();
        assert!(empty.universe().is_empty());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("kind graph\n", 1),
            ("kind nary\nparams n=3 r=3\nuniverse\nend\n", 2),
            ("kind nary\nparams n=3 r=1\nuniverse 1 0\nend\n", 3),
            ("kind nary\nparams n=3 r=1\nuniverse 0 1\nrel 0 1\nend\n", 4),
            ("kind clique\nparams n=3 r=2\nuniverse 0 1\nclique (0,1)(1)\nend\n", 4),
            ("kind nary\nparams n=3 r=1\nuniverse 0 1\n", 4),
            ("kind nary\nparams n=3 r=1\nuniverse 0\nend\nrel 0 0 0\n", 5),
        ];
        for (text, line) in cases {
            match parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn id_lists() {
        assert_eq!(parse_ids("0, 3 5").unwrap().len(), 3);
        assert!(parse_ids("").unwrap().is_empty());
        assert!(parse_ids("a").is_err());
    }
}
