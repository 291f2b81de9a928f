//! Positivity certificates for extended Kronecker coefficients.
//!
//! A [`Certificate`] is a proof tree: leaves are axioms (an oracle check, the
//! trivial pairing `c(l, l, 1_n)`, or the symmetric tensor cube), inner nodes
//! apply the semigroup property (horizontal sums, vertical sums on an even
//! set of positions), conjugate a pair of entries, or permute entries.
//! [`verify_certificate`] recomputes every node from its children.
//!
//! The lemma builders at the bottom of this module assemble the standard
//! constructions from these pieces; [`LemmaRegistry`] exposes them by name.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use crate::characters::partitions_of;
use crate::error::{Error, Result};
use crate::kronecker::KroneckerOracle;
use crate::partition::{shared_row_lengths, Partition};

pub const FORMAT_MAGIC: &str = "kroncover-certificate";
pub const FORMAT_VERSION: u32 = 1;

/// The claim `c(l_1, .., l_k)`: the extended Kronecker coefficient is positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    entries: Vec<Partition>,
}

impl Relation {
    pub fn new(entries: Vec<Partition>) -> Result<Self> {
        if entries.len() < 3 {
            return Err(Error::invalid(format!(
                "a relation needs at least 3 entries, got {}",
                entries.len()
            )));
        }
        let n = entries[0].size();
        if let Some(bad) = entries.iter().find(|p| p.size() != n) {
            return Err(Error::invalid(format!(
                "relation entries must have equal sizes: {} vs {bad}",
                entries[0]
            )));
        }
        Ok(Relation { entries })
    }

    pub fn entries(&self) -> &[Partition] {
        &self.entries
    }

    pub fn arity(&self) -> usize {
        self.entries.len()
    }

    pub fn size(&self) -> usize {
        self.entries[0].size()
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.entries.iter().map(Partition::to_string).collect();
        write!(f, "c({})", items.join(", "))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubeProvenance {
    /// Positivity was confirmed by the oracle when the leaf was built.
    Verified,
    /// Too large for the oracle; relies on the symmetric tensor-cube lemma.
    Cited,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    Oracle { checked_at: usize },
    TrivialPair,
    SymmetricCube(CubeProvenance),
    Hsum,
    Vsum { conj: BTreeSet<usize> },
    ConjugatePair { i: usize, j: usize },
    /// `new[i] = old[perm[i]]`.
    Permute { perm: Vec<usize> },
}

impl Rule {
    fn tag(&self) -> &'static str {
        match self {
            Rule::Oracle { .. } => "oracle",
            Rule::TrivialPair => "trivial",
            Rule::SymmetricCube(_) => "symcube",
            Rule::Hsum => "hsum",
            Rule::Vsum { .. } => "vsum",
            Rule::ConjugatePair { .. } => "conjpair",
            Rule::Permute { .. } => "permute",
        }
    }

    fn arity(&self) -> usize {
        match self {
            Rule::Oracle { .. } | Rule::TrivialPair | Rule::SymmetricCube(_) => 0,
            Rule::Hsum | Rule::Vsum { .. } => 2,
            Rule::ConjugatePair { .. } | Rule::Permute { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    conclusion: Relation,
    rule: Rule,
    children: Vec<Certificate>,
}

impl Certificate {
    pub fn conclusion(&self) -> &Relation {
        &self.conclusion
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn children(&self) -> &[Certificate] {
        &self.children
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(Certificate::node_count).sum::<usize>()
    }

    /// Builds a node without checking it; [`verify_certificate`] will.
    pub fn from_parts(conclusion: Relation, rule: Rule, children: Vec<Certificate>) -> Self {
        Certificate {
            conclusion,
            rule,
            children,
        }
    }

    fn leaf(entries: Vec<Partition>, rule: Rule) -> Result<Self> {
        Ok(Certificate {
            conclusion: Relation::new(entries)?,
            rule,
            children: Vec::new(),
        })
    }
}

/// `c(l, l, 1_n)`.
pub fn axiom_trivial_pair(l: &Partition) -> Certificate {
    let n = l.size();
    Certificate::leaf(vec![l.clone(), l.clone(), Partition::row(n)], Rule::TrivialPair)
        .expect("equal sizes")
}

/// `c(l, l, l)` for symmetric `l`, oracle-confirmed when within the cap.
pub fn axiom_symmetric_cube(l: &Partition, oracle: &KroneckerOracle) -> Result<Certificate> {
    if !l.is_symmetric() {
        return Err(Error::precondition(format!("{l} is not self-conjugate")));
    }
    let entries = vec![l.clone(), l.clone(), l.clone()];
    let provenance = if l.size() <= oracle.caps().oracle {
        if !oracle.is_positive(&entries)? {
            return Err(Error::Inconsistency(format!("g({l}, {l}, {l}) = 0")));
        }
        CubeProvenance::Verified
    } else {
        CubeProvenance::Cited
    };
    Certificate::leaf(entries, Rule::SymmetricCube(provenance))
}

/// A leaf whose positivity is checked by the oracle now.
pub fn axiom_oracle(entries: Vec<Partition>, oracle: &KroneckerOracle) -> Result<Certificate> {
    let rel = Relation::new(entries)?;
    if !oracle.is_positive(rel.entries())? {
        return Err(Error::Inconsistency(format!("{rel} does not hold")));
    }
    let n = rel.size();
    Certificate::leaf(rel.entries, Rule::Oracle { checked_at: n })
}

fn check_arity(a: &Certificate, b: &Certificate) -> Result<usize> {
    let k = a.conclusion.arity();
    if k != b.conclusion.arity() {
        return Err(Error::invalid(format!(
            "cannot combine relations of arity {k} and {}",
            b.conclusion.arity()
        )));
    }
    Ok(k)
}

fn combined_entries(a: &Relation, b: &Relation, conj: &BTreeSet<usize>) -> Vec<Partition> {
    a.entries
        .iter()
        .zip(&b.entries)
        .enumerate()
        .map(|(i, (x, y))| if conj.contains(&i) { x.vsum(y) } else { x.hsum(y) })
        .collect()
}

pub fn combine_hsum(a: Certificate, b: Certificate) -> Result<Certificate> {
    check_arity(&a, &b)?;
    let entries = combined_entries(&a.conclusion, &b.conclusion, &BTreeSet::new());
    Ok(Certificate {
        conclusion: Relation::new(entries)?,
        rule: Rule::Hsum,
        children: vec![a, b],
    })
}

/// Vertical sums at `conj`, horizontal sums elsewhere. `conj` must have even
/// size: vertically adding an odd number of entries is unsound, e.g.
/// `c((1),(1),(1))` with itself would give `c((1,1),(1,1),(1,1))`, false in `S_2`.
pub fn combine_vsum(a: Certificate, b: Certificate, conj: &BTreeSet<usize>) -> Result<Certificate> {
    let k = check_arity(&a, &b)?;
    check_conj_set(conj, k)?;
    let entries = combined_entries(&a.conclusion, &b.conclusion, conj);
    Ok(Certificate {
        conclusion: Relation::new(entries)?,
        rule: Rule::Vsum { conj: conj.clone() },
        children: vec![a, b],
    })
}

fn check_conj_set(conj: &BTreeSet<usize>, k: usize) -> Result<()> {
    if !conj.len().is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "vertical sums need an even number of positions, got {}; \
             conjugating an odd number of entries does not preserve positivity",
            conj.len()
        )));
    }
    if let Some(bad) = conj.iter().find(|&&i| i >= k) {
        return Err(Error::invalid(format!("position {bad} out of range for arity {k}")));
    }
    Ok(())
}

pub fn conjugate_pair(a: Certificate, i: usize, j: usize) -> Result<Certificate> {
    let k = a.conclusion.arity();
    if i == j || i >= k || j >= k {
        return Err(Error::invalid(format!(
            "invalid conjugation positions ({i}, {j}) for arity {k}"
        )));
    }
    let mut entries = a.conclusion.entries.clone();
    entries[i] = entries[i].conjugate();
    entries[j] = entries[j].conjugate();
    Ok(Certificate {
        conclusion: Relation::new(entries)?,
        rule: Rule::ConjugatePair { i, j },
        children: vec![a],
    })
}

pub fn permute(a: Certificate, perm: &[usize]) -> Result<Certificate> {
    check_perm(perm, a.conclusion.arity())?;
    let entries = perm.iter().map(|&p| a.conclusion.entries[p].clone()).collect();
    Ok(Certificate {
        conclusion: Relation::new(entries)?,
        rule: Rule::Permute {
            perm: perm.to_vec(),
        },
        children: vec![a],
    })
}

fn check_perm(perm: &[usize], k: usize) -> Result<()> {
    let set: BTreeSet<usize> = perm.iter().copied().collect();
    if perm.len() != k || set.len() != k || set.iter().any(|&p| p >= k) {
        return Err(Error::invalid(format!("{perm:?} is not a permutation of 0..{k}")));
    }
    Ok(())
}

/// Folds `certs` with horizontal sums.
pub fn hsum_many(certs: Vec<Certificate>) -> Result<Certificate> {
    fold(certs, combine_hsum)
}

/// Folds `certs` with vertical sums at `conj`.
pub fn vsum_many(certs: Vec<Certificate>, conj: &BTreeSet<usize>) -> Result<Certificate> {
    fold(certs, |a, b| combine_vsum(a, b, conj))
}

fn fold(
    certs: Vec<Certificate>,
    f: impl FnMut(Certificate, Certificate) -> Result<Certificate>,
) -> Result<Certificate> {
    let mut it = certs.into_iter();
    let first = it.next().ok_or_else(|| Error::invalid("nothing to combine"))?;
    it.try_fold(first, f)
}

fn conj_set(positions: &[usize]) -> BTreeSet<usize> {
    positions.iter().copied().collect()
}

// ---------------------------------------------------------------------------
// Verification

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Recompute every node from its children and rule.
    Structural,
    /// Additionally re-check oracle and cube leaves within the cap.
    Leaves,
    /// Additionally check the root relation itself within the cap;
    /// `root_checked` reports whether that happened.
    Full,
}

impl std::str::FromStr for VerifyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "structural" => Ok(VerifyMode::Structural),
            "leaves" => Ok(VerifyMode::Leaves),
            "full" => Ok(VerifyMode::Full),
            _ => Err(Error::invalid(format!("unknown verification mode {s:?}"))),
        }
    }
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerifyMode::Structural => "structural",
            VerifyMode::Leaves => "leaves",
            VerifyMode::Full => "full",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unverified {
    pub path: Vec<usize>,
    pub relation: Relation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub mode: VerifyMode,
    pub nodes: usize,
    pub oracle_checks: usize,
    /// Axiom leaves too large to re-check; their truth is assumed.
    pub unverified: Vec<Unverified>,
    pub root_checked: bool,
}

impl VerifyReport {
    pub fn path_string(path: &[usize]) -> String {
        crate::error::display_path(path)
    }
}

#[derive(Default)]
struct Tally {
    nodes: usize,
    oracle_checks: usize,
    unverified: Vec<Unverified>,
}

impl Tally {
    fn merge(&mut self, other: Tally) {
        self.nodes += other.nodes;
        self.oracle_checks += other.oracle_checks;
        self.unverified.extend(other.unverified);
    }
}

pub fn verify_certificate(
    cert: &Certificate,
    mode: VerifyMode,
    oracle: &KroneckerOracle,
) -> Result<VerifyReport> {
    let mut path = Vec::new();
    let mut tally = verify_node(cert, mode, oracle, &mut path)?;
    let mut root_checked = false;
    if mode == VerifyMode::Full {
        let rel = &cert.conclusion;
        if rel.size() <= oracle.caps().oracle {
            tally.oracle_checks += 1;
            if !oracle.is_positive(rel.entries())? {
                return Err(Error::Verification {
                    path: Vec::new(),
                    reason: format!("oracle reports {rel} is false"),
                });
            }
            root_checked = true;
        }
    }
    Ok(VerifyReport {
        mode,
        nodes: tally.nodes,
        oracle_checks: tally.oracle_checks,
        unverified: tally.unverified,
        root_checked,
    })
}

fn fail(path: &[usize], reason: String) -> Error {
    Error::Verification {
        path: path.to_vec(),
        reason,
    }
}

fn verify_node(
    cert: &Certificate,
    mode: VerifyMode,
    oracle: &KroneckerOracle,
    path: &mut Vec<usize>,
) -> Result<Tally> {
    let rel = &cert.conclusion;
    if Relation::new(rel.entries.clone()).is_err() {
        return Err(fail(path, format!("malformed relation {rel}")));
    }
    if cert.children.len() != cert.rule.arity() {
        return Err(fail(
            path,
            format!(
                "rule {} expects {} children, found {}",
                cert.rule.tag(),
                cert.rule.arity(),
                cert.children.len()
            ),
        ));
    }

    let results: Vec<Result<Tally>> = cert
        .children
        .par_iter()
        .enumerate()
        .map(|(i, child)| {
            let mut p = path.clone();
            p.push(i);
            verify_node(child, mode, oracle, &mut p)
        })
        .collect();
    let mut tally = Tally {
        nodes: 1,
        ..Tally::default()
    };
    for r in results {
        tally.merge(r?);
    }

    let expected: Vec<Partition> = match &cert.rule {
        Rule::TrivialPair => {
            let l = &rel.entries[0];
            vec![l.clone(), l.clone(), Partition::row(l.size())]
        }
        Rule::SymmetricCube(_) => {
            let l = &rel.entries[0];
            if !l.is_symmetric() {
                return Err(fail(path, format!("{l} is not self-conjugate")));
            }
            vec![l.clone(), l.clone(), l.clone()]
        }
        Rule::Oracle { checked_at } => {
            if *checked_at != rel.size() {
                return Err(fail(
                    path,
                    format!("leaf claims size {checked_at} but {rel} has size {}", rel.size()),
                ));
            }
            rel.entries.clone()
        }
        Rule::Hsum | Rule::Vsum { .. } => {
            let (a, b) = (&cert.children[0].conclusion, &cert.children[1].conclusion);
            if a.arity() != b.arity() {
                return Err(fail(path, "children have different arities".into()));
            }
            let conj = match &cert.rule {
                Rule::Vsum { conj } => {
                    check_conj_set(conj, a.arity()).map_err(|e| fail(path, e.to_string()))?;
                    conj.clone()
                }
                _ => BTreeSet::new(),
            };
            combined_entries(a, b, &conj)
        }
        Rule::ConjugatePair { i, j } => {
            let a = &cert.children[0].conclusion;
            let k = a.arity();
            if i == j || *i >= k || *j >= k {
                return Err(fail(path, format!("invalid conjugation positions ({i}, {j})")));
            }
            let mut e = a.entries.clone();
            e[*i] = e[*i].conjugate();
            e[*j] = e[*j].conjugate();
            e
        }
        Rule::Permute { perm } => {
            let a = &cert.children[0].conclusion;
            check_perm(perm, a.arity()).map_err(|e| fail(path, e.to_string()))?;
            perm.iter().map(|&p| a.entries[p].clone()).collect()
        }
    };
    if expected != rel.entries {
        let shown = Relation { entries: expected };
        return Err(fail(
            path,
            format!("{} rule yields {shown}, node claims {rel}", cert.rule.tag()),
        ));
    }

    let needs_oracle = matches!(cert.rule, Rule::Oracle { .. } | Rule::SymmetricCube(_));
    if needs_oracle && mode != VerifyMode::Structural {
        if rel.size() <= oracle.caps().oracle {
            tally.oracle_checks += 1;
            if !oracle.is_positive(rel.entries())? {
                return Err(fail(path, format!("oracle reports {rel} is false")));
            }
        } else {
            tally.unverified.push(Unverified {
                path: path.clone(),
                relation: rel.clone(),
            });
        }
    }
    Ok(tally)
}

// ---------------------------------------------------------------------------
// Text format

fn rule_args(rule: &Rule, children: &[usize]) -> String {
    let ids: Vec<String> = children.iter().map(usize::to_string).collect();
    let mut parts = vec![rule.tag().to_string()];
    parts.extend(ids);
    match rule {
        Rule::Oracle { checked_at } => parts.push(format!("n={checked_at}")),
        Rule::SymmetricCube(p) => parts.push(
            match p {
                CubeProvenance::Verified => "verified",
                CubeProvenance::Cited => "cited",
            }
            .into(),
        ),
        Rule::Vsum { conj } => {
            let c: Vec<String> = conj.iter().map(usize::to_string).collect();
            parts.push(format!("conj={}", c.join(",")));
        }
        Rule::ConjugatePair { i, j } => parts.push(format!("pair={i},{j}")),
        Rule::Permute { perm } => {
            let c: Vec<String> = perm.iter().map(usize::to_string).collect();
            parts.push(format!("perm={}", c.join(",")));
        }
        Rule::TrivialPair | Rule::Hsum => {}
    }
    parts.join(" ")
}

/// Serializes nodes in post-order, one per line.
pub fn serialize(cert: &Certificate) -> String {
    fn walk(c: &Certificate, out: &mut Vec<String>) -> usize {
        let ids: Vec<usize> = c.children.iter().map(|ch| walk(ch, out)).collect();
        let id = out.len();
        let entries: Vec<String> = c.conclusion.entries.iter().map(Partition::to_string).collect();
        out.push(format!("node {id} {} | {}", rule_args(&c.rule, &ids), entries.join(" ")));
        id
    }
    let mut lines = Vec::new();
    let root = walk(cert, &mut lines);
    let mut s = format!("{FORMAT_MAGIC}\nversion {FORMAT_VERSION}\n");
    for l in lines {
        s.push_str(&l);
        s.push('\n');
    }
    s.push_str(&format!("root {root}\n"));
    s
}

fn parse_list(s: &str, line: usize) -> Result<Vec<usize>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| {
            x.parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad index {x:?}"),
            })
        })
        .collect()
}

pub fn deserialize(text: &str) -> Result<Certificate> {
    let bad = |line: usize, message: String| Error::Parse { line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, l)) if l == FORMAT_MAGIC => {}
        other => {
            return Err(bad(1, format!("expected {FORMAT_MAGIC:?}, found {:?}", other.map(|o| o.1))))
        }
    }
    match lines.next() {
        Some((_, l)) if l == format!("version {FORMAT_VERSION}") => {}
        Some((ln, l)) => return Err(bad(ln, format!("unsupported version line {l:?}"))),
        None => return Err(bad(2, "missing version line".into())),
    }

    let mut nodes: BTreeMap<usize, Option<Certificate>> = BTreeMap::new();
    for (ln, line) in lines {
        if let Some(rest) = line.strip_prefix("root ") {
            let id: usize = rest.parse().map_err(|_| bad(ln, format!("bad root {rest:?}")))?;
            if id + 1 != nodes.len() {
                return Err(bad(ln, "root must be the last node".into()));
            }
            let root = nodes
                .remove(&id)
                .flatten()
                .ok_or_else(|| bad(ln, format!("root {id} is already used as a child")))?;
            if nodes.values().any(Option::is_some) {
                return Err(bad(ln, "some nodes are not reachable from the root".into()));
            }
            return Ok(root);
        }
        let (head, entries) = line
            .split_once(" | ")
            .ok_or_else(|| bad(ln, "expected 'node <id> <rule> ... | <entries>'".into()))?;
        let mut words = head.split(' ');
        if words.next() != Some("node") {
            return Err(bad(ln, format!("unexpected line {line:?}")));
        }
        let id: usize = words
            .next()
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| bad(ln, "missing node id".into()))?;
        if id != nodes.len() {
            return Err(bad(ln, format!("node ids must be consecutive, expected {}", nodes.len())));
        }
        let tag = words.next().ok_or_else(|| bad(ln, "missing rule".into()))?;
        let args: Vec<&str> = words.collect();
        let (child_ids, rest) = {
            let k = match tag {
                "oracle" | "trivial" | "symcube" => 0,
                "hsum" | "vsum" => 2,
                "conjpair" | "permute" => 1,
                _ => return Err(bad(ln, format!("unknown rule {tag:?}"))),
            };
            if args.len() < k {
                return Err(bad(ln, format!("rule {tag} needs {k} children")));
            }
            let ids = args[..k]
                .iter()
                .map(|w| w.parse::<usize>().map_err(|_| bad(ln, format!("bad child id {w:?}"))))
                .collect::<Result<Vec<_>>>()?;
            (ids, &args[k..])
        };
        let value = |key: &str| -> Result<&str> {
            match rest {
                [one] => one
                    .strip_prefix(key)
                    .and_then(|v| v.strip_prefix('='))
                    .ok_or_else(|| bad(ln, format!("expected {key}=..."))),
                _ => Err(bad(ln, format!("expected a single {key}=... argument"))),
            }
        };
        let rule = match tag {
            "oracle" => Rule::Oracle {
                checked_at: value("n")?.parse().map_err(|_| bad(ln, "bad n".into()))?,
            },
            "trivial" | "hsum" if !rest.is_empty() => {
                return Err(bad(ln, format!("rule {tag} takes no arguments")))
            }
            "trivial" => Rule::TrivialPair,
            "hsum" => Rule::Hsum,
            "symcube" => match rest {
                ["verified"] => Rule::SymmetricCube(CubeProvenance::Verified),
                ["cited"] => Rule::SymmetricCube(CubeProvenance::Cited),
                _ => return Err(bad(ln, "symcube needs verified or cited".into())),
            },
            "vsum" => Rule::Vsum {
                conj: parse_list(value("conj")?, ln)?.into_iter().collect(),
            },
            "conjpair" => match parse_list(value("pair")?, ln)?.as_slice() {
                [i, j] => Rule::ConjugatePair { i: *i, j: *j },
                _ => return Err(bad(ln, "pair needs two positions".into())),
            },
            _ => Rule::Permute {
                perm: parse_list(value("perm")?, ln)?,
            },
        };
        let entries = entries
            .split(' ')
            .map(|e| e.parse::<Partition>().map_err(|err| bad(ln, err.to_string())))
            .collect::<Result<Vec<_>>>()?;
        let conclusion = Relation::new(entries).map_err(|e| bad(ln, e.to_string()))?;
        let mut children = Vec::with_capacity(child_ids.len());
        for c in child_ids {
            let slot = nodes
                .get_mut(&c)
                .ok_or_else(|| bad(ln, format!("child {c} is not an earlier node")))?;
            children.push(
                slot.take()
                    .ok_or_else(|| bad(ln, format!("child {c} is used twice")))?,
            );
        }
        nodes.insert(
            id,
            Some(Certificate {
                conclusion,
                rule,
                children,
            }),
        );
    }
    Err(bad(0, "missing root line".into()))
}

// ---------------------------------------------------------------------------
// Lemma builders

/// `c(Rect(ab+c, a), Rect(ab+c, a), Rect(ab, a) +_H 1_{ac})` from `b` copies
/// of the cube of the `a x a` square and one trivial pairing.
pub fn lemma_rectcube(a: usize, b: usize, c: usize, oracle: &KroneckerOracle) -> Result<Certificate> {
    if a == 0 || b == 0 {
        return Err(Error::invalid("rectcube needs a, b >= 1"));
    }
    let square = axiom_symmetric_cube(&Partition::rect(a, a), oracle)?;
    let cube = hsum_many(vec![square; b])?;
    if c == 0 {
        return Ok(cube);
    }
    combine_hsum(cube, axiom_trivial_pair(&Partition::rect(c, a)))
}

/// `c(Rect(xyz, xz), Rect(xyz, xz), Rect(yz^2, x^2))`.
pub fn lemma_rectsquare(x: usize, y: usize, z: usize) -> Result<Certificate> {
    if x == 0 || y == 0 || z == 0 {
        return Err(Error::invalid("rectsquare needs x, y, z >= 1"));
    }
    // c(R, R, 1^{x^2}) for the symmetric square R
    let base = conjugate_pair(axiom_trivial_pair(&Partition::rect(x, x)), 1, 2)?;
    let row = hsum_many(vec![base; y * z])?;
    vsum_many(vec![row; z], &conj_set(&[0, 1]))
}

/// Returns a certificate for `c(Rect(2k,2k) x3, w)` and the witness `w`,
/// the vertical sum of `(2k+2j, 2k-2j)` for `j = 1..k`.
pub fn lemma_squarecube(k: usize, oracle: &KroneckerOracle) -> Result<(Certificate, Partition)> {
    if k == 0 {
        return Err(Error::invalid("squarecube needs k >= 1"));
    }
    let sq = Partition::rect(2, 2);
    let with = |last: Partition| axiom_oracle(vec![sq.clone(), sq.clone(), sq.clone(), last], oracle);
    let row = with(Partition::row(4))?;
    let two = with(sq.clone())?;
    let mut layers = Vec::with_capacity(k);
    for j in 1..=k {
        let mut parts = vec![row.clone(); j];
        parts.extend(std::iter::repeat_n(two.clone(), k - j));
        layers.push(hsum_many(parts)?);
    }
    let cert = vsum_many(layers, &conj_set(&[0, 1, 2, 3]))?;
    let witness = cert.conclusion.entries[3].clone();
    Ok((cert, witness))
}

/// `c(Hook(a,b), Hook(a,b), Hook(max(a,b), min(a,b)))`.
pub fn lemma_hookidempotent(a: usize, b: usize, oracle: &KroneckerOracle) -> Result<Certificate> {
    if a == 0 || b == 0 {
        return Err(Error::invalid("hookidempotent needs a, b >= 1"));
    }
    let (hi, lo) = (a.max(b), a.min(b));
    let mut cert = axiom_symmetric_cube(&Partition::hook(lo, lo), oracle)?;
    if hi > lo {
        cert = combine_hsum(cert, axiom_trivial_pair(&Partition::row(hi - lo)))?;
    }
    if a < b {
        cert = conjugate_pair(cert, 0, 1)?;
    }
    Ok(cert)
}

/// `c(Hook(x,y), Hook(x,y), Rect(2, m-1) +_H 1_{x+y-2m+1})` for `x, y >= m`.
pub fn lemma_hooksquare(x: usize, y: usize, m: usize) -> Result<Certificate> {
    if m == 0 || x < m || y < m {
        return Err(Error::precondition(format!(
            "hooksquare needs x, y >= m >= 1, got x={x} y={y} m={m}"
        )));
    }
    if m == 1 {
        return Ok(axiom_trivial_pair(&Partition::hook(x, y)));
    }
    let col = Partition::column(m - 1);
    let row = Partition::row(m - 1);
    // c(1^{m-1}, 1_{m-1}, 1^{m-1}) and c(1_{m-1}, 1^{m-1}, 1^{m-1})
    let left = conjugate_pair(axiom_trivial_pair(&row), 0, 2)?;
    let right = conjugate_pair(axiom_trivial_pair(&row), 1, 2)?;
    debug_assert_eq!(left.conclusion.entries[0], col);
    let mut cert = combine_hsum(left, right)?;
    if x > m {
        cert = combine_hsum(cert, axiom_trivial_pair(&Partition::row(x - m)))?;
    }
    // c(1^{y-m+1}, 1^{y-m+1}, 1_{y-m+1})
    let tail = axiom_trivial_pair(&Partition::column(y - m + 1));
    combine_vsum(cert, tail, &conj_set(&[0, 1]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieriVariant {
    TwoRow,
    Hook,
}

impl std::str::FromStr for PieriVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_row" | "two-row" => Ok(PieriVariant::TwoRow),
            "hook" => Ok(PieriVariant::Hook),
            _ => Err(Error::invalid(format!("unknown pieri variant {s:?}"))),
        }
    }
}

/// Two-row: `c((n-k,k), mu +_H 1_k, mu +_V 1_k)`.
/// Hook: `c(Hook(n-k+1,k), mu +_H 1_k, mu +_H 1^k)`. Here `n = |mu| + k`.
pub fn lemma_pieri(mu: &Partition, k: usize, variant: PieriVariant) -> Result<Certificate> {
    if k == 0 {
        return Err(Error::invalid("pieri needs k >= 1"));
    }
    // c(1_{|mu|}, mu, mu)
    let base = permute(axiom_trivial_pair(mu), &[2, 0, 1])?;
    match variant {
        PieriVariant::TwoRow => {
            if mu.size() < k {
                return Err(Error::precondition(format!(
                    "two-row pieri needs |mu| >= k, got |mu|={} k={k}",
                    mu.size()
                )));
            }
            combine_vsum(base, axiom_trivial_pair(&Partition::row(k)), &conj_set(&[0, 2]))
        }
        PieriVariant::Hook => {
            let strip = conjugate_pair(axiom_trivial_pair(&Partition::row(k)), 0, 2)?;
            combine_hsum(base, strip)
        }
    }
}

/// Finds `theta |- 2d`, `d = d(l, lt)`, with `c(l, lt, 1_{n-2d} +_H theta)`,
/// searching in reverse-lexicographic order.
pub fn lemma_neartensor(
    l: &Partition,
    lt: &Partition,
    oracle: &KroneckerOracle,
) -> Result<(Certificate, Partition)> {
    let d = l.blockwise_distance(lt)?;
    let n = l.size();
    if 2 * d > n {
        return Err(Error::precondition(format!(
            "blockwise distance {d} exceeds n/2 for n={n}"
        )));
    }
    if d == 0 {
        return Ok((axiom_trivial_pair(l), Partition::empty()));
    }
    let strip = Partition::row(n - 2 * d);
    for theta in partitions_of(2 * d) {
        let third = strip.hsum(&theta);
        let entries = vec![l.clone(), lt.clone(), third];
        if oracle.is_positive(&entries)? {
            let checked_at = n;
            return Ok((
                Certificate::leaf(entries, Rule::Oracle { checked_at })?,
                theta,
            ));
        }
    }
    Err(Error::Inconsistency(format!(
        "no theta of size {} gives a relation for {l}, {lt}",
        2 * d
    )))
}

/// `c(l, lt, 1_m +_H theta +_H nu)` with `m = n - 2d - r(r+1)/2`, where the
/// `r` largest shared row lengths are split off as staircases.
pub fn lemma_nearsharedrows(
    l: &Partition,
    lt: &Partition,
    r: usize,
    nu: &Partition,
    oracle: &KroneckerOracle,
) -> Result<(Certificate, Partition)> {
    if l.size() != lt.size() {
        return Err(Error::invalid("nearsharedrows needs equal sizes"));
    }
    let shared = shared_row_lengths(&[l.clone(), lt.clone()])?;
    if r == 0 || shared.len() < r {
        return Err(Error::precondition(format!(
            "{l} and {lt} share {} row lengths, need r = {r} >= 1",
            shared.len()
        )));
    }
    let stair = Partition::staircase(r);
    if nu.size() != stair.size() {
        return Err(Error::precondition(format!("{nu} is not a partition of {}", stair.size())));
    }
    let chosen: Vec<usize> = shared.iter().rev().take(r).copied().collect();
    let (chi, gamma) = l.staircase_decompose(r, Some(&chosen))?;
    let (chi_t, gamma_t) = lt.staircase_decompose(r, Some(&chosen))?;
    debug_assert_eq!(gamma, gamma_t);
    let stairs = axiom_oracle(vec![stair.clone(), stair, nu.clone()], oracle).map_err(|e| match e {
        Error::Inconsistency(_) => Error::precondition(format!("{nu} is not in the staircase tensor square")),
        other => other,
    })?;
    let shared_part = combine_hsum(stairs, axiom_trivial_pair(&gamma))?;
    let (near, theta) = if chi.is_empty() {
        (axiom_trivial_pair(&chi), Partition::empty())
    } else {
        lemma_neartensor(&chi, &chi_t, oracle)?
    };
    let cert = combine_vsum(near, shared_part, &conj_set(&[0, 1]))?;
    Ok((cert, theta))
}

// ---------------------------------------------------------------------------
// Registry

/// A named certificate construction with string parameters.
pub trait LemmaBuilder: Send + Sync {
    fn name(&self) -> &'static str;
    fn usage(&self) -> &'static str;
    fn build(&self, args: &[String], oracle: &KroneckerOracle) -> Result<Certificate>;
}

fn arg_count(args: &[String], want: usize, usage: &str) -> Result<()> {
    if args.len() != want {
        return Err(Error::invalid(format!("expected {want} arguments: {usage}")));
    }
    Ok(())
}

fn num(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::invalid(format!("expected a nonnegative integer, got {s:?}")))
}

fn part(s: &str) -> Result<Partition> {
    s.parse()
}

macro_rules! builder {
    ($ty:ident, $name:literal, $usage:literal, |$args:ident, $oracle:ident| $body:expr) => {
        struct $ty;

        impl LemmaBuilder for $ty {
            fn name(&self) -> &'static str {
                $name
            }

            fn usage(&self) -> &'static str {
                $usage
            }

            fn build(&self, $args: &[String], $oracle: &KroneckerOracle) -> Result<Certificate> {
                $body
            }
        }
    };
}

builder!(TrivialPairBuilder, "trivialpair", "<l>", |args, _o| {
    arg_count(args, 1, "<l>")?;
    Ok(axiom_trivial_pair(&part(&args[0])?))
});
builder!(SymCubeBuilder, "symcube", "<l>", |args, o| {
    arg_count(args, 1, "<l>")?;
    axiom_symmetric_cube(&part(&args[0])?, o)
});
builder!(RectCubeBuilder, "rectcube", "<a> <b> <c>", |args, o| {
    arg_count(args, 3, "<a> <b> <c>")?;
    lemma_rectcube(num(&args[0])?, num(&args[1])?, num(&args[2])?, o)
});
builder!(RectSquareBuilder, "rectsquare", "<x> <y> <z>", |args, _o| {
    arg_count(args, 3, "<x> <y> <z>")?;
    lemma_rectsquare(num(&args[0])?, num(&args[1])?, num(&args[2])?)
});
builder!(SquareCubeBuilder, "squarecube", "<k>", |args, o| {
    arg_count(args, 1, "<k>")?;
    Ok(lemma_squarecube(num(&args[0])?, o)?.0)
});
builder!(HookIdempotentBuilder, "hookidempotent", "<a> <b>", |args, o| {
    arg_count(args, 2, "<a> <b>")?;
    lemma_hookidempotent(num(&args[0])?, num(&args[1])?, o)
});
builder!(HookSquareBuilder, "hooksquare", "<x> <y> <m>", |args, _o| {
    arg_count(args, 3, "<x> <y> <m>")?;
    lemma_hooksquare(num(&args[0])?, num(&args[1])?, num(&args[2])?)
});
builder!(PieriBuilder, "pieri", "<mu> <k> <two_row|hook>", |args, _o| {
    arg_count(args, 3, "<mu> <k> <two_row|hook>")?;
    lemma_pieri(&part(&args[0])?, num(&args[1])?, args[2].parse()?)
});
builder!(NearTensorBuilder, "neartensor", "<l> <lt>", |args, o| {
    arg_count(args, 2, "<l> <lt>")?;
    Ok(lemma_neartensor(&part(&args[0])?, &part(&args[1])?, o)?.0)
});
builder!(NearSharedRowsBuilder, "nearsharedrows", "<l> <lt> <r> <nu>", |args, o| {
    arg_count(args, 4, "<l> <lt> <r> <nu>")?;
    Ok(lemma_nearsharedrows(&part(&args[0])?, &part(&args[1])?, num(&args[2])?, &part(&args[3])?, o)?.0)
});

pub struct LemmaRegistry {
    builders: BTreeMap<&'static str, Box<dyn LemmaBuilder>>,
}

impl Default for LemmaRegistry {
    fn default() -> Self {
        let mut r = LemmaRegistry {
            builders: BTreeMap::new(),
        };
        r.register(Box::new(TrivialPairBuilder));
        r.register(Box::new(SymCubeBuilder));
        r.register(Box::new(RectCubeBuilder));
        r.register(Box::new(RectSquareBuilder));
        r.register(Box::new(SquareCubeBuilder));
        r.register(Box::new(HookIdempotentBuilder));
        r.register(Box::new(HookSquareBuilder));
        r.register(Box::new(PieriBuilder));
        r.register(Box::new(NearTensorBuilder));
        r.register(Box::new(NearSharedRowsBuilder));
        r
    }
}

impl LemmaRegistry {
    pub fn register(&mut self, b: Box<dyn LemmaBuilder>) {
        self.builders.insert(b.name(), b);
    }

    pub fn get(&self, name: &str) -> Option<&dyn LemmaBuilder> {
        self.builders.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.builders.keys().copied()
    }

    pub fn build(&self, name: &str, args: &[String], oracle: &KroneckerOracle) -> Result<Certificate> {
        let b = self.get(name).ok_or_else(|| {
            let known: Vec<&str> = self.names().collect();
            Error::invalid(format!("unknown lemma {name:?}; known: {}", known.join(", ")))
        })?;
        b.build(args, oracle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::part;

    fn oracle() -> KroneckerOracle {
        KroneckerOracle::default()
    }

    fn entries(c: &Certificate) -> Vec<Partition> {
        c.conclusion().entries().to_vec()
    }

    #[test]
    fn axioms() {
        let o = oracle();
        assert_eq!(entries(&axiom_trivial_pair(&part![2, 1])), vec![part![2, 1], part![2, 1], part![3]]);
        let cube = axiom_symmetric_cube(&part![2, 1], &o).unwrap();
        assert_eq!(cube.rule(), &Rule::SymmetricCube(CubeProvenance::Verified));
        assert!(matches!(
            axiom_symmetric_cube(&part![2], &o),
            Err(Error::Precondition(_))
        ));
        let big = Partition::staircase(6);
        let cited = axiom_symmetric_cube(&big, &o).unwrap();
        assert_eq!(cited.rule(), &Rule::SymmetricCube(CubeProvenance::Cited));
        assert!(axiom_oracle(vec![part![2, 1], part![2, 1], part![2]], &o).is_err());
    }

    #[test]
    fn combination_rules() {
        let one = axiom_trivial_pair(&part![1]);
        let two = combine_hsum(one.clone(), one.clone()).unwrap();
        assert_eq!(entries(&two), vec![part![2]; 3]);
        assert!(combine_vsum(one.clone(), one.clone(), &conj_set(&[0, 1, 2])).is_err());
        let same = combine_vsum(one.clone(), one.clone(), &BTreeSet::new()).unwrap();
        assert_eq!(entries(&same), entries(&two));
        let empty = axiom_trivial_pair(&Partition::empty());
        let id = combine_hsum(two.clone(), empty).unwrap();
        assert_eq!(entries(&id), entries(&two));
        let sign = conjugate_pair(axiom_trivial_pair(&part![2, 1]), 1, 2).unwrap();
        assert_eq!(entries(&sign), vec![part![2, 1], part![2, 1], part![1, 1, 1]]);
        let back = conjugate_pair(sign, 1, 2).unwrap();
        assert_eq!(entries(&back), vec![part![2, 1], part![2, 1], part![3]]);
        assert!(conjugate_pair(back.clone(), 1, 1).is_err());
        assert!(permute(back, &[0, 0, 1]).is_err());
    }

    fn semigroup_example() -> Certificate {
        let left = permute(axiom_trivial_pair(&part![3, 2, 1]), &[0, 2, 1]).unwrap();
        let right = conjugate_pair(axiom_trivial_pair(&part![4]), 1, 2).unwrap();
        combine_hsum(left, right).unwrap()
    }

    #[test]
    fn semigroup_example_verifies() {
        let o = oracle();
        let c = semigroup_example();
        assert_eq!(
            entries(&c),
            vec![part![7, 2, 1], part![7, 1, 1, 1], part![4, 3, 2, 1]]
        );
        let rep = verify_certificate(&c, VerifyMode::Full, &o).unwrap();
        assert!(rep.root_checked && rep.unverified.is_empty());
    }

    #[test]
    fn tampering_is_located() {
        let o = oracle();
        let mut c = semigroup_example();
        c.children[1].conclusion.entries[2] = part![2, 2];
        match verify_certificate(&c, VerifyMode::Structural, &o) {
            Err(Error::Verification { path, .. }) => assert_eq!(path, vec![1]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn text_round_trip() {
        let c = lemma_pieri(&part![3, 2, 1], 4, PieriVariant::Hook).unwrap();
        let text = serialize(&c);
        let back = deserialize(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(serialize(&back), text);
        assert!(deserialize(&text.replace("version 1", "version 2")).is_err());
        assert!(deserialize(&text.replace("root 4", "")).is_err());
        let err = deserialize(&text.replace("hsum", "hsumx")).unwrap_err();
        assert!(matches!(err, Error::Parse { line, .. } if line > 2));
    }

    #[test]
    fn builder_shapes() {
        let o = oracle();
        assert_eq!(entries(&lemma_rectcube(2, 1, 0, &o).unwrap()), vec![part![2, 2]; 3]);
        assert_eq!(entries(&lemma_rectcube(2, 2, 0, &o).unwrap()), vec![part![4, 4]; 3]);
        assert_eq!(
            entries(&lemma_rectcube(2, 1, 1, &o).unwrap()),
            vec![part![3, 3], part![3, 3], part![4, 2]]
        );
        assert_eq!(
            entries(&lemma_rectsquare(2, 3, 1).unwrap()),
            vec![Partition::rect(6, 2), Partition::rect(6, 2), Partition::rect(3, 4)]
        );
        assert_eq!(entries(&lemma_rectsquare(1, 1, 1).unwrap()), vec![part![1]; 3]);
        assert_eq!(
            entries(&lemma_rectsquare(2, 1, 1).unwrap()),
            vec![part![2, 2], part![2, 2], part![1, 1, 1, 1]]
        );
        let (_, w) = lemma_squarecube(3, &o).unwrap();
        assert_eq!(w, part![12, 10, 8, 4, 2]);
        assert_eq!(
            entries(&lemma_hookidempotent(3, 2, &o).unwrap()),
            vec![part![3, 1]; 3]
        );
        assert_eq!(
            entries(&lemma_hookidempotent(2, 3, &o).unwrap()),
            vec![part![2, 1, 1], part![2, 1, 1], part![3, 1]]
        );
        assert_eq!(entries(&lemma_hookidempotent(4, 1, &o).unwrap()), vec![part![4]; 3]);
        assert_eq!(
            entries(&lemma_hooksquare(3, 2, 2).unwrap()),
            vec![part![3, 1], part![3, 1], part![4]]
        );
        assert_eq!(
            entries(&lemma_hooksquare(4, 4, 3).unwrap()),
            vec![part![4, 1, 1, 1], part![4, 1, 1, 1], part![5, 2]]
        );
        assert_eq!(
            entries(&lemma_hooksquare(3, 2, 1).unwrap()),
            vec![part![3, 1], part![3, 1], part![4]]
        );
        assert!(lemma_hooksquare(1, 3, 2).is_err());
        assert_eq!(
            entries(&lemma_pieri(&part![3, 2, 1], 4, PieriVariant::Hook).unwrap()),
            vec![part![7, 1, 1, 1], part![7, 2, 1], part![4, 3, 2, 1]]
        );
        assert_eq!(
            entries(&lemma_pieri(&part![2], 2, PieriVariant::TwoRow).unwrap()),
            vec![part![2, 2], part![4], part![2, 2]]
        );
        assert_eq!(
            entries(&lemma_pieri(&part![1], 1, PieriVariant::TwoRow).unwrap()),
            vec![part![1, 1], part![2], part![1, 1]]
        );
        assert!(lemma_pieri(&Partition::empty(), 1, PieriVariant::TwoRow).is_err());
    }

    #[test]
    fn near_tensor_search() {
        let o = oracle();
        let (c, theta) = lemma_neartensor(&part![3, 2], &part![4, 1], &o).unwrap();
        assert_eq!(theta, part![1, 1]);
        assert_eq!(entries(&c)[2], part![4, 1]);
        let (c, theta) = lemma_neartensor(&part![2, 1, 1], &part![2, 2], &o).unwrap();
        assert_eq!(theta.size(), 2);
        assert!(verify_certificate(&c, VerifyMode::Full, &o).is_ok());
        let (_, theta) = lemma_neartensor(&part![3, 1], &part![3, 1], &o).unwrap();
        assert!(theta.is_empty());
    }

    #[test]
    fn near_shared_rows() {
        let o = oracle();
        let rho = Partition::staircase(3);
        for nu in o.tensor_support(&rho, &rho).unwrap().sorted() {
            let (c, _) = lemma_nearsharedrows(&rho, &rho, 3, &nu, &o).unwrap();
            assert_eq!(entries(&c), vec![rho.clone(), rho.clone(), nu]);
        }
        let (c, _) = lemma_nearsharedrows(&part![4, 2, 1], &part![4, 3], 1, &part![1], &o).unwrap();
        assert!(verify_certificate(&c, VerifyMode::Full, &o).unwrap().root_checked);
    }

    #[test]
    fn registry_builds_by_name() {
        let o = oracle();
        let reg = LemmaRegistry::default();
        let args: Vec<String> = ["2", "3", "1"].iter().map(|s| s.to_string()).collect();
        let c = reg.build("rectsquare", &args, &o).unwrap();
        assert_eq!(c.conclusion().size(), 12);
        assert!(reg.build("nope", &args, &o).is_err());
        assert!(reg.names().any(|n| n == "pieri"));
    }
}
