//! Registry of integer sequences with the producers that reproduce them, plus
//! b-file export (`index value` per line).
//!
//! Terms of scalar sequences are indexed from `offset`. Tables are read by rows
//! `n = 1, 2, ...`, row `n` holding `k = 2n ..= n^2 + n`; their b-files number the
//! flattened terms from `offset`, while limits (`compute_max`, `gated_max`, the
//! `max` argument of [`check_sequence`] and [`export_bfile`]) count rows.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::census::{self, CensusSpec, Family, Histogram, Statistic};
use crate::error::{Error, Result};
use crate::formulas::{self, Arity, DEFAULT_MAX_N};
use crate::latin;

const DATA: &str = include_str!("../data/sequences.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    #[default]
    Scalar,
    Table,
}

/// Second argument of a two-argument formula, relative to `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KArg {
    N,
    NMinusOne,
    Fixed(usize),
}

impl KArg {
    fn at(self, n: usize) -> Option<usize> {
        match self {
            KArg::N => Some(n),
            KArg::NMinusOne => n.checked_sub(1),
            KArg::Fixed(k) => Some(k),
        }
    }
}

impl FromStr for KArg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(KArg::N),
            "n-1" => Ok(KArg::NMinusOne),
            _ => s
                .parse()
                .map(KArg::Fixed)
                .map_err(|_| Error::Registry(format!("bad k argument {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CensusProducer {
    /// Row `n` of the stable-count census, indexed by the number of stable matchings.
    StableCountRow { n: usize },
    /// Profiles with exactly one stable matching.
    StableCountOne,
    /// Count in the last nonzero bucket of the stable-count census.
    StableCountMax,
    HellCoupleProfiles,
    HellCoupleMatchings,
    Disjoint,
    EgalitarianCostProfiles,
    EgalitarianCostMatchings,
}

impl CensusProducer {
    pub fn name(self) -> String {
        match self {
            CensusProducer::StableCountRow { n } => format!("stable-count row n={n}"),
            CensusProducer::StableCountOne => "stable-count-one".into(),
            CensusProducer::StableCountMax => "stable-count-max".into(),
            CensusProducer::HellCoupleProfiles => "hell-couple-profiles".into(),
            CensusProducer::HellCoupleMatchings => "hell-couple-matchings".into(),
            CensusProducer::Disjoint => "disjoint".into(),
            CensusProducer::EgalitarianCostProfiles => "egalitarian-cost-profiles".into(),
            CensusProducer::EgalitarianCostMatchings => "egalitarian-cost-matchings".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Producer {
    Formula { name: String, k: Option<KArg> },
    LatinBacktracking,
    Census(CensusProducer),
    Stored,
}

impl std::fmt::Display for Producer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Producer::Formula { name, k: None } => write!(f, "formula {name}(n)"),
            Producer::Formula { name, k: Some(k) } => {
                let k = match k {
                    KArg::N => "n".to_string(),
                    KArg::NMinusOne => "n-1".to_string(),
                    KArg::Fixed(k) => k.to_string(),
                };
                write!(f, "formula {name}(n, k={k})")
            }
            Producer::LatinBacktracking => f.write_str("Latin square backtracking"),
            Producer::Census(c) => write!(f, "census {}", c.name()),
            Producer::Stored => f.write_str("stored"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequenceEntry {
    pub id: String,
    pub description: String,
    pub offset: usize,
    pub kind: Kind,
    pub producer: Producer,
    /// Largest index (row for tables) reproduced without forcing.
    pub compute_max: Option<usize>,
    /// Largest index (row for tables) reproducible with forcing.
    pub gated_max: Option<usize>,
    #[serde(serialize_with = "ser_terms")]
    pub terms: Vec<BigUint>,
}

fn ser_terms<S: serde::Serializer>(terms: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(terms.iter().map(|t| t.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermStatus {
    Computed,
    Gated,
    StoredOnly,
}

impl SequenceEntry {
    /// Terms as `(index, value)`.
    pub fn known_terms(&self) -> Vec<(usize, BigUint)> {
        self.terms
            .iter()
            .enumerate()
            .map(|(i, t)| (self.offset + i, t.clone()))
            .collect()
    }

    /// The row (for tables) or index that limits apply to.
    fn level(&self, index: usize) -> usize {
        match self.kind {
            Kind::Scalar => index,
            Kind::Table => table_position(index - self.offset).0,
        }
    }

    pub fn status(&self, index: usize) -> TermStatus {
        let level = self.level(index);
        if self.compute_max.is_some_and(|m| level <= m) {
            TermStatus::Computed
        } else if self.gated_max.is_some_and(|m| level <= m) {
            TermStatus::Gated
        } else {
            TermStatus::StoredOnly
        }
    }

    /// Last index (exclusive) whose row is at most `max`; for scalars, `max + 1`.
    fn end_index(&self, max: usize) -> usize {
        match self.kind {
            Kind::Scalar => max + 1,
            Kind::Table => self.offset + (1..=max).map(row_len).sum::<usize>(),
        }
    }

    /// Indices that exist: formulas extend past the stored terms.
    fn index_limit(&self) -> usize {
        let stored = self.offset + self.terms.len();
        match (&self.producer, self.compute_max) {
            (Producer::Formula { .. }, Some(m)) => stored.max(m + 1),
            _ => stored,
        }
    }

    fn gate_n(&self, index: usize) -> usize {
        match (&self.producer, self.kind) {
            (Producer::Census(CensusProducer::StableCountRow { n }), _) => *n,
            (_, Kind::Table) => self.level(index),
            _ => index,
        }
    }
}

fn row_len(n: usize) -> usize {
    n * n - n + 1
}

/// `(n, k)` of the flattened table position `pos` (0-based).
fn table_position(mut pos: usize) -> (usize, usize) {
    let mut n = 1;
    while pos >= row_len(n) {
        pos -= row_len(n);
        n += 1;
    }
    (n, 2 * n + pos)
}

#[derive(Deserialize)]
struct RawFile {
    sequence: Vec<RawEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    id: String,
    description: String,
    offset: usize,
    #[serde(default)]
    kind: Kind,
    producer: String,
    k: Option<String>,
    row: Option<usize>,
    compute_max: Option<usize>,
    gated_max: Option<usize>,
    terms: Vec<String>,
}

impl RawEntry {
    fn into_entry(self) -> Result<SequenceEntry> {
        let id = self.id;
        let bad = |msg: String| Error::Registry(format!("{id}: {msg}"));
        let terms = self
            .terms
            .iter()
            .map(|t| t.parse::<BigUint>().map_err(|_| bad(format!("term {t:?} is not a nonnegative integer"))))
            .collect::<Result<Vec<_>>>()?;
        let (kind, name) = self.producer.split_once(':').unwrap_or((&self.producer, ""));
        let producer = match kind {
            "formula" => {
                let info = formulas::formula_info(name).ok_or_else(|| bad(format!("unknown formula {name:?}")))?;
                let k = self.k.as_deref().map(KArg::from_str).transpose()?;
                if (info.arity == Arity::NK) != k.is_some() {
                    return Err(bad(format!("formula {name} takes {:?} arguments", info.arity)));
                }
                Producer::Formula { name: name.to_string(), k }
            }
            "latin-backtracking" => Producer::LatinBacktracking,
            "stored" => Producer::Stored,
            "census" => Producer::Census(match name {
                "stable-count-row" => CensusProducer::StableCountRow {
                    n: self.row.ok_or_else(|| bad("stable-count-row needs `row`".into()))?,
                },
                "stable-count-one" => CensusProducer::StableCountOne,
                "stable-count-max" => CensusProducer::StableCountMax,
                "hell-couple-profiles" => CensusProducer::HellCoupleProfiles,
                "hell-couple-matchings" => CensusProducer::HellCoupleMatchings,
                "disjoint" => CensusProducer::Disjoint,
                "egalitarian-cost-profiles" => CensusProducer::EgalitarianCostProfiles,
                "egalitarian-cost-matchings" => CensusProducer::EgalitarianCostMatchings,
                _ => return Err(bad(format!("unknown census producer {name:?}"))),
            }),
            _ => return Err(bad(format!("unknown producer {:?}", self.producer))),
        };
        let (compute_max, gated_max) = match producer {
            Producer::Formula { .. } => (self.compute_max.or(Some(DEFAULT_MAX_N)), self.gated_max),
            _ => (self.compute_max, self.gated_max),
        };
        if self.kind == Kind::Table {
            let mut rows = 0;
            let mut len = 0;
            while len < terms.len() {
                rows += 1;
                len += row_len(rows);
            }
            if len != terms.len() {
                return Err(bad("table terms do not fill whole rows".into()));
            }
        }
        Ok(SequenceEntry {
            id,
            description: self.description,
            offset: self.offset,
            kind: self.kind,
            producer,
            compute_max,
            gated_max,
            terms,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Registry {
    entries: BTreeMap<String, SequenceEntry>,
}

impl Registry {
    pub fn parse(text: &str) -> Result<Registry> {
        let raw: RawFile = toml::from_str(text).map_err(|e| Error::Registry(e.to_string()))?;
        let mut entries = BTreeMap::new();
        for r in raw.sequence {
            let e = r.into_entry()?;
            if entries.contains_key(&e.id) {
                return Err(Error::Registry(format!("duplicate id {}", e.id)));
            }
            entries.insert(e.id.clone(), e);
        }
        Ok(Registry { entries })
    }

    pub fn get(&self, id: &str) -> Result<&SequenceEntry> {
        self.entries
            .get(id)
            .ok_or_else(|| Error::UnknownSequence(id.to_string()))
    }

    pub fn entries(&self) -> impl Iterator<Item = &SequenceEntry> {
        self.entries.values()
    }
}

/// The registry shipped with the crate.
pub fn registry() -> &'static Registry {
    static REGISTRY: OnceLock<Registry> = OnceLock::new();
    REGISTRY.get_or_init(|| Registry::parse(DATA).expect("bundled sequence data is valid"))
}

/// Evaluates producers, running each census at most once.
#[derive(Default)]
struct Computer {
    censuses: BTreeMap<(usize, Statistic), Histogram>,
}

impl Computer {
    fn histogram(&mut self, n: usize, stat: Statistic, force: bool) -> Result<&Histogram> {
        if !self.censuses.contains_key(&(n, stat)) {
            let t = census::run_census(&CensusSpec::new(n, Family::All, [stat]).force(force))?;
            self.censuses.insert((n, stat), t.histogram(stat).clone());
        }
        Ok(&self.censuses[&(n, stat)])
    }

    fn term(&mut self, e: &SequenceEntry, index: usize, force: bool) -> Result<BigUint> {
        let n = index;
        match &e.producer {
            Producer::Formula { name, k } => {
                let k = match k {
                    None => None,
                    Some(k) => Some(k.at(n).ok_or_else(|| {
                        Error::InvalidArgument(format!("{}: no term at n={n}", e.id))
                    })?),
                };
                formulas::evaluate(name, n, k, DEFAULT_MAX_N)
            }
            Producer::LatinBacktracking => Ok(BigUint::from(latin::count_latin_squares(n))),
            Producer::Stored => Err(Error::StoredOnly {
                id: e.id.clone(),
                index,
            }),
            Producer::Census(c) => {
                let stable = Statistic::StableCount;
                match *c {
                    CensusProducer::StableCountRow { n: row } => Ok(self.histogram(row, stable, force)?.get(index)),
                    CensusProducer::StableCountOne => Ok(self.histogram(n, stable, force)?.get(1)),
                    CensusProducer::StableCountMax => Ok(self
                        .histogram(n, stable, force)?
                        .rows
                        .values()
                        .next_back()
                        .cloned()
                        .unwrap_or_default()),
                    CensusProducer::HellCoupleProfiles => {
                        Ok(self.histogram(n, Statistic::HellCoupleProfiles, force)?.get(1))
                    }
                    CensusProducer::HellCoupleMatchings => {
                        let h = self.histogram(n, Statistic::HellCoupleMatchings, force)?;
                        Ok(h.rows.range(1..).map(|(_, c)| c.clone()).sum())
                    }
                    CensusProducer::Disjoint => {
                        let t = census::run_census(
                            &CensusSpec::new(n, Family::Disjoint, [Statistic::SoulmateCount]).force(force),
                        )?;
                        Ok(t.profiles)
                    }
                    CensusProducer::EgalitarianCostProfiles | CensusProducer::EgalitarianCostMatchings => {
                        let stat = if matches!(c, CensusProducer::EgalitarianCostProfiles) {
                            Statistic::EgalitarianCostProfiles
                        } else {
                            Statistic::EgalitarianCostMatchings
                        };
                        let (row, k) = table_position(index - e.offset);
                        Ok(self.histogram(row, stat, force)?.get(k))
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermCheck {
    pub index: usize,
    #[serde(serialize_with = "ser_decimal")]
    pub expected: BigUint,
    /// `None` when the term was not computed (gated or stored-only).
    #[serde(serialize_with = "ser_opt_decimal")]
    pub got: Option<BigUint>,
    pub status: TermStatus,
}

impl TermCheck {
    pub fn matches(&self) -> bool {
        self.got.as_ref().is_none_or(|g| *g == self.expected)
    }
}

fn ser_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_opt_decimal<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub max: usize,
    pub terms: Vec<TermCheck>,
}

impl CheckReport {
    /// True when every computed term equals its stored value.
    pub fn all_match(&self) -> bool {
        self.terms.iter().all(TermCheck::matches)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &TermCheck> {
        self.terms.iter().filter(|t| !t.matches())
    }

    pub fn computed(&self) -> usize {
        self.terms.iter().filter(|t| t.got.is_some()).count()
    }
}

/// Recomputes the stored terms up to `max` (a row number for tables) and diffs them.
/// Gated terms are computed only with `force`; stored-only terms are listed unchecked.
pub fn check_sequence(id: &str, max: usize, force: bool) -> Result<CheckReport> {
    let e = registry().get(id)?;
    let mut computer = Computer::default();
    let mut terms = Vec::new();
    for (index, expected) in e.known_terms() {
        if index >= e.end_index(max) {
            break;
        }
        let status = e.status(index);
        let run = match status {
            TermStatus::Computed => true,
            TermStatus::Gated => force,
            TermStatus::StoredOnly => false,
        };
        let got = if run { Some(computer.term(e, index, force)?) } else { None };
        terms.push(TermCheck {
            index,
            expected,
            got,
            status,
        });
    }
    Ok(CheckReport {
        id: e.id.clone(),
        max,
        terms,
    })
}

/// Computes terms from the producer up to `max` (a row number for tables) as a b-file.
/// Terms that need a gated census fail unless `force` is set; stored-only terms always fail.
pub fn export_bfile(id: &str, max: usize, force: bool) -> Result<String> {
    let e = registry().get(id)?;
    let end = e.end_index(max);
    if end > e.index_limit() {
        return Err(Error::InvalidArgument(format!(
            "{id} has no terms past index {}",
            e.index_limit().saturating_sub(1)
        )));
    }
    let mut computer = Computer::default();
    let mut out = String::new();
    for index in e.offset..end {
        match e.status(index) {
            TermStatus::Computed => {}
            TermStatus::Gated if force => {}
            TermStatus::Gated => {
                return Err(Error::Gated {
                    id: id.to_string(),
                    index,
                    n: e.gate_n(index),
                })
            }
            TermStatus::StoredOnly => return Err(Error::StoredOnly { id: id.to_string(), index }),
        }
        let v = computer.term(e, index, force)?;
        writeln!(out, "{index} {v}").expect("writing to a String");
    }
    Ok(out)
}

/// Parses `index value` lines; blank lines and `#` comments are skipped.
pub fn parse_bfile(text: &str) -> Result<Vec<(usize, BigUint)>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: &str| Error::Parse {
            line: i + 1,
            message: message.to_string(),
        };
        let mut parts = line.split_whitespace();
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err("expected `index value`"));
        };
        let index: usize = a.parse().map_err(|_| err("bad index"))?;
        let value: BigUint = b.parse().map_err(|_| err("bad value"))?;
        if !seen.insert(index) {
            return Err(err("duplicate index"));
        }
        out.push((index, value));
    }
    Ok(out)
}
