//! Brute-force censuses over profile families.
//!
//! A family is laid out as a contiguous index space and cut into work units of
//! consecutive indices. Each unit fills a worker-local histogram; units are merged
//! by addition, so tables do not depend on the number of workers or on scheduling.

mod space;
pub mod verify;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Duration;

use num_bigint::BigUint;
use serde::Serialize;

use crate::classify;
use crate::error::{Error, Result};
use crate::matching::blocking_pair_raw;
use crate::perm;
use crate::profile::PreferenceProfile;

pub(crate) use space::Space;
pub use verify::{verify_formulas, verify_formulas_with, VerifyReport, VerifyRow};

/// Default number of consecutive indices per work unit.
pub const DEFAULT_CHUNK: u64 = 1 << 16;

/// Profiles enumerated beyond this count require `force`.
pub const GUARD_PROFILES: f64 = 5e8;

// Rough single-core cost of one stability test, for estimates only.
const NANOS_PER_MATCHING: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    All,
    LatinMen,
    MutuallyLatin,
    Disjoint,
    Joint,
    WithSoulmatePair,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::All,
        Family::LatinMen,
        Family::MutuallyLatin,
        Family::Disjoint,
        Family::Joint,
        Family::WithSoulmatePair,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::All => "all",
            Family::LatinMen => "latin-men",
            Family::MutuallyLatin => "mutually-latin",
            Family::Disjoint => "disjoint",
            Family::Joint => "joint",
            Family::WithSoulmatePair => "with-soulmate-pair",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family {s:?}")))
    }
}

/// A per-profile statistic tallied into a histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    /// Number of stable matchings of the profile.
    StableCount,
    SoulmateCount,
    HellPairCount,
    /// Each distinct egalitarian cost among the profile's stable matchings counts once.
    EgalitarianCostProfiles,
    /// Each stable matching counts once at its egalitarian cost.
    EgalitarianCostMatchings,
    /// 1 if some stable matching marries a hell-pair, else 0.
    HellCoupleProfiles,
    /// Over (profile, stable matching) pairs: number of hell-couples in the matching.
    HellCoupleMatchings,
    /// Number of outcast pairs.
    Outcasts,
}

impl Statistic {
    pub const ALL: [Statistic; 8] = [
        Statistic::StableCount,
        Statistic::SoulmateCount,
        Statistic::HellPairCount,
        Statistic::EgalitarianCostProfiles,
        Statistic::EgalitarianCostMatchings,
        Statistic::HellCoupleProfiles,
        Statistic::HellCoupleMatchings,
        Statistic::Outcasts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::StableCount => "stable-count",
            Statistic::SoulmateCount => "soulmate-count",
            Statistic::HellPairCount => "hell-pair-count",
            Statistic::EgalitarianCostProfiles => "egalitarian-cost-profiles",
            Statistic::EgalitarianCostMatchings => "egalitarian-cost-matchings",
            Statistic::HellCoupleProfiles => "hell-couple-profiles",
            Statistic::HellCoupleMatchings => "hell-couple-matchings",
            Statistic::Outcasts => "outcasts",
        }
    }

    fn needs_matchings(self) -> bool {
        !matches!(
            self,
            Statistic::SoulmateCount | Statistic::HellPairCount | Statistic::Outcasts
        )
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Statistic::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown statistic {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusSpec {
    pub n: usize,
    pub family: Family,
    pub statistics: BTreeSet<Statistic>,
    pub workers: usize,
    /// Fix woman 1's ranking to label order and scale counts by `n!`.
    pub symmetry_reduction: bool,
    /// Run even when the estimated cost exceeds the guard.
    pub force: bool,
    /// Indices per work unit.
    pub chunk: u64,
}

impl CensusSpec {
    pub fn new(n: usize, family: Family, statistics: impl IntoIterator<Item = Statistic>) -> CensusSpec {
        CensusSpec {
            n,
            family,
            statistics: statistics.into_iter().collect(),
            workers: default_workers(),
            symmetry_reduction: false,
            force: false,
            chunk: DEFAULT_CHUNK,
        }
    }

    pub fn workers(mut self, workers: usize) -> CensusSpec {
        self.workers = workers;
        self
    }

    pub fn symmetry(mut self, on: bool) -> CensusSpec {
        self.symmetry_reduction = on;
        self
    }

    pub fn force(mut self, on: bool) -> CensusSpec {
        self.force = on;
        self
    }

    pub fn chunk(mut self, chunk: u64) -> CensusSpec {
        self.chunk = chunk;
        self
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Histogram from a statistic value to a profile (or matching) count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Histogram {
    pub rows: BTreeMap<usize, BigUint>,
}

impl Histogram {
    pub fn get(&self, value: usize) -> BigUint {
        self.rows.get(&value).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> BigUint {
        self.rows.values().sum()
    }

    /// Sum of `value * count`.
    pub fn weighted_total(&self) -> BigUint {
        self.rows.iter().map(|(&v, c)| c * BigUint::from(v)).sum()
    }

    /// Rows as `(value, count)` with counts narrowed to `u64`, for tests and display.
    pub fn to_u64_rows(&self) -> Vec<(usize, u64)> {
        self.rows
            .iter()
            .map(|(&v, c)| (v, u64::try_from(c).expect("count fits u64")))
            .collect()
    }

    fn from_dense(counts: &[u64], multiplier: u64) -> Histogram {
        let m = BigUint::from(multiplier);
        Histogram {
            rows: counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(v, &c)| (v, BigUint::from(c) * &m))
                .collect(),
        }
    }
}

impl Serialize for Histogram {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.rows.len()))?;
        for (v, c) in &self.rows {
            map.serialize_entry(&v.to_string(), &c.to_string())?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusTable {
    pub spec: CensusSpec,
    pub histograms: BTreeMap<Statistic, Histogram>,
    /// Number of profiles in the family.
    #[serde(serialize_with = "ser_decimal")]
    pub profiles: BigUint,
    #[serde(serialize_with = "ser_millis")]
    pub elapsed: Duration,
}

fn ser_decimal<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_millis<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u128(d.as_millis())
}

impl CensusTable {
    pub fn histogram(&self, stat: Statistic) -> &Histogram {
        &self.histograms[&stat]
    }
}

/// Hooks for long runs: a progress callback (`done`, `total` work units) and a cancel flag.
#[derive(Default)]
pub struct RunOptions<'a> {
    pub progress: Option<&'a (dyn Fn(u64, u64) + Sync)>,
    pub cancel: Option<&'a AtomicBool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub indices: u64,
    pub profiles_visited: f64,
    pub seconds_single_core: f64,
    pub guarded: bool,
}

pub fn estimate(spec: &CensusSpec) -> Result<Estimate> {
    let space = Space::new(spec.n, spec.family, spec.symmetry_reduction)?;
    Ok(estimate_space(spec, &space))
}

fn estimate_space(spec: &CensusSpec, space: &Space) -> Estimate {
    let visited = space.visited_estimate();
    let per_profile = if spec.statistics.iter().any(|s| s.needs_matchings()) {
        perm::factorial_u64(spec.n) as f64 * NANOS_PER_MATCHING
    } else {
        NANOS_PER_MATCHING
    };
    Estimate {
        indices: space.len(),
        profiles_visited: visited,
        seconds_single_core: visited * per_profile / 1e9,
        guarded: visited > GUARD_PROFILES,
    }
}

/// Per-worker dense accumulator for a set of statistics.
#[derive(Clone)]
pub(crate) struct Tally {
    stats: Vec<Statistic>,
    counts: Vec<Vec<u64>>,
    profiles: u64,
}

impl Tally {
    fn new(stats: &BTreeSet<Statistic>) -> Tally {
        Tally {
            stats: stats.iter().copied().collect(),
            counts: vec![Vec::new(); stats.len()],
            profiles: 0,
        }
    }

    #[inline]
    fn bump(slot: &mut Vec<u64>, value: usize, by: u64) {
        if slot.len() <= value {
            slot.resize(value + 1, 0);
        }
        slot[value] += by;
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.profiles += other.profiles;
        for (mine, theirs) in self.counts.iter_mut().zip(other.counts) {
            if mine.len() < theirs.len() {
                mine.resize(theirs.len(), 0);
            }
            for (a, b) in mine.iter_mut().zip(theirs) {
                *a = a.checked_add(b).expect("histogram count overflow");
            }
        }
        self
    }
}

/// Evaluates the requested statistics on one profile at a time.
pub(crate) struct Evaluator {
    n: usize,
    matchings: Vec<Vec<u8>>,
    need_matchings: bool,
    stable: Vec<usize>,
    costs: Vec<usize>,
}

impl Evaluator {
    pub(crate) fn new(n: usize, stats: &BTreeSet<Statistic>) -> Evaluator {
        Evaluator {
            n,
            matchings: perm::all_permutations(n),
            need_matchings: stats.iter().any(|s| s.needs_matchings()),
            stable: Vec::new(),
            costs: Vec::new(),
        }
    }

    /// Indices (into all matchings in lexicographic order) of the stable matchings.
    pub(crate) fn stable_matchings(&mut self, profile: &PreferenceProfile) -> &[usize] {
        self.stable.clear();
        for (i, m) in self.matchings.iter().enumerate() {
            if blocking_pair_raw(profile, m).is_none() {
                self.stable.push(i);
            }
        }
        &self.stable
    }

    fn cost(&self, profile: &PreferenceProfile, idx: usize) -> (usize, usize) {
        let n = self.n;
        let mut cost = 0;
        let mut hell = 0;
        for (m, &w) in self.matchings[idx].iter().enumerate() {
            let a = profile.man_rank(m, w as usize);
            let b = profile.woman_rank(w as usize, m);
            cost += a + b;
            if a == n && b == n {
                hell += 1;
            }
        }
        (cost, hell)
    }

    fn tally(&mut self, profile: &PreferenceProfile, tally: &mut Tally) {
        tally.profiles += 1;
        if self.need_matchings {
            self.stable_matchings(profile);
        }
        let mut hells = Vec::new();
        if self.need_matchings {
            self.costs.clear();
            for k in 0..self.stable.len() {
                let (c, h) = self.cost(profile, self.stable[k]);
                self.costs.push(c);
                hells.push(h);
            }
        }
        for (slot, stat) in tally.counts.iter_mut().zip(&tally.stats) {
            match stat {
                Statistic::StableCount => Tally::bump(slot, self.stable.len(), 1),
                Statistic::SoulmateCount => Tally::bump(slot, classify::count_soulmates(profile), 1),
                Statistic::HellPairCount => Tally::bump(slot, classify::count_hell_pairs(profile), 1),
                Statistic::Outcasts => Tally::bump(slot, classify::find_outcasts(profile).len(), 1),
                Statistic::EgalitarianCostMatchings => {
                    for &c in &self.costs {
                        Tally::bump(slot, c, 1);
                    }
                }
                Statistic::EgalitarianCostProfiles => {
                    let mut distinct = self.costs.clone();
                    distinct.sort_unstable();
                    distinct.dedup();
                    for c in distinct {
                        Tally::bump(slot, c, 1);
                    }
                }
                Statistic::HellCoupleProfiles => {
                    Tally::bump(slot, usize::from(hells.iter().any(|&h| h > 0)), 1)
                }
                Statistic::HellCoupleMatchings => {
                    for &h in &hells {
                        Tally::bump(slot, h, 1);
                    }
                }
            }
        }
    }
}

pub fn run_census(spec: &CensusSpec) -> Result<CensusTable> {
    run_census_with(spec, &RunOptions::default())
}

// wasm32-unknown-unknown has no clock; std::time::Instant panics there
#[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
struct Stopwatch(std::time::Instant);

#[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
impl Stopwatch {
    fn start() -> Self {
        Stopwatch(std::time::Instant::now())
    }
    fn elapsed(&self) -> Duration {
        self.0.elapsed()
    }
}

#[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
struct Stopwatch;

#[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
impl Stopwatch {
    fn start() -> Self {
        Stopwatch
    }
    fn elapsed(&self) -> Duration {
        Duration::ZERO
    }
}

pub fn run_census_with(spec: &CensusSpec, opts: &RunOptions<'_>) -> Result<CensusTable> {
    if spec.statistics.is_empty() {
        return Err(Error::InvalidArgument("census needs at least one statistic".into()));
    }
    if spec.workers == 0 || spec.chunk == 0 {
        return Err(Error::InvalidArgument("workers and chunk must be positive".into()));
    }
    let started = Stopwatch::start();
    let space = Space::new(spec.n, spec.family, spec.symmetry_reduction)?;
    let est = estimate_space(spec, &space);
    if est.guarded && !spec.force {
        return Err(Error::GuardExceeded {
            profiles: format!("{:.3e}", est.profiles_visited),
            estimated_seconds: est.seconds_single_core.ceil() as u64,
        });
    }

    let tally = drive(
        &space,
        spec.workers,
        spec.chunk,
        opts,
        || Evaluator::new(spec.n, &spec.statistics),
        |ev: &mut Evaluator, start, end| {
            let mut tally = Tally::new(&spec.statistics);
            space.visit_range(start, end, |p| ev.tally(p, &mut tally));
            tally
        },
        || Tally::new(&spec.statistics),
        Tally::merge,
    )?;

    let multiplier = space.multiplier();
    let histograms = tally
        .stats
        .iter()
        .zip(&tally.counts)
        .map(|(&s, c)| (s, Histogram::from_dense(c, multiplier)))
        .collect();
    Ok(CensusTable {
        spec: spec.clone(),
        histograms,
        profiles: BigUint::from(tally.profiles) * BigUint::from(multiplier),
        elapsed: started.elapsed(),
    })
}

/// Splits `space` into contiguous units and folds them with `merge`.
///
/// Each worker thread owns one `S` built by `make_state`; `run` maps an index
/// range to a partial result. `merge` must be associative and commutative.
#[allow(clippy::too_many_arguments)]
pub(crate) fn drive<S, A>(
    space: &Space,
    workers: usize,
    chunk: u64,
    opts: &RunOptions<'_>,
    make_state: impl Fn() -> S + Sync + Send,
    run: impl Fn(&mut S, u64, u64) -> A + Sync + Send,
    identity: impl Fn() -> A + Sync + Send,
    merge: impl Fn(A, A) -> A + Sync + Send,
) -> Result<A>
where
    S: Send,
    A: Send,
{
    let len = space.len();
    let chunk = chunk.min(len.div_ceil(workers as u64 * 8).max(1));
    let units = len.div_ceil(chunk);
    let done = AtomicU64::new(0);
    let last_pct = AtomicU64::new(0);
    let cancelled = || opts.cancel.is_some_and(|c| c.load(Ordering::Relaxed));
    let run_unit = |state: &mut S, u: u64| -> Option<A> {
        if cancelled() {
            return None;
        }
        let start = u * chunk;
        let out = run(state, start, (start + chunk).min(len));
        let d = done.fetch_add(1, Ordering::Relaxed) + 1;
        if let Some(cb) = opts.progress {
            let pct = d * 100 / units;
            if last_pct.fetch_max(pct, Ordering::Relaxed) < pct {
                cb(d, units);
            }
        }
        Some(out)
    };

    let result = run_units(workers, units, &make_state, &run_unit, &identity, &merge);
    if cancelled() {
        return Err(Error::Interrupted);
    }
    Ok(result)
}

#[cfg(feature = "parallel")]
fn run_units<S: Send, A: Send>(
    workers: usize,
    units: u64,
    make_state: &(impl Fn() -> S + Sync + Send),
    run_unit: &(impl Fn(&mut S, u64) -> Option<A> + Sync),
    identity: &(impl Fn() -> A + Sync + Send),
    merge: &(impl Fn(A, A) -> A + Sync + Send),
) -> A {
    use rayon::prelude::*;
    if workers == 1 {
        return run_units_serial(units, make_state, run_unit, identity, merge);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(|| {
        (0..units)
            .into_par_iter()
            .fold(
                || (make_state(), identity()),
                |(mut state, acc), u| match run_unit(&mut state, u) {
                    Some(part) => (state, merge(acc, part)),
                    None => (state, acc),
                },
            )
            .map(|(_, acc)| acc)
            .reduce(identity, merge)
    })
}

#[cfg(not(feature = "parallel"))]
fn run_units<S, A>(
    _workers: usize,
    units: u64,
    make_state: &impl Fn() -> S,
    run_unit: &impl Fn(&mut S, u64) -> Option<A>,
    identity: &impl Fn() -> A,
    merge: &impl Fn(A, A) -> A,
) -> A {
    run_units_serial(units, make_state, run_unit, identity, merge)
}

fn run_units_serial<S, A>(
    units: u64,
    make_state: &impl Fn() -> S,
    run_unit: &impl Fn(&mut S, u64) -> Option<A>,
    identity: &impl Fn() -> A,
    merge: &impl Fn(A, A) -> A,
) -> A {
    let mut state = make_state();
    let mut acc = identity();
    for u in 0..units {
        match run_unit(&mut state, u) {
            Some(part) => acc = merge(acc, part),
            None => break,
        }
    }
    acc
}

/// Profiles with at least one soulmate pair, by number of stable matchings.
pub fn census_stable_with_soulmates(n: usize) -> Result<CensusTable> {
    run_census(&CensusSpec::new(n, Family::WithSoulmatePair, [Statistic::StableCount]))
}

/// Profiles having a stable matching with a hell-couple, and the number of such
/// (profile, stable matching) pairs.
pub fn census_hell_couples(n: usize) -> Result<(BigUint, BigUint)> {
    let t = run_census(&CensusSpec::new(
        n,
        Family::All,
        [Statistic::HellCoupleProfiles, Statistic::HellCoupleMatchings],
    ))?;
    let profiles = t.histogram(Statistic::HellCoupleProfiles).get(1);
    let matchings: BigUint = t
        .histogram(Statistic::HellCoupleMatchings)
        .rows
        .iter()
        .filter(|(&h, _)| h > 0)
        .map(|(_, c)| c.clone())
        .sum();
    Ok((profiles, matchings))
}

/// Stable matchings over all profiles, by egalitarian cost.
pub fn census_egalitarian_matchings(n: usize) -> Result<CensusTable> {
    run_census(&CensusSpec::new(n, Family::All, [Statistic::EgalitarianCostMatchings]))
}

/// Number of disjoint profiles, enumerated in canonical form and scaled by `n!^2`.
pub fn census_disjoint(n: usize) -> Result<BigUint> {
    let t = run_census(&CensusSpec::new(n, Family::Disjoint, [Statistic::SoulmateCount]))?;
    Ok(t.profiles)
}

/// Counts profiles of `family` (unweighted enumeration scaled by the family multiplier).
pub fn count_family(n: usize, family: Family) -> Result<BigUint> {
    let t = run_census(&CensusSpec::new(n, family, [Statistic::SoulmateCount]))?;
    Ok(t.profiles)
}
