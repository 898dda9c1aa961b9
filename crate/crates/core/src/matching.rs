//! Gale–Shapley deferred acceptance, stability checks, brute-force enumeration of
//! stable matchings and egalitarian costs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Side};
use crate::perm;
use crate::profile::PreferenceProfile;

/// Largest `n` accepted by [`enumerate_stable`]; it tests all `n!` matchings.
pub const MAX_ENUMERATE_N: usize = 6;

/// A perfect matching, indexed by man: `wife(m)` is the woman married to man `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    wives: Vec<u8>,
}

impl Matching {
    /// `wives[m]` is the 0-based index of man `m`'s partner.
    pub fn new(wives: Vec<usize>) -> Result<Matching> {
        let n = wives.len();
        if n == 0 || n > u8::MAX as usize {
            return Err(Error::InvalidArgument(format!("matching size {n} unsupported")));
        }
        if wives.iter().any(|&w| w >= n) {
            return Err(Error::InvalidArgument("partner index out of range".into()));
        }
        let wives: Vec<u8> = wives.into_iter().map(|w| w as u8).collect();
        if !perm::is_permutation(&wives) {
            return Err(Error::InvalidArgument("matching is not a bijection".into()));
        }
        Ok(Matching { wives })
    }

    pub(crate) fn from_raw(wives: Vec<u8>) -> Matching {
        debug_assert!(perm::is_permutation(&wives));
        Matching { wives }
    }

    pub fn n(&self) -> usize {
        self.wives.len()
    }

    pub fn wife(&self, m: usize) -> usize {
        self.wives[m] as usize
    }

    pub fn wives(&self) -> Vec<usize> {
        self.wives.iter().map(|&w| w as usize).collect()
    }

    /// Woman-indexed view: entry `w` is her husband.
    pub fn husbands(&self) -> Vec<usize> {
        let mut h = vec![0; self.n()];
        for (m, &w) in self.wives.iter().enumerate() {
            h[w as usize] = m;
        }
        h
    }

    /// `(man, woman)` pairs in man order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.wives.iter().enumerate().map(|(m, &w)| (m, w as usize))
    }

    fn check_size(&self, profile: &PreferenceProfile) -> Result<()> {
        if self.n() != profile.n() {
            return Err(Error::SizeMismatch {
                expected: profile.n(),
                got: self.n(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs().map(|(m, w)| format!("m{}-w{}", m + 1, w + 1)).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Serialized as the list of 1-based wives, e.g. `[1, 3, 2]`.
impl Serialize for Matching {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let one_based: Vec<usize> = self.wives.iter().map(|&w| w as usize + 1).collect();
        one_based.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Matching {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let one_based = Vec::<usize>::deserialize(deserializer)?;
        if one_based.contains(&0) {
            return Err(serde::de::Error::custom("partners are 1-based"));
        }
        Matching::new(one_based.into_iter().map(|w| w - 1).collect()).map_err(serde::de::Error::custom)
    }
}

/// Result of one Gale–Shapley run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GsTrace {
    pub matching: Matching,
    /// Synchronous proposal rounds executed.
    pub rounds: usize,
    /// Which side proposed.
    pub side: Side,
}

/// Egalitarian cost of one married couple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PairCost {
    pub man: usize,
    pub woman: usize,
    /// Rank the man gives the woman plus the rank the woman gives the man.
    pub cost: usize,
}

/// Deferred acceptance with `side` proposing.
///
/// A round is one proposal from every currently unengaged proposer to the best
/// receiver they have not yet tried, after which each receiver keeps only her
/// best suitor so far.
pub fn gale_shapley(profile: &PreferenceProfile, side: Side) -> GsTrace {
    let n = profile.n();
    let proposer_orders: Vec<Vec<usize>> = (0..n).map(|p| profile.preference_order(side, p)).collect();
    let receiver = side.other();

    let mut next_choice = vec![0usize; n];
    let mut holds: Vec<Option<usize>> = vec![None; n];
    let mut free: Vec<usize> = (0..n).collect();
    let mut rounds = 0;

    while !free.is_empty() {
        rounds += 1;
        let mut rejected = Vec::new();
        for &p in &free {
            let r = proposer_orders[p][next_choice[p]];
            next_choice[p] += 1;
            let rank_of = |q: usize| profile.raw_row(receiver, r)[q];
            match holds[r] {
                None => holds[r] = Some(p),
                Some(cur) if rank_of(p) < rank_of(cur) => {
                    holds[r] = Some(p);
                    rejected.push(cur);
                }
                Some(_) => rejected.push(p),
            }
        }
        rejected.sort_unstable();
        free = rejected;
    }

    let mut partner_of_proposer = vec![0u8; n];
    for (r, p) in holds.iter().enumerate() {
        partner_of_proposer[p.expect("everyone engaged")] = r as u8;
    }
    let matching = match side {
        Side::Men => Matching::from_raw(partner_of_proposer),
        Side::Women => {
            let mut wives = vec![0u8; n];
            for (w, &m) in partner_of_proposer.iter().enumerate() {
                wives[m as usize] = w as u8;
            }
            Matching::from_raw(wives)
        }
    };
    GsTrace {
        matching,
        rounds,
        side,
    }
}

/// Lexicographically smallest `(man, woman)` blocking pair, if any.
pub fn find_blocking_pair(profile: &PreferenceProfile, matching: &Matching) -> Result<Option<(usize, usize)>> {
    matching.check_size(profile)?;
    Ok(blocking_pair_raw(profile, &matching.wives))
}

pub fn is_stable(profile: &PreferenceProfile, matching: &Matching) -> Result<bool> {
    Ok(find_blocking_pair(profile, matching)?.is_none())
}

#[inline]
pub(crate) fn blocking_pair_raw(profile: &PreferenceProfile, wives: &[u8]) -> Option<(usize, usize)> {
    let n = wives.len();
    let men = profile.raw_matrix(Side::Men);
    let women = profile.raw_matrix(Side::Women);
    let mut husbands = [0u8; u8::MAX as usize + 1];
    for (m, &w) in wives.iter().enumerate() {
        husbands[w as usize] = m as u8;
    }
    for m in 0..n {
        let row = &men[m * n..(m + 1) * n];
        let current = row[wives[m] as usize];
        for w in 0..n {
            if row[w] < current {
                let wrow = &women[w * n..(w + 1) * n];
                if wrow[m] < wrow[husbands[w] as usize] {
                    return Some((m, w));
                }
            }
        }
    }
    None
}

/// Every stable matching, in lexicographic order of the wives sequence.
///
/// Brute force over all `n!` matchings; refuses `n > MAX_ENUMERATE_N`.
pub fn enumerate_stable(profile: &PreferenceProfile) -> Result<Vec<Matching>> {
    let n = profile.n();
    if n > MAX_ENUMERATE_N {
        return Err(Error::InvalidArgument(format!(
            "enumerate_stable tests all n! matchings and is limited to n <= {MAX_ENUMERATE_N} (got {n})"
        )));
    }
    let mut out = Vec::new();
    let mut wives: Vec<u8> = (0..n as u8).collect();
    loop {
        if blocking_pair_raw(profile, &wives).is_none() {
            out.push(Matching::from_raw(wives.clone()));
        }
        if !perm::next_permutation(&mut wives) {
            break;
        }
    }
    Ok(out)
}

pub fn pair_costs(profile: &PreferenceProfile, matching: &Matching) -> Result<Vec<PairCost>> {
    matching.check_size(profile)?;
    Ok(matching
        .pairs()
        .map(|(man, woman)| PairCost {
            man,
            woman,
            cost: profile.man_rank(man, woman) + profile.woman_rank(woman, man),
        })
        .collect())
}

/// Sum of the couples' mutual ranks; lies in `[2n, 2n^2]`.
pub fn egalitarian_cost(profile: &PreferenceProfile, matching: &Matching) -> Result<usize> {
    Ok(pair_costs(profile, matching)?.iter().map(|c| c.cost).sum())
}

/// Couples in `matching` who both rank each other last.
pub fn hell_couples_in(profile: &PreferenceProfile, matching: &Matching) -> Result<Vec<(usize, usize)>> {
    matching.check_size(profile)?;
    let n = profile.n();
    Ok(matching
        .pairs()
        .filter(|&(m, w)| profile.man_rank(m, w) == n && profile.woman_rank(w, m) == n)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(men: &[&[usize]], women: &[&[usize]]) -> PreferenceProfile {
        let m: Vec<Vec<usize>> = men.iter().map(|r| r.to_vec()).collect();
        let w: Vec<Vec<usize>> = women.iter().map(|r| r.to_vec()).collect();
        PreferenceProfile::new(&m, &w).unwrap()
    }

    fn worked_example() -> PreferenceProfile {
        p(&[&[1, 2, 3], &[2, 3, 1], &[3, 2, 1]], &[&[3, 1, 2], &[1, 2, 3], &[1, 2, 3]])
    }

    #[test]
    fn worked_example_both_sides() {
        let prof = worked_example();
        let men = gale_shapley(&prof, Side::Men);
        assert_eq!(men.matching.wives(), vec![0, 2, 1]);
        assert_eq!(egalitarian_cost(&prof, &men.matching).unwrap(), 12);
        let women = gale_shapley(&prof, Side::Women);
        // w1-m3, w2-m1, w3-m2
        assert_eq!(women.matching.husbands(), vec![2, 0, 1]);
        assert_eq!(egalitarian_cost(&prof, &women.matching).unwrap(), 11);

        let all = enumerate_stable(&prof).unwrap();
        let mut costs: Vec<usize> = all.iter().map(|m| egalitarian_cost(&prof, m).unwrap()).collect();
        costs.sort();
        assert_eq!(costs, vec![11, 12]);
    }

    #[test]
    fn two_by_two_example_has_two_stable_matchings() {
        let prof = p(&[&[1, 2], &[2, 1]], &[&[2, 1], &[1, 2]]);
        let id = Matching::new(vec![0, 1]).unwrap();
        let swap = Matching::new(vec![1, 0]).unwrap();
        assert_eq!(find_blocking_pair(&prof, &id).unwrap(), None);
        assert_eq!(find_blocking_pair(&prof, &swap).unwrap(), None);
        assert_eq!(enumerate_stable(&prof).unwrap(), vec![id, swap]);
    }

    #[test]
    fn trivial_profile() {
        let prof = p(&[&[1]], &[&[1]]);
        let m = Matching::new(vec![0]).unwrap();
        assert_eq!(find_blocking_pair(&prof, &m).unwrap(), None);
        assert_eq!(hell_couples_in(&prof, &m).unwrap(), vec![(0, 0)]);
        assert_eq!(gale_shapley(&prof, Side::Men).rounds, 1);
    }

    #[test]
    fn blocking_pair_is_lexicographically_smallest() {
        // Everyone has identical taste 1 > 2 > 3; the reversed matching is blocked by (m1, w1) first.
        let rows: &[&[usize]] = &[&[1, 2, 3], &[1, 2, 3], &[1, 2, 3]];
        let prof = p(rows, rows);
        let m = Matching::new(vec![2, 1, 0]).unwrap();
        assert_eq!(find_blocking_pair(&prof, &m).unwrap(), Some((0, 0)));
        let m = Matching::new(vec![0, 2, 1]).unwrap();
        assert_eq!(find_blocking_pair(&prof, &m).unwrap(), Some((1, 1)));
    }

    #[test]
    fn same_taste_takes_n_rounds() {
        let rows: &[&[usize]] = &[&[2, 3, 1, 4], &[2, 3, 1, 4], &[2, 3, 1, 4], &[2, 3, 1, 4]];
        let wrows: &[&[usize]] = &[&[4, 1, 3, 2], &[4, 1, 3, 2], &[4, 1, 3, 2], &[4, 1, 3, 2]];
        let prof = p(rows, wrows);
        for side in [Side::Men, Side::Women] {
            let t = gale_shapley(&prof, side);
            assert_eq!(t.rounds, 4);
            assert_eq!(egalitarian_cost(&prof, &t.matching).unwrap(), 4 * 5);
            let mut mutual: Vec<(usize, usize)> = t
                .matching
                .pairs()
                .map(|(m, w)| (prof.man_rank(m, w), prof.woman_rank(w, m)))
                .collect();
            mutual.sort();
            assert_eq!(mutual, vec![(1, 1), (2, 2), (3, 3), (4, 4)]);
        }
    }

    #[test]
    fn size_mismatch_is_reported() {
        let prof = worked_example();
        let m = Matching::new(vec![0, 1]).unwrap();
        assert_eq!(
            find_blocking_pair(&prof, &m).unwrap_err(),
            Error::SizeMismatch { expected: 3, got: 2 }
        );
        assert!(egalitarian_cost(&prof, &m).is_err());
        assert!(hell_couples_in(&prof, &m).is_err());
    }

    #[test]
    fn matching_validation() {
        assert!(Matching::new(vec![0, 0]).is_err());
        assert!(Matching::new(vec![0, 2]).is_err());
        assert!(Matching::new(vec![]).is_err());
        let m = Matching::new(vec![1, 2, 0]).unwrap();
        assert_eq!(m.husbands(), vec![2, 0, 1]);
        assert_eq!(m.to_string(), "m1-w2 m2-w3 m3-w1");
        assert_eq!(serde_json::to_string(&m).unwrap(), "[2,3,1]");
    }

    #[test]
    fn enumeration_guard() {
        let n = MAX_ENUMERATE_N + 1;
        let rows: Vec<Vec<usize>> = (0..n).map(|_| (1..=n).collect()).collect();
        let prof = PreferenceProfile::new(&rows, &rows).unwrap();
        assert!(enumerate_stable(&prof).is_err());
    }
}
