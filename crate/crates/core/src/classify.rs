//! Predicates and counts over a single profile, one per profile family.

use serde::Serialize;

use crate::error::{Error, Result, Side};
use crate::profile::PreferenceProfile;

/// Summary of every family predicate for one profile. Pairs are 0-based `(man, woman)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileStats {
    pub n: usize,
    pub soulmate_pairs: usize,
    pub hell_pairs: usize,
    pub has_homecoming_queen: bool,
    pub has_homecoming_king: bool,
    pub men_first_choices_distinct: bool,
    pub women_first_choices_distinct: bool,
    pub men_same_taste: bool,
    pub women_same_taste: bool,
    pub men_latin: bool,
    pub women_latin: bool,
    pub is_latin_profile: bool,
    pub is_disjoint: bool,
    pub is_joint: bool,
    pub outcast_pairs: Vec<(usize, usize)>,
}

impl ProfileStats {
    pub fn of(profile: &PreferenceProfile) -> ProfileStats {
        ProfileStats {
            n: profile.n(),
            soulmate_pairs: count_soulmates(profile),
            hell_pairs: count_hell_pairs(profile),
            has_homecoming_queen: has_homecoming_queen(profile),
            has_homecoming_king: has_homecoming_king(profile),
            men_first_choices_distinct: first_choices_distinct(profile, Side::Men),
            women_first_choices_distinct: first_choices_distinct(profile, Side::Women),
            men_same_taste: same_taste(profile, Side::Men),
            women_same_taste: same_taste(profile, Side::Women),
            men_latin: is_side_latin(profile, Side::Men),
            women_latin: is_side_latin(profile, Side::Women),
            is_latin_profile: is_latin_profile(profile),
            is_disjoint: is_disjoint(profile),
            is_joint: is_joint(profile),
            outcast_pairs: find_outcasts(profile),
        }
    }
}

fn count_mutual(profile: &PreferenceProfile, rank: u8) -> usize {
    let n = profile.n();
    let men = profile.raw_matrix(Side::Men);
    let women = profile.raw_matrix(Side::Women);
    (0..n)
        .flat_map(|m| (0..n).map(move |w| (m, w)))
        .filter(|&(m, w)| men[m * n + w] == rank && women[w * n + m] == rank)
        .count()
}

/// Pairs who rank each other first.
pub fn count_soulmates(profile: &PreferenceProfile) -> usize {
    count_mutual(profile, 0)
}

/// Pairs who rank each other last.
pub fn count_hell_pairs(profile: &PreferenceProfile) -> usize {
    count_mutual(profile, (profile.n() - 1) as u8)
}

/// Pairs `(m, w)` where every woman other than `w` ranks `m` last and every
/// man other than `m` ranks `w` last. The pair's own mutual ranks are free.
pub fn find_outcasts(profile: &PreferenceProfile) -> Vec<(usize, usize)> {
    let n = profile.n();
    let last = (n - 1) as u8;
    let men = profile.raw_matrix(Side::Men);
    let women = profile.raw_matrix(Side::Women);
    let mut out = Vec::new();
    for m in 0..n {
        for w in 0..n {
            let women_ok = (0..n).all(|w2| w2 == w || women[w2 * n + m] == last);
            if women_ok && (0..n).all(|m2| m2 == m || men[m2 * n + w] == last) {
                out.push((m, w));
            }
        }
    }
    out
}

/// Some person of the opposite group is ranked first by everyone on `side`.
fn everyone_ranks_same_first(profile: &PreferenceProfile, side: Side) -> bool {
    let first = |i: usize| profile.raw_row(side, i).iter().position(|&r| r == 0);
    let f0 = first(0);
    (1..profile.n()).all(|i| first(i) == f0)
}

/// All men rank the same woman first.
pub fn has_homecoming_queen(profile: &PreferenceProfile) -> bool {
    everyone_ranks_same_first(profile, Side::Men)
}

/// All women rank the same man first.
pub fn has_homecoming_king(profile: &PreferenceProfile) -> bool {
    everyone_ranks_same_first(profile, Side::Women)
}

/// Everyone on `side` has a different first choice.
pub fn first_choices_distinct(profile: &PreferenceProfile, side: Side) -> bool {
    let n = profile.n();
    let mut seen = vec![false; n];
    for i in 0..n {
        let f = profile.raw_row(side, i).iter().position(|&r| r == 0).unwrap();
        if std::mem::replace(&mut seen[f], true) {
            return false;
        }
    }
    true
}

pub fn men_first_choices_distinct(profile: &PreferenceProfile) -> bool {
    first_choices_distinct(profile, Side::Men)
}

/// Everyone on `side` ranks the opposite group in the same order.
pub fn same_taste(profile: &PreferenceProfile, side: Side) -> bool {
    let r0 = profile.raw_row(side, 0);
    (1..profile.n()).all(|i| profile.raw_row(side, i) == r0)
}

pub fn men_same_taste(profile: &PreferenceProfile) -> bool {
    same_taste(profile, Side::Men)
}

/// For every rank `k`, the people ranked `k` by the members of `side` are all different,
/// i.e. the rating matrix is a Latin square.
pub fn is_side_latin(profile: &PreferenceProfile, side: Side) -> bool {
    let n = profile.n();
    let mat = profile.raw_matrix(side);
    let mut seen = vec![false; n];
    for col in 0..n {
        seen.fill(false);
        for row in 0..n {
            let r = mat[row * n + col] as usize;
            if std::mem::replace(&mut seen[r], true) {
                return false;
            }
        }
    }
    true
}

pub fn men_latin(profile: &PreferenceProfile) -> bool {
    is_side_latin(profile, Side::Men)
}

pub fn women_latin(profile: &PreferenceProfile) -> bool {
    is_side_latin(profile, Side::Women)
}

/// Every pair's egalitarian cost is `n + 1`.
pub fn is_latin_profile(profile: &PreferenceProfile) -> bool {
    let n = profile.n();
    let target = (n - 1) as u8; // 0-based ranks sum to n - 1
    let men = profile.raw_matrix(Side::Men);
    let women = profile.raw_matrix(Side::Women);
    (0..n).all(|m| (0..n).all(|w| men[m * n + w] + women[w * n + m] == target))
}

/// Each mutual-ranking cell `(i, j)` occurs for exactly one man–woman pair.
pub fn is_disjoint(profile: &PreferenceProfile) -> bool {
    let n = profile.n();
    let men = profile.raw_matrix(Side::Men);
    let women = profile.raw_matrix(Side::Women);
    let mut seen = vec![false; n * n];
    for m in 0..n {
        for w in 0..n {
            let cell = men[m * n + w] as usize * n + women[w * n + m] as usize;
            if std::mem::replace(&mut seen[cell], true) {
                return false;
            }
        }
    }
    true
}

/// The key function of a joint profile: entry `i` (0-based man's rank) is the
/// 0-based rank the woman gives back. `None` when the profile is not joint.
pub fn key_function(profile: &PreferenceProfile) -> Option<Vec<usize>> {
    let n = profile.n();
    let men = profile.raw_matrix(Side::Men);
    let women = profile.raw_matrix(Side::Women);
    let mut key: Vec<Option<u8>> = vec![None; n];
    for m in 0..n {
        for w in 0..n {
            let i = men[m * n + w] as usize;
            let j = women[w * n + m];
            match key[i] {
                None => key[i] = Some(j),
                Some(prev) if prev != j => return None,
                Some(_) => {}
            }
        }
    }
    // Each man uses every rank once, so every i occurs n times; the women's
    // rows force each j to occur n times, hence the key is a bijection.
    let key: Vec<usize> = key.into_iter().map(|k| k.unwrap() as usize).collect();
    let mut seen = vec![false; n];
    for &j in &key {
        if std::mem::replace(&mut seen[j], true) {
            return None;
        }
    }
    Some(key)
}

/// Every pair's mutual ranking is `(i, f(i))` for a permutation `f`.
pub fn is_joint(profile: &PreferenceProfile) -> bool {
    key_function(profile).is_some()
}

/// Every member of `side` ranks `a` strictly above `b` (both from the opposite group).
pub fn dominance(profile: &PreferenceProfile, a: usize, b: usize, side: Side) -> Result<bool> {
    let n = profile.n();
    if a == b {
        return Err(Error::InvalidArgument("dominance needs two distinct people".into()));
    }
    if a >= n || b >= n {
        return Err(Error::InvalidArgument(format!("person index out of range for n={n}")));
    }
    Ok((0..n).all(|i| {
        let row = profile.raw_row(side, i);
        row[a] < row[b]
    }))
}
