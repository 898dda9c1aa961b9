//! Preference profiles, their validation, canonical indexing and text format.
//!
//! A profile is stored in rating form: entry `(i, j)` of the men's matrix is the
//! rank (1 = favorite) that man `i` gives woman `j`, and symmetrically for women.
//! Person indices in the Rust API are 0-based; ranks are the 1-based values used
//! throughout the domain. The text format and all printed output use 1-based labels.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Side};
use crate::perm;

/// One person's ratings of the opposite group: entry `j` is the rank given to person `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ranking(Vec<u8>);

impl Ranking {
    /// Builds a ranking from 1-based ratings, which must be a permutation of `1..=n`.
    pub fn new(ratings: &[usize]) -> Option<Ranking> {
        let n = ratings.len();
        if n == 0 || n > u8::MAX as usize {
            return None;
        }
        let raw: Vec<u8> = ratings
            .iter()
            .map(|&r| if (1..=n).contains(&r) { Some((r - 1) as u8) } else { None })
            .collect::<Option<_>>()?;
        perm::is_permutation(&raw).then_some(Ranking(raw))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based rank given to person `j`.
    pub fn rank(&self, j: usize) -> usize {
        self.0[j] as usize + 1
    }

    pub fn ratings(&self) -> Vec<usize> {
        self.0.iter().map(|&r| r as usize + 1).collect()
    }

    /// Position of this ranking among the `n!` rankings in lexicographic order.
    pub fn lehmer_index(&self) -> u64 {
        perm::lehmer_rank(&self.0)
    }

    pub fn from_lehmer_index(n: usize, index: u64) -> Ranking {
        Ranking(perm::lehmer_unrank(n, index))
    }
}

/// `n` men and `n` women, each rating every member of the opposite group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PreferenceProfile {
    n: usize,
    // Row-major, 0-based ranks.
    men: Vec<u8>,
    women: Vec<u8>,
}

impl PreferenceProfile {
    /// Builds a profile from 1-based rating rows.
    pub fn new(men: &[Vec<usize>], women: &[Vec<usize>]) -> Result<PreferenceProfile> {
        let n = men.len();
        if n == 0 {
            return Err(Error::InvalidArgument("profile must have n >= 1".into()));
        }
        if women.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                got: women.len(),
            });
        }
        let flatten = |rows: &[Vec<usize>], side: Side| -> Result<Vec<u8>> {
            let mut out = Vec::with_capacity(n * n);
            for (i, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(Error::InvalidRow { side, row: i + 1, n });
                }
                let r = Ranking::new(row).ok_or(Error::InvalidRow { side, row: i + 1, n })?;
                out.extend_from_slice(&r.0);
            }
            Ok(out)
        };
        Ok(PreferenceProfile {
            n,
            men: flatten(men, Side::Men)?,
            women: flatten(women, Side::Women)?,
        })
    }

    pub fn from_rankings(men: Vec<Ranking>, women: Vec<Ranking>) -> Result<PreferenceProfile> {
        let n = men.len();
        if n == 0 {
            return Err(Error::InvalidArgument("profile must have n >= 1".into()));
        }
        if women.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                got: women.len(),
            });
        }
        for (side, rows) in [(Side::Men, &men), (Side::Women, &women)] {
            if let Some(i) = rows.iter().position(|r| r.len() != n) {
                return Err(Error::InvalidRow { side, row: i + 1, n });
            }
        }
        Ok(PreferenceProfile {
            n,
            men: men.into_iter().flat_map(|r| r.0).collect(),
            women: women.into_iter().flat_map(|r| r.0).collect(),
        })
    }

    /// Builds a profile directly from 0-based rank matrices. Callers guarantee validity.
    pub(crate) fn from_raw(n: usize, men: Vec<u8>, women: Vec<u8>) -> PreferenceProfile {
        debug_assert_eq!(men.len(), n * n);
        debug_assert_eq!(women.len(), n * n);
        PreferenceProfile { n, men, women }
    }

    /// An all-identity profile, used as a mutable buffer by enumerators.
    pub(crate) fn identity(n: usize) -> PreferenceProfile {
        let row: Vec<u8> = (0..n as u8).collect();
        let m = row.repeat(n);
        PreferenceProfile::from_raw(n, m.clone(), m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rank (1-based) that man `m` gives woman `w`.
    #[inline]
    pub fn man_rank(&self, m: usize, w: usize) -> usize {
        self.men[m * self.n + w] as usize + 1
    }

    /// Rank (1-based) that woman `w` gives man `m`.
    #[inline]
    pub fn woman_rank(&self, w: usize, m: usize) -> usize {
        self.women[w * self.n + m] as usize + 1
    }

    #[inline]
    pub(crate) fn raw_row(&self, side: Side, i: usize) -> &[u8] {
        let n = self.n;
        match side {
            Side::Men => &self.men[i * n..(i + 1) * n],
            Side::Women => &self.women[i * n..(i + 1) * n],
        }
    }

    #[inline]
    pub(crate) fn raw_matrix(&self, side: Side) -> &[u8] {
        match side {
            Side::Men => &self.men,
            Side::Women => &self.women,
        }
    }

    #[inline]
    pub(crate) fn set_raw_row(&mut self, side: Side, i: usize, row: &[u8]) {
        let n = self.n;
        let dst = match side {
            Side::Men => &mut self.men[i * n..(i + 1) * n],
            Side::Women => &mut self.women[i * n..(i + 1) * n],
        };
        dst.copy_from_slice(row);
    }

    pub fn ranking(&self, side: Side, i: usize) -> Ranking {
        Ranking(self.raw_row(side, i).to_vec())
    }

    /// 1-based rating rows for one side.
    pub fn ratings(&self, side: Side) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|i| self.raw_row(side, i).iter().map(|&r| r as usize + 1).collect())
            .collect()
    }

    /// Choice order of person `i` on `side`: entry `k` is the person ranked `k + 1`.
    pub fn preference_order(&self, side: Side, i: usize) -> Vec<usize> {
        let mut order = vec![0; self.n];
        for (j, &r) in self.raw_row(side, i).iter().enumerate() {
            order[r as usize] = j;
        }
        order
    }

    /// Replaces every rank `r` with `n + 1 - r`.
    pub fn complement(&self) -> PreferenceProfile {
        let top = (self.n - 1) as u8;
        PreferenceProfile {
            n: self.n,
            men: self.men.iter().map(|&r| top - r).collect(),
            women: self.women.iter().map(|&r| top - r).collect(),
        }
    }

    /// Returns the profile with the roles of men and women exchanged.
    pub fn swap_sides(&self) -> PreferenceProfile {
        PreferenceProfile {
            n: self.n,
            men: self.women.clone(),
            women: self.men.clone(),
        }
    }

    pub fn encode(&self) -> ProfileIndex {
        let base = BigUint::from(perm::factorial_u64(self.n));
        let mut value = BigUint::zero();
        for side in [Side::Men, Side::Women] {
            for i in 0..self.n {
                value = value * &base + perm::lehmer_rank(self.raw_row(side, i));
            }
        }
        ProfileIndex { n: self.n, value }
    }

    pub fn decode(index: &ProfileIndex) -> Result<PreferenceProfile> {
        index.decode()
    }

    pub fn parse(text: &str) -> Result<PreferenceProfile> {
        parse_profile(text)
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for PreferenceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for side in [Side::Men, Side::Women] {
            for i in 0..self.n {
                let row: Vec<String> = self
                    .raw_row(side, i)
                    .iter()
                    .map(|&r| (r as usize + 1).to_string())
                    .collect();
                writeln!(f, "{}", row.join(" "))?;
            }
        }
        Ok(())
    }
}

impl FromStr for PreferenceProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_profile(s)
    }
}

/// Serialized as `{"n": .., "men": [[..]], "women": [[..]]}` with 1-based ratings.
impl Serialize for PreferenceProfile {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            n: usize,
            men: Vec<Vec<usize>>,
            women: Vec<Vec<usize>>,
        }
        Repr {
            n: self.n,
            men: self.ratings(Side::Men),
            women: self.ratings(Side::Women),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PreferenceProfile {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            men: Vec<Vec<usize>>,
            women: Vec<Vec<usize>>,
        }
        let r = Repr::deserialize(deserializer)?;
        PreferenceProfile::new(&r.men, &r.women).map_err(serde::de::Error::custom)
    }
}

/// Position of a profile in the mixed-radix space of `(n!)^(2n)` profiles.
///
/// Digits are the Lehmer indices of the 2n rows, men's rows first with man 1
/// most significant, then women's rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProfileIndex {
    pub n: usize,
    pub value: BigUint,
}

impl ProfileIndex {
    pub fn new(n: usize, value: impl Into<BigUint>) -> ProfileIndex {
        ProfileIndex {
            n,
            value: value.into(),
        }
    }

    /// Number of profiles of size `n`, `(n!)^(2n)`.
    pub fn space_size(n: usize) -> BigUint {
        BigUint::from(perm::factorial_u64(n)).pow(2 * n as u32)
    }

    pub fn decode(&self) -> Result<PreferenceProfile> {
        let n = self.n;
        if n == 0 || n > 20 {
            return Err(Error::InvalidArgument(format!("unsupported n={n}")));
        }
        let size = Self::space_size(n);
        if self.value >= size {
            return Err(Error::IndexOutOfRange {
                n,
                value: self.value.to_string(),
                size: size.to_string(),
            });
        }
        let base = BigUint::from(perm::factorial_u64(n));
        let mut rest = self.value.clone();
        let mut digits = vec![0u64; 2 * n];
        for d in digits.iter_mut().rev() {
            *d = (&rest % &base).to_u64().expect("digit below n!");
            rest /= &base;
        }
        let rows: Vec<u8> = digits
            .iter()
            .flat_map(|&d| perm::lehmer_unrank(n, d))
            .collect();
        let (men, women) = rows.split_at(n * n);
        Ok(PreferenceProfile::from_raw(n, men.to_vec(), women.to_vec()))
    }

    pub fn is_first(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_last(&self) -> bool {
        self.value.clone() + BigUint::one() == Self::space_size(self.n)
    }
}

/// Parses the profile text format: `2n` lines of `n` space-separated ranks,
/// men's rows first. Blank lines and `#` comments are skipped.
pub fn parse_profile(text: &str) -> Result<PreferenceProfile> {
    let mut rows: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut n = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let row = trimmed
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("not a positive integer: {tok:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if rows.is_empty() {
            n = row.len();
            if n > u8::MAX as usize {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("n={n} is too large"),
                });
            }
        } else if row.len() != n {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {n} entries, found {}", row.len()),
            });
        }
        if rows.len() == 2 * n {
            return Err(Error::Parse {
                line: line_no,
                message: format!("more than 2n = {} rows", 2 * n),
            });
        }
        if Ranking::new(&row).is_none() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("row {} is not a permutation of 1..={n}", rows.len() + 1),
            });
        }
        rows.push((line_no, row));
    }
    if rows.len() != 2 * n || n == 0 {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: format!("expected 2n = {} rows, found {}", 2 * n, rows.len()),
        });
    }
    let (men, women): (Vec<_>, Vec<_>) = rows.into_iter().map(|(_, r)| r).enumerate().partition(|(i, _)| *i < n);
    let men: Vec<Vec<usize>> = men.into_iter().map(|(_, r)| r).collect();
    let women: Vec<Vec<usize>> = women.into_iter().map(|(_, r)| r).collect();
    PreferenceProfile::new(&men, &women)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(men: &[&[usize]], women: &[&[usize]]) -> PreferenceProfile {
        let m: Vec<Vec<usize>> = men.iter().map(|r| r.to_vec()).collect();
        let w: Vec<Vec<usize>> = women.iter().map(|r| r.to_vec()).collect();
        PreferenceProfile::new(&m, &w).unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(p(&[&[1]], &[&[1]]).encode().value, BigUint::from(0u32));
        let ident = p(&[&[1, 2], &[1, 2]], &[&[1, 2], &[1, 2]]);
        assert_eq!(ident.encode().value, BigUint::from(0u32));
        let rev = p(&[&[2, 1], &[2, 1]], &[&[2, 1], &[2, 1]]);
        assert_eq!(rev.encode().value, BigUint::from(15u32));
        assert_eq!(ProfileIndex::new(2, 15u32).decode().unwrap(), rev);
        assert_eq!(ProfileIndex::new(2, 0u32).decode().unwrap(), ident);
        assert_eq!(ProfileIndex::new(1, 0u32).decode().unwrap(), p(&[&[1]], &[&[1]]));
    }

    #[test]
    fn decode_rejects_out_of_range() {
        let err = ProfileIndex::new(2, 16u32).decode().unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { n: 2, .. }));
        assert!(ProfileIndex::new(1, 1u32).decode().is_err());
    }

    #[test]
    fn exhaustive_round_trip_n2() {
        let mut seen = std::collections::HashSet::new();
        for v in 0u32..16 {
            let idx = ProfileIndex::new(2, v);
            let prof = idx.decode().unwrap();
            assert_eq!(prof.encode(), idx);
            seen.insert(prof);
        }
        assert_eq!(seen.len(), 16);
    }

    #[test]
    fn parse_examples() {
        let prof = parse_profile("1 2\n2 1\n2 1\n1 2\n").unwrap();
        assert_eq!(prof.ratings(Side::Men), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(prof.ratings(Side::Women), vec![vec![2, 1], vec![1, 2]]);

        let one = parse_profile("1\n1\n").unwrap();
        assert_eq!(one.n(), 1);

        let err = parse_profile("1 2\n1 1\n1 2\n2 1\n").unwrap_err();
        match err {
            Error::Parse { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("row 2"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_skips_comments_and_reports_shape_errors() {
        let prof = parse_profile("# example\n\n1 2\n2 1\n\n# women\n2 1\n1 2\n").unwrap();
        assert_eq!(prof.man_rank(1, 0), 2);
        assert!(matches!(
            parse_profile("1 2\n2 1 3\n").unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
        assert!(matches!(parse_profile("1 2\n2 1\n").unwrap_err(), Error::Parse { .. }));
        assert!(matches!(
            parse_profile("1 2\n2 1\n2 1\n1 2\n1 2\n").unwrap_err(),
            Error::Parse { line: 5, .. }
        ));
        assert!(matches!(parse_profile("1 x\n").unwrap_err(), Error::Parse { line: 1, .. }));
        assert!(parse_profile("").is_err());
    }

    #[test]
    fn text_round_trip() {
        let prof = p(&[&[1, 2, 3], &[2, 3, 1], &[3, 2, 1]], &[&[3, 1, 2], &[1, 2, 3], &[1, 2, 3]]);
        assert_eq!(parse_profile(&prof.to_text()).unwrap(), prof);
    }

    #[test]
    fn complement_examples() {
        let one = p(&[&[1]], &[&[1]]);
        assert_eq!(one.complement(), one);
        let prof = p(&[&[1, 2], &[2, 1]], &[&[2, 1], &[1, 2]]);
        assert_eq!(prof.complement(), p(&[&[2, 1], &[1, 2]], &[&[1, 2], &[2, 1]]));
    }

    #[test]
    fn invalid_rows_name_the_row() {
        let err = PreferenceProfile::new(&[vec![1, 2], vec![2, 2]], &[vec![1, 2], vec![1, 2]]).unwrap_err();
        assert_eq!(err, Error::InvalidRow { side: Side::Men, row: 2, n: 2 });
        let err = PreferenceProfile::new(&[vec![1, 2], vec![2, 1]], &[vec![1, 2], vec![3, 1]]).unwrap_err();
        assert_eq!(err, Error::InvalidRow { side: Side::Women, row: 2, n: 2 });
    }

    #[test]
    fn preference_order_inverts_ratings() {
        let prof = p(&[&[2, 3, 1], &[1, 2, 3], &[3, 1, 2]], &[&[1, 2, 3], &[1, 2, 3], &[1, 2, 3]]);
        assert_eq!(prof.preference_order(Side::Men, 0), vec![2, 0, 1]);
        assert_eq!(prof.preference_order(Side::Men, 2), vec![1, 2, 0]);
    }

    #[test]
    fn json_shape() {
        let prof = p(&[&[1, 2], &[2, 1]], &[&[2, 1], &[1, 2]]);
        let v = serde_json::to_value(&prof).unwrap();
        assert_eq!(v["men"][1][0], 2);
        let back: PreferenceProfile = serde_json::from_value(v).unwrap();
        assert_eq!(back, prof);
    }
}
