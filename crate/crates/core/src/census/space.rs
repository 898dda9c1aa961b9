//! Enumerable profile spaces: contiguous index ranges map to runs of profiles.

use crate::classify;
use crate::error::{Error, Result, Side};
use crate::latin;
use crate::perm;
use crate::profile::PreferenceProfile;

use super::Family;

#[derive(Debug, Clone, Copy)]
enum Digit {
    ManRow(usize),
    WomanRow(usize),
    MenSquare,
    WomenSquare,
}

/// A family of profiles laid out as a mixed-radix index space.
///
/// Every index in `0..len()` maps to one enumerated item; for the disjoint family
/// an item is a men's matrix in canonical form whose compatible women's matrices
/// are found by backtracking.
pub(crate) struct Space {
    n: usize,
    family: Family,
    digits: Vec<Digit>,
    bases: Vec<u64>,
    rows: Vec<Vec<u8>>,
    squares: Vec<Vec<u8>>,
    len: u64,
    multiplier: u64,
}

impl Space {
    pub(crate) fn new(n: usize, family: Family, reduced: bool) -> Result<Space> {
        if n == 0 {
            return Err(Error::InvalidArgument("census needs n >= 1".into()));
        }
        if n > 8 {
            return Err(Error::InvalidArgument(format!("census is limited to n <= 8 (got {n})")));
        }
        if reduced && !matches!(family, Family::All | Family::WithSoulmatePair | Family::LatinMen) {
            return Err(Error::InvalidArgument(format!(
                "symmetry reduction is only available for families with unrestricted women ({family} is not)"
            )));
        }
        let nf = perm::factorial_u64(n);
        let women_rows = |digits: &mut Vec<Digit>| {
            let first = usize::from(reduced);
            digits.extend((first..n).map(Digit::WomanRow));
        };
        let mut digits = Vec::new();
        let mut squares = Vec::new();
        match family {
            Family::All | Family::WithSoulmatePair => {
                digits.extend((0..n).map(Digit::ManRow));
                women_rows(&mut digits);
            }
            Family::LatinMen => {
                squares = latin::all_latin_squares(n);
                digits.push(Digit::MenSquare);
                women_rows(&mut digits);
            }
            Family::MutuallyLatin | Family::Joint => {
                squares = latin::all_latin_squares(n);
                digits.push(Digit::MenSquare);
                digits.push(Digit::WomenSquare);
            }
            Family::Disjoint => {
                digits.extend((1..n).map(Digit::ManRow));
            }
        }
        let bases: Vec<u64> = digits
            .iter()
            .map(|d| match d {
                Digit::ManRow(_) | Digit::WomanRow(_) => nf,
                Digit::MenSquare | Digit::WomenSquare => squares.len() as u64,
            })
            .collect();
        let len = bases
            .iter()
            .try_fold(1u64, |acc, &b| acc.checked_mul(b))
            .ok_or_else(|| Error::InvalidArgument(format!("{family} index space for n={n} exceeds 64 bits")))?;
        let multiplier = match family {
            Family::Disjoint => nf * nf,
            _ if reduced => nf,
            _ => 1,
        };
        Ok(Space {
            n,
            family,
            digits,
            bases,
            rows: perm::all_permutations(n),
            squares,
            len,
            multiplier,
        })
    }

    pub(crate) fn len(&self) -> u64 {
        self.len
    }

    /// Every enumerated profile stands for this many profiles of the family.
    pub(crate) fn multiplier(&self) -> u64 {
        self.multiplier
    }

    /// Upper bound on the number of profiles visited, for cost estimates.
    pub(crate) fn visited_estimate(&self) -> f64 {
        match self.family {
            // each canonical men's matrix admits at most (n!)^(n-1) women's matrices
            Family::Disjoint => self.len as f64 * (perm::factorial_u64(self.n) as f64).powi(self.n as i32 - 1),
            _ => self.len as f64,
        }
    }

    fn apply(&self, profile: &mut PreferenceProfile, pos: usize, value: u64) {
        let n = self.n;
        match self.digits[pos] {
            Digit::ManRow(i) => profile.set_raw_row(Side::Men, i, &self.rows[value as usize]),
            Digit::WomanRow(i) => profile.set_raw_row(Side::Women, i, &self.rows[value as usize]),
            Digit::MenSquare | Digit::WomenSquare => {
                let side = if matches!(self.digits[pos], Digit::MenSquare) {
                    Side::Men
                } else {
                    Side::Women
                };
                let sq = &self.squares[value as usize];
                for i in 0..n {
                    profile.set_raw_row(side, i, &sq[i * n..(i + 1) * n]);
                }
            }
        }
    }

    /// Visits every profile of the family whose index lies in `start..end`.
    pub(crate) fn visit_range(&self, start: u64, end: u64, mut visit: impl FnMut(&PreferenceProfile)) {
        if start >= end {
            return;
        }
        let mut profile = PreferenceProfile::identity(self.n);
        let mut values = vec![0u64; self.digits.len()];
        let mut rest = start;
        for pos in (0..self.digits.len()).rev() {
            values[pos] = rest % self.bases[pos];
            rest /= self.bases[pos];
        }
        for (pos, &v) in values.iter().enumerate() {
            self.apply(&mut profile, pos, v);
        }
        let mut scratch = DisjointScratch::new(self.n);
        let mut index = start;
        loop {
            match self.family {
                Family::All | Family::LatinMen | Family::MutuallyLatin => visit(&profile),
                Family::WithSoulmatePair => {
                    if classify::count_soulmates(&profile) > 0 {
                        visit(&profile)
                    }
                }
                Family::Joint => {
                    if classify::is_joint(&profile) {
                        visit(&profile)
                    }
                }
                Family::Disjoint => scratch.complete(&mut profile, &self.rows, &mut visit),
            }
            index += 1;
            if index == end {
                break;
            }
            let mut pos = self.digits.len() - 1;
            loop {
                values[pos] += 1;
                if values[pos] < self.bases[pos] {
                    self.apply(&mut profile, pos, values[pos]);
                    break;
                }
                values[pos] = 0;
                self.apply(&mut profile, pos, 0);
                pos -= 1;
            }
        }
    }
}

/// Backtracking over women's rows `1..n` of a disjoint profile in canonical form:
/// man 1 and woman 1 both rate the other group in label order.
struct DisjointScratch {
    used: Vec<bool>,
}

impl DisjointScratch {
    fn new(n: usize) -> DisjointScratch {
        DisjointScratch { used: vec![false; n * n] }
    }

    fn complete(&mut self, profile: &mut PreferenceProfile, rows: &[Vec<u8>], visit: &mut impl FnMut(&PreferenceProfile)) {
        let n = profile.n();
        self.used.fill(false);
        // woman 1's column: man m rates her men[m][0]; she rates him m
        for m in 0..n {
            let cell = profile.raw_row(Side::Men, m)[0] as usize * n + m;
            if std::mem::replace(&mut self.used[cell], true) {
                return;
            }
        }
        self.fill(profile, 1, rows, visit);
    }

    fn fill(&mut self, profile: &mut PreferenceProfile, w: usize, rows: &[Vec<u8>], visit: &mut impl FnMut(&PreferenceProfile)) {
        let n = profile.n();
        if w == n {
            visit(profile);
            return;
        }
        let man_ranks: Vec<usize> = (0..n).map(|m| profile.raw_row(Side::Men, m)[w] as usize).collect();
        for row in rows {
            let cells: Vec<usize> = (0..n).map(|m| man_ranks[m] * n + row[m] as usize).collect();
            if cells.iter().any(|&c| self.used[c]) {
                continue;
            }
            for &c in &cells {
                self.used[c] = true;
            }
            profile.set_raw_row(Side::Women, w, row);
            self.fill(profile, w + 1, rows, visit);
            for &c in &cells {
                self.used[c] = false;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::ProfileIndex;
    use num_bigint::BigUint;

    #[test]
    fn all_space_follows_profile_index_order() {
        let space = Space::new(2, Family::All, false).unwrap();
        assert_eq!(space.len(), 16);
        let mut seen = Vec::new();
        space.visit_range(3, 11, |p| seen.push(p.encode().value));
        let expected: Vec<BigUint> = (3u32..11).map(BigUint::from).collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn ranges_tile_the_space() {
        let space = Space::new(3, Family::All, false).unwrap();
        let mut a = Vec::new();
        space.visit_range(0, space.len(), |p| a.push(p.encode()));
        let mut b = Vec::new();
        for start in (0..space.len()).step_by(1000) {
            space.visit_range(start, (start + 1000).min(space.len()), |p| b.push(p.encode()));
        }
        assert_eq!(a, b);
        assert_eq!(a.len(), 46656);
        assert_eq!(a.last().unwrap(), &ProfileIndex::new(3, 46655u32));
    }

    #[test]
    fn reduced_space_fixes_first_woman() {
        let space = Space::new(2, Family::All, true).unwrap();
        assert_eq!(space.len(), 8);
        assert_eq!(space.multiplier(), 2);
        space.visit_range(0, 8, |p| assert_eq!(p.ranking(Side::Women, 0).ratings(), vec![1, 2]));
        assert!(Space::new(2, Family::Disjoint, true).is_err());
    }

    #[test]
    fn restricted_families_are_members() {
        for family in [Family::LatinMen, Family::MutuallyLatin, Family::Joint, Family::Disjoint] {
            let space = Space::new(3, family, false).unwrap();
            let mut count = 0;
            space.visit_range(0, space.len(), |p| {
                count += 1;
                match family {
                    Family::LatinMen => assert!(classify::men_latin(p)),
                    Family::MutuallyLatin => assert!(classify::men_latin(p) && classify::women_latin(p)),
                    Family::Joint => assert!(classify::is_joint(p)),
                    Family::Disjoint => assert!(classify::is_disjoint(p)),
                    _ => unreachable!(),
                }
            });
            assert!(count > 0);
        }
    }

    #[test]
    fn oversized_space_is_refused() {
        assert!(Space::new(5, Family::All, false).is_err());
        assert!(Space::new(0, Family::All, false).is_err());
    }
}
