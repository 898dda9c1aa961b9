//! Cross-checks closed-form counts against brute-force censuses.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::Serialize;

use crate::classify;
use crate::error::{Error, Result, Side};
use crate::formulas;
use crate::latin;
use crate::perm;
use crate::profile::PreferenceProfile;

use super::{drive, run_census, CensusSpec, Family, RunOptions, Space, Statistic, DEFAULT_CHUNK, GUARD_PROFILES};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyRow {
    pub name: String,
    #[serde(serialize_with = "super::ser_decimal")]
    pub census: BigUint,
    #[serde(serialize_with = "super::ser_decimal")]
    pub formula: BigUint,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub rows: Vec<VerifyRow>,
}

impl VerifyReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &VerifyRow> {
        self.rows.iter().filter(|r| !r.matches)
    }

    fn push_at_most(&mut self, name: &str, census: BigUint, bound: BigUint) {
        let matches = census <= bound;
        self.rows.push(VerifyRow {
            name: name.into(),
            census,
            formula: bound,
            matches,
        });
    }

    fn push(&mut self, name: impl Into<String>, census: impl Into<BigUint>, formula: BigUint) {
        let census = census.into();
        let matches = census == formula;
        self.rows.push(VerifyRow {
            name: name.into(),
            census,
            formula,
            matches,
        });
    }
}

// Profile predicates counted in the full pass.
#[derive(Clone, Copy)]
enum Flag {
    Queen,
    King,
    QueenAndKing,
    DominanceMen,
    DominanceWomen,
    DominanceBoth,
    SameTasteMen,
    SameTasteBoth,
    DistinctMen,
    DistinctBoth,
    MenLatin,
    MutuallyLatin,
    LatinProfile,
    Joint,
    Disjoint,
    Outcasts,
    OutcastHell,
}

const FLAGS: usize = Flag::OutcastHell as usize + 1;

#[derive(Clone)]
struct FamilyCounts {
    profiles: u64,
    flags: [u64; FLAGS],
    soulmates: Vec<u64>,
    hell_pairs: Vec<u64>,
}

impl FamilyCounts {
    fn new(n: usize) -> FamilyCounts {
        FamilyCounts {
            profiles: 0,
            flags: [0; FLAGS],
            soulmates: vec![0; n + 1],
            hell_pairs: vec![0; n + 1],
        }
    }

    fn merge(mut self, other: FamilyCounts) -> FamilyCounts {
        self.profiles += other.profiles;
        for (a, b) in self.flags.iter_mut().zip(other.flags) {
            *a += b;
        }
        for (a, b) in self.soulmates.iter_mut().zip(other.soulmates) {
            *a += b;
        }
        for (a, b) in self.hell_pairs.iter_mut().zip(other.hell_pairs) {
            *a += b;
        }
        self
    }

    fn add(&mut self, p: &PreferenceProfile) {
        let n = p.n();
        self.profiles += 1;
        self.soulmates[classify::count_soulmates(p)] += 1;
        self.hell_pairs[classify::count_hell_pairs(p)] += 1;
        let mut set = |f: Flag, on: bool| self.flags[f as usize] += u64::from(on);

        let queen = classify::has_homecoming_queen(p);
        let king = classify::has_homecoming_king(p);
        set(Flag::Queen, queen);
        set(Flag::King, king);
        set(Flag::QueenAndKing, queen && king);
        if n >= 2 {
            let dm = classify::dominance(p, 0, 1, Side::Men).unwrap();
            let dw = classify::dominance(p, 0, 1, Side::Women).unwrap();
            set(Flag::DominanceMen, dm);
            set(Flag::DominanceWomen, dw);
            set(Flag::DominanceBoth, dm && dw);
        }
        let stm = classify::same_taste(p, Side::Men);
        set(Flag::SameTasteMen, stm);
        set(Flag::SameTasteBoth, stm && classify::same_taste(p, Side::Women));
        let dm = classify::first_choices_distinct(p, Side::Men);
        set(Flag::DistinctMen, dm);
        set(Flag::DistinctBoth, dm && classify::first_choices_distinct(p, Side::Women));
        let ml = classify::men_latin(p);
        set(Flag::MenLatin, ml);
        set(Flag::MutuallyLatin, ml && classify::women_latin(p));
        set(Flag::LatinProfile, classify::is_latin_profile(p));
        set(Flag::Joint, classify::is_joint(p));
        set(Flag::Disjoint, classify::is_disjoint(p));
        let outcasts = classify::find_outcasts(p);
        set(Flag::Outcasts, !outcasts.is_empty());
        set(
            Flag::OutcastHell,
            outcasts.iter().any(|&(m, w)| p.man_rank(m, w) == n && p.woman_rank(w, m) == n),
        );
    }
}

/// Runs every census with a closed-form counterpart at size `n` and compares.
///
/// `n >= 4` needs `force`: the full pass visits `(n!)^(2n)` profiles.
pub fn verify_formulas(n: usize, force: bool) -> Result<VerifyReport> {
    verify_formulas_with(n, force, super::default_workers(), &RunOptions::default())
}

pub fn verify_formulas_with(n: usize, force: bool, workers: usize, opts: &RunOptions<'_>) -> Result<VerifyReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("verify needs n >= 1".into()));
    }
    if workers == 0 {
        return Err(Error::InvalidArgument("workers must be positive".into()));
    }
    let space = Space::new(n, Family::All, false)?;
    let visited = space.visited_estimate();
    if visited > GUARD_PROFILES && !force {
        return Err(Error::GuardExceeded {
            profiles: format!("{visited:.3e}"),
            estimated_seconds: (visited * 2e-7).ceil() as u64,
        });
    }
    let mut report = VerifyReport { n, rows: Vec::new() };

    let c = drive(
        &space,
        workers,
        DEFAULT_CHUNK,
        opts,
        || (),
        |_, start, end| {
            let mut acc = FamilyCounts::new(n);
            space.visit_range(start, end, |p| acc.add(p));
            acc
        },
        || FamilyCounts::new(n),
        FamilyCounts::merge,
    )?;
    full_pass_rows(&mut report, n, &c)?;
    men_matrix_rows(&mut report, n)?;
    generative_rows(&mut report, n, workers, force)?;
    Ok(report)
}

fn full_pass_rows(report: &mut VerifyReport, n: usize, c: &FamilyCounts) -> Result<()> {
    let flag = |f: Flag| c.flags[f as usize];
    report.push("total", c.profiles, formulas::total_profiles(n));
    for k in 0..=n {
        report.push(format!("F[k={k}]"), c.soulmates[k], formulas::soulmate_profiles(n, k)?);
    }
    for k in 0..=n {
        report.push(format!("hell-pairs[k={k}]"), c.hell_pairs[k], formulas::soulmate_profiles(n, k)?);
    }
    report.push("homecoming-queen", flag(Flag::Queen), formulas::homecoming_queen_profiles(n));
    report.push("homecoming-king", flag(Flag::King), formulas::homecoming_queen_profiles(n));
    report.push("homecoming-both", flag(Flag::QueenAndKing), formulas::homecoming_both(n));
    if n >= 2 {
        report.push("dominance", flag(Flag::DominanceMen), formulas::dominance_profiles(n)?);
        report.push("dominance[women]", flag(Flag::DominanceWomen), formulas::dominance_profiles(n)?);
        report.push("dominance-both", flag(Flag::DominanceBoth), formulas::dominance_both_sides(n)?);
    }
    report.push("same-taste", flag(Flag::SameTasteMen), formulas::same_taste_profiles(n));
    report.push("same-taste-both", flag(Flag::SameTasteBoth), formulas::same_taste_both(n));
    report.push("tastes-differ", flag(Flag::DistinctMen), formulas::tastes_differ_profiles(n)?);
    report.push("tastes-differ-both", flag(Flag::DistinctBoth), formulas::tastes_differ_both(n)?);
    report.push("latin-men", flag(Flag::MenLatin), formulas::latin_men_profiles(n)?);
    report.push("mutually-latin", flag(Flag::MutuallyLatin), formulas::mutually_latin_profiles(n)?);
    report.push("latin", flag(Flag::LatinProfile), formulas::latin_profiles(n)?);
    report.push("joint", flag(Flag::Joint), formulas::joint_profiles(n)?);
    let (upper, divisor) = formulas::disjoint_profile_bounds(n)?;
    let disjoint = BigUint::from(flag(Flag::Disjoint));
    report.push_at_most("disjoint-upper", disjoint.clone(), upper);
    report.push("disjoint[mod n!^2]", &disjoint % &divisor, BigUint::default());
    report.push("disjoint[generative]", disjoint, BigUint::default());
    report.push("outcasts", flag(Flag::Outcasts), formulas::outcast_profiles(n)?);
    report.push("outcast-hell", flag(Flag::OutcastHell), formulas::outcast_hell_profiles(n)?);
    Ok(())
}

/// Families defined by the men's matrix alone, enumerated over all `n!^n` matrices.
fn men_matrix_rows(report: &mut VerifyReport, n: usize) -> Result<()> {
    let rows = perm::all_permutations(n);
    let nf = rows.len();
    let mut digits = vec![0usize; n];
    let (mut queen, mut fixed, mut dominance, mut same, mut distinct, mut latin) = (0u64, 0u64, 0u64, 0u64, 0u64, 0u64);
    let mut multisets = BTreeSet::new();
    let mut profile = PreferenceProfile::identity(n);
    loop {
        for (i, &d) in digits.iter().enumerate() {
            profile.set_raw_row(Side::Men, i, &rows[d]);
        }
        let q = classify::has_homecoming_queen(&profile);
        queen += u64::from(q);
        fixed += u64::from(q && profile.man_rank(0, 0) == 1);
        if n >= 2 {
            dominance += u64::from(classify::dominance(&profile, 0, 1, Side::Men)?);
        }
        same += u64::from(classify::same_taste(&profile, Side::Men));
        distinct += u64::from(classify::first_choices_distinct(&profile, Side::Men));
        latin += u64::from(classify::men_latin(&profile));
        let mut sorted = digits.clone();
        sorted.sort_unstable();
        multisets.insert(sorted);

        let mut pos = n;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < nf {
                break;
            }
            digits[pos] = 0;
            if pos == 0 {
                pos = usize::MAX;
                break;
            }
        }
        if pos == usize::MAX {
            break;
        }
    }
    report.push("homecoming-queen-men", queen, formulas::homecoming_queen_men(n));
    report.push("homecoming-queen-fixed", fixed, formulas::homecoming_queen_fixed(n));
    if n >= 2 {
        report.push("dominance-men", dominance, formulas::dominance_men_only(n)?);
    }
    report.push("same-taste-men", same, formulas::same_taste_men(n));
    report.push("tastes-differ-men", distinct, formulas::tastes_differ_men_only(n)?);
    report.push("latin-squares", latin, formulas::latin_squares(n)?);
    report.push("latin-squares[backtracking]", latin::count_latin_squares(n), formulas::latin_squares(n)?);
    report.push("men-up-to-relabeling", multisets.len() as u64, formulas::men_profiles_up_to_relabeling(n)?);
    Ok(())
}

/// Restricted families enumerated generatively.
fn generative_rows(report: &mut VerifyReport, n: usize, workers: usize, force: bool) -> Result<()> {
    let census = |family: Family, stat: Statistic| {
        run_census(&CensusSpec::new(n, family, [stat]).workers(workers).force(force))
    };

    let t = census(Family::LatinMen, Statistic::SoulmateCount)?;
    let h = t.histogram(Statistic::SoulmateCount);
    for k in 0..=n {
        report.push(format!("latin-men-soulmates[k={k}]"), h.get(k), formulas::latin_men_soulmates(n, k)?);
    }
    let t = census(Family::MutuallyLatin, Statistic::SoulmateCount)?;
    let h = t.histogram(Statistic::SoulmateCount);
    for k in 0..=n {
        report.push(
            format!("mutually-latin-soulmates[k={k}]"),
            h.get(k),
            formulas::mutually_latin_soulmates(n, k)?,
        );
    }
    let t = census(Family::Joint, Statistic::SoulmateCount)?;
    report.push("joint[generative]", t.profiles, formulas::joint_profiles(n)?);

    // the filtered count from the full pass is the reference for the canonical-form census
    let disjoint = census(Family::Disjoint, Statistic::SoulmateCount)?.profiles;
    if let Some(row) = report.rows.iter_mut().find(|r| r.name == "disjoint[generative]") {
        row.formula = std::mem::replace(&mut row.census, disjoint);
        row.matches = row.census == row.formula;
    }

    let t = census(Family::WithSoulmatePair, Statistic::StableCount)?;
    report.push(
        "with-soulmate-pair",
        t.profiles,
        formulas::total_profiles(n) - formulas::soulmate_profiles(n, 0)?,
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sizes_match() {
        for n in 1..=3 {
            let report = verify_formulas(n, false).unwrap();
            let bad: Vec<_> = report.mismatches().collect();
            assert!(bad.is_empty(), "n={n}: {bad:?}");
            assert!(report.rows.len() > 20);
        }
    }

    #[test]
    fn four_is_guarded() {
        assert!(matches!(verify_formulas(4, false), Err(Error::GuardExceeded { .. })));
    }
}
