use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_bigint::BigUint;
use smseq::census::{self, CensusSpec, Family, RunOptions, Statistic};
use smseq::formulas;
use smseq::Error;

fn table(n: usize, family: Family, stats: &[Statistic]) -> census::CensusTable {
    census::run_census(&CensusSpec::new(n, family, stats.iter().copied())).unwrap()
}

#[test]
fn stable_with_soulmates() {
    let want: [&[(usize, u64)]; 3] = [&[(1, 1)], &[(1, 14)], &[(1, 30840), (2, 5832)]];
    for (n, want) in (1..=3).zip(want) {
        let t = census::census_stable_with_soulmates(n).unwrap();
        assert_eq!(t.histogram(Statistic::StableCount).to_u64_rows(), want);
        // the family is everything except soulmate-free profiles
        assert_eq!(t.profiles, formulas::total_profiles(n) - formulas::soulmate_profiles(n, 0).unwrap());
    }
}

#[test]
fn soulmate_pair_caps_stable_count() {
    // with a soulmate pair the count is bounded by the maximum for n - 1
    let t = census::census_stable_with_soulmates(3).unwrap();
    let max = *t.histogram(Statistic::StableCount).rows.keys().last().unwrap();
    assert_eq!(max, 2);
}

#[test]
fn conservation_over_all_profiles() {
    for n in 1..=3 {
        let t = table(n, Family::All, &Statistic::ALL);
        let total = formulas::total_profiles(n);
        assert_eq!(t.profiles, total);
        for stat in [
            Statistic::StableCount,
            Statistic::SoulmateCount,
            Statistic::HellPairCount,
            Statistic::HellCoupleProfiles,
            Statistic::Outcasts,
        ] {
            assert_eq!(t.histogram(stat).total(), total, "{stat} n={n}");
        }
        // one row per stable matching
        let matchings = t.histogram(Statistic::StableCount).weighted_total();
        assert_eq!(t.histogram(Statistic::EgalitarianCostMatchings).total(), matchings);
        assert_eq!(t.histogram(Statistic::HellCoupleMatchings).total(), matchings);
    }
}

#[test]
fn egalitarian_edges() {
    for n in 2..=3 {
        let t = table(n, Family::All, &[Statistic::EgalitarianCostProfiles, Statistic::EgalitarianCostMatchings]);
        let p = t.histogram(Statistic::EgalitarianCostProfiles);
        let m = t.histogram(Statistic::EgalitarianCostMatchings);
        assert_eq!(p.get(2 * n), m.get(2 * n));
        assert_eq!(p.get(2 * n + 1), m.get(2 * n + 1));
        assert_eq!(p.get(2 * n), formulas::soulmate_profiles(n, n).unwrap());
        assert_eq!(*p.rows.keys().last().unwrap(), n * n + n);
    }
    // several stable matchings of one profile can differ in cost
    let t = table(3, Family::All, &[Statistic::EgalitarianCostProfiles]);
    assert_eq!(t.histogram(Statistic::EgalitarianCostProfiles).total(), BigUint::from(54276u32));
}

#[test]
fn hell_soulmate_duality() {
    for n in 1..=3 {
        let t = table(n, Family::All, &[Statistic::SoulmateCount, Statistic::HellPairCount]);
        assert_eq!(t.histogram(Statistic::SoulmateCount), t.histogram(Statistic::HellPairCount));
    }
}

#[test]
fn symmetry_reduction_is_consistent() {
    let stats = [
        Statistic::StableCount,
        Statistic::SoulmateCount,
        Statistic::HellPairCount,
        Statistic::EgalitarianCostProfiles,
        Statistic::EgalitarianCostMatchings,
        Statistic::HellCoupleMatchings,
    ];
    for n in 1..=3 {
        for family in [Family::All, Family::WithSoulmatePair, Family::LatinMen] {
            let full = census::run_census(&CensusSpec::new(n, family, stats)).unwrap();
            let reduced = census::run_census(&CensusSpec::new(n, family, stats).symmetry(true)).unwrap();
            assert_eq!(full.histograms, reduced.histograms, "{family} n={n}");
            assert_eq!(full.profiles, reduced.profiles);
        }
    }
    let err = census::run_census(&CensusSpec::new(2, Family::Disjoint, [Statistic::SoulmateCount]).symmetry(true));
    assert!(matches!(err, Err(Error::InvalidArgument(_))));
}

#[test]
fn restricted_family_sizes() {
    for n in 1..=3 {
        assert_eq!(census::count_family(n, Family::LatinMen).unwrap(), formulas::latin_men_profiles(n).unwrap());
        assert_eq!(census::count_family(n, Family::MutuallyLatin).unwrap(), formulas::mutually_latin_profiles(n).unwrap());
        assert_eq!(census::count_family(n, Family::Joint).unwrap(), formulas::joint_profiles(n).unwrap());
    }
}

#[test]
fn disjoint_n4_canonical_census() {
    let d = census::census_disjoint(4).unwrap();
    assert_eq!(d, BigUint::from(1031049216u64));
    let (upper, divisor) = formulas::disjoint_profile_bounds(4).unwrap();
    assert!(d <= upper);
    assert_eq!(&d % &divisor, BigUint::from(0u32));
}

#[test]
fn restricted_family_soulmate_structure() {
    for family in [Family::LatinMen, Family::MutuallyLatin, Family::Joint, Family::Disjoint] {
        let t = table(3, family, &[Statistic::StableCount]);
        assert!(t.histogram(Statistic::StableCount).total() > BigUint::from(0u32));
    }
    let t = table(3, Family::Disjoint, &[Statistic::SoulmateCount, Statistic::HellPairCount]);
    assert_eq!(t.histogram(Statistic::SoulmateCount).to_u64_rows(), vec![(1, 8784)]);
    assert_eq!(t.histogram(Statistic::HellPairCount).to_u64_rows(), vec![(1, 8784)]);
}

#[test]
fn guard_and_validation() {
    let big = CensusSpec::new(4, Family::All, [Statistic::StableCount]);
    assert!(matches!(census::run_census(&big), Err(Error::GuardExceeded { .. })));
    let est = census::estimate(&big).unwrap();
    assert!(est.guarded);
    assert_eq!(est.indices, 24u64.pow(8));

    assert!(census::run_census(&CensusSpec::new(0, Family::All, [Statistic::StableCount])).is_err());
    assert!(census::run_census(&CensusSpec::new(2, Family::All, [])).is_err());
    assert!(census::run_census(&CensusSpec::new(2, Family::All, [Statistic::StableCount]).workers(0)).is_err());
    assert!(census::run_census(&CensusSpec::new(5, Family::All, [Statistic::StableCount]).force(true)).is_err());
}

#[test]
fn cancel_discards_partial_results() {
    let cancel = AtomicBool::new(true);
    let opts = RunOptions {
        progress: None,
        cancel: Some(&cancel),
    };
    let spec = CensusSpec::new(3, Family::All, [Statistic::StableCount]).workers(2);
    assert_eq!(census::run_census_with(&spec, &opts).unwrap_err(), Error::Interrupted);

    // cancelling from the progress callback stops a running census
    let cancel = AtomicBool::new(false);
    let stop = |_: u64, _: u64| cancel.store(true, Ordering::Relaxed);
    let opts = RunOptions {
        progress: Some(&stop),
        cancel: Some(&cancel),
    };
    let spec = CensusSpec::new(3, Family::All, [Statistic::StableCount]).workers(1).chunk(100);
    assert_eq!(census::run_census_with(&spec, &opts).unwrap_err(), Error::Interrupted);
}

#[test]
fn progress_reaches_the_end() {
    let last = AtomicU64::new(0);
    let calls = AtomicU64::new(0);
    let cb = |done: u64, total: u64| {
        assert!(done <= total);
        calls.fetch_add(1, Ordering::Relaxed);
        last.fetch_max(done * 100 / total, Ordering::Relaxed);
    };
    let opts = RunOptions {
        progress: Some(&cb),
        cancel: None,
    };
    let spec = CensusSpec::new(3, Family::All, [Statistic::StableCount]).workers(1).chunk(50);
    census::run_census_with(&spec, &opts).unwrap();
    assert_eq!(last.load(Ordering::Relaxed), 100);
    assert!(calls.load(Ordering::Relaxed) <= 101);
}

#[test]
fn json_counts_are_strings() {
    let t = table(2, Family::All, &[Statistic::StableCount]);
    let v: serde_json::Value = serde_json::to_value(&t).unwrap();
    assert_eq!(v["histograms"]["stable-count"]["1"], "14");
    assert_eq!(v["profiles"], "16");
    assert_eq!(v["spec"]["family"], "all");
}

#[test]
fn names_round_trip() {
    for f in Family::ALL {
        assert_eq!(f.name().parse::<Family>().unwrap(), f);
    }
    for s in Statistic::ALL {
        assert_eq!(s.name().parse::<Statistic>().unwrap(), s);
    }
    assert!("nope".parse::<Family>().is_err());
}

#[test]
fn verify_report_lists_every_check() {
    let r = census::verify_formulas(2, false).unwrap();
    assert!(r.all_match(), "{:?}", r.mismatches().collect::<Vec<_>>());
    let names: Vec<&str> = r.rows.iter().map(|row| row.name.as_str()).collect();
    for expected in ["F[k=1]", "outcasts", "latin-men-soulmates[k=0]", "mutually-latin-soulmates[k=2]", "joint[generative]"] {
        assert!(names.contains(&expected), "{expected} missing");
    }
    let r3 = census::verify_formulas(3, false).unwrap();
    let row = |name: &str| r3.rows.iter().find(|r| r.name == name).unwrap().census.clone();
    assert_eq!(row("latin-men-soulmates[k=0]"), BigUint::from(768u32));
    assert_eq!(row("mutually-latin-soulmates[k=3]"), BigUint::from(24u32));
    assert_eq!(row("with-soulmate-pair"), BigUint::from(36672u32));
}
