use num_bigint::BigUint;
use smseq::registry::{self, check_sequence, export_bfile, parse_bfile, Kind, Producer, TermStatus};
use smseq::Error;

const NEW_SEQUENCES: [&str; 30] = [
    "A338665", "A340890", "A342573", "A343474", "A343475", "A343692", "A343693", "A343694", "A343695", "A343696",
    "A343697", "A343698", "A343699", "A343700", "A344662", "A344663", "A344664", "A344665", "A344666", "A344667",
    "A344668", "A344669", "A344670", "A344671", "A344689", "A344690", "A344691", "A344692", "A344693", "A345679",
];
const MENTIONS: [&str; 6] = ["A000142", "A001044", "A002860", "A069124", "A091868", "A185141"];

#[test]
fn every_listed_sequence_is_registered() {
    let reg = registry::registry();
    for id in NEW_SEQUENCES.iter().chain(&MENTIONS) {
        let e = reg.get(id).unwrap();
        assert!(!e.terms.is_empty(), "{id}");
    }
    assert_eq!(reg.entries().count(), 36);
}

fn max_level(e: &registry::SequenceEntry) -> usize {
    match e.kind {
        Kind::Scalar => e.offset + e.terms.len() - 1,
        Kind::Table => {
            let (mut rows, mut len) = (0, 0);
            while len < e.terms.len() {
                rows += 1;
                len += rows * rows - rows + 1;
            }
            rows
        }
    }
}

#[test]
fn reproducible_terms_match() {
    for e in registry::registry().entries() {
        let report = check_sequence(&e.id, max_level(e), false).unwrap();
        let bad: Vec<_> = report.mismatches().collect();
        assert!(bad.is_empty(), "{}: {bad:?}", e.id);
        assert_eq!(report.terms.len(), e.terms.len(), "{}", e.id);
        let computed = report.computed();
        match e.producer {
            Producer::Stored => assert_eq!(computed, 0),
            _ => assert!(computed > 0 || e.id == "A344667", "{} computed nothing", e.id),
        }
    }
}

#[test]
fn check_examples() {
    let r = check_sequence("A343698", 4, false).unwrap();
    assert!(r.all_match());
    let got: Vec<_> = r.terms.iter().map(|t| t.got.clone().unwrap()).collect();
    let want: Vec<BigUint> = [1u64, 2, 384, 40310784].map(BigUint::from).to_vec();
    assert_eq!(got, want);
    for (id, max, terms) in [("A344668", 3, [1u64, 14, 34080]), ("A343700", 3, [0, 2, 9984])] {
        let r = check_sequence(id, max, false).unwrap();
        assert!(r.all_match());
        let got: Vec<_> = r.terms.iter().map(|t| t.got.clone().unwrap()).collect();
        assert_eq!(got, terms.map(BigUint::from).to_vec());
    }
    assert!(matches!(check_sequence("A999999", 3, false), Err(Error::UnknownSequence(_))));
}

#[test]
fn stored_only_terms_are_marked() {
    let r = check_sequence("A069124", 14, false).unwrap();
    assert!(r.terms.iter().all(|t| t.status == TermStatus::StoredOnly && t.got.is_none()));
    let r = check_sequence("A002860", 7, false).unwrap();
    assert_eq!(r.computed(), 5);
    assert_eq!(r.terms[6].status, TermStatus::StoredOnly);
    let r = check_sequence("A344667", 10, false).unwrap();
    assert!(r.terms.iter().all(|t| t.status == TermStatus::Gated));
}

#[test]
fn bfile_round_trip() {
    for e in registry::registry().entries() {
        let Some(max) = e.compute_max else { continue };
        let max = max.min(max_level(e));
        let text = export_bfile(&e.id, max, false).unwrap();
        assert!(text.is_empty() || text.ends_with('\n'));
        let parsed = parse_bfile(&text).unwrap();
        let known: Vec<(usize, BigUint)> = e.known_terms().into_iter().take(parsed.len()).collect();
        assert_eq!(parsed, known, "{}", e.id);
    }
}

#[test]
fn table_bfile_numbers_flattened_terms() {
    let text = export_bfile("A344692", 2, false).unwrap();
    assert_eq!(text, "1 1\n2 2\n3 8\n4 8\n");
    assert!(matches!(export_bfile("A344691", 4, false), Err(Error::Gated { n: 4, .. })));
}

#[test]
fn formulas_extend_past_stored_terms() {
    let text = export_bfile("A001044", 10, false).unwrap();
    assert!(text.ends_with("10 13168189440000\n"));
    assert!(export_bfile("A001044", 21, false).is_err());
}

#[test]
fn entries_serialize_with_string_terms() {
    let e = registry::registry().get("A185141").unwrap();
    let v = serde_json::to_value(e).unwrap();
    assert_eq!(v["terms"][1], "16");
    assert_eq!(v["offset"], 1);
}
