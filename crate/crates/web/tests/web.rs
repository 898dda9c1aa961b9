use serde_json::json;
use smseq_web::{census_json, solve_json, soulmate_table_json};

#[test]
fn solve_both_sides() {
    let v = solve_json("1 2 3\n2 3 1\n3 2 1\n3 1 2\n1 2 3\n1 2 3\n").unwrap();
    assert_eq!(v["men_proposing"]["egalitarian_cost"], 12);
    assert_eq!(v["women_proposing"]["egalitarian_cost"], 11);
    assert_eq!(v["stable_matchings"].as_array().unwrap().len(), 2);
    assert!(solve_json("1 2\n").is_err());
}

#[test]
fn table_rows() {
    let v = soulmate_table_json(3).unwrap();
    assert_eq!(v["rows"][1], json!(["2", "12", "2"]));
    let row: u64 = v["rows"][2].as_array().unwrap().iter().map(|x| x.as_str().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(row, 6u64.pow(6));
    assert!(soulmate_table_json(0).is_err());
}

#[test]
fn small_census() {
    let v = census_json(3, "all", "stable-count").unwrap();
    assert_eq!(v["histograms"]["stable-count"]["3"], "1092");
    assert!(census_json(4, "all", "stable-count").is_err());
    assert!(census_json(2, "all", "nope").is_err());
}
