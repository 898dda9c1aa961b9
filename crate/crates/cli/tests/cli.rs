use std::io::Write;
use std::process::{Command, Output, Stdio};

const WORKED: &str = "# men\n1 2 3\n2 3 1\n3 2 1\n# women\n3 1 2\n1 2 3\n1 2 3\n";

fn smseq(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_smseq"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    if let Some(text) = stdin {
        pipe.write_all(text.as_bytes()).unwrap();
    }
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn formula_value() {
    let o = smseq(&["formula", "F", "--n", "4", "--k", "2"], None);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "23460876288\n");
    let o = smseq(&["formula", "F", "--n", "4", "--k", "2", "--format", "json"], None);
    let v = json(&o);
    assert_eq!(v["command"], "formula");
    assert_eq!(v["result"]["value"], "23460876288");
    assert_eq!(v["params"]["k"], 2);
    assert!(v["elapsed_ms"].is_u64());
}

#[test]
fn formula_errors_exit_2() {
    assert_eq!(smseq(&["formula", "nope", "--n", "3"], None).status.code(), Some(2));
    assert_eq!(smseq(&["formula", "F", "--n", "3"], None).status.code(), Some(2));
    let o = smseq(&["formula", "--list"], None);
    assert!(stdout(&o).lines().any(|l| l.starts_with("total")));
}

#[test]
fn solve_worked_example() {
    let o = smseq(&["solve", "--profile", "-"], Some(WORKED));
    assert!(o.status.success());
    assert_eq!(stdout(&o), "m1 w1 cost 4\nm2 w3 cost 3\nm3 w2 cost 5\ntotal 12 rounds 2\n");

    let o = smseq(&["solve", "--profile", "-", "--side", "women", "--format", "json"], Some(WORKED));
    let v = json(&o);
    assert_eq!(v["result"]["egalitarian_cost"], 11);
    assert_eq!(v["result"]["matching"], serde_json::json!([2, 3, 1]));
    assert_eq!(v["result"]["couples"][0]["man"], 1);
}

#[test]
fn enumerate_worked_example() {
    let o = smseq(&["enumerate", "--profile", "-", "--format", "json"], Some(WORKED));
    let v = json(&o);
    assert_eq!(v["result"]["count"], 2);
    let costs: Vec<u64> = v["result"]["stable_matchings"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["egalitarian_cost"].as_u64().unwrap())
        .collect();
    assert_eq!(costs, [12, 11]);
}

#[test]
fn profile_from_file_and_classify() {
    let dir = std::env::temp_dir().join(format!("smseq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("soulmates.txt");
    std::fs::write(&path, "1 2\n2 1\n1 2\n2 1\n").unwrap();
    let o = smseq(&["classify", "--profile", path.to_str().unwrap(), "--format", "json"], None);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["result"]["soulmate_pairs"], 2);
    assert_eq!(v["result"]["is_latin_profile"], false);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn bad_profiles_exit_2() {
    for bad in ["1 2\n", "1 1\n2 1\n1 2\n2 1\n", "1 x\n"] {
        let o = smseq(&["solve", "--profile", "-"], Some(bad));
        assert_eq!(o.status.code(), Some(2), "{bad:?}");
        assert!(o.stdout.is_empty());
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }
    assert_eq!(smseq(&["solve", "--profile", "/no/such/file"], None).status.code(), Some(2));
}

#[test]
fn random_profiles_are_seeded() {
    let a = smseq(&["solve", "--random", "6", "--seed", "3"], None);
    let b = smseq(&["solve", "--random", "6", "--seed", "3"], None);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 7);
}

#[test]
fn census_n3_stable_count() {
    let o = smseq(&["census", "--n", "3", "--stat", "stable-count", "--format", "csv", "--quiet"], None);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "value,count\n1,34080\n2,11484\n3,1092\n");
    assert!(o.stderr.is_empty());

    let o = smseq(&["census", "--n", "2", "--stat", "stable-count", "--stat", "soulmate-count", "--format", "json"], None);
    let v = json(&o);
    assert_eq!(v["result"]["histograms"]["stable-count"]["2"], "2");
    assert_eq!(v["result"]["histograms"]["soulmate-count"]["1"], "12");
    assert!(String::from_utf8_lossy(&o.stderr).contains("100%"));
}

#[test]
fn census_multi_stat_csv_and_text() {
    let o = smseq(&["census", "--n", "2", "--stat", "soulmate-count", "--stat", "hell-pair-count", "--format", "csv", "-q"], None);
    let s = stdout(&o);
    assert!(s.starts_with("statistic,value,count\n"));
    assert!(s.contains("hell-pair-count,2,2\n"));
    let o = smseq(&["census", "--n", "2", "--family", "latin-men", "--stat", "stable-count", "-q"], None);
    assert!(stdout(&o).contains("profiles 8\n"));
}

#[test]
fn census_guard_refuses() {
    let o = smseq(&["census", "--n", "4", "--stat", "stable-count"], None);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("--force"), "{err}");
    assert!(err.contains("estimated"), "{err}");
    assert_eq!(smseq(&["census", "--n", "2", "--stat", "bogus"], None).status.code(), Some(2));
    assert_eq!(smseq(&["census", "--n", "2", "--stat", "stable-count", "--workers", "0"], None).status.code(), Some(2));
}

#[test]
fn verify_small_sizes() {
    for n in ["1", "2", "3"] {
        let o = smseq(&["verify", "--n", n, "-q"], None);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).ends_with(" 0 mismatches\n"));
    }
    let v = json(&smseq(&["verify", "--n", "2", "-q", "--format", "json"], None));
    assert_eq!(v["result"]["all_match"], true);
    assert_eq!(smseq(&["verify", "--n", "4"], None).status.code(), Some(2));
}

#[test]
fn seq_commands() {
    let o = smseq(&["seq", "list"], None);
    assert_eq!(stdout(&o).lines().count(), 36);

    let o = smseq(&["seq", "check", "A343698", "--max", "4"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("4 40310784 40310784 ok"));

    let o = smseq(&["seq", "export", "A344668", "--max", "3"], None);
    assert_eq!(stdout(&o), "1 1\n2 14\n3 34080\n");

    let o = smseq(&["seq", "export", "A344691", "--max", "4"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--force"));

    assert_eq!(smseq(&["seq", "check", "A000000", "--max", "3"], None).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(smseq(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(smseq(&["census", "--n", "3"], None).status.code(), Some(2));
    assert_eq!(smseq(&["--help"], None).status.code(), Some(0));
}
