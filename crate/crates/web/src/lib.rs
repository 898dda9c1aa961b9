//! Browser bindings: each export takes plain values and returns a JSON string.

use serde_json::{json, Value};
use smseq::census::{self, CensusSpec, Family, Statistic};
use smseq::matching::{self, enumerate_stable, gale_shapley};
use smseq::{formulas, PreferenceProfile, Side};
use wasm_bindgen::prelude::*;

/// Largest size the page will census; n = 4 takes hours.
pub const MAX_CENSUS_N: usize = 3;

fn to_js(r: Result<Value, String>) -> Result<String, JsValue> {
    r.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

fn solved(p: &PreferenceProfile, m: &smseq::Matching) -> Result<Value, String> {
    let couples: Vec<Value> = matching::pair_costs(p, m)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|c| json!({ "man": c.man + 1, "woman": c.woman + 1, "cost": c.cost }))
        .collect();
    let cost = matching::egalitarian_cost(p, m).map_err(|e| e.to_string())?;
    Ok(json!({ "couples": couples, "egalitarian_cost": cost }))
}

pub fn solve_json(profile: &str) -> Result<Value, String> {
    let p = PreferenceProfile::parse(profile).map_err(|e| e.to_string())?;
    let mut out = json!({ "n": p.n() });
    for (key, side) in [("men_proposing", Side::Men), ("women_proposing", Side::Women)] {
        let t = gale_shapley(&p, side);
        let mut v = solved(&p, &t.matching)?;
        v["rounds"] = json!(t.rounds);
        out[key] = v;
    }
    if p.n() <= 6 {
        let all = enumerate_stable(&p).map_err(|e| e.to_string())?;
        out["stable_matchings"] = all.iter().map(|m| solved(&p, m)).collect::<Result<Value, _>>()?;
    }
    Ok(out)
}

/// Gale-Shapley from both sides plus every stable matching (n <= 6).
#[wasm_bindgen]
pub fn solve(profile: &str) -> Result<String, JsValue> {
    to_js(solve_json(profile))
}

/// Rows n = 1..=max_n of F(n, k), the profiles with exactly k soulmate pairs.
pub fn soulmate_table_json(max_n: usize) -> Result<Value, String> {
    if max_n == 0 || max_n > 12 {
        return Err("max_n must be in 1..=12".into());
    }
    let rows = (1..=max_n)
        .map(|n| {
            (0..=n)
                .map(|k| formulas::evaluate("F", n, Some(k), max_n).map(|v| Value::String(v.to_string())))
                .collect::<Result<Vec<_>, _>>()
                .map(Value::Array)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    Ok(json!({ "rows": rows }))
}

#[wasm_bindgen]
pub fn soulmate_table(max_n: usize) -> Result<String, JsValue> {
    to_js(soulmate_table_json(max_n))
}

pub fn census_json(n: usize, family: &str, statistic: &str) -> Result<Value, String> {
    if n > MAX_CENSUS_N {
        return Err(format!("the demo censuses n <= {MAX_CENSUS_N}"));
    }
    let family: Family = family.parse().map_err(|e: smseq::Error| e.to_string())?;
    let stat: Statistic = statistic.parse().map_err(|e: smseq::Error| e.to_string())?;
    let spec = CensusSpec::new(n, family, [stat]).workers(1);
    let table = census::run_census(&spec).map_err(|e| e.to_string())?;
    serde_json::to_value(&table).map_err(|e| e.to_string())
}

/// Brute-force histogram of one statistic over a profile family.
#[wasm_bindgen]
pub fn census(n: usize, family: &str, statistic: &str) -> Result<String, JsValue> {
    to_js(census_json(n, family, statistic))
}
