use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn paramdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paramdp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}):\n{}\nstderr:\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn run_ok(args: &[&str]) -> Value {
    let out = paramdp(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    json_of(&out)
}

fn temp_bundle(name: &str, v: &Value) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("paramdp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path
}

#[test]
fn builtin_law_suite_passes_and_is_deterministic() {
    let out = paramdp(&["check-laws", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json_of(&out);
    assert_eq!(report["passed"], json!(true));
    let suites: Vec<&str> = report["suites"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["suite"].as_str().unwrap())
        .collect();
    for want in ["monad.identity", "monad.distribution", "dp", "para.interval"] {
        assert!(suites.contains(&want), "{suites:?}");
    }
}

#[test]
fn same_seed_gives_identical_reports() {
    let args = ["check-laws", "--seed", "7", "--samples", "30"];
    assert_eq!(paramdp(&args).stdout, paramdp(&args).stdout);
}

#[test]
fn injected_fault_fails_associativity() {
    let out = paramdp(&[
        "check-laws",
        "--samples",
        "50",
        "--inject-fault",
        "swapped-interval-join",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report = json_of(&out);
    let interval = report["suites"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["suite"] == "monad.interval")
        .unwrap();
    let assoc = interval["outcomes"]
        .as_array()
        .unwrap()
        .iter()
        .find(|o| o["law"] == "associativity")
        .unwrap();
    assert_eq!(assoc["passed"], json!(false));
    assert!(assoc["witness"].is_string());
}

#[test]
fn bundle_law_suite() {
    for name in ["ev.json", "ev_interval.json", "ev_distribution.json", "infer.json"] {
        let report = run_ok(&["check-laws", fixture(name).to_str().unwrap(), "--samples", "20"]);
        assert_eq!(report["passed"], json!(true), "{name}");
    }
}

#[test]
fn eval_summarizes_the_ev_composite() {
    let s = run_ok(&["eval", fixture("ev_interval.json").to_str().unwrap()]);
    assert_eq!(s["monad"], "interval");
    assert_eq!(s["src"]["size"], 25);
    assert_eq!(s["tgt"]["size"], 25);
    let names: Vec<&Value> = s["src"]["factors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| &f["name"])
        .collect();
    assert_eq!(names, [&json!("v"), &json!("l")]);
    assert_eq!(s["params"]["points"], 1);
    assert_eq!(s["payload"]["support_size"]["max"], 2);
    assert!(s["payload"]["interval_width"]["min"].as_u64().unwrap() > 0);
}

/// Minimal (cost, mass) pairs per (v, l), by scanning every internal wire value.
fn ev_oracle(v: i64, l: i64, chassis: impl Fn(i64, i64) -> i64) -> Vec<(i64, i64)> {
    let (masses, loads, powers, costs) = ([0, 1, 2, 3, 4], [0, 2, 4, 6, 8], [0, 3, 6, 9, 12], [0, 3, 6, 9, 12]);
    let feasible = |c: i64, m: i64| {
        masses.iter().any(|&mw| {
            loads.iter().any(|&lt| {
                l + mw <= lt
                    && powers.iter().any(|&p| {
                        chassis(v, lt) <= p
                            && costs.iter().any(|&c2| {
                                masses
                                    .iter()
                                    .any(|&m2| p <= c2 && p <= 3 * m2 && c2 <= c && m2 <= m && m2 <= mw)
                            })
                    })
            })
        })
    };
    let all: Vec<(i64, i64)> = costs
        .iter()
        .flat_map(|&c| masses.iter().map(move |&m| (c, m)))
        .filter(|&(c, m)| feasible(c, m))
        .collect();
    let mut front: Vec<(i64, i64)> = all
        .iter()
        .copied()
        .filter(|&(c, m)| !all.iter().any(|&(c2, m2)| (c2, m2) != (c, m) && c2 <= c && m2 <= m))
        .collect();
    front.sort_unstable();
    front
}

fn pairs(antichain: &Value) -> Vec<(i64, i64)> {
    let mut out: Vec<(i64, i64)> = antichain
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e[0].as_i64().unwrap(), e[1].as_i64().unwrap()))
        .collect();
    out.sort_unstable();
    out
}

#[test]
fn ev_pareto_fronts_match_brute_force() {
    let q = run_ok(&["query", fixture("ev.json").to_str().unwrap()]);
    let fronts = q["results"][0]["fronts"].as_array().unwrap();
    assert_eq!(fronts.len(), 25);
    for entry in fronts {
        let (v, l) = (entry["f"][0].as_i64().unwrap(), entry["f"][1].as_i64().unwrap());
        let got = pairs(&entry["points"][0]["front"]["antichain"]);
        assert_eq!(got, ev_oracle(v, l, |v, lt| v + lt), "at v={v}, l={l}");
    }
    let single = &q["results"][1];
    assert_eq!(single["name"], "at_v2_l1");
    assert_eq!(single["fronts"].as_array().unwrap().len(), 1);
}

#[test]
fn decide_flips_between_expected_and_worst_case() {
    let d = run_ok(&["decide", fixture("decide_flip.json").to_str().unwrap()]);
    let chosen: Vec<&str> = d["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["point_name"].as_str().unwrap())
        .collect();
    assert_eq!(chosen, ["a", "b", "a"]);
    assert_eq!(d["results"][0]["score"]["value"], json!(2.0));
    assert_eq!(d["results"][1]["score"]["exact"], "5/2");
}

#[test]
fn infer_degenerate_and_uninformative() {
    let r = run_ok(&["infer", fixture("infer.json").to_str().unwrap()]);
    let post = |i: usize| r["results"][i]["posterior"].clone();
    assert_eq!(post(0), json!({"d1": 1.0, "d2": 0.0, "d3": 0.0}));
    assert_eq!(post(1), json!({"d1": 0.2, "d2": 0.3, "d3": 0.5}));
    assert_eq!(post(2), json!({"d1": 0.8, "d2": 0.0, "d3": 0.2}));
}

#[test]
fn posterior_output_round_trips_as_a_prior() {
    let r = run_ok(&["infer", fixture("infer.json").to_str().unwrap()]);
    let posterior = r["results"][2]["posterior"].clone();
    let mut bundle: Value = serde_json::from_str(&std::fs::read_to_string(fixture("infer.json")).unwrap()).unwrap();
    bundle["queries"] = json!([{"infer": {"cell": "Y", "factor": "d", "prior": posterior, "observations": []}}]);
    let path = temp_bundle("prior.json", &bundle);
    let again = run_ok(&["infer", path.to_str().unwrap()]);
    assert_eq!(again["results"][0]["posterior"], posterior);
}

#[test]
fn query_output_round_trips_as_element_specs() {
    let q = run_ok(&["query", fixture("ev.json").to_str().unwrap()]);
    let entry = &q["results"][0]["fronts"][7];
    let mut bundle: Value = serde_json::from_str(&std::fs::read_to_string(fixture("ev.json")).unwrap()).unwrap();
    bundle["queries"] = json!([{"query": {"f": entry["f"].clone()}}]);
    let path = temp_bundle("query.json", &bundle);
    let again = run_ok(&["query", path.to_str().unwrap()]);
    assert_eq!(again["results"][0]["fronts"][0], *entry);
}

#[test]
fn fit_examples() {
    let f = run_ok(&["fit", fixture("fit.json").to_str().unwrap()]);
    let results = f["results"].as_array().unwrap();
    assert_eq!(results[0]["theta"], json!({"theta": 2}));
    assert_eq!(results[0]["loss"], json!(0.0));
    assert_eq!(results[1]["theta"], json!({"theta": 2}));
    assert_eq!(results[1]["feasible_points"], 2);
    assert_eq!(results[2]["theta"], json!({"a": 1, "b": 1}));
}

#[test]
fn malformed_bundles_exit_2_with_a_pointer() {
    let path = temp_bundle(
        "bad.json",
        &json!({"monad": "identity", "posets": {"V": {"grid": [{"name": "v", "values": [1, "x"]}]}}}),
    );
    let out = paramdp(&["eval", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("/posets/V/grid/0/values/1"), "{err}");
    assert!(out.stdout.is_empty());

    let path = temp_bundle(
        "ill_typed.json",
        &json!({"monad": "identity", "posets": {"A": {"chain": [0]}, "B": {"chain": [0, 1]}}, "diagram": "id(A) ;\n  id(B)"}),
    );
    let out = paramdp(&["eval", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("1:1") && err.contains("A[1]") && err.contains("B[2]"),
        "{err}"
    );
    let path = temp_bundle(
        "syntax.json",
        &json!({"monad": "identity", "diagram": "id(A) ;\n  | id(B)"}),
    );
    let out = paramdp(&["eval", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("2:3"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let out = paramdp(&["eval", "/nonexistent/bundle.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = paramdp(&["decide", fixture("ev.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = paramdp(&["query", "--format", "yaml", fixture("ev.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table_format_and_out_file() {
    let out = paramdp(&[
        "decide",
        fixture("decide_flip.json").to_str().unwrap(),
        "--format",
        "table",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("<- chosen"));
    let infer = paramdp(&["infer", fixture("infer.json").to_str().unwrap(), "--format", "table"]);
    let text = String::from_utf8(infer.stdout).unwrap();
    // Rows sorted by mass, descending.
    let uninformative = text.split("uninformative").nth(1).unwrap();
    let d3 = uninformative.find("d3").unwrap();
    let d1 = uninformative.find("d1").unwrap();
    assert!(d3 < d1, "{text}");

    let dest = std::env::temp_dir().join(format!("paramdp-out-{}.json", std::process::id()));
    let out = paramdp(&[
        "fit",
        fixture("fit.json").to_str().unwrap(),
        "--out",
        dest.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(written["command"], "fit");
}
