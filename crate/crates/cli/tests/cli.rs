use std::process::{Command, Output};

use serde_json::Value;

fn floorsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_floorsum"))
        .args(args)
        .env("FLOORSUM_MEM_MB", "1024")
        .output()
        .expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("one JSON object per line"))
        .collect()
}

fn single(args: &[&str]) -> (Value, Output) {
    let out = floorsum(args);
    let mut recs = records(&out);
    assert_eq!(recs.len(), 1, "{}", String::from_utf8_lossy(&out.stdout));
    (recs.remove(0), out)
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn sum_small_phi() {
    let (r, out) = single(&["sum", "--function", "phi", "--x", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(r["command"], "sum");
    assert_eq!(r["outputs"]["value"], "4");
    assert_eq!(r["status"], "ok");
    assert!(r["elapsed_ms"].is_u64());
}

#[test]
fn sum_million_rho() {
    let (r, _) = single(&["sum", "--function", "phi", "--x", "1000000"]);
    assert_eq!(r["outputs"]["value"], "8073733");
    assert_eq!(r["outputs"]["rho"], "0.5844");
}

#[test]
fn naive_matches_blocks() {
    let (a, _) = single(&[
        "sum",
        "--function",
        "digit-sum:10",
        "--x",
        "1000",
        "--naive",
    ]);
    let (b, _) = single(&["sum", "--function", "digit-sum:10", "--x", "1000"]);
    assert_eq!(a["outputs"]["value"], b["outputs"]["value"]);
    assert_eq!(a["inputs"]["naive"], "true");
}

#[test]
fn threads_do_not_change_real_sums() {
    let (a, _) = single(&[
        "--threads",
        "1",
        "sum",
        "--function",
        "phi-over-n",
        "--x",
        "20000000",
    ]);
    let (b, _) = single(&[
        "--threads",
        "4",
        "sum",
        "--function",
        "phi-over-n",
        "--x",
        "20000000",
    ]);
    assert_eq!(a["outputs"]["value"], b["outputs"]["value"]);
}

#[test]
fn real_x_is_floored_with_warning() {
    let (r, out) = single(&["sum", "--function", "tau:2", "--x", "10.9"]);
    assert_eq!(r["inputs"]["x"], "10");
    // tau(10) + tau(5) + tau(3) + 2 tau(2) + 5 tau(1)
    assert_eq!(r["outputs"]["value"], "17");
    assert!(stderr(&out).contains("floored"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["sum", "--function", "bogus", "--x", "3"],
        vec!["sum", "--function", "phi", "--x", "zero"],
        vec!["sum", "--function", "phi", "--x", "0"],
        vec!["constant", "--function", "phi-over-n", "--growth", "fast"],
        vec!["exponent", "--word", "BXA"],
        vec!["exponent", "--word", "B", "--seed", "1,2"],
        vec!["check", "--suite", "everything"],
        vec!["table", "--which", "7.1"],
    ] {
        let out = floorsum(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn large_x_needs_force() {
    let (r, out) = single(&["sum", "--function", "phi", "--x", "2000000000000"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(r["status"], "error");
    assert_eq!(r["inputs"]["x"], "2000000000000");
}

#[test]
fn naive_guard_is_an_engine_error() {
    let (r, out) = single(&["sum", "--function", "phi", "--x", "1000000000", "--naive"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(r["status"], "error");
}

#[test]
fn table_rows_are_recomputed() {
    let out = floorsum(&["table", "--which", "6.1"]);
    let recs = records(&out);
    assert_eq!(recs.len(), 5);
    let rho: Vec<&str> = recs
        .iter()
        .map(|r| r["outputs"]["rho"].as_str().unwrap())
        .collect();
    // independently recomputed values; only the first matches the reference column
    assert_eq!(rho, ["0.5844", "0.5852", "0.5899", "0.5912", "0.5942"]);
    assert_eq!(recs[0]["status"], "ok");
    assert_eq!(recs[3]["outputs"]["reference"], "0.5909");
    assert_eq!(recs[3]["status"], "check_failed");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn neighbouring_tables() {
    let recs = records(&floorsum(&["table", "--which", "6.2"]));
    assert_eq!(recs[1]["inputs"]["x"], "1000001");
    assert_eq!(recs[1]["outputs"]["value"], "8671294");
    assert_eq!(recs[1]["outputs"]["reference"], "0.6274");
    let recs = records(&floorsum(&["table", "--which", "6.3"]));
    assert_eq!(recs[0]["outputs"]["value"], "136816406645");
    assert_eq!(recs[4]["inputs"]["x"], "10000000004");
    assert_eq!(recs[4]["outputs"]["reference"], "0.6144");
}

fn interval(r: &Value) -> (f64, f64) {
    let f = |k: &str| r["outputs"][k].as_str().unwrap().parse::<f64>().unwrap();
    (f("lo"), f("hi"))
}

#[test]
fn constants() {
    let (r, _) = single(&["constant", "--function", "phi-over-n", "--trunc", "1000000"]);
    let (lo, hi) = interval(&r);
    assert!(hi - lo <= 2e-5 && (0.5 * (lo + hi) - 0.78838).abs() <= 1e-5);
    assert_eq!(r["inputs"]["growth"], "power:1,0");

    let (r, _) = single(&[
        "constant",
        "--function",
        "lambda-omega:1.7320508075688772",
        "--trunc",
        "1000000",
    ]);
    let (lo, hi) = interval(&r);
    assert!(hi - lo <= 2e-4 && (0.5 * (lo + hi) - 1.77694).abs() <= 1e-4);

    let (r, _) = single(&[
        "constant",
        "--function",
        "tau:1",
        "--trunc",
        "100000",
        "--growth",
        "tau:1,1",
    ]);
    let (lo, hi) = interval(&r);
    assert!(lo <= 1.0 && 1.0 <= hi);
}

#[test]
fn constant_without_growth_class_fails() {
    let (r, out) = single(&["constant", "--function", "phi", "--trunc", "1000"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(r["status"], "error");
    assert_eq!(r["inputs"]["function"], "phi");
}

#[test]
fn exponent_chains() {
    let (r, out) = single(&[
        "exponent",
        "--word",
        "BA^3(BA^2)^2",
        "--seed",
        "13/84,55/84",
    ]);
    assert_eq!(r["outputs"]["k"], "3071/7887");
    assert_eq!(r["outputs"]["l"], "1380/2629");
    assert_eq!(r["outputs"]["theta"], "2629/4009");
    assert!(stderr(&out).contains("epsilon"));

    let (r, _) = single(&["exponent", "--word", "BA^3(BA^2)^2B", "--seed", "0,1"]);
    assert_eq!(r["outputs"]["k"], "97/251");
    assert_eq!(r["outputs"]["l"], "132/251");
    assert_eq!(r["outputs"]["theta"], "251/383");

    let (r, _) = single(&["exponent", "--word", "B"]);
    assert_eq!(
        (r["outputs"]["k"].as_str(), r["outputs"]["l"].as_str()),
        (Some("1/2"), Some("1/2"))
    );
}

#[test]
fn suites_pass() {
    for suite in [
        "harmonic",
        "tau-x",
        "vaaler",
        "phi-n2",
        "lemma42",
        "residual:tau:1",
    ] {
        let out = floorsum(&["check", "--suite", suite]);
        let recs = records(&out);
        assert!(!recs.is_empty());
        assert!(
            recs.iter().all(|r| r["status"] == "ok"),
            "{suite}: {recs:?}"
        );
        assert_eq!(out.status.code(), Some(0), "{suite}");
    }
}

#[test]
fn csv_and_json_agree_on_integers() {
    let json = records(&floorsum(&["table", "--which", "6.2"]));
    let out = floorsum(&["--format", "csv", "table", "--which", "6.2"]);
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let header = rdr.headers().unwrap().clone();
    let col = header.iter().position(|h| h == "output.value").unwrap();
    let values: Vec<String> = rdr.records().map(|r| r.unwrap()[col].to_string()).collect();
    let expect: Vec<String> = json
        .iter()
        .map(|r| r["outputs"]["value"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(values, expect);
    assert_eq!(header.iter().last(), Some("status"));
}
