use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn examples() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples")
}

fn example(name: &str) -> String {
    examples().join(name).to_string_lossy().into_owned()
}

fn varpi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varpi"))
        .args(args)
        .env_remove("VARPI_PREC")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = varpi(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn error(args: &[&str], code: i32) -> Value {
    let out = varpi(args);
    assert_eq!(out.status.code(), Some(code));
    assert!(out.stdout.is_empty());
    serde_json::from_slice(&out.stderr).expect("json error")
}

fn rat(num: i64, den: i64) -> Value {
    serde_json::json!({ "num": num, "den": den })
}

#[test]
fn constants_example() {
    let r = report(&["constants", "--p", "3", "--f", "1", "--e", "1", "--prec", "20"]);
    assert_eq!(r["schema"], "v1");
    assert_eq!(r["gauss_sums"][0]["valuation"], rat(1, 2));
    assert_eq!(r["raynaud"][0]["i"], 1);
    assert_eq!(r["raynaud"][0]["is_one"], true);
    assert_eq!(r["raynaud_total"]["valuation"], rat(1, 1));
}

#[test]
fn constants_every_index_matches_prediction() {
    let r = report(&["constants", "--p", "3", "--f", "2", "--prec", "8"]);
    let sums = r["gauss_sums"].as_array().unwrap();
    assert_eq!(sums.len(), 8);
    for s in sums {
        assert_eq!(s["valuation"], s["predicted"], "index {}", s["i"]);
    }
    assert!(r["raynaud"].as_array().unwrap().iter().all(|w| w["is_one"] == true));
}

#[test]
fn weights_example() {
    let r = report(&["weights", "--p", "3", "--e", "1", "--f", "1", "--s-val", "0", "--r", "1"]);
    assert_eq!(r["accessible"], true);
    assert_eq!(r["max_w"]["value"], rat(1, 3));
    assert_eq!(r["max_w"]["inclusive"], true);
    assert_eq!(r["disk"]["threshold"], rat(1, 2));
}

#[test]
fn weights_names_violated_bound() {
    let e = error(&["weights", "--p", "3", "--s-val", "-1", "--r", "1"], 2);
    assert_eq!(e["error"]["kind"], "bound");
    assert!(e["error"]["bound"].as_str().unwrap().contains("e/(p-1) - r"));
    let e = error(&["weights", "--p", "3", "--s-val", "0", "--r", "1", "--w", "1/2"], 2);
    assert_eq!(e["error"]["value"], rat(1, 2));
}

#[test]
fn weights_from_character_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chi.json");
    std::fs::write(
        &path,
        r#"{"schema": "v1",
            "tower": {"p": 3, "precision": 10, "steps": [{"kind": "eisenstein", "poly": [-3, 1]}]},
            "character": {"s": {"varpi": 1, "unit": 2}, "i": 5, "r": 1}}"#,
    )
    .unwrap();
    let r = report(&["weights", "--character", path.to_str().unwrap()]);
    assert_eq!(r["s_valuation"], rat(1, 1));
    assert_eq!(r["component"], 1);
    assert_eq!(r["accessible"], true);
}

#[test]
fn charpoly_two_by_two() {
    let r = report(&["charpoly", "--family", &example("two_by_two.json"), "--nu", "1"]);
    let slopes = r["slopes"]["slopes"].as_array().unwrap();
    assert_eq!(slopes.len(), 1);
    assert_eq!(slopes[0]["slope"], rat(1, 1));
    assert_eq!(slopes[0]["multiplicity"], 2);
    assert_eq!(r["slopes"]["horizon"]["infinite"], true);
    assert_eq!(r["riesz_dimension"], 2);
    assert_eq!(r["coefficients"][2]["valuation"], rat(2, 1));
}

#[test]
fn bundled_families_round_trip() {
    for name in ["two_by_two.json", "diagonal.json", "jordan_block.json", "toy_restriction.json"] {
        let path = example(name);
        let out = varpi(&["family", "canonicalize", &path]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(out.stdout, std::fs::read(&path).unwrap(), "{name}");
    }
}

#[test]
fn missing_normalization_pointer() {
    let e = error(&["charpoly", "--family", &example("missing_normalization.json")], 2);
    assert_eq!(e["schema"], "v1");
    assert_eq!(e["error"]["kind"], "schema");
    assert_eq!(e["error"]["pointer"], "/normalization");
}

#[test]
fn expected_reports_reproduce() {
    let diag = example("diagonal.json");
    let cases: Vec<(&str, Vec<&str>)> = vec![
        ("two_by_two.charpoly.json", vec!["charpoly", "--family", "TWO", "--nu", "1"]),
        (
            "diagonal.eigencurve.json",
            vec!["eigencurve", "--family", &diag, "--grid-step", "3", "--grid-count", "10", "--nu", "2", "--deform-nu", "1"],
        ),
        (
            "diagonal.eigencurve.csv",
            vec!["--format", "csv", "eigencurve", "--family", &diag, "--grid-step", "3", "--grid-count", "10", "--nu", "2"],
        ),
        ("weights.p3.json", vec!["weights", "--p", "3", "--s-val", "0", "--r", "1"]),
        ("constants.p3.json", vec!["constants", "--p", "3", "--prec", "20"]),
    ];
    let two = example("two_by_two.json");
    for (expected, args) in cases {
        let args: Vec<&str> = args.into_iter().map(|a| if a == "TWO" { two.as_str() } else { a }).collect();
        let out = varpi(&args);
        assert_eq!(out.status.code(), Some(0));
        let want = std::fs::read(examples().join("expected").join(expected)).unwrap();
        assert_eq!(out.stdout, want, "{expected}");
    }
}

#[test]
fn eigencurve_csv_sorted() {
    let out = varpi(&[
        "--format", "csv", "eigencurve", "--family", &example("diagonal.json"),
        "--grid-start", "28", "--grid-step", "-3", "--grid-count", "10", "--nu", "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut rd = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rd.headers().unwrap(), vec!["sigma", "slope", "eigenvalue_valuation", "margin"]);
    let rows: Vec<(i64, String)> = rd
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].to_string())
        })
        .collect();
    assert_eq!(rows.len(), 20);
    let mut sorted = rows.clone();
    sorted.sort();
    assert_eq!(rows, sorted);
}

#[test]
fn eigencurve_branch_and_collision() {
    let r = report(&[
        "eigencurve", "--family", &example("diagonal.json"),
        "--grid-step", "3", "--grid-count", "4", "--nu", "2", "--deform-nu", "1",
    ]);
    let branch = r["branch"]["points"].as_array().unwrap();
    assert_eq!(branch.len(), 4);
    for (j, p) in branch.iter().enumerate() {
        assert_eq!(p["sigma_label"], 1 + 3 * j as i64);
        assert_eq!(p["slope"], rat(1, 1));
    }
    assert!(r["branch"]["collision"].is_null());
    assert_eq!(r["margins_ok"], true);

    let r = report(&[
        "eigencurve", "--family", &example("jordan_block.json"),
        "--grid-step", "3", "--grid-count", "3", "--nu", "2", "--deform-nu", "1",
    ]);
    assert!(r["points"].as_array().unwrap().is_empty());
    assert_eq!(r["branch"]["collision"]["multiplicity"], 2);
    assert_eq!(r["branch"]["collision"]["slope"], rat(1, 1));
}

#[test]
fn grid_outside_disk_rejected() {
    let e = error(
        &["eigencurve", "--family", &example("diagonal.json"), "--grid-start", "2", "--grid-step", "3", "--grid-count", "2", "--nu", "2"],
        2,
    );
    assert_eq!(e["error"]["kind"], "bound");
}

#[test]
fn canonical_report() {
    let r = report(&["canonical", "--p", "3", "--w", "1/4", "--prec", "6"]);
    assert_eq!(r["hopf"]["all"], true);
    assert_eq!(r["gamma"]["integral"], true);
    assert_eq!(r["comultiplication"].as_array().unwrap().len(), 2);
    assert_eq!(r["dlog"]["canonical_valuation"], rat(3, 8));
    let e = error(&["canonical", "--p", "3", "--w", "3/4"], 2);
    assert_eq!(e["error"]["kind"], "bound");
}

#[test]
fn polygon_report() {
    let r = report(&["polygon", "--p", "3", "--w", "1/6"]);
    assert_eq!(r["reduction"], "supersingular");
    let roots = r["root_valuations"].as_array().unwrap();
    assert_eq!(roots[0]["valuation"], r["dlog"]["canonical_valuation"]);
    assert_eq!(roots[1]["valuation"], r["dlog"]["noncanonical_valuation"]);
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_varpi"))
        .args(["constants", "--p", "3"])
        .env("VARPI_PREC", "7")
        .output()
        .unwrap();
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    let flag = report(&["constants", "--p", "3", "--prec", "7"]);
    assert_eq!(r, flag);
}

#[test]
fn usage_errors_are_json() {
    let e = error(&["charpoly"], 2);
    assert_eq!(e["error"]["kind"], "usage");
    let e = error(&["--format", "csv", "constants", "--p", "3"], 2);
    assert_eq!(e["error"]["kind"], "usage");
}

#[test]
fn deterministic_runs() {
    let args = [
        "eigencurve", "--family", &example("toy_restriction.json"),
        "--grid-step", "3", "--grid-count", "6", "--degree", "6", "--nu", "3",
    ];
    let first = varpi(&args);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    for _ in 0..3 {
        assert_eq!(varpi(&args).stdout, first.stdout);
    }
}
