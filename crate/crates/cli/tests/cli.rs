use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polywedge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn report_has_the_four_top_level_fields() {
    let out = run(&["analyze", &data("simplex3.poly")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let keys: Vec<&str> = r.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["command", "input", "result", "violations"]);
    assert_eq!(r["command"], "analyze");
    assert_eq!(r["violations"], Value::Array(vec![]));
}

#[test]
fn simplex_has_diameter_one() {
    let r = report(&run(&["analyze", &data("simplex3.poly")]));
    assert_eq!(r["result"]["diameter"], 1);
    assert_eq!(r["result"]["simple"], true);
}

#[test]
fn facets_only_cube_is_completed() {
    let out = run(&["enumerate", &data("cube3_h.poly")]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["facets"], 6);
    assert_eq!(r["result"]["vertices"], 8);
    assert!(r["result"]["poly"].as_str().unwrap().contains("V 8"));
}

#[test]
fn hull_drops_interior_points() {
    let r = report(&run(&["enumerate", &data("square_v.poly")]));
    assert_eq!(r["result"]["vertices"], 4);
    assert_eq!(r["result"]["facets"], 4);
}

#[test]
fn wrong_leading_coordinate_is_a_parse_error() {
    let out = run(&["analyze", &data("bad_leading.poly")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 5") && err.contains("H row 1"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--bogus", &data("simplex3.poly")]).status.code(), Some(2));
    assert_eq!(run(&["wedge", &data("simplex3.poly"), "--foot", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["perturb", &data("simplex3.poly"), "--facet", "f0", "--eps", "x"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", &data("missing.poly")]).status.code(), Some(2));
}

#[test]
fn pwedge_writes_the_polytope_and_reports_fates() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.poly");
    let out = run(&[
        "pwedge",
        &data("cube3_h.poly"),
        "--foot",
        "bottom",
        "--facet",
        "right",
        "--eps",
        "auto",
        "-o",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["dim"], 4);
    assert_eq!(r["result"]["perturbation"]["fates"].as_array().unwrap().len(), 12);
    assert!(r["result"].get("poly").is_none());

    let written = run(&["analyze", target.to_str().unwrap()]);
    assert_eq!(written.status.code(), Some(0));
    assert_eq!(report(&written)["result"]["dim"], 4);
}

#[test]
fn wedge_by_index_matches_wedge_by_label() {
    let by_label = report(&run(&["wedge", &data("cube3_h.poly"), "--foot", "top"]));
    let by_index = report(&run(&["wedge", &data("cube3_h.poly"), "--foot", "4"]));
    assert_eq!(by_label["result"], by_index["result"]);
    assert_eq!(by_label["result"]["facets"], 7);
    assert_eq!(by_label["result"]["vertices"], 12);
}

#[test]
fn lemma2_on_the_wedged_pyramid_survives() {
    let out = run(&[
        "verify",
        "lemma2",
        &data("wedged_square_pyramid.poly"),
        "--foot",
        "T",
        "--facet",
        "s1",
        "--y",
        "y_b",
        "--w",
        "y^t",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["survived"], true);
}

#[test]
fn lemma2_failed_preconditions_exit_one() {
    let out = run(&[
        "verify",
        "lemma2",
        &data("cube3_h.poly"),
        "--foot",
        "bottom",
        "--facet",
        "right",
        "--y",
        "0",
        "--w",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert!(!r["violations"].as_array().unwrap().is_empty());
}

#[test]
fn lemma1_on_the_cube_finds_a_nonrevisiting_path() {
    let out = run(&["verify", "lemma1", &data("cube3_h.poly"), "--x", "0", "--y", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["search_result"]["outcome"], "found");
    assert_eq!(r["result"]["precondition_met"], false);
}

#[test]
fn fates_match_on_the_pyramid_wedge() {
    let out = run(&[
        "verify",
        "fates",
        &data("wedged_square_pyramid.poly"),
        "--foot",
        "T",
        "--facet",
        "s1",
        "--format",
        "text",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!String::from_utf8(out.stdout).unwrap().contains("MISMATCH"));
}

#[test]
fn path_image_is_not_longer() {
    let out = run(&[
        "verify",
        "path-image",
        &data("wedged_square_pyramid.poly"),
        "--foot",
        "T",
        "--facet",
        "s1",
        "--path",
        "b3,y^t,y_b",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["result"]["increased"], false);
}

#[test]
fn output_is_deterministic() {
    let args = ["pwedge", &data("wedged_square_pyramid.poly"), "--foot", "T", "--facet", "s1"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn fixture_round_trips_through_the_file_format() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.poly");
    let second = dir.path().join("b.poly");
    assert!(run(&["fixture", "cube4", "-o", first.to_str().unwrap()]).status.success());
    assert!(run(&["enumerate", first.to_str().unwrap(), "-o", second.to_str().unwrap()]).status.success());
    assert_eq!(
        std::fs::read_to_string(first).unwrap(),
        std::fs::read_to_string(second).unwrap()
    );
}

#[test]
fn text_format_lists_fixtures() {
    let out = run(&["fixture", "--list", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "wedged_square_pyramid"));
}
