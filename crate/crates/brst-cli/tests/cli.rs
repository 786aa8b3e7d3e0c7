//! End-to-end checks of the `brst` binary: exit codes, JSON output,
//! byte-determinism and the cache round trip.

use std::path::Path;
use std::process::{Command, Output};

fn brst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brst"))
        .args(args)
        .env_remove("BRST_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn validate_builtin() {
    let out = brst(&["validate", "--algebra", "iso21"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("valid"));
}

#[test]
fn unknown_algebra_is_a_parse_error() {
    let out = brst(&["validate", "--algebra", "e8"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["kind"], "parse");
}

#[test]
fn invalid_algebra_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    // so(3) with an extra f^1_{12} component: Jacobi fails
    std::fs::write(
        &path,
        r#"{"name":"broken","basis":["e1","e2","e3"],
            "structure":[[0,1,2,"1"],[1,2,0,"1"],[2,0,1,"1"],[0,1,0,"1"]]}"#,
    )
    .unwrap();
    let out = brst(&["validate", "--spec-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["kind"], "validation");

    // malformed JSON is a parse error instead
    std::fs::write(&path, "{").unwrap();
    let out = brst(&["validate", "--spec-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spec_file_roundtrip_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("iso21.json");
    let alg = brst::liealg::iso21();
    std::fs::write(&path, alg.to_canonical_json()).unwrap();
    let from_file = brst(&[
        "killing",
        "--spec-file",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    let builtin = brst(&["killing", "--algebra", "iso21", "--format", "json"]);
    assert!(from_file.status.success());
    assert_eq!(stdout(&from_file), stdout(&builtin));
}

#[test]
fn hs_table_trivial_dims() {
    let out = brst(&[
        "hs-table",
        "--algebra",
        "iso3",
        "--module",
        "trivial",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(
        value["dims_per_ghost"],
        serde_json::json!([1, 0, 0, 2, 0, 0, 1])
    );
    assert_eq!(value["match"], serde_json::json!(true));
}

#[test]
fn empty_cohomology_json() {
    let out = brst(&[
        "cohomology",
        "--algebra",
        "so3",
        "--scheme",
        "ce_ghost",
        "--ghost",
        "1",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(value["dim"], serde_json::json!(0));
    assert_eq!(value["representatives"], serde_json::json!([]));
}

#[test]
fn descent_table_pattern() {
    let out = brst(&[
        "descent",
        "table",
        "--algebra",
        "iso21",
        "--max-curv-degree",
        "2",
        "--max-ghost",
        "6",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let rows = value["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 7);
    let count = |g: usize, d: usize| rows[g]["columns"][d].as_array().unwrap().len();
    // Table 2's nonzero pattern
    let expected = [
        ((0, 0), 1),
        ((0, 1), 1),
        ((0, 3), 2),
        ((1, 0), 1),
        ((1, 2), 2),
        ((2, 1), 5),
        ((3, 0), 5),
        ((3, 1), 1),
        ((4, 0), 1),
        ((5, 1), 3),
        ((6, 0), 3),
    ];
    for g in 0..7 {
        for d in 0..4 {
            let want = expected
                .iter()
                .find(|((eg, ed), _)| (*eg, *ed) == (g, d))
                .map(|(_, n)| *n)
                .unwrap_or(0);
            assert_eq!(count(g, d), want, "cell ({g},{d})");
        }
    }
}

#[test]
fn deform_check_reports_rank() {
    let out = brst(&["deform-check", "--lambda", "1", "--format", "json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(value["killing_rank"], serde_json::json!(6));
    assert_eq!(value["omega_nondegenerate"], serde_json::json!(true));
}

#[test]
fn transgress_prints_three_rungs() {
    let out = brst(&["transgress", "--algebra", "iso21", "--format", "json"]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(value["rungs"].as_array().unwrap().len(), 3);
    assert!(value["obstruction"].as_str().unwrap().contains("G1^2"));
}

#[test]
fn resource_guard_exits_four() {
    let out = brst(&[
        "hs-table",
        "--algebra",
        "iso21",
        "--max-curv-degree",
        "40",
        "--max-slice-monomials",
        "10000",
    ]);
    assert_eq!(out.status.code(), Some(4));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert_eq!(err["kind"], "resource");
}

#[test]
fn cache_cold_and_warm_runs_emit_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = |cache: &Path| {
        vec![
            "hs-table".to_string(),
            "--algebra".into(),
            "iso3".into(),
            "--module".into(),
            "universal".into(),
            "--max-curv-degree".into(),
            "2".into(),
            "--format".into(),
            "json".into(),
            "--cache-dir".into(),
            cache.to_str().unwrap().to_string(),
        ]
    };
    let run = |cache: &Path| {
        Command::new(env!("CARGO_BIN_EXE_brst"))
            .args(args(cache))
            .output()
            .expect("binary runs")
    };
    let cold = run(&cache);
    assert!(cold.status.success());
    // a cache file now exists
    let entries = std::fs::read_dir(&cache).unwrap().count();
    assert_eq!(entries, 1);
    let warm = run(&cache);
    assert!(warm.status.success());
    assert_eq!(cold.stdout, warm.stdout);
    // and an uncached run agrees byte for byte
    let other = dir.path().join("cache2");
    let fresh = run(&other);
    assert_eq!(cold.stdout, fresh.stdout);
}

#[test]
fn show_operator_table() {
    let out = brst(&[
        "show-operator",
        "--algebra",
        "iso3",
        "--scheme",
        "split_fc",
        "--name",
        "gamma_r1",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("F1 -> "));
    assert!(text.contains("eta1 -> 0"));
}

#[test]
fn jobs_flag_does_not_change_output() {
    let base = brst(&[
        "hs-table",
        "--algebra",
        "iso3",
        "--module",
        "trivial",
        "--format",
        "json",
    ]);
    let jobs1 = brst(&[
        "hs-table",
        "--algebra",
        "iso3",
        "--module",
        "trivial",
        "--format",
        "json",
        "--jobs",
        "1",
    ]);
    assert_eq!(base.stdout, jobs1.stdout);
}
