//! End-to-end tests of the binary: exit codes, output determinism, and the
//! documented JSON/CSV shapes.

use std::process::{Command, Output};

fn cyclohecke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cyclohecke"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn exit_codes_contract() {
    // Success.
    let ok = cyclohecke(&[
        "--flavor",
        "deg",
        "--p",
        "2",
        "--n",
        "2",
        "--kappa",
        "0",
        "idempotents",
    ]);
    assert_eq!(ok.status.code(), Some(0));

    // Config errors: gcd(e, p) != 1, missing flags, non-prime p, bad sweep.
    for args in [
        vec![
            "--flavor",
            "nondeg",
            "--p",
            "3",
            "--e",
            "3",
            "--n",
            "2",
            "--kappa",
            "0",
            "idempotents",
        ],
        vec!["--flavor", "deg", "--p", "2", "--n", "2", "idempotents"],
        vec![
            "--flavor", "deg", "--p", "4", "--n", "2", "--kappa", "0", "dims",
        ],
        vec![
            "--flavor", "deg", "--p", "2", "--n", "2", "--kappa", "0", "--sweep", "n=3..1",
            "periods",
        ],
        vec![
            "--flavor", "deg", "--p", "2", "--e", "3", "--n", "2", "--kappa", "0", "dims",
        ],
    ] {
        let out = cyclohecke(&args);
        assert_eq!(out.status.code(), Some(2), "args: {args:?}");
    }

    // Verification failure: the mutation fixture breaks the relation gate.
    let bad = cyclohecke(&[
        "--flavor",
        "deg",
        "--p",
        "2",
        "--n",
        "2",
        "--kappa",
        "0",
        "--mutation-fixture",
        "verify",
    ]);
    assert_eq!(bad.status.code(), Some(3));
    let bad_bench = cyclohecke(&[
        "--flavor",
        "deg",
        "--p",
        "2",
        "--n",
        "2",
        "--kappa",
        "0",
        "--mutation-fixture",
        "bench",
    ]);
    assert_eq!(bad_bench.status.code(), Some(3));
    // Disagreement gate: no timings on stdout.
    assert!(bad_bench.stdout.is_empty());
}

#[test]
fn deterministic_output() {
    let args = [
        "--flavor", "nondeg", "--p", "3", "--e", "2", "--n", "3", "--kappa", "0,1", "--seed", "7",
        "verify",
    ];
    let first = cyclohecke(&args);
    let second = cyclohecke(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "byte-identical JSON");

    let args = [
        "--flavor",
        "deg",
        "--p",
        "2",
        "--n",
        "3",
        "--kappa",
        "0,1",
        "idempotents",
    ];
    let first = cyclohecke(&args);
    let second = cyclohecke(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn dims_examples() {
    for (n, kappa, expected) in [("3", "0,1", 48u64), ("2", "0", 2), ("4", "0,1,2", 1944)] {
        let out = cyclohecke(&[
            "--flavor", "deg", "--p", "3", "--n", n, "--kappa", kappa, "dims",
        ]);
        assert_eq!(out.status.code(), Some(0));
        let json = stdout_json(&out);
        assert_eq!(json["dim"], serde_json::json!(expected));
        assert_eq!(json["v"], serde_json::json!(1));
        assert_eq!(json["within_cap"], serde_json::json!(true));
    }
}

#[test]
fn kappa_is_canonicalized_as_a_multiset() {
    let a = cyclohecke(&[
        "--flavor",
        "deg",
        "--p",
        "3",
        "--n",
        "2",
        "--kappa",
        "1,0",
        "idempotents",
    ]);
    let b = cyclohecke(&[
        "--flavor",
        "deg",
        "--p",
        "3",
        "--n",
        "2",
        "--kappa",
        "0,1",
        "idempotents",
    ]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_csv_rows() {
    let out = cyclohecke(&[
        "--flavor", "deg", "--p", "2", "--n", "1", "--kappa", "0", "--out", "csv", "--sweep",
        "n=1..3", "periods",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.trim().lines().collect();
    // Header plus one row per (params, r): 1 + 2 + 3 = 6 rows.
    assert_eq!(lines.len(), 1 + 6);
    assert!(lines[0].starts_with("flavor,p,e,n,kappa,r"));
    for row in &lines[1..] {
        assert!(row.ends_with(",pass"), "row: {row}");
    }
}

#[test]
fn micro_case_reports() {
    // Case A: support {(0,1)}, all constructions equal.
    let out = cyclohecke(&[
        "--flavor",
        "deg",
        "--p",
        "2",
        "--n",
        "2",
        "--kappa",
        "0",
        "idempotents",
    ]);
    let json = stdout_json(&out);
    assert_eq!(json["support"], serde_json::json!([[0, 1]]));
    assert_eq!(json["all_pass"], serde_json::json!(true));

    // Case B periods: row (r = 2, d = 6, N = 0), verdict pass.
    let out = cyclohecke(&[
        "--flavor", "nondeg", "--p", "3", "--e", "2", "--n", "2", "--kappa", "0", "periods",
    ]);
    let json = stdout_json(&out);
    let reports = &json["runs"][0]["reports"];
    assert_eq!(reports[1]["r"], serde_json::json!(2));
    assert_eq!(reports[1]["d_observed"], serde_json::json!(6));
    assert_eq!(reports[1]["n_observed"], serde_json::json!(0));
    assert_eq!(reports[1]["verdict"], serde_json::json!(true));
}

#[test]
fn bench_reports_timings_and_stats() {
    let out = cyclohecke(&[
        "--flavor", "deg", "--p", "2", "--n", "3", "--kappa", "0,1", "bench",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json = stdout_json(&out);
    assert_eq!(json["all_pass"], serde_json::json!(true));
    assert!(json["timings_ns"]["spectral"].is_u64());
    assert!(json["timings_ns"]["interpolation"].is_u64());
    assert!(json["timings_ns"]["closed"].is_u64());
    assert!(json["timings_ns"]["per_sequence"].is_array());
    assert_eq!(
        json["closed_formula_stats"]["matrix_inversions"],
        serde_json::json!(0)
    );
}

#[test]
fn size_cap_refusal() {
    let out = cyclohecke(&[
        "--flavor",
        "deg",
        "--p",
        "3",
        "--n",
        "4",
        "--kappa",
        "0,1,2",
        "--size-cap",
        "1000",
        "idempotents",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
