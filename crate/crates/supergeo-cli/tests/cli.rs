//! End-to-end tests that drive the compiled `supergeo` binary.
//!
//! Conventions exercised here:
//! * exit code 0 — command ran and every gate passed;
//! * exit code 1 — command ran but a gate failed, or a computation error
//!   was reported as diagnostic JSON on stdout;
//! * exit code 2 — the invocation itself was malformed.
//!
//! Reports go to stdout as JSON (except `verify` without `--json`, which
//! prints one line per catalog entry). Runs are deterministic: the same
//! invocation yields byte-identical output.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::tempdir;

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supergeo"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn supergeo")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout should be JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

/// Runs a command expected to exit 0 and returns its JSON report.
fn expect_pass(dir: &Path, args: &[&str]) -> Value {
    let out = run_in(dir, args);
    assert_eq!(
        code(&out),
        0,
        "`{}` should pass: {}{}",
        args.join(" "),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr),
    );
    stdout_json(&out)
}

// ---------------------------------------------------------------------------
// algebra + killing
// ---------------------------------------------------------------------------

#[test]
fn algebra_writes_file_and_reports_jacobi() {
    let dir = tempdir().unwrap();
    let report = expect_pass(
        dir.path(),
        &["algebra", "--family", "sl", "--n", "2", "--m", "1", "--out", "a.json"],
    );
    assert_eq!(report["algebra"], "sl(2|1)");
    assert_eq!(report["dim_even"], 4);
    assert_eq!(report["dim_odd"], 4);
    assert_eq!(report["jacobi_residual"], 0.0);
    assert_eq!(report["passed"], true);

    let doc: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.json")).unwrap())
            .unwrap();
    assert_eq!(doc["name"], "sl(2|1)");
    assert_eq!(doc["parities"].as_array().unwrap().len(), 8);
    assert!(!doc["constants"].as_array().unwrap().is_empty());
}

#[test]
fn killing_reports_supertrace_factor() {
    let dir = tempdir().unwrap();
    expect_pass(
        dir.path(),
        &["algebra", "--family", "sl", "--n", "2", "--m", "1", "--out", "a.json"],
    );
    let report = expect_pass(dir.path(), &["killing", "--in", "a.json"]);
    let fit = &report["str_multiple"];
    assert!((fit["factor"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(fit["proportional"], true);
    assert_eq!(report["vanishes"], false);
}

#[test]
fn killing_detects_identically_zero_form() {
    let dir = tempdir().unwrap();
    expect_pass(
        dir.path(),
        &["algebra", "--family", "sl", "--n", "2", "--m", "2", "--out", "a.json"],
    );
    let report = expect_pass(dir.path(), &["killing", "--in", "a.json"]);
    assert_eq!(report["vanishes"], true);
    assert_eq!(report["rank"], 0);
}

#[test]
fn algebra_json_survives_a_rewrite_and_runs_identically() {
    let dir = tempdir().unwrap();
    expect_pass(
        dir.path(),
        &["algebra", "--family", "osp", "--n", "3", "--m", "2", "--out", "a.json"],
    );
    // Re-serialize the document through a generic JSON pass.
    let doc: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.json")).unwrap())
            .unwrap();
    std::fs::write(dir.path().join("b.json"), serde_json::to_string(&doc).unwrap()).unwrap();

    let first = run_in(dir.path(), &["killing", "--in", "a.json"]);
    let second = run_in(dir.path(), &["killing", "--in", "b.json"]);
    let again = run_in(dir.path(), &["killing", "--in", "a.json"]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout, "rewrite should not change the report");
    assert_eq!(first.stdout, again.stdout, "repeat runs should be byte-identical");
}

// ---------------------------------------------------------------------------
// invariance
// ---------------------------------------------------------------------------

#[test]
fn invariance_checks_killing_form_on_osp() {
    let dir = tempdir().unwrap();
    expect_pass(
        dir.path(),
        &["algebra", "--family", "osp", "--n", "3", "--m", "2", "--out", "a.json"],
    );
    let report = expect_pass(dir.path(), &["invariance", "--in", "a.json"]);
    assert!(report["ad_invariance"].as_f64().unwrap() <= 1e-9);
    assert!(report["evenness"].as_f64().unwrap() == 0.0);
    assert!(report["reduced_group"].is_object());
}

#[test]
fn invariance_rejects_unknown_form_name() {
    let dir = tempdir().unwrap();
    expect_pass(
        dir.path(),
        &["algebra", "--family", "sl", "--n", "2", "--m", "1", "--out", "a.json"],
    );
    let out = run_in(dir.path(), &["invariance", "--in", "a.json", "--form", "cartan"]);
    assert_eq!(code(&out), 2);
}

// ---------------------------------------------------------------------------
// split + extend
// ---------------------------------------------------------------------------

#[test]
fn split_with_diagonal_signs_decomposes_sl22() {
    let dir = tempdir().unwrap();
    expect_pass(
        dir.path(),
        &["algebra", "--family", "sl", "--n", "2", "--m", "2", "--out", "a.json"],
    );
    let report = expect_pass(
        dir.path(),
        &["split", "--in", "a.json", "--diag-signs", "-1,1,-1,1", "--out", "dec.json"],
    );
    assert_eq!(report["involution_residual"], 0.0);
    assert_eq!(report["k_dims"][0], 3);
    assert_eq!(report["k_dims"][1], 4);
    assert_eq!(report["p_dims"][0], 4);
    assert_eq!(report["p_dims"][1], 4);

    let dec: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("dec.json")).unwrap())
            .unwrap();
    assert_eq!(dec["k_columns"].as_array().unwrap().len(), 7);
    assert_eq!(dec["p_columns"].as_array().unwrap().len(), 8);
}

/// The odd-odd pairing carried by the d(2,1;α) construction: the product of
/// three 2×2 symplectic factors over the bit decomposition of the index.
fn d21_pairing() -> Vec<Vec<f64>> {
    let psi = |a: usize, b: usize| -> f64 {
        if a == b {
            0.0
        } else if a == 0 {
            1.0
        } else {
            -1.0
        }
    };
    (0..8)
        .map(|x: usize| {
            (0..8)
                .map(|y: usize| {
                    psi((x >> 2) & 1, (y >> 2) & 1)
                        * psi((x >> 1) & 1, (y >> 1) & 1)
                        * psi(x & 1, y & 1)
                })
                .collect()
        })
        .collect()
}

#[test]
fn extend_finds_the_unique_invariant_form_on_d21() {
    let dir = tempdir().unwrap();
    expect_pass(
        dir.path(),
        &["algebra", "--family", "d21", "--sigma", "0.5,1.3", "--out", "a.json"],
    );
    std::fs::write(
        dir.path().join("odd.json"),
        serde_json::to_string(&d21_pairing()).unwrap(),
    )
    .unwrap();
    let report = expect_pass(dir.path(), &["extend", "--in", "a.json", "--odd-form", "odd.json"]);
    assert_eq!(report["unique"], true);
    assert_eq!(report["span_ok"], true);
    assert_eq!(report["faithful_ok"], true);
    assert!(report["invariance_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn extend_reports_failure_on_gl11() {
    let dir = tempdir().unwrap();
    expect_pass(
        dir.path(),
        &["algebra", "--family", "gl", "--n", "1", "--m", "1", "--out", "a.json"],
    );
    std::fs::write(dir.path().join("odd.json"), "[[0.0, 1.0], [-1.0, 0.0]]").unwrap();
    let out = run_in(dir.path(), &["extend", "--in", "a.json", "--odd-form", "odd.json"]);
    assert_eq!(code(&out), 1, "a failed extension hypothesis should exit 1");
    let report = stdout_json(&out);
    // The solve succeeds but the extension is neither unique nor faithful:
    // the report documents the failed hypothesis rather than erroring out.
    assert_eq!(report["unique"], false);
    assert_eq!(report["faithful_ok"], false);
    assert_eq!(report["passed"], false);
}

// ---------------------------------------------------------------------------
// geodesic + transport
// ---------------------------------------------------------------------------

#[test]
fn geodesic_csv_has_exact_header_and_reaches_e() {
    let dir = tempdir().unwrap();
    let report = expect_pass(
        dir.path(),
        &[
            "geodesic", "--chart", "hyperbolic", "--p", "0,1", "--v", "0,1", "--t-end", "1",
            "--step", "0.001", "--out", "curve.csv",
        ],
    );
    let y_end = report["terminal"]["g"][1].as_f64().unwrap();
    assert!(
        (y_end - std::f64::consts::E).abs() <= 1e-6,
        "vertical unit-speed geodesic should reach e at t=1, got {y_end}"
    );

    let csv = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,g_1,g_2,v_1,v_2"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1001, "1001 states for t in [0,1] at step 1e-3");
    for row in &rows {
        for field in row.split(',') {
            field.parse::<f64>().unwrap_or_else(|_| panic!("bad CSV field `{field}`"));
        }
    }
    let last: Vec<f64> = rows[1000].split(',').map(|f| f.parse().unwrap()).collect();
    assert!((last[0] - 1.0).abs() < 1e-12);
    assert!((last[2] - y_end).abs() < 1e-12, "CSV and report must agree");
}

#[test]
fn geodesic_csv_includes_odd_columns() {
    let dir = tempdir().unwrap();
    expect_pass(
        dir.path(),
        &[
            "geodesic", "--chart", "r12-odd", "--p", "0", "--v", "1", "--w", "0.3,-0.2",
            "--t-end", "0.5", "--step", "0.01", "--out", "curve.csv",
        ],
    );
    let csv = std::fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,g_1,v_1,h_1,h_2"));
}

#[test]
fn geodesic_accepts_chart_files() {
    let dir = tempdir().unwrap();
    let metric = supergeo::chartgeom::builtin_chart("hyperbolic").unwrap();
    let text = supergeo::chartgeom::chart_to_json(&metric).unwrap();
    std::fs::write(dir.path().join("hyperbolic.json"), text).unwrap();
    let report = expect_pass(
        dir.path(),
        &[
            "geodesic", "--chart", "hyperbolic.json", "--p", "0,1", "--v", "0,1", "--t-end",
            "1", "--step", "0.001",
        ],
    );
    let y_end = report["terminal"]["g"][1].as_f64().unwrap();
    assert!((y_end - std::f64::consts::E).abs() <= 1e-6);
}

#[test]
fn transport_preserves_inner_products() {
    let dir = tempdir().unwrap();
    let report = expect_pass(
        dir.path(),
        &[
            "transport", "--chart", "hyperbolic", "--p", "-0.3,1.0", "--v", "0.4,0.2",
            "--t-end", "1", "--step", "0.001", "--tau", "1,0", "--tau2", "0,1", "--out",
            "ips.csv",
        ],
    );
    assert!(report["isometry_drift"].as_f64().unwrap() <= 1e-6);
    assert_eq!(report["inner_products"].as_array().unwrap().len(), 3);

    let csv = std::fs::read_to_string(dir.path().join("ips.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,ip_1_1,ip_1_2,ip_2_2"));
    assert_eq!(csv.lines().count(), 1002);
}

// ---------------------------------------------------------------------------
// curvature
// ---------------------------------------------------------------------------

#[test]
fn curvature_chart_mode_passes_on_sphere() {
    let dir = tempdir().unwrap();
    let report = expect_pass(
        dir.path(),
        &["curvature", "--chart", "sphere", "--at", "0.3,-0.2"],
    );
    assert_eq!(report["mode"], "chart");
    assert!(report["metricity_residual"].as_f64().unwrap() <= 1e-10);
    assert!(report["torsion_residual"].as_f64().unwrap() <= 1e-10);
    assert_eq!(report["gamma_parity_residual"], 0.0);
}

#[test]
fn curvature_biinvariant_mode_passes_on_osp32() {
    let dir = tempdir().unwrap();
    expect_pass(
        dir.path(),
        &["algebra", "--family", "osp", "--n", "3", "--m", "2", "--out", "a.json"],
    );
    let report = expect_pass(dir.path(), &["curvature", "--in", "a.json"]);
    assert_eq!(report["mode"], "bi-invariant");
    assert_eq!(report["flat_residual"], 0.0);
    assert_eq!(report["pair_antisymmetry"], 0.0);
    assert_eq!(report["bianchi"], 0.0);
    assert!(report["last_pair_skew"].as_f64().unwrap() <= 1e-10);
    assert!(report["pair_swap"].as_f64().unwrap() <= 1e-10);
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[test]
fn verify_list_names_every_catalog_entry() {
    let dir = tempdir().unwrap();
    let out = run_in(dir.path(), &["verify", "--list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for name in [
        "sl-sosp", "psl-sosp", "sl-s2gl", "sosp-u", "sosp-s2osp", "d21-so2-sosp22", "r12-group",
    ] {
        assert!(text.contains(name), "missing catalog entry {name}");
    }
}

#[test]
fn verify_single_family_with_params_and_json() {
    let dir = tempdir().unwrap();
    let report = expect_pass(
        dir.path(),
        &["verify", "--family", "sl-sosp", "--params", "n=3,m=1", "--json"],
    );
    assert_eq!(report["passed"], true);
    let entry = &report["reports"][0];
    assert_eq!(entry["algebra"], "sl(3|2)");
    assert_eq!(entry["as_expected"], true);
}

#[test]
fn verify_reports_expected_degeneracy_as_success() {
    let dir = tempdir().unwrap();
    let report = expect_pass(
        dir.path(),
        &["verify", "--family", "sl-sosp", "--params", "n=2,m=1", "--json"],
    );
    let entry = &report["reports"][0];
    assert_eq!(entry["expected_degenerate"], true);
    assert_eq!(entry["degeneracy_confirmed"], true);
    assert_eq!(report["passed"], true, "an expected degeneracy is a pass");
}

#[test]
fn verify_all_runs_the_default_grid() {
    let dir = tempdir().unwrap();
    let report = expect_pass(dir.path(), &["verify", "--all", "--json"]);
    assert_eq!(report["passed"], true);
    assert!(report["reports"].as_array().unwrap().len() >= 19);
}

// ---------------------------------------------------------------------------
// exit codes
// ---------------------------------------------------------------------------

#[test]
fn malformed_invocations_exit_two() {
    let dir = tempdir().unwrap();
    expect_pass(
        dir.path(),
        &["algebra", "--family", "sl", "--n", "2", "--m", "1", "--out", "a.json"],
    );
    let cases: &[&[&str]] = &[
        &["algebra"],                                               // missing --family
        &["algebra", "--family", "d21", "--sigma", "1.0"],          // one weight
        &["split", "--in", "a.json"],                               // no involution source
        &["verify", "--all", "--family", "sl-sosp"],                // conflicting selectors
        &["curvature"],                                             // neither chart nor algebra
        &["--tolerance", "-1", "killing", "--in", "a.json"],        // bad tolerance
        &["geodesic", "--chart", "hyperbolic", "--p", "0", "--v", "0,1"], // wrong point size
    ];
    for args in cases {
        let out = run_in(dir.path(), args);
        assert_eq!(code(&out), 2, "`{}` should be a usage error", args.join(" "));
    }
}

#[test]
fn computation_failures_exit_one_with_diagnostic_json() {
    let dir = tempdir().unwrap();
    let cases: &[(&[&str], &str)] = &[
        (&["algebra", "--family", "nope"], "invalid-params"),
        (&["killing", "--in", "missing.json"], "io"),
        (&["verify", "--family", "nope"], "unknown-example"),
        (
            &["geodesic", "--chart", "no-such-chart", "--p", "0,1", "--v", "0,1", "--t-end", "1"],
            "invalid-params",
        ),
    ];
    for (args, kind) in cases {
        let out = run_in(dir.path(), args);
        assert_eq!(code(&out), 1, "`{}` should exit 1", args.join(" "));
        let report = stdout_json(&out);
        assert!(report["error"].is_string(), "diagnostic needs an error message");
        assert_eq!(report["kind"], *kind, "wrong kind for `{}`", args.join(" "));
    }
}
