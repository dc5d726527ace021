use std::process::{Command, Output};

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anomaly-forge")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_prints_case() {
    let o = forge(&["classify", "--potential", "coulomb:Z=1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "case B, Coulomb tail\n");
    let o = forge(&["classify", "--potential", "INVERSE-SQUARE:alpha=50"]);
    assert_eq!(stdout(&o), "case A, screened tail\n");
    let o = forge(&["classify", "--potential", "cutoff-coulomb:Z=1,rcut=1"]);
    assert!(stdout(&o).starts_with("case C"));
}

#[test]
fn trace_writes_full_precision_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w2.csv");
    let o = forge(&[
        "trace", "--potential", "coulomb:Z=1", "--lambda-min", "10", "--lambda-max", "80", "--points", "4",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,w,err,source"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            assert_eq!(cols[3], "second-order");
            cols[..3].iter().map(|c| c.parse().unwrap()).collect()
        })
        .collect();
    assert_eq!(rows.len(), 4);
    for (row, lambda) in rows.iter().zip([10.0, 20.0, 40.0, 80.0]) {
        assert!((row[0] - lambda).abs() < 1e-12 * lambda);
        let exact = -1.0 / (8.0 * lambda * lambda);
        assert!(((row[1] - exact) / exact).abs() < 1e-3);
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["anomaly", "--potential", "yukawa:Z=1,kappa=0.5", "--points", "6", "--format", "csv"];
    let a = forge(&args);
    let b = forge(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let args = ["trace", "--potential", "coulomb:Z=2", "--method", "perturbative-1", "--points", "5"];
    assert_eq!(forge(&args).stdout, forge(&args).stdout);
}

#[test]
fn case_b_anomaly_report() {
    let o = forge(&["anomaly", "--potential", "coulomb:Z=1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("a_e_reduced=0.2500\n"), "{text}");
    assert!(text.contains("a_n_reduced=0 (below tolerance)\n"));
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn first_order_divergence_report() {
    let o = forge(&["anomaly", "--potential", "coulomb:Z=1", "--method", "perturbative-1", "--lambda-max", "1000"]);
    assert!(stdout(&o).contains("a_e_status=divergent growth_exponent=0.50\n"));
}

#[test]
fn reproduce_case_b() {
    let o = forge(&["reproduce", "--target", "case-b-energy", "--Z", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("expected 2.500000e-1"));
    assert!(text.ends_with("result=PASS\n"));
    let o = forge(&["reproduce", "--target", "w2-closed-form", "--Z", "2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn reproduce_failure_exit_code() {
    // 2mα/ħ² = 100 gives about three times the published case-A value
    let o = forge(&["reproduce", "--target", "eq7"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).ends_with("result=FAIL\n"));
}

#[test]
fn weak_coupling_is_rejected() {
    let o = forge(&["reproduce", "--target", "eq7", "--alpha", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn argument_errors_exit_2() {
    for args in [
        vec!["trace", "--potential", "coulomb:Z=1", "--points", "2"],
        vec!["trace", "--potential", "coulomb:Z=-1"],
        vec!["trace"],
        vec!["reproduce", "--target", "nonsense"],
        vec!["anomaly", "--potential", "coulomb:Z=1", "--hbar", "0"],
        vec!["frobnicate"],
    ] {
        assert_eq!(forge(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn oracle_rejects_attractive_core() {
    let o = forge(&["trace", "--potential", "yukawa:Z=1,kappa=1", "--method", "oracle", "--points", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn non_power_law_exits_3() {
    // W₂ for strong screening bends away from a single power over this window
    let o = forge(&[
        "anomaly", "--potential", "yukawa:Z=1,kappa=30", "--lambda-min", "1", "--lambda-max", "10000", "--points", "8",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
}
