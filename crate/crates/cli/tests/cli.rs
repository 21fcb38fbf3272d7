use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cp3o::{run_cp3o, Cp3oConfig, GofMetric};
use cp3o_cli::input::{load_series, HeaderMode, Transform};
use cp3o_cli::report::DetectOutput;
use tempfile::TempDir;

fn cp3o(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cp3o"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Two-column positive series with a level shift at data row 61.
fn shifted_csv(header: bool) -> String {
    let mut out = String::new();
    if header {
        out.push_str("usd,gbp\n");
    }
    for i in 0..120 {
        let base = if i < 60 { 10.0 } else { 20.0 };
        let wiggle = ((i * 37) % 11) as f64 * 0.1;
        out.push_str(&format!("{},{}\n", base + wiggle, 5.0 + wiggle));
    }
    out
}

fn without_runtime(body: &str) -> String {
    body.lines()
        .filter(|l| !l.contains("\"runtime_s\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn json_round_trips_to_the_library_result() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "data.csv", &shifted_csv(true));
    let out = dir.path().join("out.json");
    let res = cp3o(&[
        "detect",
        "--input",
        s(&input),
        "--min-size",
        "12",
        "--K",
        "4",
        "--output",
        s(&out),
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    assert!(String::from_utf8_lossy(&res.stderr).contains("header: present"));

    let text = std::fs::read_to_string(&out).unwrap();
    let doc: DetectOutput = serde_json::from_str(&text).unwrap();
    assert_eq!(
        serde_json::from_str::<DetectOutput>(&doc.to_json().unwrap()).unwrap(),
        doc
    );
    assert_eq!(doc.index_base, 1);
    assert!(doc.config.header.present);

    let loaded = load_series(&input, HeaderMode::Auto, None, &[]).unwrap();
    let mut expected = run_cp3o(
        &loaded.series,
        &Cp3oConfig::new(4, 12, GofMetric::energy(1.0)),
    )
    .unwrap();
    let mut parsed = doc.to_result().unwrap();
    expected.runtime_s = 0.0;
    parsed.runtime_s = 0.0;
    assert_eq!(parsed, expected);
    assert_eq!(doc.segmentations[0], vec![61]);
    assert_eq!(doc.original_row_map, doc.change_points);

    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in [
        "config",
        "index_base",
        "change_points",
        "original_row_map",
        "selected_k",
        "gof_curve",
        "segmentations",
        "degenerate_flag",
        "runtime_s",
    ] {
        assert!(value.get(key).is_some(), "missing key {key}");
    }
}

#[test]
fn transforms_shift_the_row_map() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "data.csv", &shifted_csv(true));
    let res = cp3o(&[
        "detect",
        "--input",
        s(&input),
        "--columns",
        "usd",
        "--transform",
        "log",
        "--transform",
        "diff",
        "--min-size",
        "12",
        "--K",
        "3",
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let doc: DetectOutput = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(doc.config.series_len, 119);
    assert_eq!(doc.config.transforms, vec![Transform::Log, Transform::Diff]);
    for (cp, row) in doc.change_points.iter().zip(&doc.original_row_map) {
        assert_eq!(*row, cp + 1);
    }
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "data.csv", &shifted_csv(false));
    let runs: Vec<Vec<&str>> = vec![
        vec![
            "detect",
            "--input",
            s(&input),
            "--min-size",
            "12",
            "--seed",
            "4",
        ],
        vec![
            "detect",
            "--input",
            s(&input),
            "--min-size",
            "12",
            "--format",
            "csv",
            "--metric",
            "ks",
            "--columns",
            "1",
        ],
        vec![
            "prune-stats",
            "--scenario",
            "heavytail",
            "--T",
            "200",
            "--metric",
            "ks",
            "--seed",
            "9",
        ],
        vec!["prune-stats", "--input", s(&input), "--min-size", "10"],
    ];
    for args in runs {
        let (a, b) = (cp3o(&args), cp3o(&args));
        assert!(
            a.status.success(),
            "{args:?}: {}",
            String::from_utf8_lossy(&a.stderr)
        );
        let (a, b) = (
            String::from_utf8(a.stdout).unwrap(),
            String::from_utf8(b.stdout).unwrap(),
        );
        assert_eq!(without_runtime(&a), without_runtime(&b), "{args:?}");
    }
    let sim = [
        "simulate",
        "--scenario",
        "gaussian",
        "--T",
        "200",
        "--trials",
        "3",
        "--seed",
        "5",
    ];
    let (a, b) = (cp3o(&sim), cp3o(&sim));
    let drop_last = |o: &Output| {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect::<Vec<_>>()
    };
    assert!(a.status.success());
    assert_eq!(drop_last(&a), drop_last(&b));
}

#[test]
fn headerless_files_are_detected_and_reported() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "data.csv", &shifted_csv(false));
    let res = cp3o(&[
        "detect",
        "--input",
        s(&input),
        "--min-size",
        "12",
        "--columns",
        "2",
    ]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("header: absent"));
    let doc: DetectOutput = serde_json::from_slice(&res.stdout).unwrap();
    assert!(!doc.config.header.present);
    assert_eq!(doc.config.columns, vec!["column_2"]);
    assert_eq!(doc.config.series_len, 120);

    // Forcing a header on a numeric file drops the first row.
    let res = cp3o(&[
        "detect",
        "--input",
        s(&input),
        "--min-size",
        "12",
        "--header",
        "yes",
    ]);
    let doc: DetectOutput = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(doc.config.series_len, 119);
}

#[test]
fn constant_column_is_flagged_degenerate() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "flat.csv", &"4.25\n".repeat(80));
    let res = cp3o(&["detect", "--input", s(&input), "--min-size", "10"]);
    assert!(res.status.success());
    let doc: DetectOutput = serde_json::from_slice(&res.stdout).unwrap();
    assert!(doc.degenerate_flag);
}

#[test]
fn input_errors_exit_2_and_name_the_cell() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.csv", "a,b\n1,2\n3,x7\n5,6\n");
    let res = cp3o(&["detect", "--input", s(&bad), "--min-size", "2"]);
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    assert!(
        err.contains("line 3") && err.contains("column 'b'") && err.contains("x7"),
        "{err}"
    );

    let neg = write(&dir, "neg.csv", "1\n2\n-3\n4\n5\n6\n");
    let res = cp3o(&[
        "detect",
        "--input",
        s(&neg),
        "--min-size",
        "2",
        "--transform",
        "log",
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("data row 3"));

    let res = cp3o(&["detect", "--input", s(&dir.path().join("missing.csv"))]);
    assert_eq!(res.status.code(), Some(2));

    let nan = write(&dir, "nan.csv", "1\nNaN\n3\n4\n");
    let res = cp3o(&["detect", "--input", s(&nan), "--min-size", "2"]);
    assert_eq!(res.status.code(), Some(2));

    let res = cp3o(&["detect", "--input", s(&bad), "--columns", "nope"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn config_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "data.csv", &shifted_csv(true));
    let cases: Vec<Vec<&str>> = vec![
        vec!["--min-size", "70"],
        vec!["--metric", "wasserstein"],
        vec!["--alpha", "2.5"],
        vec!["--metric", "ks"],
        vec!["--delta", "12", "--min-size", "12"],
        vec!["--metric", "ks", "--alpha", "1", "--columns", "1"],
    ];
    for extra in cases {
        let mut args = vec!["detect", "--input", s(&input)];
        args.extend(&extra);
        let res = cp3o(&args);
        assert_eq!(
            res.status.code(),
            Some(3),
            "{extra:?}: {}",
            String::from_utf8_lossy(&res.stderr)
        );
    }
    let err = cp3o(&["detect", "--input", s(&input), "--min-size", "70"]);
    assert!(String::from_utf8_lossy(&err.stderr).contains("series too short"));
    let res = cp3o(&["simulate", "--scenario", "brownian", "--trials", "1"]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn prune_stats_matrix_shape() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("ps.csv");
    let res = cp3o(&[
        "prune-stats",
        "--T",
        "200",
        "--min-size",
        "20",
        "--K",
        "4",
        "--output",
        s(&out),
    ]);
    assert!(res.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,kappa_1,kappa_2,kappa_3,kappa_4"));
    let rows: Vec<Vec<usize>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 200);
    for row in &rows {
        let t = row[0];
        assert_eq!(row[1], (t + 1).saturating_sub(40));
        assert!(row[1..].windows(2).all(|p| p[1] <= p[0]));
    }
}

#[test]
fn detect_can_write_prune_stats_alongside() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "data.csv", &shifted_csv(true));
    let ps = dir.path().join("ps.csv");
    let res = cp3o(&[
        "detect",
        "--input",
        s(&input),
        "--min-size",
        "12",
        "--prune-stats",
        s(&ps),
    ]);
    assert!(res.status.success());
    let doc: DetectOutput = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(doc.prune_stats_path.as_deref(), Some(s(&ps)));
    assert_eq!(std::fs::read_to_string(&ps).unwrap().lines().count(), 121);
}

#[test]
fn simulate_rows_and_heavy_tail_alpha() {
    let res = cp3o(&[
        "simulate",
        "--scenario",
        "heavytail",
        "--scenario",
        "gaussian",
        "--T",
        "200",
        "--metric",
        "energy",
        "--metric",
        "ks",
        "--trials",
        "2",
    ]);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let text = String::from_utf8(res.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "scenario,T,metric,alpha,w,trials,mean_rand,mean_t2e,mean_e2t,mean_est_k,mean_runtime_s"
    );
    assert_eq!(lines.len(), 5);
    assert!(
        lines[1].starts_with("heavytail,200,energy,0.09,22,2,"),
        "{}",
        lines[1]
    );
    assert!(
        lines[2].starts_with("heavytail,200,ks,,22,2,"),
        "{}",
        lines[2]
    );
    assert!(
        lines[3].starts_with("gaussian,200,energy,1.0,22,2,"),
        "{}",
        lines[3]
    );
}
