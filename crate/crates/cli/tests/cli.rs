use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use resmi::community::sample_sbm;
use resmi::experiment::{mean_std, parse_csv, CSV_HEADER};
use resmi::measures::Measure;
use resmi::rng::RngSeed;
use tempfile::TempDir;

fn resmi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resmi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Parses the tab-separated compare table into (measure, value, defined).
fn compare_rows(text: &str) -> Vec<(String, f64, bool)> {
    text.lines()
        .skip(1)
        .map(|l| {
            let cols: Vec<&str> = l.split('\t').collect();
            (
                cols[0].to_string(),
                cols[1].parse().unwrap(),
                cols[2] == "true",
            )
        })
        .collect()
}

#[test]
fn compare_identical_files() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.txt", "a\na\nb\nc\nc\n");
    let g = write(&dir, "g.txt", "x\nx\ny\nz\nz\n");
    let out = stdout(&resmi(&[
        "compare",
        p(&f),
        p(&g),
        "--measures",
        "nmi,ami,ri,ari,rmi,resmi",
    ]));
    let rows = compare_rows(&out);
    assert_eq!(rows.len(), 6);
    for (m, v, _) in rows {
        assert_eq!(v, 1.0, "{m}");
    }
    assert!(out.contains("omega=exact"));
}

#[test]
fn compare_worked_example() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.txt", "0\n0\n1\n1\n");
    let g = write(&dir, "g.txt", "0\n1\n0\n1\n");
    let rows = compare_rows(&stdout(&resmi(&[
        "compare",
        p(&f),
        p(&g),
        "--measures",
        "RI,ARI,ResMI",
    ])));
    let value = |name: &str| rows.iter().find(|r| r.0 == name).unwrap().1;
    assert_eq!(format!("{:.4}", value("RI")), "0.3333");
    assert_eq!(format!("{:.4}", value("ARI")), "-0.5000");
    assert_eq!(format!("{:.4}", value("ResMI")), "0.2740");
}

#[test]
fn compare_single_cluster_is_degenerate() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.txt", "1\n1\n1\n1\n1\n1\n");
    let g = write(&dir, "g.txt", "0\n0\n1\n1\n2\n2\n");
    let rows = compare_rows(&stdout(&resmi(&[
        "compare",
        p(&f),
        p(&g),
        "--measures",
        "NMI,AMI,ResMI",
    ])));
    assert_eq!(rows.len(), 3);
    for (m, v, defined) in rows {
        assert_eq!(v, 0.0, "{m}");
        assert!(defined, "{m}");
    }

    let same = stdout(&resmi(&[
        "compare",
        p(&f),
        p(&f),
        "--measures",
        "NMI,ResMI",
    ]));
    for (m, v, defined) in compare_rows(&same) {
        assert_eq!(v, 1.0, "{m}");
        assert!(!defined, "{m}");
    }
}

#[test]
fn compare_errors_exit_with_data_code() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.txt", "0\n0\n1\n");
    let g = write(&dir, "g.txt", "0\n1\n");
    let bad = write(&dir, "bad.txt", "0\n1 2\n");
    assert_eq!(resmi(&["compare", p(&f), p(&g)]).status.code(), Some(2));
    let out = resmi(&["compare", p(&f), p(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert_eq!(
        resmi(&["compare", p(&f), "/nonexistent/file"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(resmi(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(resmi(&["experiment", "e"]).status.code(), Some(1));
    assert_eq!(
        resmi(&["experiment", "a", "--measures", "xyz"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        resmi(&["experiment", "a", "--grid", "3:1"]).status.code(),
        Some(1)
    );
    assert_eq!(resmi(&["--help"]).status.code(), Some(0));
}

#[test]
fn invalid_grid_values_are_data_errors() {
    let out = resmi(&[
        "experiment",
        "c",
        "--n",
        "64",
        "--runs",
        "2",
        "--grid",
        "0.5,1.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = resmi(&[
        "experiment",
        "a",
        "--n",
        "64",
        "--runs",
        "2",
        "--grid",
        "128",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiment_c_identity_row() {
    let out = stdout(&resmi(&[
        "experiment",
        "c",
        "--n",
        "128",
        "--runs",
        "5",
        "--grid",
        "0,0.5,1",
    ]));
    assert!(out.starts_with(CSV_HEADER));
    let records = parse_csv(&out).unwrap();
    assert_eq!(records.len(), 15);
    for r in records.iter().filter(|r| r.param == 0.0) {
        assert_eq!((r.mean, r.std, r.runs), (1.0, 0.0, 5), "{}", r.measure);
    }
    let order: Vec<Measure> = records.iter().take(5).map(|r| r.measure).collect();
    assert_eq!(order, Measure::COMPARED);
}

#[test]
fn experiment_b_ground_truth_row() {
    let out = stdout(&resmi(&[
        "experiment",
        "b",
        "--n",
        "256",
        "--runs",
        "4",
        "--grid",
        "8,32,64",
    ]));
    for r in parse_csv(&out).unwrap().iter().filter(|r| r.param == 32.0) {
        assert_eq!(r.mean, 1.0, "{}", r.measure);
    }
    assert!(out.contains("rmi_omega=approximate"));
}

#[test]
fn exact_omega_infeasible_at_full_size() {
    let out = resmi(&[
        "experiment",
        "a",
        "--runs",
        "1",
        "--grid",
        "4",
        "--exact-omega",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exact Omega infeasible"));
}

#[test]
fn aggregation_matches_per_run_output() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("d.csv");
    let runs = dir.path().join("d_runs.csv");
    stdout(&resmi(&[
        "experiment",
        "d",
        "--n",
        "128",
        "--runs",
        "7",
        "--seed",
        "3",
        "--full-precision",
        "--out",
        p(&csv),
        "--runs-out",
        p(&runs),
    ]));
    let records = parse_csv(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    let per_run = std::fs::read_to_string(&runs).unwrap();
    for r in &records {
        let values: Vec<f64> = per_run
            .lines()
            .skip(1)
            .map(|l| l.split(',').collect::<Vec<_>>())
            .filter(|c| c[1].parse::<f64>().unwrap() == r.param && c[2] == r.measure.name())
            .map(|c| c[4].parse().unwrap())
            .collect();
        assert_eq!(values.len(), 7);
        let (mean, std) = mean_std(&values);
        assert!((mean - r.mean).abs() <= 1e-12 && (std - r.std).abs() <= 1e-12);
    }
}

#[test]
fn plot_flag_writes_svg_next_to_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("a.csv");
    stdout(&resmi(&[
        "experiment",
        "a",
        "--n",
        "128",
        "--runs",
        "3",
        "--out",
        p(&csv),
        "--plot",
    ]));
    let svg = std::fs::read_to_string(dir.path().join("a.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("class=\"measure\"").count(), 5);
    assert!(svg.contains("log scale"));
}

#[test]
fn plot_command_round_trip_and_errors() {
    let dir = TempDir::new().unwrap();
    let csv = write(
        &dir,
        "c.csv",
        &stdout(&resmi(&[
            "experiment",
            "c",
            "--n",
            "64",
            "--runs",
            "3",
            "--measures",
            "ResMI",
        ])),
    );
    let svg = dir.path().join("c.svg");
    stdout(&resmi(&["plot", p(&csv), "--out", p(&svg)]));
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("class=\"measure\"").count(), 1);
    assert!(text.contains("proportion p"));

    let empty = write(&dir, "empty.csv", &format!("{CSV_HEADER}\n"));
    assert_eq!(
        resmi(&["plot", p(&empty), "--out", p(&svg)]).status.code(),
        Some(2)
    );
    let wrong = write(&dir, "wrong.csv", "a,b\n1,2\n");
    assert_eq!(
        resmi(&["plot", p(&wrong), "--out", p(&svg)]).status.code(),
        Some(2)
    );
}

/// Planted three-block fixture: edge list and truth file.
fn sbm_fixture(dir: &TempDir, extra_edges: &str) -> (PathBuf, PathBuf) {
    let (g, truth) = sample_sbm(&[12, 12, 12], 0.7, 0.03, RngSeed::new(21, 0)).unwrap();
    let mut edges: String = g
        .edges()
        .iter()
        .map(|(u, v)| format!("{u} {v}\n"))
        .collect();
    edges.push_str(extra_edges);
    let labels: String = truth.labels().iter().map(|l| format!("{l}\n")).collect();
    (
        write(dir, "edges.txt", &edges),
        write(dir, "truth.txt", &labels),
    )
}

#[test]
fn network_sweep_peaks_at_planted_count() {
    let dir = TempDir::new().unwrap();
    let (edges, truth) = sbm_fixture(&dir, "");
    let out = stdout(&resmi(&[
        "network",
        "--edges",
        p(&edges),
        "--truth",
        p(&truth),
        "--grid",
        "2:6",
        "--runs",
        "5",
    ]));
    let records = parse_csv(&out).unwrap();
    assert!(records.iter().all(|r| r.experiment.id() == "network"));
    for m in Measure::COMPARED {
        assert!(out.contains(&format!("# argmax {m} c=3 ")), "{m}\n{out}");
    }
    assert!(out.contains("ridge_delta=0.1"));

    let svg = dir.path().join("n.svg");
    let csv = write(&dir, "n.csv", &out);
    stdout(&resmi(&["plot", p(&csv), "--out", p(&svg)]));
}

#[test]
fn network_truth_mismatch_fails() {
    let dir = TempDir::new().unwrap();
    let (edges, _) = sbm_fixture(&dir, "");
    let short = write(&dir, "short.txt", &"0\n".repeat(20));
    let out = resmi(&[
        "network",
        "--edges",
        p(&edges),
        "--truth",
        p(&short),
        "--runs",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn network_largest_component_flag() {
    let dir = TempDir::new().unwrap();
    let (edges, _) = sbm_fixture(&dir, "100 101\n");
    let (g, truth) = sample_sbm(&[12, 12, 12], 0.7, 0.03, RngSeed::new(21, 0)).unwrap();
    assert_eq!(g.num_nodes(), 36);
    let mut labels: String = truth.labels().iter().map(|l| format!("{l}\n")).collect();
    labels.push_str("9\n9\n");
    let truth = write(&dir, "truth38.txt", &labels);

    let args = [
        "network",
        "--edges",
        p(&edges),
        "--truth",
        p(&truth),
        "--grid",
        "3",
        "--runs",
        "2",
    ];
    let out = resmi(&args);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("largest connected component"));

    let mut with_flag = args.to_vec();
    with_flag.push("--largest-component");
    let text = stdout(&resmi(&with_flag));
    assert!(text.contains("node_coverage=36/38"));
}
