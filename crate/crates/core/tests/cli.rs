//! The `bikeflow` binary end to end on small inputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bikeflow::flows::FlowSolution;
use bikeflow::milp::{formulate_instance, read_lp};
use bikeflow::instance::Instance;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn bikeflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bikeflow"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("run bikeflow")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn verify_accepts_the_golden_solution() {
    let out = bikeflow(&["verify", "--instance", s(&data("golden/toy_instance.json")), "--solution", s(&data("golden/toy_solution.json"))]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["feasible"], true);
    assert!((report["objective"].as_f64().unwrap() - 1.76).abs() < 1e-9);
}

#[test]
fn verify_rejects_a_tampered_solution() {
    let dir = tempfile::tempdir().unwrap();
    let mut flows = FlowSolution::read_json(data("golden/toy_solution.json")).unwrap();
    // a rider conjured out of nowhere
    flows.rider_moves[0].amount += 1.0;
    let bad = dir.path().join("bad.json");
    flows.write_json(&bad).unwrap();

    let out = bikeflow(&["verify", "--instance", s(&data("golden/toy_instance.json")), "--solution", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let report = stdout_json(&out);
    assert_eq!(report["feasible"], false);
    assert!(report["bike_conservation"].as_f64().unwrap() >= 1.0 || report["demand_bound"].as_f64().unwrap() >= 1.0);
}

#[test]
fn solve_output_verifies_and_repeats() {
    let dir = tempfile::tempdir().unwrap();
    let inst = data("golden/toy_instance.json");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out_dir in [&a, &b] {
        let out = bikeflow(&["solve", "--instance", s(&inst), "--out", s(out_dir)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["solution.json", "metrics.csv", "summary.json"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file} differs");
    }
    let out = bikeflow(&["verify", "--instance", s(&inst), "--solution", s(&a.join("solution.json"))]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn docked_cap_below_initial_stock_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    // the toy instance parks three bikes at the station
    let out = bikeflow(&[
        "solve",
        "--instance",
        s(&data("golden/toy_instance.json")),
        "--mode",
        "docked",
        "--cap",
        "2",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn cap_without_docked_mode_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = bikeflow(&["solve", "--instance", s(&data("golden/toy_instance.json")), "--cap", "5", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn missing_instance_file_is_an_input_error() {
    let out = bikeflow(&["verify", "--instance", "/nonexistent/instance.json", "--solution", "/nonexistent/s.json"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn written_lp_reads_back_to_the_same_program() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("toy.lp");
    let inst = data("golden/toy_instance.json");
    let out = bikeflow(&["write-lp", "--instance", s(&inst), "--out", s(&path)]);
    assert_eq!(out.status.code(), Some(0));

    let parsed = read_lp(&fs::read_to_string(&path).unwrap()).unwrap();
    let original = formulate_instance(&Instance::read_json(&inst).unwrap()).unwrap().problem;
    assert_eq!(parsed.num_cols(), original.num_cols());
    assert_eq!(parsed.num_rows(), original.num_rows());
    assert_eq!(parsed.col_names, original.col_names);
    assert_eq!(parsed.objective, original.objective);
    assert_eq!(parsed.objective_offset, original.objective_offset);
    assert_eq!(parsed.rhs, original.rhs);
}

#[test]
fn diagram_exports_as_dot() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("toy.dot");
    let out = bikeflow(&[
        "export-diagram",
        "--instance",
        s(&data("golden/toy_instance.json")),
        "--solution",
        s(&data("golden/toy_solution.json")),
        "--out",
        s(&path),
        "--format",
        "dot",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dot = fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("color=red"));
}

#[test]
fn ingest_of_no_trips_gives_an_empty_instance() {
    let dir = tempfile::tempdir().unwrap();
    let trips = dir.path().join("trips.csv");
    fs::write(&trips, "start_iso_time,end_iso_time,start_lat,start_lon,end_lat,end_lon\n").unwrap();
    let (inst, report) = (dir.path().join("inst.json"), dir.path().join("report.json"));
    let ingest = |trikes: &str| {
        bikeflow(&[
            "ingest",
            "--trips",
            s(&trips),
            "--grid-origin",
            "1.415,103.825",
            "--cols",
            "8",
            "--rows",
            "6",
            "--start",
            "07:00",
            "--end",
            "08:00",
            "--trikes",
            trikes,
            "--out",
            s(&inst),
            "--report",
            s(&report),
        ])
    };
    let solve = || bikeflow(&["solve", "--instance", s(&inst), "--out", s(&dir.path().join("out"))]);

    assert_eq!(ingest("0").status.code(), Some(0));
    let rep: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["records_read"], 0);
    assert_eq!(rep["retained_trips"], 0);
    assert_eq!(Instance::read_json(&inst).unwrap().num_sites(), 0);
    let out = solve();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("objective=0.000000"));

    // trikes with no site to stand on
    assert_eq!(ingest("2").status.code(), Some(0));
    assert_eq!(solve().status.code(), Some(2));
}
