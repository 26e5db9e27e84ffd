//! On-disk layout and CSV schemas of run and continuation outputs.

use std::fs;
use std::path::Path;

use congest_core::continuation::{run_continuation, ContinuationPlan, CAUCHY_COLUMNS, CONTINUATION_COLUMNS};
use congest_core::diagnostics::DIAGNOSTICS_COLUMNS;
use congest_core::io::{snapshot_name, SNAPSHOT_COLUMNS_1D, SNAPSHOT_COLUMNS_2D, SNAPSHOT_INDEX_COLUMNS};
use congest_core::run::run_to_dir;
use congest_core::scenario::{parse_scenario, preset};

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_owned()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn one_dimensional_run_layout() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = preset("closed-end").unwrap();
    spec.time.horizon = 0.3;
    let out = run_to_dir(&spec, dir.path()).unwrap();
    let d = dir.path();

    assert_eq!(header(&d.join("diagnostics.csv")), DIAGNOSTICS_COLUMNS.join(","));
    let diag = rows(&d.join("diagnostics.csv"));
    assert_eq!(diag.len(), 4);
    assert!(diag.iter().all(|r| r.len() == DIAGNOSTICS_COLUMNS.len()));
    let times: Vec<f64> = diag.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(times, vec![0.0, 0.1, 0.2, 0.3]);

    let index = rows(&d.join("snapshots.csv"));
    assert_eq!(header(&d.join("snapshots.csv")), SNAPSHOT_INDEX_COLUMNS.join(","));
    for (k, row) in index.iter().enumerate() {
        assert_eq!(row[0], k.to_string());
        assert_eq!(row[2], snapshot_name(k));
        let snap = d.join(&row[2]);
        assert_eq!(header(&snap), SNAPSHOT_COLUMNS_1D.join(","));
        assert_eq!(rows(&snap).len(), spec.grid.nx);
    }

    let echoed = parse_scenario(&fs::read_to_string(d.join("scenario.ini")).unwrap()).unwrap();
    assert_eq!(echoed, spec);
    assert!(fs::read_to_string(d.join("validation.txt")).unwrap().contains("[pass] Ass2"));
    assert_eq!(out.records.len(), 4);
    assert!(!d.join("snapshot_00000.vtk").exists());
}

#[test]
fn every_float_round_trips_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = preset("proportional").unwrap();
    spec.time.horizon = 0.05;
    let out = run_to_dir(&spec, dir.path()).unwrap();
    let snap = rows(&dir.path().join(snapshot_name(1)));
    for (c, row) in snap.iter().enumerate() {
        let rho: f64 = row[1].parse().unwrap();
        let z: f64 = row[2].parse().unwrap();
        assert_eq!(rho, out.final_state.rho[c]);
        assert_eq!(z, out.final_state.z[c]);
    }
}

#[test]
fn two_dimensional_run_writes_vtk() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = preset("two-gate-2d").unwrap().with_cells(16);
    spec.time.horizon = 0.05;
    spec.output.vtk = true;
    run_to_dir(&spec, dir.path()).unwrap();
    let d = dir.path();
    assert_eq!(header(&d.join(snapshot_name(1))), SNAPSHOT_COLUMNS_2D.join(","));
    assert_eq!(rows(&d.join(snapshot_name(1))).len(), 16 * 8);
    let vtk = fs::read_to_string(d.join("snapshot_00001.vtk")).unwrap();
    assert!(vtk.starts_with("# vtk DataFile Version 3.0"));
    assert!(vtk.contains("DIMENSIONS 17 9 1"));
    assert!(vtk.contains("CELL_DATA 128"));
}

#[test]
fn continuation_report_schema() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = preset("closed-end").unwrap();
    spec.time.horizon = 0.2;
    let plan = ContinuationPlan::new(spec, vec![1e-1, 1e-2, 1e-3]);
    let report = run_continuation(&plan, Some(dir.path())).unwrap();
    let d = dir.path();
    assert_eq!(header(&d.join("continuation.csv")), CONTINUATION_COLUMNS.join(","));
    assert_eq!(header(&d.join("cauchy.csv")), CAUCHY_COLUMNS.join(","));
    let members = rows(&d.join("continuation.csv"));
    assert_eq!(members.len(), 3);
    assert!(members.iter().all(|r| r.len() == CONTINUATION_COLUMNS.len()));
    let cauchy = rows(&d.join("cauchy.csv"));
    assert_eq!(cauchy.len(), 2);
    let z_l1: f64 = cauchy[0][2].parse().unwrap();
    assert_eq!(z_l1, report.cauchy[0].z_l1);
    assert!(members.iter().all(|r| r.last().unwrap() == "smallness"));
}

#[test]
fn schemas_are_documented() {
    let readme = include_str!("../../../README.md");
    for col in DIAGNOSTICS_COLUMNS
        .iter()
        .chain(&SNAPSHOT_COLUMNS_2D)
        .chain(&SNAPSHOT_INDEX_COLUMNS)
        .chain(&CONTINUATION_COLUMNS)
        .chain(&CAUCHY_COLUMNS)
    {
        assert!(readme.contains(&format!("`{col}`")), "column {col} is not documented");
    }
}
