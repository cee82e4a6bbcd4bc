//! End-to-end tests of the command-line interface: subcommand routing, file
//! round trips through the shipped formats, and the documented exit codes.

use std::path::Path;
use std::process::{Command, Output};

use fusion_recovery::io;
use fusion_recovery::signal::BlockCoefficients;
use nalgebra::{DMatrix, DVector};
use tempfile::tempdir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fusion-recovery"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> String {
    p.to_str().unwrap().to_owned()
}

#[test]
fn unknown_subcommand_exits_64() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let out = run(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("fusion-recovery"));
}

#[test]
fn generate_measure_solve_round_trip() {
    let dir = tempdir().unwrap();
    let frame = dir.path().join("frame.json");
    let matrix = dir.path().join("matrix.json");
    let coeffs = dir.path().join("coeffs.json");
    let y = dir.path().join("y.json");
    let report = dir.path().join("report.json");
    let recovered = dir.path().join("recovered.json");

    let out = run(&[
        "gen-frame",
        "--ambient-dim", "8",
        "--subspace-dim", "2",
        "--count", "12",
        "--seed", "5",
        "--out", &path_str(&frame),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let out = run(&[
        "gen-matrix",
        "--rows", "8",
        "--cols", "12",
        "--seed", "6",
        "--out", &path_str(&matrix),
    ]);
    assert_eq!(out.status.code(), Some(0));

    // Plant a 2-block-sparse signal.
    let loaded = io::read_frame(&frame).unwrap();
    let mut blocks: Vec<DVector<f64>> =
        loaded.block_dims().iter().map(|&d| DVector::zeros(d)).collect();
    blocks[3] = DVector::from_column_slice(&[1.5, -0.5]);
    blocks[7] = DVector::from_column_slice(&[0.25, 2.0]);
    io::write_coefficients(&coeffs, &BlockCoefficients::new(blocks)).unwrap();

    let out = run(&[
        "measure",
        "--matrix", &path_str(&matrix),
        "--frame", &path_str(&frame),
        "--coefficients", &path_str(&coeffs),
        "--out", &path_str(&y),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let out = run(&[
        "solve",
        "--matrix", &path_str(&matrix),
        "--frame", &path_str(&frame),
        "--measurements", &path_str(&y),
        "--report", &path_str(&report),
        "--out", &path_str(&recovered),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("status=converged"), "{stdout}");

    let planted = io::read_coefficients(&coeffs).unwrap();
    let solution = io::read_coefficients(&recovered).unwrap();
    let diff = (planted.concatenated() - solution.concatenated()).norm();
    assert!(diff <= 1e-4 * planted.norm(), "recovered signal deviates by {diff}");
    assert_eq!(solution.support().indices(), &[3, 7]);

    let report_text = std::fs::read_to_string(&report).unwrap();
    assert!(report_text.contains("\"status\":\"converged\""));
    assert!(report_text.contains("\"support\":[3,7]"));
}

#[test]
fn solve_reports_infeasible_with_exit_3() {
    let dir = tempdir().unwrap();
    let frame = dir.path().join("frame.json");
    let matrix = dir.path().join("matrix.json");
    let y = dir.path().join("y.json");

    // Both subspaces along e1; measurements demand mass on e2.
    let basis = DMatrix::from_column_slice(2, 1, &[1.0, 0.0]);
    let frame_obj = fusion_recovery::FusionFrame::new(vec![
        fusion_recovery::SubspaceBasis::new(basis.clone()).unwrap(),
        fusion_recovery::SubspaceBasis::new(basis).unwrap(),
    ])
    .unwrap();
    io::write_frame(&frame, &frame_obj).unwrap();
    let matrix_obj = fusion_recovery::MeasurementMatrix::new(DMatrix::from_row_slice(
        1,
        2,
        &[1.0, 1.0],
    ))
    .unwrap();
    io::write_matrix(&matrix, &matrix_obj).unwrap();
    io::write_dense_matrix(&y, &DMatrix::from_row_slice(1, 2, &[0.0, 3.0])).unwrap();

    let out = run(&[
        "solve",
        "--matrix", &path_str(&matrix),
        "--frame", &path_str(&frame),
        "--measurements", &path_str(&y),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn non_unit_columns_need_the_renormalize_flag() {
    let dir = tempdir().unwrap();
    let frame = dir.path().join("frame.json");
    let matrix = dir.path().join("matrix.json");

    let frame_obj = fusion_recovery::FusionFrame::random(4, 2, 3, 1).unwrap();
    io::write_frame(&frame, &frame_obj).unwrap();
    let scaled = fusion_recovery::random_measurement_matrix(4, 3, 2).unwrap();
    io::write_dense_matrix(&matrix, &(scaled.entries() * 3.0)).unwrap();

    let out = run(&[
        "certify",
        "--matrix", &path_str(&matrix),
        "--frame", &path_str(&frame),
        "--kmax", "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("error[E_ARGUMENT]"), "{stderr}");

    let out = run(&[
        "certify",
        "--matrix", &path_str(&matrix),
        "--frame", &path_str(&frame),
        "--kmax", "1",
        "--renormalize-columns",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("renormalized"));
}

#[test]
fn certify_prints_the_certificate_table() {
    let dir = tempdir().unwrap();
    let frame = dir.path().join("frame.json");
    let matrix = dir.path().join("matrix.json");
    let signal = dir.path().join("signal.json");

    let frame_obj = fusion_recovery::FusionFrame::random(8, 2, 10, 3).unwrap();
    io::write_frame(&frame, &frame_obj).unwrap();
    let matrix_obj = fusion_recovery::random_measurement_matrix(8, 10, 4).unwrap();
    io::write_matrix(&matrix, &matrix_obj).unwrap();
    let support = fusion_recovery::SupportSet::new(vec![1, 4]).unwrap();
    let c = fusion_recovery::random_gaussian_signal(&frame_obj, &support, 5).unwrap();
    io::write_coefficients(&signal, &c).unwrap();

    let out = run(&[
        "certify",
        "--matrix", &path_str(&matrix),
        "--frame", &path_str(&frame),
        "--kmax", "3",
        "--signal", &path_str(&signal),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for needle in [
        "coherence (mu):",
        "fusion coherence (mu_f):",
        "certified block sparsity:",
        "delta_k (lifted)",
        "support [1, 4]:",
        "alpha:",
        "theta:",
        "dual certificate margin:",
        "failure bound (m=2):",
    ] {
        assert!(stdout.contains(needle), "missing '{needle}' in:\n{stdout}");
    }
}

#[test]
fn phase_diagram_cli_is_deterministic() {
    let dir = tempdir().unwrap();
    let config = dir.path().join("config.json");
    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");

    std::fs::write(
        &config,
        r#"{
            "ambient_dim": 6,
            "num_subspaces": 8,
            "num_measurements": 6,
            "subspace_dims": [2],
            "sparsity_levels": [0, 1],
            "trials": 3,
            "master_seed": 17
        }"#,
    )
    .unwrap();

    let out = run(&[
        "phase-diagram",
        "--config", &path_str(&config),
        "--out", &path_str(&csv_a),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&[
        "phase-diagram",
        "--config", &path_str(&config),
        "--out", &path_str(&csv_b),
        "--threads", "4",
    ]);
    assert_eq!(out.status.code(), Some(0));

    let a = std::fs::read(&csv_a).unwrap();
    let b = std::fs::read(&csv_b).unwrap();
    assert_eq!(a, b, "CSV output must not depend on the thread count");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# schema=1\nm,k,n,trial,seed,recovered,"));
}

#[test]
fn compare_bound_cli_runs_the_canned_family() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("bound.csv");
    let out = run(&[
        "compare-bound",
        "--canned", "bound-family",
        "--trials", "2",
        "--out", &path_str(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# schema=1\nm,k,n,trials,included,excluded,"));
    assert_eq!(text.lines().count(), 2 + 4, "one row per swept dimension");
}

#[test]
fn lemma_battery_cli_passes_and_self_tests() {
    let out = run(&["lemma-battery", "--draws", "20", "--samples", "20000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("battery:               pass"));

    let out = run(&[
        "lemma-battery",
        "--draws", "20",
        "--samples", "50000",
        "--self-test",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("corrupted bound detected"));
}
