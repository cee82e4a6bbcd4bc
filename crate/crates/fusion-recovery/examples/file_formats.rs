//! The shipped file formats: frames, matrices, coefficients and solve
//! reports as structured text with exact float round trips.
//!
//! Run with: cargo run --release --example file_formats

use fusion_recovery::{io, measure, random_gaussian_signal, random_measurement_matrix, solve_p1};
use fusion_recovery::{FusionFrame, Result, SolverOptions, SupportSet};

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("fusion_recovery_formats");
    std::fs::create_dir_all(&dir)?;

    let frame = FusionFrame::random(6, 2, 8, 1)?;
    let matrix = random_measurement_matrix(6, 8, 2)?;
    let support = SupportSet::new(vec![1, 5])?;
    let planted = random_gaussian_signal(&frame, &support, 3)?;
    let y = measure(&matrix, &frame, &planted)?;

    let frame_path = dir.join("frame.json");
    let matrix_path = dir.join("matrix.json");
    let coeff_path = dir.join("coefficients.json");
    let y_path = dir.join("measurements.json");
    let report_path = dir.join("report.json");

    io::write_frame(&frame_path, &frame)?;
    io::write_matrix(&matrix_path, &matrix)?;
    io::write_coefficients(&coeff_path, &planted)?;
    io::write_dense_matrix(&y_path, &y)?;

    // Everything round-trips exactly: the writers emit 17 significant digits.
    assert_eq!(io::read_frame(&frame_path)?.subspace(0).basis(), frame.subspace(0).basis());
    assert_eq!(io::read_matrix(&matrix_path, false)?.entries(), matrix.entries());
    assert_eq!(io::read_coefficients(&coeff_path)?, planted);

    let report = solve_p1(&matrix, &frame, &y, &SolverOptions::default())?;
    io::write_solve_report(&report_path, &report)?;

    for path in [&frame_path, &matrix_path, &coeff_path, &y_path, &report_path] {
        let size = std::fs::metadata(path)?.len();
        println!("{:<60} {size:>7} bytes", path.display().to_string());
    }
    println!("\nreport: {}", std::fs::read_to_string(&report_path)?);
    Ok(())
}
