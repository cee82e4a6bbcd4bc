//! Noise-tolerant recovery: relax the measurement constraint to a Frobenius
//! ball of radius eta and watch the reconstruction error grow linearly with
//! the noise level.
//!
//! Run with: cargo run --release --example noisy_recovery

use fusion_recovery::{
    measure, random_gaussian_signal, random_measurement_matrix, solve_p1_noisy, FusionFrame,
    Result, SolverOptions, SupportSet,
};
use nalgebra::DMatrix;

fn main() -> Result<()> {
    let frame = FusionFrame::random(8, 2, 12, 21)?;
    let matrix = random_measurement_matrix(10, 12, 22)?;
    let support = SupportSet::new(vec![3, 8])?;
    let planted = random_gaussian_signal(&frame, &support, 23)?;
    let clean = measure(&matrix, &frame, &planted)?;

    // A fixed noise direction, scaled to each level.
    let mut direction = DMatrix::from_fn(clean.nrows(), clean.ncols(), |i, j| {
        ((3 * i + 5 * j) as f64).sin()
    });
    direction /= direction.norm();

    println!("eta          rel error    ratio (error / eta)");
    for exponent in 1..=5 {
        let eta = 10f64.powi(-exponent);
        let y = &clean + &direction * eta;
        let report = solve_p1_noisy(&matrix, &frame, &y, eta, &SolverOptions::default())?;
        let err = (planted.concatenated() - report.coefficients.concatenated()).norm();
        println!("{eta:<12.1e} {err:<12.3e} {:.2}", err / eta);
    }
    println!("the error-to-noise ratio stays bounded: stable recovery");
    Ok(())
}
