//! Restricted isometry constants of the lifted operator versus the matrix
//! alone, and the thresholds at which they certify recovery.
//!
//! Run with: cargo run --release --example restricted_isometry

use fusion_recovery::{
    classical_rip_constant, frip_constant, frip_recovery_checks, random_measurement_matrix,
    rip_dominates_frip, FusionFrame, Result,
};

fn main() -> Result<()> {
    let frame = FusionFrame::random(6, 2, 10, 11)?;
    let matrix = random_measurement_matrix(8, 10, 12)?;

    println!("k    delta_k (lifted)  delta_k (classical)  exact(<1/3)  noisy(<0.4142)");
    for k in 1..=4 {
        let lifted = frip_constant(&matrix, &frame, k)?;
        let classical = classical_rip_constant(&matrix, k)?;
        let checks = frip_recovery_checks(lifted.delta)?;
        println!(
            "{k}    {:<17.6} {:<20.6} {:<12} {}",
            lifted.delta,
            classical,
            if checks.exact_ok { "yes" } else { "no" },
            if checks.noisy_ok { "yes" } else { "no" }
        );
        assert!(rip_dominates_frip(&matrix, &frame, k)?);
    }
    println!("the lifted constant never exceeds the classical one; subspace");
    println!("structure can only help");
    Ok(())
}
