//! Sampled null-space-property checks. A pass is supporting evidence for
//! uniform recovery; a found violation is a proof of failure for some signal.
//!
//! Run with: cargo run --release --example nullspace_check

use fusion_recovery::{
    nsp_sampled_check, random_measurement_matrix, FusionFrame, MeasurementMatrix, Result,
    SubspaceBasis,
};
use nalgebra::DMatrix;

fn main() -> Result<()> {
    // Scalar subspaces with fewer measurements than components: the lifted
    // operator has a genuine null space, and sampling probes it.
    let scalar = |s: f64| SubspaceBasis::new(DMatrix::from_element(1, 1, s)).unwrap();
    let frame = FusionFrame::new((0..12).map(|_| scalar(1.0)).collect())?;
    let matrix = random_measurement_matrix(9, 12, 5)?;
    let check = nsp_sampled_check(&matrix, &frame, 1, 1000, 6)?;
    println!(
        "generic instance:    nullspace dim = {}, worst ratio = {:.4}, violation = {}",
        check.nullspace_dim, check.worst_ratio, check.violation_found
    );

    // A duplicated component with duplicated measurement weights produces the
    // null vector (c, -c), which puts exactly half its mass on one block.
    let dup_frame = FusionFrame::new(vec![scalar(1.0), scalar(1.0)])?;
    let dup_matrix = MeasurementMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 0.0]))?;
    let check = nsp_sampled_check(&dup_matrix, &dup_frame, 1, 100, 7)?;
    println!(
        "duplicated columns:  nullspace dim = {}, worst ratio = {:.4}, violation = {}",
        check.nullspace_dim, check.worst_ratio, check.violation_found
    );

    // Enough measurements make the lifted operator injective; the property
    // holds vacuously.
    let fat = FusionFrame::random(8, 2, 10, 8)?;
    let tall = random_measurement_matrix(8, 10, 9)?;
    let check = nsp_sampled_check(&tall, &fat, 2, 100, 10)?;
    println!(
        "injective instance:  nullspace dim = {}, worst ratio = {:.4}, violation = {}",
        check.nullspace_dim, check.worst_ratio, check.violation_found
    );
    Ok(())
}
