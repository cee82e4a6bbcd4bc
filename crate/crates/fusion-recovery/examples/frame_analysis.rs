//! Build fusion frames and inspect their geometry: frame bounds, tightness,
//! pairwise subspace overlaps and the support overlap quantity theta.
//!
//! Run with: cargo run --release --example frame_analysis

use fusion_recovery::{FusionFrame, Result, SupportSet};

fn main() -> Result<()> {
    // A random frame: five 2-dimensional subspaces of R^6.
    let frame = FusionFrame::random(6, 2, 5, 42)?;
    let (lower, upper) = frame.frame_bounds();
    println!("random frame: M = {}, N = {}", frame.ambient_dim(), frame.len());
    println!("  frame bounds: A = {lower:.6}, B = {upper:.6}");
    println!("  is frame: {}, tight: {}", frame.is_frame(), frame.is_tight());

    println!("  pairwise overlaps (largest principal-angle cosines):");
    for i in 0..frame.len() {
        let row: Vec<String> = (0..frame.len())
            .map(|j| {
                if i == j {
                    "  -  ".into()
                } else {
                    format!("{:.3}", frame.subspace_overlap(i, j).unwrap())
                }
            })
            .collect();
        println!("    {}", row.join("  "));
    }

    for k in 1..=4 {
        let support = SupportSet::new((0..k).collect())?;
        println!(
            "  theta over the first {k} subspaces: {:.6}",
            frame.theta_of_support(&support)?
        );
    }

    // An orthonormal partition of R^4 is a tight frame with A = B = 1.
    let partition = fusion_recovery::experiment::orthogonal_block_frame(2, 2)?;
    let (a, b) = partition.frame_bounds();
    println!("orthonormal partition of R^4: A = {a:.6}, B = {b:.6} (tight)");

    Ok(())
}
