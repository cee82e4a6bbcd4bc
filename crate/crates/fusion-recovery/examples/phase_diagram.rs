//! A small Monte Carlo phase diagram: recovery failure rate over a grid of
//! subspace dimensions and sparsity levels, written as versioned CSV.
//!
//! Run with: cargo run --release --example phase_diagram

use fusion_recovery::{run_phase_diagram, ExperimentConfig, Result};

fn main() -> Result<()> {
    let cfg = ExperimentConfig {
        ambient_dim: 8,
        num_subspaces: 16,
        num_measurements: 10,
        subspace_dims: vec![1, 2, 4],
        sparsity_levels: vec![1, 2, 3],
        trials: 50,
        master_seed: 2024,
        solver: Default::default(),
        frame_source: Default::default(),
        matrix_source: Default::default(),
        support_source: Default::default(),
        threads: 0,
        output: None,
    };

    let result = run_phase_diagram(&cfg)?;
    print!("{}", result.summary_table());

    let path = std::env::temp_dir().join("fusion_recovery_phase_diagram.csv");
    result.write_csv(&path)?;
    println!("\nwrote {} trial rows to {}", result.records.len(), path.display());
    println!("rows are deterministic in (cell, trial) order for any thread count");
    Ok(())
}
