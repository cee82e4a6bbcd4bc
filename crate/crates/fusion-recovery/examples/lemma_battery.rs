//! Monte Carlo verification of the estimates behind the average-case
//! analysis: the operator-norm bound with its equality cases, the mean
//! bound, and Gaussian concentration of the support functional.
//!
//! Run with: cargo run --release --example lemma_battery

use fusion_recovery::{run_lemma_battery, LemmaBatteryConfig, Result};

fn main() -> Result<()> {
    let cfg = LemmaBatteryConfig {
        operator_norm_draws: 500,
        samples: 50_000,
        ..Default::default()
    };
    let report = run_lemma_battery(&cfg)?;

    println!(
        "operator-norm bound held on {}/{} random draws",
        report.operator_norm_draws - report.operator_norm_failures,
        report.operator_norm_draws
    );
    println!(
        "equality cases: orthogonal blocks = {}, identical copies = {}",
        report.orthogonal_equality_ok, report.identical_equality_ok
    );
    println!(
        "mean: {:.4} vs bound {:.4} (stderr {:.1e})",
        report.concentration.mc_mean,
        report.concentration.mean_bound,
        report.concentration.mean_stderr
    );
    for tail in &report.concentration.tails {
        println!(
            "tail u = {:.3}: empirical {:.5} vs bound {:.5}",
            tail.u, tail.empirical, tail.bound
        );
    }

    // Self-test: a deliberately halved constant must trip the tail check.
    let corrupted = run_lemma_battery(&LemmaBatteryConfig { self_test: true, ..cfg })?;
    println!(
        "self-test detected the corrupted bound: {}",
        !corrupted.corrupted.as_ref().unwrap().all_ok()
    );
    println!("battery passed: {}", report.passed && corrupted.passed);
    Ok(())
}
