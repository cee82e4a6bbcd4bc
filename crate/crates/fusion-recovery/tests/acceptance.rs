//! Acceptance suite: one test per release criterion, each printing a single
//! pass/fail line. Run with `cargo test --test acceptance -- --nocapture`.

use fusion_recovery::experiment::{canned, compare_bound_vs_empirical, run_phase_diagram};
use fusion_recovery::frame::{random_subspace, FusionFrame};
use fusion_recovery::guarantees::{
    classical_rip_constant, coherence_recovery_bound, dual_certificate_check, frip_constant,
    frip_recovery_checks, CoherenceBound, EXACT_RECOVERY_DELTA, NOISY_RECOVERY_DELTA,
};
use fusion_recovery::measurement::{
    coherence, fusion_coherence, measure, random_measurement_matrix,
};
use fusion_recovery::rng::derive_seed;
use fusion_recovery::signal::{random_gaussian_signal, SupportSet};
use fusion_recovery::solver::{
    recovered, solve_p0_bruteforce, solve_p1, SolveStatus, SolverOptions,
};
use fusion_recovery::{ExperimentConfig, LemmaBatteryConfig};

fn criterion(number: u32, name: &str, body: impl FnOnce() -> Result<(), String>) {
    let outcome = body();
    match &outcome {
        Ok(()) => println!("acceptance {number:>2} ({name}): PASS"),
        Err(msg) => println!("acceptance {number:>2} ({name}): FAIL - {msg}"),
    }
    if let Err(msg) = outcome {
        panic!("criterion {number} ({name}) failed: {msg}");
    }
}

/// Frame with independently random per-subspace dimensions in `1..=max_dim`.
fn mixed_dim_frame(ambient: usize, count: usize, max_dim: usize, seed: u64) -> FusionFrame {
    use rand::Rng;
    let mut rng = fusion_recovery::rng::stream(seed);
    let subspaces = (0..count)
        .map(|j| {
            let dim = rng.gen_range(1..=max_dim);
            random_subspace(ambient, dim, derive_seed(seed, 0xf0, j as u64)).unwrap()
        })
        .collect();
    FusionFrame::new(subspaces).unwrap()
}

/// Instance whose planted sparsity is certified by the coherence bound.
/// Returns `None` when the bound certifies nothing for this draw.
fn certified_instance(
    ambient: usize,
    count: usize,
    max_dim: usize,
    rows: usize,
    k_cap: usize,
    seed: u64,
) -> Option<(
    fusion_recovery::MeasurementMatrix,
    FusionFrame,
    SupportSet,
    fusion_recovery::BlockCoefficients,
)> {
    let frame = mixed_dim_frame(ambient, count, max_dim, derive_seed(seed, 1, 0));
    let matrix = random_measurement_matrix(rows, count, derive_seed(seed, 2, 0)).unwrap();
    let mu_f = fusion_coherence(&matrix, &frame).unwrap();
    let k = match coherence_recovery_bound(mu_f).unwrap() {
        CoherenceBound::Unbounded => k_cap,
        CoherenceBound::UpTo(0) => return None,
        CoherenceBound::UpTo(limit) => limit.min(k_cap),
    };
    let support = SupportSet::random(count, k, derive_seed(seed, 3, 0)).unwrap();
    let planted = random_gaussian_signal(&frame, &support, derive_seed(seed, 4, 0)).unwrap();
    Some((matrix, frame, support, planted))
}

#[test]
fn acceptance_1_coherence_guarantee_recovery() {
    criterion(1, "coherence-certified recovery, convex and exhaustive", || {
        let mut done = 0;
        let mut seed = 0u64;
        while done < 100 {
            seed += 1;
            if seed > 1000 {
                return Err("could not draw 100 certified instances".into());
            }
            let Some((matrix, frame, support, planted)) =
                certified_instance(16, 24, 3, 20, 3, derive_seed(11, 0xc1, seed))
            else {
                continue;
            };
            let y = measure(&matrix, &frame, &planted).unwrap();
            let report = solve_p1(&matrix, &frame, &y, &SolverOptions::default())
                .map_err(|e| format!("instance {seed}: {e}"))?;
            if report.status != SolveStatus::Converged {
                return Err(format!("instance {seed}: solver status {}", report.status));
            }
            if !recovered(&planted, &report.coefficients, 1e-4) {
                return Err(format!("instance {seed}: convex program missed the signal"));
            }
            let brute = solve_p0_bruteforce(
                &matrix,
                &frame,
                &y,
                support.len(),
                &SolverOptions::default(),
            )
            .map_err(|e| format!("instance {seed}: {e}"))?;
            if brute.support != support {
                return Err(format!(
                    "instance {seed}: exhaustive support {:?} != planted {:?}",
                    brute.support.indices(),
                    support.indices()
                ));
            }
            done += 1;
        }
        Ok(())
    });
}

#[test]
fn acceptance_2_exhaustive_and_convex_agree() {
    criterion(2, "exhaustive and convex solutions agree on tiny instances", || {
        use rand::Rng;
        let opts = SolverOptions {
            objective_rel_tol: 1e-9,
            ..SolverOptions::default()
        };
        let mut done = 0;
        let mut seed = 0u64;
        while done < 50 {
            seed += 1;
            if seed > 2000 {
                return Err("could not draw 50 certified tiny instances".into());
            }
            let base = derive_seed(22, 0xc2, seed);
            let mut dims_rng = fusion_recovery::rng::stream(derive_seed(base, 0, 0));
            let ambient = dims_rng.gen_range(2..=4usize);
            let count = dims_rng.gen_range(4..=8usize);
            let rows = dims_rng.gen_range(3..=6usize);
            let Some((matrix, frame, _support, planted)) =
                certified_instance(ambient, count, 2.min(ambient), rows, 2, base)
            else {
                continue;
            };
            let y = measure(&matrix, &frame, &planted).unwrap();
            let convex = solve_p1(&matrix, &frame, &y, &opts)
                .map_err(|e| format!("instance {seed}: {e}"))?;
            let brute = solve_p0_bruteforce(&matrix, &frame, &y, 2, &opts)
                .map_err(|e| format!("instance {seed}: {e}"))?;
            if convex.status != SolveStatus::Converged
                || brute.report.status != SolveStatus::Converged
            {
                return Err(format!("instance {seed}: a solver did not converge"));
            }
            let diff = (convex.coefficients.concatenated()
                - brute.report.coefficients.concatenated())
            .norm();
            let scale = brute.report.coefficients.concatenated().norm().max(1e-12);
            if diff > 1e-6 * scale {
                return Err(format!(
                    "instance {seed}: solutions deviate by {:.3e} relative",
                    diff / scale
                ));
            }
            done += 1;
        }
        Ok(())
    });
}

#[test]
fn acceptance_3_dual_certificate_soundness() {
    criterion(3, "positive certificate margin forces recovery", || {
        let mut certified = 0;
        for trial in 0..200u64 {
            let base = derive_seed(33, 0xc3, trial);
            let frame = FusionFrame::random(16, 2, 48, derive_seed(base, 1, 0)).unwrap();
            let matrix = random_measurement_matrix(24, 48, derive_seed(base, 2, 0)).unwrap();
            let k = 1 + (trial % 4) as usize;
            let support = SupportSet::random(48, k, derive_seed(base, 3, 0)).unwrap();
            let planted =
                random_gaussian_signal(&frame, &support, derive_seed(base, 4, 0)).unwrap();
            let cert = match dual_certificate_check(&matrix, &frame, &planted) {
                Ok(cert) => cert,
                Err(_) => continue, // rank-deficient support: hypothesis not met
            };
            if !cert.passed {
                continue;
            }
            certified += 1;
            let y = measure(&matrix, &frame, &planted).unwrap();
            let report = solve_p1(&matrix, &frame, &y, &SolverOptions::default())
                .map_err(|e| format!("trial {trial}: {e}"))?;
            if !(report.status == SolveStatus::Converged
                && recovered(&planted, &report.coefficients, 1e-4))
            {
                return Err(format!(
                    "trial {trial}: margin {:.3e} but recovery failed",
                    cert.margin
                ));
            }
        }
        if certified == 0 {
            return Err("no instance passed the certificate; vacuous run".into());
        }
        Ok(())
    });
}

#[test]
fn acceptance_4_frip_correctness() {
    criterion(4, "restricted isometry constants: reduction, dominance, band", || {
        // Scalar-subspace case reduces to the classical constant.
        for seed in 0..10u64 {
            let matrix = random_measurement_matrix(8, 10, derive_seed(44, 1, seed)).unwrap();
            let signs: Vec<f64> = (0..10).map(|j| if j % 3 == 0 { -1.0 } else { 1.0 }).collect();
            let frame = FusionFrame::new(
                signs
                    .iter()
                    .map(|&s| {
                        fusion_recovery::SubspaceBasis::new(nalgebra::DMatrix::from_element(
                            1, 1, s,
                        ))
                        .unwrap()
                    })
                    .collect(),
            )
            .unwrap();
            for k in 1..=3 {
                let lifted = frip_constant(&matrix, &frame, k).unwrap().delta;
                let classical = classical_rip_constant(&matrix, k).unwrap();
                if (lifted - classical).abs() > 1e-10 {
                    return Err(format!(
                        "scalar case k={k}: lifted {lifted} vs classical {classical}"
                    ));
                }
            }
        }

        // Dominance on 50 random fusion instances.
        for seed in 0..50u64 {
            let frame = FusionFrame::random(4, 2, 10, derive_seed(44, 2, seed)).unwrap();
            let matrix = random_measurement_matrix(8, 10, derive_seed(44, 3, seed)).unwrap();
            let k = 2;
            let lifted = frip_constant(&matrix, &frame, k).unwrap().delta;
            let classical = classical_rip_constant(&matrix, k).unwrap();
            if lifted > classical + 1e-10 {
                return Err(format!(
                    "instance {seed}: lifted {lifted} exceeds classical {classical}"
                ));
            }
        }

        // No random block-sparse sample may violate the isometry band.
        let frame = FusionFrame::random(4, 2, 10, derive_seed(44, 4, 0)).unwrap();
        let matrix = random_measurement_matrix(8, 10, derive_seed(44, 5, 0)).unwrap();
        let k = 2;
        let delta = frip_constant(&matrix, &frame, k).unwrap().delta;
        let system_check = |c: &fusion_recovery::BlockCoefficients| -> f64 {
            let y = measure(&matrix, &frame, c).unwrap();
            let num = y.norm_squared();
            let den = c.concatenated().norm_squared();
            num / den
        };
        for t in 0..10_000u64 {
            let support = SupportSet::random(10, k, derive_seed(44, 6, t)).unwrap();
            let c = random_gaussian_signal(&frame, &support, derive_seed(44, 7, t)).unwrap();
            let ratio = system_check(&c);
            if ratio < 1.0 - delta - 1e-8 || ratio > 1.0 + delta + 1e-8 {
                return Err(format!(
                    "sample {t}: energy ratio {ratio} outside [{}, {}]",
                    1.0 - delta,
                    1.0 + delta
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_5_threshold_flags() {
    criterion(5, "recovery threshold constants", || {
        if EXACT_RECOVERY_DELTA != 1.0 / 3.0 {
            return Err("exact-recovery threshold is not 1/3".into());
        }
        if NOISY_RECOVERY_DELTA != std::f64::consts::SQRT_2 - 1.0 {
            return Err("noisy-recovery threshold is not sqrt(2)-1".into());
        }
        if (NOISY_RECOVERY_DELTA - 0.4142).abs() > 1e-4 {
            return Err("noisy-recovery threshold is not about 0.4142".into());
        }
        let probes = [
            (0.30, true, true),
            (0.40, false, true),
            (0.50, false, false),
        ];
        for (delta, exact, noisy) in probes {
            let checks = frip_recovery_checks(delta).unwrap();
            if checks.exact_ok != exact || checks.noisy_ok != noisy {
                return Err(format!("probe {delta}: got {checks:?}"));
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_6_lemma_battery() {
    criterion(6, "operator-norm and concentration battery", || {
        let cfg = LemmaBatteryConfig {
            ambient_dim: 12,
            subspace_dim: 3,
            num_subspaces: 8,
            support_size: 4,
            operator_norm_draws: 1000,
            samples: 100_000,
            master_seed: 66,
            self_test: false,
        };
        let report = fusion_recovery::run_lemma_battery(&cfg).map_err(|e| e.to_string())?;
        if report.operator_norm_failures > 0 {
            return Err(format!(
                "{} of {} operator-norm draws violated the bound",
                report.operator_norm_failures, report.operator_norm_draws
            ));
        }
        if !report.orthogonal_equality_ok || !report.identical_equality_ok {
            return Err("an equality case of the operator-norm bound failed".into());
        }
        if !report.concentration.mean_ok {
            return Err(format!(
                "mean {} exceeds bound {} + 3*{}",
                report.concentration.mc_mean,
                report.concentration.mean_bound,
                report.concentration.mean_stderr
            ));
        }
        for tail in &report.concentration.tails {
            if !tail.ok {
                return Err(format!(
                    "tail at u={}: empirical {} exceeds bound {} + 3*{}",
                    tail.u, tail.empirical, tail.bound, tail.stderr
                ));
            }
        }
        // The battery must also notice a deliberately broken bound.
        let self_test = LemmaBatteryConfig { self_test: true, ..cfg };
        let report = fusion_recovery::run_lemma_battery(&self_test).map_err(|e| e.to_string())?;
        match &report.corrupted {
            Some(corrupted) if !corrupted.all_ok() => Ok(()),
            _ => Err("the corrupted bound was not detected".into()),
        }
    });
}

#[test]
fn acceptance_7_failure_bound_dominates_and_rate_decays() {
    criterion(7, "average-case bound dominates the empirical rate", || {
        let cfg = canned::failure_bound_family(500, 77);

        // The designed family must actually meet its conditioning targets.
        let probe = run_phase_diagram(&ExperimentConfig {
            trials: 1,
            ..cfg.clone()
        })
        .map_err(|e| e.to_string())?;
        for record in &probe.records {
            if record.alpha.is_nan() || record.alpha > 0.6 {
                return Err(format!("designed alpha {} exceeds 0.6", record.alpha));
            }
            if record.theta.is_nan() || record.theta > 1.5 {
                return Err(format!("designed theta {} exceeds 1.5", record.theta));
            }
        }

        let result = compare_bound_vs_empirical(&cfg).map_err(|e| e.to_string())?;
        if result.rows.len() != 4 {
            return Err(format!("expected 4 cells, got {}", result.rows.len()));
        }
        for row in &result.rows {
            if row.included + row.excluded != row.trials {
                return Err(format!("cell m={}: accounting broken", row.m));
            }
            if row.excluded != 0 {
                return Err(format!(
                    "cell m={}: {} trials violated the conditioning hypothesis",
                    row.m, row.excluded
                ));
            }
            if row.thm_bound + 1e-12 < row.empirical_failure {
                return Err(format!(
                    "cell m={}: bound {} below empirical rate {}",
                    row.m, row.thm_bound, row.empirical_failure
                ));
            }
        }
        // Nonincreasing in m up to confidence-interval overlap.
        for pair in result.rows.windows(2) {
            let (lo, hi) = (&pair[0], &pair[1]);
            let nonincreasing = hi.empirical_failure <= lo.empirical_failure + 1e-12;
            let ci_overlap = hi.ci_low <= lo.ci_high + 1e-12;
            if !nonincreasing && !ci_overlap {
                return Err(format!(
                    "failure rate rose from m={} ({}) to m={} ({}) beyond CI overlap",
                    lo.m, lo.empirical_failure, hi.m, hi.empirical_failure
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn acceptance_8_orthogonal_subspace_advantage() {
    criterion(8, "orthogonal subspaces beat coherent measurements", || {
        // The measurement weights are fully coherent by construction.
        let demo = canned::subspace_advantage(4, 100, 88);
        let control = canned::subspace_advantage_control(4, 100, 88);
        let matrix = random_measurement_matrix(1, 2, 12345).unwrap();
        let mu = coherence(&matrix).unwrap();
        if (mu - 1.0).abs() > 1e-12 {
            return Err(format!("single-row coherence is {mu}, expected 1"));
        }

        let result = run_phase_diagram(&demo).map_err(|e| e.to_string())?;
        let cell = &result.cells[0];
        if cell.failures != 0 {
            return Err(format!(
                "advantage arm failed {}/{} despite orthogonal subspaces",
                cell.failures, cell.trials
            ));
        }

        let result = run_phase_diagram(&control).map_err(|e| e.to_string())?;
        let cell = &result.cells[0];
        if cell.failures < 99 {
            return Err(format!(
                "control arm failed only {}/{}; expected at least 99",
                cell.failures, cell.trials
            ));
        }
        Ok(())
    });
}

#[test]
fn acceptance_9_reproducibility() {
    criterion(9, "byte-identical CSV, serial and parallel", || {
        let base = ExperimentConfig {
            ambient_dim: 8,
            num_subspaces: 12,
            num_measurements: 8,
            subspace_dims: vec![1, 2],
            sparsity_levels: vec![1, 2],
            trials: 5,
            master_seed: 99,
            solver: SolverOptions::default(),
            frame_source: Default::default(),
            matrix_source: Default::default(),
            support_source: Default::default(),
            threads: 1,
            output: None,
        };
        let serial = run_phase_diagram(&base).map_err(|e| e.to_string())?.to_csv();
        let again = run_phase_diagram(&base).map_err(|e| e.to_string())?.to_csv();
        if serial != again {
            return Err("two serial runs differ".into());
        }
        let parallel = run_phase_diagram(&ExperimentConfig { threads: 4, ..base.clone() })
            .map_err(|e| e.to_string())?
            .to_csv();
        if serial != parallel {
            return Err("serial and 4-way parallel runs differ".into());
        }
        let comparison = compare_bound_vs_empirical(&base).map_err(|e| e.to_string())?.to_csv();
        let comparison_parallel =
            compare_bound_vs_empirical(&ExperimentConfig { threads: 4, ..base })
                .map_err(|e| e.to_string())?
                .to_csv();
        if comparison != comparison_parallel {
            return Err("bound-comparison CSVs differ across thread counts".into());
        }
        Ok(())
    });
}
