//! Command-line front end. One thin binary routes subcommands to the library;
//! every capability is also available programmatically (see `examples/`).
//!
//! Exit codes: 0 success, 1 failed check or error, 2 solver hit the iteration
//! budget, 3 infeasible system, 64 usage error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::experiment::{
    build_frame, canned, compare_bound_vs_empirical, run_lemma_battery, run_phase_diagram,
    ExperimentConfig, FrameSource, LemmaBatteryConfig,
};
use crate::guarantees::{
    classical_rip_constant, coherence_recovery_bound, dual_certificate_check, frip_constant,
    frip_recovery_checks, recovery_failure_bound, NOISY_RECOVERY_DELTA,
};
use crate::io;
use crate::measurement::{
    alpha_of_support, coherence, fusion_coherence, measure, random_measurement_matrix,
    union_of_orthobases, MeasurementMatrix,
};
use crate::signal::SupportSet;
use crate::solver::{solve_p1, solve_p1_noisy, SolverOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_MAX_ITERS: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser)]
#[command(
    name = "fusion-recovery",
    version,
    about = "Block-sparse recovery over fusion frames: solvers, certificates, experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a fusion frame file.
    GenFrame(GenFrameArgs),
    /// Generate a measurement matrix file.
    GenMatrix(GenMatrixArgs),
    /// Apply the measurement map to a coefficients file.
    Measure(MeasureArgs),
    /// Recover coefficients from measurements.
    Solve(SolveArgs),
    /// Print the recovery certificates of a (matrix, frame) pair.
    Certify(CertifyArgs),
    /// Run a Monte Carlo recovery sweep and write trial rows as CSV.
    PhaseDiagram(SweepArgs),
    /// Compare the average-case failure bound against empirical rates.
    CompareBound(SweepArgs),
    /// Verify the operator-norm and concentration estimates by sampling.
    LemmaBattery(LemmaBatteryArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameDesign {
    Random,
    OrthogonalBlocks,
    IdenticalCopies,
}

#[derive(Args)]
struct GenFrameArgs {
    /// Ambient dimension M.
    #[arg(long)]
    ambient_dim: usize,
    /// Dimension of every subspace.
    #[arg(long)]
    subspace_dim: usize,
    /// Number of subspaces N.
    #[arg(long)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FrameDesign::Random)]
    design: FrameDesign,
    /// For the orthogonal-blocks design: how many leading subspaces are
    /// designed coordinate blocks (defaults to all of them).
    #[arg(long)]
    designed: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixDesign {
    Gaussian,
    UnionBases,
}

#[derive(Args)]
struct GenMatrixArgs {
    /// Number of measurements n (rows).
    #[arg(long)]
    rows: usize,
    /// Number of sampled components N (columns). Implied for union-bases.
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = MatrixDesign::Gaussian)]
    design: MatrixDesign,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    frame: PathBuf,
    #[arg(long)]
    coefficients: PathBuf,
    /// Accept and renormalize non-unit matrix columns.
    #[arg(long)]
    renormalize_columns: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    frame: PathBuf,
    #[arg(long)]
    measurements: PathBuf,
    /// Noise radius; 0 solves the equality-constrained program.
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    /// Feasibility tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Accept and renormalize non-unit matrix columns.
    #[arg(long)]
    renormalize_columns: bool,
    /// Where to write the solve report (JSON).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Where to write the recovered coefficients (JSON).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    frame: PathBuf,
    /// Largest block sparsity for the restricted isometry table.
    #[arg(long, default_value_t = 2)]
    kmax: usize,
    /// Comma-separated support indices for the support-specific certificates.
    #[arg(long, value_delimiter = ',')]
    support: Option<Vec<usize>>,
    /// Coefficients file whose support drives the support-specific
    /// certificates (and the dual certificate).
    #[arg(long)]
    signal: Option<PathBuf>,
    /// Accept and renormalize non-unit matrix columns.
    #[arg(long)]
    renormalize_columns: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Canned configuration: advantage, advantage-control, bound-family.
    #[arg(long)]
    canned: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the configured trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the configured master seed.
    #[arg(long)]
    master_seed: Option<u64>,
    /// Override the configured worker thread count.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct LemmaBatteryArgs {
    /// Battery configuration (JSON); defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Corrupt the tail bound on purpose and verify the battery notices.
    #[arg(long)]
    self_test: bool,
}

/// Parse arguments and run. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error[{}]: {}", err.code(), err);
            EXIT_CHECK_FAILED
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::GenFrame(args) => gen_frame(args),
        Command::GenMatrix(args) => gen_matrix(args),
        Command::Measure(args) => measure_cmd(args),
        Command::Solve(args) => solve_cmd(args),
        Command::Certify(args) => certify_cmd(args),
        Command::PhaseDiagram(args) => phase_diagram_cmd(args),
        Command::CompareBound(args) => compare_bound_cmd(args),
        Command::LemmaBattery(args) => lemma_battery_cmd(args),
    }
}

fn gen_frame(args: GenFrameArgs) -> Result<i32> {
    let source = match args.design {
        FrameDesign::Random => FrameSource::Random,
        FrameDesign::OrthogonalBlocks => FrameSource::OrthogonalBlocks {
            designed: args.designed.unwrap_or(args.count),
        },
        FrameDesign::IdenticalCopies => FrameSource::IdenticalCopies,
    };
    let frame = build_frame(&source, args.ambient_dim, args.subspace_dim, args.count, args.seed)?;
    io::write_frame(&args.out, &frame)?;
    println!(
        "wrote frame: ambient_dim={} subspaces={} dims={:?}",
        frame.ambient_dim(),
        frame.len(),
        frame.block_dims()
    );
    Ok(EXIT_OK)
}

fn gen_matrix(args: GenMatrixArgs) -> Result<i32> {
    let matrix = match args.design {
        MatrixDesign::Gaussian => {
            let cols = args.cols.ok_or_else(|| {
                Error::Argument("--cols is required for the gaussian design".into())
            })?;
            random_measurement_matrix(args.rows, cols, args.seed)?
        }
        MatrixDesign::UnionBases => {
            if let Some(cols) = args.cols {
                if cols != 2 * args.rows {
                    return Err(Error::Argument(
                        "union-bases matrices have exactly 2*rows columns".into(),
                    ));
                }
            }
            union_of_orthobases(args.rows)?
        }
    };
    io::write_matrix(&args.out, &matrix)?;
    println!("wrote matrix: {}x{}", matrix.num_rows(), matrix.num_cols());
    Ok(EXIT_OK)
}

fn load_matrix(path: &Path, renormalize: bool) -> Result<MeasurementMatrix> {
    let matrix = io::read_matrix(path, renormalize)?;
    if matrix.was_renormalized() {
        eprintln!("warning: matrix columns were renormalized to unit norm");
    }
    Ok(matrix)
}

fn measure_cmd(args: MeasureArgs) -> Result<i32> {
    let matrix = load_matrix(&args.matrix, args.renormalize_columns)?;
    let frame = io::read_frame(&args.frame)?;
    let coefficients = io::read_coefficients(&args.coefficients)?;
    let y = measure(&matrix, &frame, &coefficients)?;
    io::write_dense_matrix(&args.out, &y)?;
    println!("wrote measurements: {}x{}", y.nrows(), y.ncols());
    Ok(EXIT_OK)
}

fn solve_cmd(args: SolveArgs) -> Result<i32> {
    let matrix = load_matrix(&args.matrix, args.renormalize_columns)?;
    let frame = io::read_frame(&args.frame)?;
    let y = io::read_dense_matrix(&args.measurements)?;
    let opts = SolverOptions {
        feasibility_tol: args.tol,
        max_iterations: args.max_iters,
        ..SolverOptions::default()
    };
    let report = if args.eta > 0.0 {
        solve_p1_noisy(&matrix, &frame, &y, args.eta, &opts)?
    } else {
        solve_p1(&matrix, &frame, &y, &opts)?
    };
    println!(
        "status={} iterations={} residual={:.3e} objective={:.12e} support={:?}",
        report.status,
        report.iterations,
        report.final_feasibility_residual,
        report.final_objective,
        report.coefficients.support().indices()
    );
    if let Some(path) = &args.report {
        io::write_solve_report(path, &report)?;
    }
    if let Some(path) = &args.out {
        io::write_coefficients(path, &report.coefficients)?;
    }
    Ok(io::status_exit_code(report.status))
}

fn certify_cmd(args: CertifyArgs) -> Result<i32> {
    let matrix = load_matrix(&args.matrix, args.renormalize_columns)?;
    let frame = io::read_frame(&args.frame)?;
    let mu = coherence(&matrix)?;
    let mu_f = fusion_coherence(&matrix, &frame)?;
    let bound = coherence_recovery_bound(mu_f)?;
    println!("coherence (mu):              {mu:.12}");
    println!("fusion coherence (mu_f):     {mu_f:.12}");
    println!("certified block sparsity:    {bound}");
    println!();
    println!(
        "k     delta_k (lifted)   delta_k (classical)  exact(<1/3)  noisy(<{NOISY_RECOVERY_DELTA:.4})"
    );
    for k in 1..=args.kmax {
        let lifted = frip_constant(&matrix, &frame, k)?.delta;
        let classical = classical_rip_constant(&matrix, k)?;
        let checks = frip_recovery_checks(lifted)?;
        println!(
            "{k:<5} {lifted:<18.12} {classical:<20.12} {:<12} {}",
            if checks.exact_ok { "yes" } else { "no" },
            if checks.noisy_ok { "yes" } else { "no" }
        );
    }

    let support = match (&args.support, &args.signal) {
        (Some(indices), _) => Some(SupportSet::from_unsorted(indices.clone())?),
        (None, Some(path)) => Some(io::read_coefficients(path)?.support()),
        (None, None) => None,
    };
    if let Some(support) = support {
        support.validate(frame.len())?;
        println!();
        println!("support {:?}:", support.indices());
        let alpha = match alpha_of_support(&matrix, &support) {
            Ok(alpha) => {
                println!("  alpha:                     {alpha:.12}");
                Some(alpha)
            }
            Err(e) => {
                println!("  alpha:                     n/a ({e})");
                None
            }
        };
        let theta = frame.theta_of_support(&support)?;
        println!("  theta:                     {theta:.12}");

        if let Some(path) = &args.signal {
            let c = io::read_coefficients(path)?;
            match dual_certificate_check(&matrix, &frame, &c) {
                Ok(cert) => println!(
                    "  dual certificate margin:   {:.12} ({})",
                    cert.margin,
                    if cert.passed { "passed" } else { "failed" }
                ),
                Err(e) => println!("  dual certificate margin:   n/a ({e})"),
            }
        }

        let dims = frame.block_dims();
        let equal_dims = dims.iter().all(|&d| d == dims[0]);
        match alpha {
            Some(alpha) if equal_dims && alpha < 1.0 && support.len() < frame.len() => {
                let fb =
                    recovery_failure_bound(alpha, theta, dims[0], frame.len(), support.len())?;
                println!(
                    "  failure bound (m={}):      {:.6e}{}",
                    dims[0],
                    fb.bound,
                    if fb.bound >= 1.0 { " (vacuous)" } else { "" }
                );
            }
            _ if !equal_dims => {
                println!("  failure bound:             n/a (unequal subspace dimensions)");
            }
            _ => println!("  failure bound:             n/a (needs alpha < 1 and k < N)"),
        }
    }
    Ok(EXIT_OK)
}

fn load_sweep_config(args: &SweepArgs) -> Result<ExperimentConfig> {
    let mut cfg: ExperimentConfig = match (&args.config, &args.canned) {
        (Some(path), None) => io::read_json(path)?,
        (None, Some(name)) => match name.as_str() {
            "advantage" => canned::subspace_advantage(4, 100, 0),
            "advantage-control" => canned::subspace_advantage_control(4, 100, 0),
            "bound-family" => canned::failure_bound_family(500, 0),
            other => {
                return Err(Error::Config(format!(
                    "unknown canned configuration '{other}' (use advantage, advantage-control, bound-family)"
                )))
            }
        },
        (Some(_), Some(_)) => {
            return Err(Error::Config("--config and --canned are mutually exclusive".into()))
        }
        (None, None) => {
            return Err(Error::Config("one of --config or --canned is required".into()))
        }
    };
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(seed) = args.master_seed {
        cfg.master_seed = seed;
    }
    if let Some(threads) = args.threads {
        cfg.threads = threads;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

fn phase_diagram_cmd(args: SweepArgs) -> Result<i32> {
    let cfg = load_sweep_config(&args)?;
    let result = run_phase_diagram(&cfg)?;
    if let Some(path) = &cfg.output {
        result.write_csv(path)?;
        println!("wrote {} trial rows to {}", result.records.len(), path.display());
    }
    print!("{}", result.summary_table());
    Ok(EXIT_OK)
}

fn compare_bound_cmd(args: SweepArgs) -> Result<i32> {
    let cfg = load_sweep_config(&args)?;
    let result = compare_bound_vs_empirical(&cfg)?;
    if let Some(path) = &cfg.output {
        result.write_csv(path)?;
        println!("wrote {} cells to {}", result.rows.len(), path.display());
    }
    println!("m     k     empirical  ci95               bound        vacuous  excluded");
    for r in &result.rows {
        println!(
            "{:<5} {:<5} {:<10.4} [{:.4}, {:.4}]   {:<12.4e} {:<8} {}",
            r.m, r.k, r.empirical_failure, r.ci_low, r.ci_high, r.thm_bound, r.vacuous, r.excluded
        );
    }
    Ok(EXIT_OK)
}

fn lemma_battery_cmd(args: LemmaBatteryArgs) -> Result<i32> {
    let mut cfg: LemmaBatteryConfig = match &args.config {
        Some(path) => io::read_json(path)?,
        None => LemmaBatteryConfig::default(),
    };
    if let Some(samples) = args.samples {
        cfg.samples = samples;
    }
    if let Some(draws) = args.draws {
        cfg.operator_norm_draws = draws;
    }
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    cfg.self_test |= args.self_test;

    let report = run_lemma_battery(&cfg)?;
    println!(
        "operator-norm bound:   {}/{} draws ok",
        report.operator_norm_draws - report.operator_norm_failures,
        report.operator_norm_draws
    );
    println!(
        "equality cases:        orthogonal={} identical={}",
        if report.orthogonal_equality_ok { "ok" } else { "FAILED" },
        if report.identical_equality_ok { "ok" } else { "FAILED" }
    );
    println!(
        "mean estimate:         {:.6} <= {:.6} + 3*{:.2e} ({})",
        report.concentration.mc_mean,
        report.concentration.mean_bound,
        report.concentration.mean_stderr,
        if report.concentration.mean_ok { "ok" } else { "FAILED" }
    );
    for tail in &report.concentration.tails {
        println!(
            "tail at u={:<8.4}:    {:.6} <= {:.6} + 3*{:.2e} ({})",
            tail.u,
            tail.empirical,
            tail.bound,
            tail.stderr,
            if tail.ok { "ok" } else { "FAILED" }
        );
    }
    if let Some(corrupted) = &report.corrupted {
        println!(
            "self-test:             corrupted bound {}",
            if corrupted.all_ok() { "NOT DETECTED" } else { "detected" }
        );
    }
    println!("battery:               {}", if report.passed { "pass" } else { "FAIL" });
    Ok(if report.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(run(["fusion-recovery", "no-such-command"]), EXIT_USAGE);
        assert_eq!(run(["fusion-recovery"]), EXIT_USAGE);
    }

    #[test]
    fn help_and_version_exit_0() {
        assert_eq!(run(["fusion-recovery", "--help"]), EXIT_OK);
        assert_eq!(run(["fusion-recovery", "--version"]), EXIT_OK);
    }
}
