//! Reproducible Monte Carlo experiments: recovery phase diagrams over
//! `(k, m, n)`, empirical failure rates against the average-case bound, and
//! the concentration battery. Results are written as versioned CSV; identical
//! configurations produce byte-identical files regardless of thread count.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{random_subspace, FusionFrame, SubspaceBasis};
use crate::guarantees::{
    dual_certificate_check, recovery_failure_bound, support_operator_norm,
    verify_concentration_bounds, ConcentrationReport,
};
use crate::measurement::{
    alpha_of_support, measure, random_measurement_matrix, union_of_orthobases, MeasurementMatrix,
};
use crate::rng::derive_seed;
use crate::signal::{random_gaussian_signal, SupportSet};
use crate::solver::{recovered, solve_p1, SolveStatus, SolverOptions};

/// CSV schema version stamped into every output file.
pub const CSV_SCHEMA: u32 = 1;

/// Relative tolerance of the per-trial success criterion.
pub const RECOVERY_REL_TOL: f64 = 1e-4;

/// Where trial frames come from.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrameSource {
    /// Fresh random subspaces every trial.
    #[default]
    Random,
    /// One frame read from a file and pinned across trials.
    File { path: PathBuf },
    /// The first `designed` subspaces span disjoint coordinate blocks (so
    /// they are pairwise orthogonal); the rest are random per trial.
    OrthogonalBlocks { designed: usize },
    /// Every subspace is the same leading coordinate block.
    IdenticalCopies,
}

/// Where trial matrices come from.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixSource {
    /// Fresh column-normalized Gaussian matrix every trial.
    #[default]
    Gaussian,
    /// One matrix read from a file and pinned across trials.
    File { path: PathBuf },
    /// The deterministic union of the standard and Hadamard bases; requires
    /// `num_subspaces = 2 * num_measurements` and a power-of-two row count.
    UnionBases,
}

/// How trial supports are drawn.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SupportSource {
    /// Uniform random subset of the stated size, fresh every trial.
    #[default]
    Random,
    /// One fixed support used by every trial.
    Fixed { indices: Vec<usize> },
}

/// Full description of a Monte Carlo sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Ambient dimension `M`.
    pub ambient_dim: usize,
    /// Number of subspaces `N`.
    pub num_subspaces: usize,
    /// Number of measurements `n`.
    pub num_measurements: usize,
    /// Subspace dimensions to sweep.
    pub subspace_dims: Vec<usize>,
    /// Block sparsities to sweep.
    pub sparsity_levels: Vec<usize>,
    /// Trials per `(m, k)` cell.
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default)]
    pub frame_source: FrameSource,
    #[serde(default)]
    pub matrix_source: MatrixSource,
    #[serde(default)]
    pub support_source: SupportSource,
    /// Worker threads; 0 means the library default. Results do not depend on
    /// this value.
    #[serde(default)]
    pub threads: usize,
    /// Default CSV destination, overridable from the command line.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// One solved trial.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub recovered: bool,
    pub rel_error: f64,
    pub iterations: usize,
    pub cert_margin: f64,
    pub alpha: f64,
    pub theta: f64,
    pub status: SolveStatus,
}

/// Failure statistics for one `(m, k)` cell.
#[derive(Debug, Clone)]
pub struct CellSummary {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub trials: usize,
    pub failures: usize,
    pub failure_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Result of a phase-diagram sweep.
#[derive(Debug, Clone)]
pub struct PhaseDiagram {
    pub records: Vec<TrialRecord>,
    pub cells: Vec<CellSummary>,
}

/// 95% Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: usize, total: usize) -> (f64, f64) {
    if total == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = total as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == total { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

struct PinnedSources {
    frame: Option<Arc<FusionFrame>>,
    matrix: Option<Arc<MeasurementMatrix>>,
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.subspace_dims.is_empty() || self.sparsity_levels.is_empty() {
            return Err(Error::Config("dimension and sparsity lists must be nonempty".into()));
        }
        for &m in &self.subspace_dims {
            for &k in &self.sparsity_levels {
                self.validate_cell(m, k)?;
            }
        }
        Ok(())
    }

    fn validate_cell(&self, m: usize, k: usize) -> Result<()> {
        let cell = format!("cell (m={m}, k={k}, n={})", self.num_measurements);
        if m == 0 || m > self.ambient_dim {
            return Err(Error::Config(format!(
                "{cell}: subspace dimension must satisfy 1 <= m <= {}",
                self.ambient_dim
            )));
        }
        if k > self.num_subspaces {
            return Err(Error::Config(format!(
                "{cell}: sparsity exceeds the number of subspaces {}",
                self.num_subspaces
            )));
        }
        if self.num_measurements == 0 || self.num_subspaces == 0 {
            return Err(Error::Config(format!("{cell}: empty measurement geometry")));
        }
        match &self.frame_source {
            FrameSource::OrthogonalBlocks { designed } => {
                if designed * m > self.ambient_dim {
                    return Err(Error::Config(format!(
                        "{cell}: {designed} designed orthogonal blocks of dimension {m} do not fit in R^{}",
                        self.ambient_dim
                    )));
                }
            }
            FrameSource::IdenticalCopies => {}
            FrameSource::Random => {}
            FrameSource::File { .. } => {}
        }
        if let MatrixSource::UnionBases = self.matrix_source {
            if !self.num_measurements.is_power_of_two()
                || self.num_subspaces != 2 * self.num_measurements
            {
                return Err(Error::Config(format!(
                    "{cell}: the union-of-bases matrix needs a power-of-two n with N = 2n"
                )));
            }
        }
        if let SupportSource::Fixed { indices } = &self.support_source {
            let support = SupportSet::new(indices.clone())
                .map_err(|e| Error::Config(format!("{cell}: fixed support: {e}")))?;
            support
                .validate(self.num_subspaces)
                .map_err(|e| Error::Config(format!("{cell}: fixed support: {e}")))?;
            if support.len() != k {
                return Err(Error::Config(format!(
                    "{cell}: fixed support has {} indices but the cell sparsity is {k}",
                    support.len()
                )));
            }
        }
        Ok(())
    }

    fn load_pinned(&self) -> Result<PinnedSources> {
        let frame = match &self.frame_source {
            FrameSource::File { path } => {
                let frame = crate::io::read_frame(path)?;
                let dims = frame.block_dims();
                if frame.len() != self.num_subspaces {
                    return Err(Error::Config(format!(
                        "pinned frame has {} subspaces, config says {}",
                        frame.len(),
                        self.num_subspaces
                    )));
                }
                if dims.iter().any(|&d| d != dims[0]) || self.subspace_dims != vec![dims[0]] {
                    return Err(Error::Config(
                        "a pinned frame requires subspace_dims to equal its single dimension"
                            .into(),
                    ));
                }
                if frame.ambient_dim() != self.ambient_dim {
                    return Err(Error::Config("pinned frame ambient dimension mismatch".into()));
                }
                Some(Arc::new(frame))
            }
            _ => None,
        };
        let matrix = match &self.matrix_source {
            MatrixSource::File { path } => {
                let matrix = crate::io::read_matrix(path, false)?;
                if matrix.num_rows() != self.num_measurements
                    || matrix.num_cols() != self.num_subspaces
                {
                    return Err(Error::Config("pinned matrix shape mismatch".into()));
                }
                Some(Arc::new(matrix))
            }
            MatrixSource::UnionBases => Some(Arc::new(union_of_orthobases(self.num_measurements)?)),
            _ => None,
        };
        Ok(PinnedSources { frame, matrix })
    }

    fn trial_frame(&self, pinned: &PinnedSources, m: usize, seed: u64) -> Result<Arc<FusionFrame>> {
        if let Some(frame) = &pinned.frame {
            return Ok(frame.clone());
        }
        Ok(Arc::new(build_frame(
            &self.frame_source,
            self.ambient_dim,
            m,
            self.num_subspaces,
            seed,
        )?))
    }

    fn trial_matrix(
        &self,
        pinned: &PinnedSources,
        seed: u64,
    ) -> Result<Arc<MeasurementMatrix>> {
        if let Some(matrix) = &pinned.matrix {
            return Ok(matrix.clone());
        }
        Ok(Arc::new(random_measurement_matrix(
            self.num_measurements,
            self.num_subspaces,
            seed,
        )?))
    }

    fn trial_support(&self, k: usize, seed: u64) -> Result<SupportSet> {
        match &self.support_source {
            SupportSource::Random => SupportSet::random(self.num_subspaces, k, seed),
            SupportSource::Fixed { indices } => SupportSet::new(indices.clone()),
        }
    }

    /// Run `body` on a dedicated thread pool when a thread count is pinned.
    fn with_threads<T: Send>(&self, body: impl FnOnce() -> T + Send) -> T {
        if self.threads == 0 {
            body()
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(self.threads)
                .build()
                .expect("thread pool");
            pool.install(body)
        }
    }
}

/// Build a frame from a non-file [`FrameSource`] description.
pub fn build_frame(
    source: &FrameSource,
    ambient_dim: usize,
    subspace_dim: usize,
    count: usize,
    seed: u64,
) -> Result<FusionFrame> {
    match source {
        FrameSource::Random => FusionFrame::random(ambient_dim, subspace_dim, count, seed),
        FrameSource::OrthogonalBlocks { designed } => {
            let mut subs = Vec::with_capacity(count);
            for j in 0..count.min(*designed) {
                subs.push(coordinate_block(ambient_dim, j * subspace_dim, subspace_dim)?);
            }
            for j in *designed..count {
                subs.push(random_subspace(
                    ambient_dim,
                    subspace_dim,
                    derive_seed(seed, 0x0b, j as u64),
                )?);
            }
            FusionFrame::new(subs)
        }
        FrameSource::IdenticalCopies => {
            let block = coordinate_block(ambient_dim, 0, subspace_dim)?;
            FusionFrame::new(vec![block; count])
        }
        FrameSource::File { path } => crate::io::read_frame(path),
    }
}

/// Span of `dim` consecutive coordinate axes starting at `offset`.
fn coordinate_block(ambient: usize, offset: usize, dim: usize) -> Result<SubspaceBasis> {
    if offset + dim > ambient {
        return Err(Error::Dimension(format!(
            "coordinate block {offset}..{} does not fit in R^{ambient}",
            offset + dim
        )));
    }
    let mut basis = DMatrix::zeros(ambient, dim);
    for p in 0..dim {
        basis[(offset + p, p)] = 1.0;
    }
    SubspaceBasis::new(basis)
}

fn run_trial(
    cfg: &ExperimentConfig,
    pinned: &PinnedSources,
    m: usize,
    k: usize,
    trial: usize,
    seed: u64,
) -> Result<TrialRecord> {
    let frame = cfg.trial_frame(pinned, m, derive_seed(seed, 1, 0))?;
    let matrix = cfg.trial_matrix(pinned, derive_seed(seed, 2, 0))?;
    let support = cfg.trial_support(k, derive_seed(seed, 3, 0))?;
    let planted = random_gaussian_signal(&frame, &support, derive_seed(seed, 4, 0))?;
    let y = measure(&matrix, &frame, &planted)?;
    let report = solve_p1(&matrix, &frame, &y, &cfg.solver)?;

    let rel_error = {
        let diff = (planted.concatenated() - report.coefficients.concatenated()).norm();
        diff / planted.norm().max(1e-12)
    };
    // The recovery flag is the pure numeric criterion; the status column
    // keeps solver issues distinguishable from genuine recovery failure.
    let success = recovered(&planted, &report.coefficients, RECOVERY_REL_TOL);
    let cert_margin = match dual_certificate_check(&matrix, &frame, &planted) {
        Ok(cert) => cert.margin,
        Err(_) => f64::NAN,
    };
    let alpha = alpha_of_support(&matrix, &support).unwrap_or(f64::NAN);
    let theta = if support.is_empty() {
        f64::NAN
    } else {
        frame.theta_of_support(&support)?
    };
    Ok(TrialRecord {
        m,
        k,
        n: cfg.num_measurements,
        trial,
        seed,
        recovered: success,
        rel_error,
        iterations: report.iterations,
        cert_margin,
        alpha,
        theta,
        status: report.status,
    })
}

/// Sweep every `(m, k)` cell of the configuration, solving `trials` fresh
/// instances per cell. Deterministic for a fixed configuration, including
/// under parallel execution: per-trial seeds depend only on the master seed
/// and the trial's position.
pub fn run_phase_diagram(cfg: &ExperimentConfig) -> Result<PhaseDiagram> {
    cfg.validate()?;
    let pinned = cfg.load_pinned()?;
    let cells: Vec<(usize, usize, usize)> = cfg
        .subspace_dims
        .iter()
        .flat_map(|&m| cfg.sparsity_levels.iter().map(move |&k| (m, k)))
        .enumerate()
        .map(|(idx, (m, k))| (idx, m, k))
        .collect();

    let records: Result<Vec<TrialRecord>> = cfg.with_threads(|| {
        cells
            .par_iter()
            .flat_map_iter(|&(cell_idx, m, k)| {
                let pinned = &pinned;
                (0..cfg.trials).map(move |trial| {
                    let seed = derive_seed(cfg.master_seed, cell_idx as u64, trial as u64);
                    run_trial(cfg, pinned, m, k, trial, seed)
                })
            })
            .collect()
    });
    let records = records?;

    let mut summaries = Vec::new();
    for &(cell_idx, m, k) in &cells {
        let slice = &records[cell_idx * cfg.trials..(cell_idx + 1) * cfg.trials];
        // A trial fails if recovery missed or the solver did not converge.
        let failures = slice
            .iter()
            .filter(|r| !r.recovered || r.status != SolveStatus::Converged)
            .count();
        let (ci_low, ci_high) = wilson_interval(failures, cfg.trials);
        summaries.push(CellSummary {
            m,
            k,
            n: cfg.num_measurements,
            trials: cfg.trials,
            failures,
            failure_rate: failures as f64 / cfg.trials as f64,
            ci_low,
            ci_high,
        });
    }
    Ok(PhaseDiagram { records, cells: summaries })
}

impl PhaseDiagram {
    /// Render the versioned trial-level CSV.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# schema={CSV_SCHEMA}\n"));
        out.push_str("m,k,n,trial,seed,recovered,rel_error,iterations,cert_margin,alpha,theta,status\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.m,
                r.k,
                r.n,
                r.trial,
                r.seed,
                r.recovered,
                r.rel_error,
                r.iterations,
                r.cert_margin,
                r.alpha,
                r.theta,
                r.status
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Plain-text summary table, one line per cell.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        out.push_str("m     k     n     trials  failures  rate      ci95\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{:<5} {:<5} {:<5} {:<7} {:<9} {:<9.4} [{:.4}, {:.4}]\n",
                c.m, c.k, c.n, c.trials, c.failures, c.failure_rate, c.ci_low, c.ci_high
            ));
        }
        out
    }
}

/// One cell of the bound-versus-empirical comparison.
#[derive(Debug, Clone)]
pub struct BoundComparisonRow {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub trials: usize,
    /// Trials entering the comparison (support conditioning below 1).
    pub included: usize,
    /// Trials whose planted support violates the conditioning hypothesis.
    pub excluded: usize,
    pub failures: usize,
    pub empirical_failure: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Mean of the per-trial failure bounds over included trials, clipped to 1.
    pub thm_bound: f64,
    /// The bound reached 1 and certifies nothing.
    pub vacuous: bool,
}

#[derive(Debug, Clone)]
pub struct BoundComparison {
    pub rows: Vec<BoundComparisonRow>,
}

/// For every cell, measure the empirical failure rate and evaluate the
/// average-case failure bound from the per-trial support conditioning
/// `alpha` and overlap quantity `theta`. Trials with `alpha >= 1` (or a
/// rank-deficient support) fall outside the bound's hypothesis; they are
/// counted separately, never silently dropped.
pub fn compare_bound_vs_empirical(cfg: &ExperimentConfig) -> Result<BoundComparison> {
    cfg.validate()?;
    for &k in &cfg.sparsity_levels {
        if k == 0 || k >= cfg.num_subspaces {
            return Err(Error::Config(format!(
                "bound comparison needs 0 < k < N, got k = {k}"
            )));
        }
    }
    let pinned = cfg.load_pinned()?;
    let cells: Vec<(usize, usize, usize)> = cfg
        .subspace_dims
        .iter()
        .flat_map(|&m| cfg.sparsity_levels.iter().map(move |&k| (m, k)))
        .enumerate()
        .map(|(idx, (m, k))| (idx, m, k))
        .collect();

    struct BoundTrial {
        included: bool,
        failed: bool,
        bound: f64,
    }

    let trials: Result<Vec<BoundTrial>> = cfg.with_threads(|| {
        cells
            .par_iter()
            .flat_map_iter(|&(cell_idx, m, k)| {
                let pinned = &pinned;
                (0..cfg.trials).map(move |trial| {
                    let seed = derive_seed(cfg.master_seed, cell_idx as u64, trial as u64);
                    let frame = cfg.trial_frame(pinned, m, derive_seed(seed, 1, 0))?;
                    let matrix = cfg.trial_matrix(pinned, derive_seed(seed, 2, 0))?;
                    let support = cfg.trial_support(k, derive_seed(seed, 3, 0))?;
                    let alpha = alpha_of_support(&matrix, &support).unwrap_or(f64::INFINITY);
                    if !(alpha < 1.0) {
                        return Ok(BoundTrial { included: false, failed: false, bound: 1.0 });
                    }
                    let theta = frame.theta_of_support(&support)?;
                    let bound = recovery_failure_bound(alpha, theta, m, cfg.num_subspaces, k)?;
                    let planted =
                        random_gaussian_signal(&frame, &support, derive_seed(seed, 4, 0))?;
                    let y = measure(&matrix, &frame, &planted)?;
                    let report = solve_p1(&matrix, &frame, &y, &cfg.solver)?;
                    let failed = !(recovered(&planted, &report.coefficients, RECOVERY_REL_TOL)
                        && report.status == SolveStatus::Converged);
                    Ok(BoundTrial { included: true, failed, bound: bound.bound })
                })
            })
            .collect()
    });
    let trials = trials?;

    let mut rows = Vec::new();
    for &(cell_idx, m, k) in &cells {
        let slice = &trials[cell_idx * cfg.trials..(cell_idx + 1) * cfg.trials];
        let included = slice.iter().filter(|t| t.included).count();
        let excluded = cfg.trials - included;
        let failures = slice.iter().filter(|t| t.included && t.failed).count();
        let bound_sum: f64 = slice.iter().filter(|t| t.included).map(|t| t.bound).sum();
        let thm_bound = if included > 0 { (bound_sum / included as f64).min(1.0) } else { 1.0 };
        let empirical_failure =
            if included > 0 { failures as f64 / included as f64 } else { 0.0 };
        let (ci_low, ci_high) = wilson_interval(failures, included.max(1));
        rows.push(BoundComparisonRow {
            m,
            k,
            n: cfg.num_measurements,
            trials: cfg.trials,
            included,
            excluded,
            failures,
            empirical_failure,
            ci_low,
            ci_high,
            thm_bound,
            vacuous: thm_bound >= 1.0,
        });
    }
    Ok(BoundComparison { rows })
}

impl BoundComparison {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# schema={CSV_SCHEMA}\n"));
        out.push_str(
            "m,k,n,trials,included,excluded,failures,empirical_failure,ci_low,ci_high,thm_bound,vacuous\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.m,
                r.k,
                r.n,
                r.trials,
                r.included,
                r.excluded,
                r.failures,
                r.empirical_failure,
                r.ci_low,
                r.ci_high,
                r.thm_bound,
                r.vacuous
            ));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Configuration of the concentration battery.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct LemmaBatteryConfig {
    pub ambient_dim: usize,
    pub subspace_dim: usize,
    pub num_subspaces: usize,
    pub support_size: usize,
    /// Random `(frame, b, S)` draws for the operator-norm bound.
    pub operator_norm_draws: usize,
    /// Monte Carlo samples for the mean and tail checks.
    pub samples: usize,
    pub master_seed: u64,
    /// Corrupt the tail bound (operator norm halved) and require the battery
    /// to notice.
    pub self_test: bool,
}

impl Default for LemmaBatteryConfig {
    fn default() -> Self {
        Self {
            ambient_dim: 12,
            subspace_dim: 3,
            num_subspaces: 8,
            support_size: 4,
            operator_norm_draws: 1000,
            samples: 100_000,
            master_seed: 7,
            self_test: false,
        }
    }
}

/// Battery outcome; `passed` accounts for the self-test expectation.
#[derive(Debug, Clone)]
pub struct LemmaBatteryReport {
    pub operator_norm_draws: usize,
    pub operator_norm_failures: usize,
    pub orthogonal_equality_ok: bool,
    pub identical_equality_ok: bool,
    pub concentration: ConcentrationReport,
    /// Present in self-test mode; must have failed for the battery to pass.
    pub corrupted: Option<ConcentrationReport>,
    pub passed: bool,
}

/// Check the operator-norm bound on random draws, its equality cases on the
/// designed configurations, and the mean/tail concentration estimates.
pub fn run_lemma_battery(cfg: &LemmaBatteryConfig) -> Result<LemmaBatteryReport> {
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    let m = cfg.subspace_dim;
    if m == 0 || m > cfg.ambient_dim {
        return Err(Error::Config("subspace dimension out of range".into()));
    }
    if cfg.support_size == 0 || cfg.support_size > cfg.num_subspaces {
        return Err(Error::Config("support size out of range".into()));
    }

    // (a) operator-norm bound on random draws.
    let failures: usize = (0..cfg.operator_norm_draws)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(cfg.master_seed, 0xa0, t as u64);
            let frame = FusionFrame::random(cfg.ambient_dim, m, cfg.num_subspaces, seed)
                .expect("valid dims");
            let mut rng = crate::rng::stream(derive_seed(seed, 0xa1, 0));
            let support = SupportSet::random(
                cfg.num_subspaces,
                cfg.support_size,
                rng.gen::<u64>(),
            )
            .expect("valid support");
            let b: Vec<f64> = (0..cfg.support_size)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let norm = support_operator_norm(&frame, &support, &b).expect("equal dims");
            let b_inf = b.iter().fold(0.0_f64, |acc, &v| acc.max(v.abs()));
            let bound = b_inf * frame.theta_of_support(&support).expect("nonempty").sqrt();
            usize::from(norm > bound + 1e-10)
        })
        .sum();

    // (b) equality cases.
    let orthogonal = orthogonal_block_frame(cfg.support_size, m)?;
    let full = SupportSet::new((0..cfg.support_size).collect())?;
    let ones = vec![1.0; cfg.support_size];
    let l_orth = support_operator_norm(&orthogonal, &full, &ones)?;
    let orthogonal_equality_ok = (l_orth - 1.0).abs() <= 1e-10
        && (orthogonal.theta_of_support(&full)? - 1.0).abs() <= 1e-10;

    let copy = random_subspace(cfg.ambient_dim, m, derive_seed(cfg.master_seed, 0xa2, 0))?;
    let identical = FusionFrame::new(vec![copy; cfg.support_size])?;
    let l_same = support_operator_norm(&identical, &full, &ones)?;
    let expected = (cfg.support_size as f64).sqrt();
    let identical_equality_ok = (l_same - expected).abs() <= 1e-10
        && (identical.theta_of_support(&full)?.sqrt() - expected).abs() <= 1e-10;

    // (c) mean and tail concentration on a random configuration.
    let frame = FusionFrame::random(
        cfg.ambient_dim,
        m,
        cfg.num_subspaces,
        derive_seed(cfg.master_seed, 0xa3, 0),
    )?;
    let support = SupportSet::random(
        cfg.num_subspaces,
        cfg.support_size,
        derive_seed(cfg.master_seed, 0xa4, 0),
    )?;
    let mut rng = crate::rng::stream(derive_seed(cfg.master_seed, 0xa5, 0));
    let b: Vec<f64> = (0..cfg.support_size).map(|_| StandardNormal.sample(&mut rng)).collect();
    let concentration =
        verify_concentration_bounds(&frame, &support, &b, cfg.samples, cfg.master_seed, None)?;

    // Self test: halving the operator norm in the tail bound must break a
    // tail check on the orthogonal equality configuration.
    let corrupted = if cfg.self_test {
        Some(verify_concentration_bounds(
            &orthogonal,
            &full,
            &ones,
            cfg.samples,
            derive_seed(cfg.master_seed, 0xa6, 0),
            Some(0.5),
        )?)
    } else {
        None
    };

    let base_ok = failures == 0
        && orthogonal_equality_ok
        && identical_equality_ok
        && concentration.all_ok();
    let passed = match &corrupted {
        Some(report) => base_ok && !report.all_ok(),
        None => base_ok,
    };
    Ok(LemmaBatteryReport {
        operator_norm_draws: cfg.operator_norm_draws,
        operator_norm_failures: failures,
        orthogonal_equality_ok,
        identical_equality_ok,
        concentration,
        corrupted,
        passed,
    })
}

/// Frame of `count` pairwise-orthogonal coordinate blocks of dimension `m`.
pub fn orthogonal_block_frame(count: usize, m: usize) -> Result<FusionFrame> {
    let subs = (0..count)
        .map(|j| coordinate_block(count * m, j * m, m))
        .collect::<Result<Vec<_>>>()?;
    FusionFrame::new(subs)
}

/// Canned configurations for the shipped demonstrations.
pub mod canned {
    use super::*;

    /// Orthogonal-subspace advantage demonstration: two subspaces spanning
    /// disjoint coordinate blocks, one aggregated measurement whose two
    /// weights are fully coherent, signals planted on both blocks. The
    /// fusion structure makes recovery exact even though the matrix
    /// coherence is 1.
    pub fn subspace_advantage(subspace_dim: usize, trials: usize, master_seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            ambient_dim: 2 * subspace_dim,
            num_subspaces: 2,
            num_measurements: 1,
            subspace_dims: vec![subspace_dim],
            sparsity_levels: vec![2],
            trials,
            master_seed,
            solver: SolverOptions::default(),
            frame_source: FrameSource::OrthogonalBlocks { designed: 2 },
            matrix_source: MatrixSource::Gaussian,
            support_source: SupportSource::Fixed { indices: vec![0, 1] },
            threads: 0,
            output: None,
        }
    }

    /// Control arm: identical subspaces under the same measurement geometry.
    /// The aggregated measurement cannot tell the two components apart, so
    /// recovery of the planted pair fails.
    pub fn subspace_advantage_control(
        subspace_dim: usize,
        trials: usize,
        master_seed: u64,
    ) -> ExperimentConfig {
        ExperimentConfig {
            frame_source: FrameSource::IdenticalCopies,
            ..subspace_advantage(subspace_dim, trials, master_seed)
        }
    }

    /// Designed family for the bound-versus-empirical comparison: the
    /// deterministic union-of-bases matrix (low conditioning on the fixed
    /// support) with four designed orthogonal support subspaces, sweeping
    /// the subspace dimension.
    pub fn failure_bound_family(trials: usize, master_seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            ambient_dim: 64,
            num_subspaces: 64,
            num_measurements: 32,
            subspace_dims: vec![2, 4, 8, 16],
            sparsity_levels: vec![4],
            trials,
            master_seed,
            solver: SolverOptions::default(),
            frame_source: FrameSource::OrthogonalBlocks { designed: 4 },
            matrix_source: MatrixSource::UnionBases,
            support_source: SupportSource::Fixed { indices: vec![0, 1, 2, 3] },
            threads: 0,
            output: None,
        }
    }
}
