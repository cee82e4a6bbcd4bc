//! Recovery certificates: the coherence sparsity bound, restricted isometry
//! constants of the lifted operator and their classical counterpart, dual
//! certificates, sampled null-space checks, an average-case failure bound,
//! and a Monte Carlo battery for the concentration estimates behind it.
//!
//! All certificates here assume unit frame weights and reject anything else.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::FusionFrame;
use crate::linalg;
use crate::measurement::{
    classical_support_columns, stacked_support_columns, MeasurementMatrix,
};
use crate::rng;
use crate::signal::{sgn_rows, synthesize, BlockCoefficients, SupportSet};
use crate::solver::ENUMERATION_BUDGET;

/// Restricted isometry level below which the equality program provably
/// recovers every k-block-sparse signal (at order 2k).
pub const EXACT_RECOVERY_DELTA: f64 = 1.0 / 3.0;

/// Restricted isometry level below which the noise-tolerant program is
/// provably stable (at order 2k): `sqrt(2) - 1`.
pub const NOISY_RECOVERY_DELTA: f64 = std::f64::consts::SQRT_2 - 1.0;

fn require_unit_weights(frame: &FusionFrame) -> Result<()> {
    if frame.has_unit_weights() {
        Ok(())
    } else {
        Err(Error::Argument(
            "recovery certificates are stated for unit-weight fusion frames".into(),
        ))
    }
}

/// Largest certified block sparsity from a fusion coherence value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceBound {
    /// Zero fusion coherence: every sparsity level is certified, because the
    /// lifted system has a unique solution.
    Unbounded,
    /// Recovery is certified for supports of at most this many blocks.
    UpTo(usize),
}

impl CoherenceBound {
    pub fn certifies(&self, k: usize) -> bool {
        match self {
            CoherenceBound::Unbounded => true,
            CoherenceBound::UpTo(limit) => k <= *limit,
        }
    }
}

impl std::fmt::Display for CoherenceBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoherenceBound::Unbounded => write!(f, "unbounded"),
            CoherenceBound::UpTo(k) => write!(f, "{k}"),
        }
    }
}

/// Largest integer `k` with `k < (1 + 1/mu_f) / 2`, the sparsity level at
/// which a fusion coherence of `mu_f` certifies unique recovery by both the
/// combinatorial and the convex program.
pub fn coherence_recovery_bound(mu_f: f64) -> Result<CoherenceBound> {
    if !(0.0..=1.0).contains(&mu_f) {
        return Err(Error::Argument(format!("fusion coherence {mu_f} outside [0, 1]")));
    }
    if mu_f == 0.0 {
        return Ok(CoherenceBound::Unbounded);
    }
    let threshold = 0.5 * (1.0 + 1.0 / mu_f);
    let floor = threshold.floor();
    let k = if threshold - floor <= 0.0 { floor - 1.0 } else { floor };
    Ok(CoherenceBound::UpTo(k.max(0.0) as usize))
}

/// Restricted isometry constant of the lifted operator at block sparsity `k`.
#[derive(Debug, Clone)]
pub struct FripResult {
    pub k: usize,
    pub delta: f64,
    /// Supports attaining the extremal distortion (within 1e-12).
    pub extremal_supports: Vec<SupportSet>,
    pub supports_enumerated: usize,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

fn check_enumeration_budget(n: usize, k: usize) -> Result<()> {
    if binomial(n, k) > ENUMERATION_BUDGET {
        return Err(Error::Resource(format!(
            "C({n}, {k}) exceeds the enumeration budget of {ENUMERATION_BUDGET}"
        )));
    }
    Ok(())
}

/// Worst relative distortion of `||A U(c)||` over supports of exactly `k`
/// blocks, with each block ranging over its own subspace:
/// `delta_k = max_S max(sigma_max(A_{U,S})^2 - 1, 1 - sigma_min(A_{U,S})^2)`.
///
/// Restricting blocks to their subspaces is what makes the constant
/// informative: a literal quantification over unconstrained ambient blocks
/// would force `delta = 1` as soon as any subspace is proper, since the
/// lifted operator annihilates the orthogonal complements.
pub fn frip_constant(a: &MeasurementMatrix, frame: &FusionFrame, k: usize) -> Result<FripResult> {
    require_unit_weights(frame)?;
    if a.num_cols() != frame.len() {
        return Err(Error::Shape(format!(
            "matrix has {} columns but frame has {} subspaces",
            a.num_cols(),
            frame.len()
        )));
    }
    if k > frame.len() {
        return Err(Error::Argument(format!(
            "block sparsity {k} exceeds the number of subspaces {}",
            frame.len()
        )));
    }
    check_enumeration_budget(frame.len(), k)?;
    if k == 0 {
        return Ok(FripResult { k, delta: 0.0, extremal_supports: Vec::new(), supports_enumerated: 0 });
    }
    let supports: Vec<Vec<usize>> = (0..frame.len()).combinations(k).collect();
    let deltas: Vec<f64> = supports
        .par_iter()
        .map(|combo| {
            let stacked = stacked_support_columns(a, frame, combo);
            support_distortion(&stacked)
        })
        .collect();
    let mut delta = 0.0_f64;
    for &d in &deltas {
        delta = delta.max(d);
    }
    let extremal_supports = supports
        .iter()
        .zip(&deltas)
        .filter(|(_, &d)| (delta - d) <= 1e-12)
        .map(|(s, _)| SupportSet::new(s.clone()).expect("sorted combination"))
        .collect();
    Ok(FripResult { k, delta, extremal_supports, supports_enumerated: supports.len() })
}

fn support_distortion(stacked: &DMatrix<f64>) -> f64 {
    let sv = stacked.clone().singular_values();
    let smax = sv.max();
    let smin = if stacked.nrows() >= stacked.ncols() {
        sv.min()
    } else {
        // More columns than rows: the extra singular values are zero.
        0.0
    };
    (smax * smax - 1.0).max(1.0 - smin * smin).max(0.0)
}

/// Classical restricted isometry constant of the matrix alone at sparsity `k`,
/// by exhaustive enumeration of column supports.
pub fn classical_rip_constant(a: &MeasurementMatrix, k: usize) -> Result<f64> {
    if k > a.num_cols() {
        return Err(Error::Argument(format!(
            "sparsity {k} exceeds the number of columns {}",
            a.num_cols()
        )));
    }
    check_enumeration_budget(a.num_cols(), k)?;
    if k == 0 {
        return Ok(0.0);
    }
    let supports: Vec<Vec<usize>> = (0..a.num_cols()).combinations(k).collect();
    let deltas: Vec<f64> = supports
        .par_iter()
        .map(|combo| {
            let sub = classical_support_columns(a, combo);
            support_distortion(&sub)
        })
        .collect();
    Ok(deltas.iter().cloned().fold(0.0_f64, f64::max))
}

/// Whether the lifted constant is dominated by the classical one,
/// `delta_k <= delta~_k + 1e-10`. Holds for every pair, with equality in the
/// scalar-subspace case.
pub fn rip_dominates_frip(a: &MeasurementMatrix, frame: &FusionFrame, k: usize) -> Result<bool> {
    let fusion = frip_constant(a, frame, k)?.delta;
    let classical = classical_rip_constant(a, k)?;
    Ok(fusion <= classical + 1e-10)
}

/// Threshold flags derived from a restricted isometry constant at order `2k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FripChecks {
    /// `delta_2k < 1/3`: exact recovery of every k-block-sparse signal.
    pub exact_ok: bool,
    /// `delta_2k < sqrt(2) - 1`: stable recovery under measurement noise.
    pub noisy_ok: bool,
}

pub fn frip_recovery_checks(delta_2k: f64) -> Result<FripChecks> {
    if !(delta_2k >= 0.0) {
        return Err(Error::Argument(format!("restricted isometry constant {delta_2k} < 0")));
    }
    Ok(FripChecks {
        exact_ok: delta_2k < EXACT_RECOVERY_DELTA,
        noisy_ok: delta_2k < NOISY_RECOVERY_DELTA,
    })
}

/// Outcome of the dual-certificate test for one signal.
#[derive(Debug, Clone)]
pub struct CertificateResult {
    /// Strictly positive margin certifies unique convex recovery.
    pub passed: bool,
    /// `1 - max_{j not in S} ||sgn(U(c)_S)^T A_S^+ a_j||_2`.
    pub margin: f64,
    /// Off-support index attaining the maximum, if any exists.
    pub worst_j: Option<usize>,
}

/// Check the sufficient condition for `c` to be the unique minimizer of the
/// equality-constrained program: every off-support column, pulled back
/// through the support pseudo-inverse and the row signs of the synthesized
/// signal, must have norm strictly below 1.
pub fn dual_certificate_check(
    a: &MeasurementMatrix,
    frame: &FusionFrame,
    c: &BlockCoefficients,
) -> Result<CertificateResult> {
    require_unit_weights(frame)?;
    if a.num_cols() != frame.len() {
        return Err(Error::Shape(format!(
            "matrix has {} columns but frame has {} subspaces",
            a.num_cols(),
            frame.len()
        )));
    }
    if !c.matches(frame) {
        return Err(Error::Shape("coefficients do not match the frame".into()));
    }
    let support = c.support();
    let outside = support.complement(a.num_cols());
    if support.is_empty() || outside.is_empty() {
        return Ok(CertificateResult { passed: true, margin: 1.0, worst_j: None });
    }
    let a_s = a.columns_of(&support);
    if linalg::smallest_singular_value(&a_s) <= 1e-10 {
        return Err(Error::Singular(
            "support columns are rank deficient; the certificate needs an injective A_S".into(),
        ));
    }
    let x = synthesize(frame, c)?;
    let mut rows_s = DMatrix::zeros(support.len(), frame.ambient_dim());
    for (r, &j) in support.indices().iter().enumerate() {
        rows_s.row_mut(r).copy_from(&x.entries().row(j));
    }
    let signs = sgn_rows(&rows_s);
    let pullback = signs.transpose() * linalg::pseudo_inverse(&a_s); // M x n
    let mut worst = 0.0_f64;
    let mut worst_j = None;
    for j in outside {
        let norm = (&pullback * a.entries().column(j)).norm();
        if norm > worst {
            worst = norm;
            worst_j = Some(j);
        }
    }
    let margin = 1.0 - worst;
    Ok(CertificateResult { passed: margin > 0.0, margin, worst_j })
}

/// Result of the sampled null-space-property check. A pass is evidence, not
/// a proof: only sampled null directions are examined.
#[derive(Debug, Clone)]
pub struct NspCheck {
    /// Some sampled null vector put at least half its group norm on `k` blocks.
    pub violation_found: bool,
    /// Largest observed `||h_S||_{2,1} / ||h||_{2,1}`.
    pub worst_ratio: f64,
    pub nullspace_dim: usize,
    pub trials: usize,
}

/// Budget under which the support scan is exhaustive rather than greedy.
const NSP_EXHAUSTIVE_BUDGET: u128 = 100_000;

/// Sample unit vectors from the null space of the lifted operator and check
/// the block-sparsity mass condition `||h_S||_{2,1} < ||h||_{2,1} / 2` over
/// supports of at most `k` blocks.
pub fn nsp_sampled_check(
    a: &MeasurementMatrix,
    frame: &FusionFrame,
    k: usize,
    trials: usize,
    seed: u64,
) -> Result<NspCheck> {
    require_unit_weights(frame)?;
    if k == 0 || k > frame.len() {
        return Err(Error::Argument(format!(
            "support size {k} outside 1..={}",
            frame.len()
        )));
    }
    let lifted = crate::measurement::build_block_operator(
        a,
        frame,
        crate::measurement::BlockOperatorKind::Basis,
    )?;
    let null_basis = linalg::nullspace_basis(lifted.matrix());
    let null_dim = null_basis.ncols();
    if null_dim == 0 {
        return Ok(NspCheck { violation_found: false, worst_ratio: 0.0, nullspace_dim: 0, trials });
    }
    let dims = frame.block_dims();
    let exhaustive = binomial(frame.len(), k) <= NSP_EXHAUSTIVE_BUDGET;
    let ratios: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::stream(rng::derive_seed(seed, 0x4e, t as u64));
            let coords = DVector::from_fn(null_dim, |_, _| StandardNormal.sample(&mut rng));
            let h = &null_basis * coords;
            let blocks = BlockCoefficients::from_concatenated(&h, &dims)
                .expect("layout matches frame");
            let norms: Vec<f64> = blocks.blocks().iter().map(|b| b.norm()).collect();
            let total: f64 = norms.iter().sum();
            if total == 0.0 {
                return 0.0;
            }
            let mass = if exhaustive {
                // Scan every support of size up to k; the maximum is attained
                // at size exactly k.
                let mut best = 0.0_f64;
                for combo in (0..norms.len()).combinations(k) {
                    best = best.max(combo.iter().map(|&j| norms[j]).sum());
                }
                best
            } else {
                // The k largest block norms maximize the on-support mass.
                let mut sorted = norms.clone();
                sorted.sort_by(|x, y| y.partial_cmp(x).expect("finite norms"));
                sorted.iter().take(k).sum()
            };
            mass / total
        })
        .collect();
    let worst_ratio = ratios.iter().cloned().fold(0.0_f64, f64::max);
    Ok(NspCheck {
        violation_found: worst_ratio >= 0.5,
        worst_ratio,
        nullspace_dim: null_dim,
        trials,
    })
}

/// Average-case recovery failure bound for a fixed support of `k` blocks of
/// equal dimension `m`, from the support conditioning `alpha` and the
/// subspace overlap quantity `theta`.
#[derive(Debug, Clone)]
pub struct FailureBound {
    pub alpha: f64,
    pub theta: f64,
    pub subspace_dim: usize,
    pub num_subspaces: usize,
    pub k: usize,
    /// Argument minimizing the additive form over the searched interval.
    pub delta_star: f64,
    /// Additive two-term bound, unclipped (may exceed 1).
    pub additive: f64,
    /// Additive bound clipped to `[0, 1]` for reporting.
    pub bound: f64,
    /// Single-exponential form `N exp(-E m)`, unclipped.
    pub single_exponential: f64,
    /// The interval `(0, 1 - alpha^2)` is empty; the bound degenerates to 1.
    pub degenerate: bool,
    pub grid_points: usize,
    /// Largest change of the additive form between adjacent grid points; an
    /// estimate of the resolution error of the grid search.
    pub grid_resolution: f64,
}

const FAILURE_BOUND_GRID: usize = 10_000;

/// Evaluate the failure bound by a grid search for the optimal split
/// parameter over `(0, 1 - alpha^2)`:
/// `(N - k) exp(-(sqrt(1-d) - alpha)^2 m / (2 alpha^2 theta)) + k exp(-d^2 m / 4)`,
/// together with the single-exponential form
/// `N exp(-max_d min{(sqrt(1-d) - alpha)^2 / (2 alpha^2 theta), d^2 / 4} m)`.
pub fn recovery_failure_bound(
    alpha: f64,
    theta: f64,
    subspace_dim: usize,
    num_subspaces: usize,
    k: usize,
) -> Result<FailureBound> {
    if !(alpha > 0.0) {
        return Err(Error::Argument(format!("alpha must be positive, got {alpha}")));
    }
    if !(theta >= 1.0) {
        return Err(Error::Argument(format!("theta must be at least 1, got {theta}")));
    }
    if subspace_dim == 0 {
        return Err(Error::Argument("subspace dimension must be at least 1".into()));
    }
    if k >= num_subspaces {
        return Err(Error::Argument(format!(
            "need k < N, got k = {k}, N = {num_subspaces}"
        )));
    }
    let m = subspace_dim as f64;
    let n_total = num_subspaces as f64;
    let k_f = k as f64;
    let width = 1.0 - alpha * alpha;
    if width <= 0.0 {
        return Ok(FailureBound {
            alpha,
            theta,
            subspace_dim,
            num_subspaces,
            k,
            delta_star: 0.0,
            additive: 1.0,
            bound: 1.0,
            single_exponential: 1.0,
            degenerate: true,
            grid_points: 0,
            grid_resolution: 0.0,
        });
    }
    let additive_at = |delta: f64| -> f64 {
        let gap = (1.0 - delta).sqrt() - alpha;
        (n_total - k_f) * (-(gap * gap) * m / (2.0 * alpha * alpha * theta)).exp()
            + k_f * (-delta * delta * m / 4.0).exp()
    };
    let exponent_at = |delta: f64| -> f64 {
        let gap = (1.0 - delta).sqrt() - alpha;
        let first = gap * gap / (2.0 * alpha * alpha * theta);
        let second = delta * delta / 4.0;
        first.min(second)
    };
    let mut best_additive = f64::INFINITY;
    let mut delta_star = 0.0;
    let mut best_exponent = 0.0_f64;
    let mut previous = f64::NAN;
    let mut grid_resolution = 0.0_f64;
    for i in 1..=FAILURE_BOUND_GRID {
        let delta = width * i as f64 / (FAILURE_BOUND_GRID + 1) as f64;
        let value = additive_at(delta);
        if value < best_additive {
            best_additive = value;
            delta_star = delta;
        }
        best_exponent = best_exponent.max(exponent_at(delta));
        if !previous.is_nan() {
            grid_resolution = grid_resolution.max((value - previous).abs());
        }
        previous = value;
    }
    let single_exponential = n_total * (-best_exponent * m).exp();
    Ok(FailureBound {
        alpha,
        theta,
        subspace_dim,
        num_subspaces,
        k,
        delta_star,
        additive: best_additive,
        bound: best_additive.clamp(0.0, 1.0),
        single_exponential,
        degenerate: false,
        grid_points: FAILURE_BOUND_GRID,
        grid_resolution,
    })
}

/// Operator norm of the weighted stack `sum_l b_l U_{j_l}` over the support.
/// Requires equal subspace dimensions.
pub fn support_operator_norm(
    frame: &FusionFrame,
    support: &SupportSet,
    b: &[f64],
) -> Result<f64> {
    support.validate(frame.len())?;
    if support.is_empty() {
        return Err(Error::Argument("the support must be nonempty".into()));
    }
    if b.len() != support.len() {
        return Err(Error::Argument(format!(
            "{} weights for a support of {} blocks",
            b.len(),
            support.len()
        )));
    }
    let dims = frame.block_dims();
    let m = dims[0];
    if dims.iter().any(|&d| d != m) {
        return Err(Error::Argument(
            "the operator-norm bound requires equal subspace dimensions".into(),
        ));
    }
    // Blocks off the support are zero and cannot change the norm.
    let k = support.len();
    let mut stack = DMatrix::zeros(frame.ambient_dim(), k * m);
    for (l, &j) in support.indices().iter().enumerate() {
        let block = frame.subspace(j).basis() * b[l];
        stack.view_mut((0, l * m), (frame.ambient_dim(), m)).copy_from(&block);
    }
    Ok(linalg::operator_norm(&stack))
}

/// One empirical tail comparison of the concentration battery.
#[derive(Debug, Clone)]
pub struct TailCheck {
    pub u: f64,
    pub empirical: f64,
    pub bound: f64,
    pub stderr: f64,
    pub ok: bool,
}

/// Monte Carlo verification of the operator-norm and concentration estimates
/// used by the average-case analysis.
#[derive(Debug, Clone)]
pub struct ConcentrationReport {
    /// Operator norm of the weighted stack of support bases.
    pub lipschitz: f64,
    /// `||b||_inf sqrt(theta(S))`, the certified upper estimate for it.
    pub lipschitz_bound: f64,
    pub lipschitz_ok: bool,
    pub mc_mean: f64,
    /// `sqrt(m) ||b||_2`, the certified upper estimate for the mean.
    pub mean_bound: f64,
    pub mean_stderr: f64,
    pub mean_ok: bool,
    pub tails: Vec<TailCheck>,
    pub samples: usize,
}

impl ConcentrationReport {
    pub fn all_ok(&self) -> bool {
        self.lipschitz_ok && self.mean_ok && self.tails.iter().all(|t| t.ok)
    }
}

/// Verify, for the weighted support stack `sum_l b_l U_{j_l}`:
/// (a) its operator norm is at most `||b||_inf sqrt(theta(S))`;
/// (b) the Monte Carlo mean of `f(X) = ||sum_l b_l U_{j_l} X_l||` stays below
///     `sqrt(m) ||b||_2` up to sampling error;
/// (c) the empirical tails of `f` satisfy the Gaussian concentration bound
///     `P(|f - mean| >= u) <= 2 exp(-u^2 / (2 L^2))` at `u = L, 2L, 3L`.
///
/// `corrupt_lipschitz` rescales the computed operator norm before the tail
/// comparison; the experiment harness uses it as a self-test that a broken
/// bound is actually detected.
pub fn verify_concentration_bounds(
    frame: &FusionFrame,
    support: &SupportSet,
    b: &[f64],
    samples: usize,
    seed: u64,
    corrupt_lipschitz: Option<f64>,
) -> Result<ConcentrationReport> {
    require_unit_weights(frame)?;
    support.validate(frame.len())?;
    if support.is_empty() {
        return Err(Error::Argument("the support must be nonempty".into()));
    }
    if b.len() != support.len() {
        return Err(Error::Argument(format!(
            "{} weights for a support of {} blocks",
            b.len(),
            support.len()
        )));
    }
    if samples == 0 {
        return Err(Error::Argument("need at least one sample".into()));
    }
    let dims = frame.block_dims();
    let m = dims[0];
    if dims.iter().any(|&d| d != m) {
        return Err(Error::Argument(
            "the concentration battery requires equal subspace dimensions".into(),
        ));
    }

    // Compact stack: zero blocks off the support cannot change the norm.
    let k = support.len();
    let mut stack = DMatrix::zeros(frame.ambient_dim(), k * m);
    for (l, &j) in support.indices().iter().enumerate() {
        let block = frame.subspace(j).basis() * b[l];
        stack.view_mut((0, l * m), (frame.ambient_dim(), m)).copy_from(&block);
    }
    let lipschitz_raw = support_operator_norm(frame, support, b)?;
    let b_inf = b.iter().fold(0.0_f64, |acc, &v| acc.max(v.abs()));
    let b_norm = b.iter().map(|&v| v * v).sum::<f64>().sqrt();
    let theta = frame.theta_of_support(support)?;
    let lipschitz_bound = b_inf * theta.sqrt();
    let lipschitz_ok = lipschitz_raw <= lipschitz_bound + 1e-10;
    let lipschitz = corrupt_lipschitz.map_or(lipschitz_raw, |f| f * lipschitz_raw);

    // Per-chunk seeds keep parallel and serial runs bit-identical.
    const CHUNK: usize = 4096;
    let chunks = samples.div_ceil(CHUNK);
    let values: Vec<f64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(samples);
            let mut rng = rng::stream(rng::derive_seed(seed, 0xcc, chunk as u64));
            let stack = &stack;
            (lo..hi).map(move |_| {
                let x = DVector::from_fn(k * m, |_, _| StandardNormal.sample(&mut rng));
                (stack * x).norm()
            })
        })
        .collect();

    let mc_mean = values.iter().sum::<f64>() / samples as f64;
    let variance =
        values.iter().map(|v| (v - mc_mean) * (v - mc_mean)).sum::<f64>() / samples as f64;
    let mean_stderr = (variance / samples as f64).sqrt();
    let mean_bound = (m as f64).sqrt() * b_norm;
    let mean_ok = mc_mean <= mean_bound + 3.0 * mean_stderr;

    // The tail grid sits at multiples of the true operator norm; the bound
    // formula uses the (possibly corrupted) constant.
    let tails = [1.0, 2.0, 3.0]
        .iter()
        .map(|&mult| {
            let u = mult * lipschitz_raw;
            let count = values.iter().filter(|&&v| (v - mc_mean).abs() >= u).count();
            let empirical = count as f64 / samples as f64;
            let bound = if lipschitz > 0.0 {
                2.0 * (-u * u / (2.0 * lipschitz * lipschitz)).exp()
            } else {
                2.0
            };
            let stderr = (empirical * (1.0 - empirical) / samples as f64).sqrt();
            TailCheck { u, empirical, bound, stderr, ok: empirical <= bound + 3.0 * stderr }
        })
        .collect();

    Ok(ConcentrationReport {
        lipschitz: lipschitz_raw,
        lipschitz_bound,
        lipschitz_ok,
        mc_mean,
        mean_bound,
        mean_stderr,
        mean_ok,
        tails,
        samples,
    })
}
