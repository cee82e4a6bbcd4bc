//! Recovery programs: equality-constrained mixed-norm minimization, its
//! noise-tolerant variant, and an exhaustive combinatorial oracle for small
//! instances.
//!
//! The convex program is solved by operator splitting: alternate exact
//! projection onto the constraint set (affine, or its intersection with a
//! Frobenius ball in the noisy case) with the closed-form block
//! soft-thresholding step of the group norm. Both substeps work on the
//! coefficient space of size `sum_j m_j`; the lifted operator is never
//! materialized, only its Gram matrix.

use itertools::Itertools;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::FusionFrame;
use crate::measurement::{block_offsets, MeasurementMatrix};
use crate::signal::{BlockCoefficients, SupportSet};

/// Tunables for the operator-splitting solver.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Feasibility is declared at residual `feasibility_tol * (1 + ||Y||_F)`.
    pub feasibility_tol: f64,
    /// Relative objective-stall tolerance; the optimality certificate is
    /// checked at `10 *` this value.
    pub objective_rel_tol: f64,
    pub max_iterations: usize,
    /// Initial splitting penalty; rebalanced automatically during the run.
    pub penalty_parameter: f64,
    /// Output blocks with norm at or below this are zeroed before returning.
    pub hard_threshold: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-8,
            objective_rel_tol: 1e-6,
            max_iterations: 100_000,
            penalty_parameter: 1.0,
            hard_threshold: 1e-9,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if !(self.feasibility_tol > 0.0)
            || !(self.objective_rel_tol > 0.0)
            || !(self.penalty_parameter > 0.0)
            || !(self.hard_threshold > 0.0)
        {
            return Err(Error::Argument("solver tolerances must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Argument("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIters,
    Infeasible,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIters => "max_iters",
            SolveStatus::Infeasible => "infeasible",
        };
        write!(f, "{s}")
    }
}

/// Outcome of a solve call.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub iterations: usize,
    /// Distance to the constraint set: the raw residual for the equality
    /// program, the excess over the noise radius for the noisy program.
    pub final_feasibility_residual: f64,
    /// Weighted group norm of the returned coefficients.
    pub final_objective: f64,
    pub coefficients: BlockCoefficients,
}

/// Exhaustive-search outcome: a [`SolveReport`] plus support bookkeeping.
#[derive(Debug, Clone)]
pub struct BruteForceReport {
    pub report: SolveReport,
    /// Lexicographically smallest feasible support of minimal size.
    pub support: SupportSet,
    /// Every feasible support found at the minimal size.
    pub optimal_supports: Vec<SupportSet>,
    /// Whether exactly one support of minimal size is feasible.
    pub unique: bool,
    pub supports_enumerated: usize,
}

/// Structured access to the lifted operator of a `(matrix, frame)` pair.
///
/// Applies `c -> A U(c)` and its adjoint directly from the factors and caches
/// the Gram matrix `(A^T A)_{jk} (U_j^T U_k)`, so nothing of size
/// `n*M x sum m_j` is ever formed.
pub(crate) struct LiftedSystem<'a> {
    a: &'a MeasurementMatrix,
    frame: &'a FusionFrame,
    dims: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
    gram: DMatrix<f64>,
    solver: GramSolver,
}

enum GramSolver {
    Cholesky(Cholesky<f64, Dyn>),
    Eigen {
        vectors: DMatrix<f64>,
        values: DVector<f64>,
        cutoff: f64,
    },
}

impl<'a> LiftedSystem<'a> {
    pub(crate) fn new(a: &'a MeasurementMatrix, frame: &'a FusionFrame) -> Result<Self> {
        if a.num_cols() != frame.len() {
            return Err(Error::Shape(format!(
                "matrix has {} columns but frame has {} subspaces",
                a.num_cols(),
                frame.len()
            )));
        }
        let dims = frame.block_dims();
        let offsets = block_offsets(&dims);
        let total = dims.iter().sum();
        let gram = assemble_gram(a, frame, &dims, &offsets, total);
        let solver = build_gram_solver(&gram);
        Ok(Self { a, frame, dims, offsets, total, gram, solver })
    }

    pub(crate) fn total_dim(&self) -> usize {
        self.total
    }

    /// `A U(c)` as an `n x M` matrix, from a concatenated coefficient vector.
    pub(crate) fn apply(&self, c: &DVector<f64>) -> DMatrix<f64> {
        let n_sub = self.frame.len();
        let m = self.frame.ambient_dim();
        let mut rows = DMatrix::zeros(n_sub, m);
        for j in 0..n_sub {
            let cj = c.rows(self.offsets[j], self.dims[j]);
            let xj = self.frame.subspace(j).basis() * cj;
            rows.row_mut(j).copy_from(&xj.transpose());
        }
        self.a.entries() * rows
    }

    /// Adjoint of [`Self::apply`]: block `j` is `U_j^T (R^T A)_{.,j}`.
    pub(crate) fn apply_adjoint(&self, r: &DMatrix<f64>) -> DVector<f64> {
        let w = r.transpose() * self.a.entries();
        let mut out = DVector::zeros(self.total);
        for j in 0..self.frame.len() {
            let col = w.column(j);
            let block = self.frame.subspace(j).basis().transpose() * col;
            out.rows_mut(self.offsets[j], self.dims[j]).copy_from(&block);
        }
        out
    }

    /// Apply the (pseudo-)inverse of the Gram matrix.
    fn gram_solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        match &self.solver {
            GramSolver::Cholesky(chol) => chol.solve(rhs),
            GramSolver::Eigen { vectors, values, cutoff } => {
                let mut coords = vectors.transpose() * rhs;
                for i in 0..coords.len() {
                    coords[i] = if values[i] > *cutoff { coords[i] / values[i] } else { 0.0 };
                }
                vectors * coords
            }
        }
    }

    /// Exact projection onto `{c : A U(c) = Y}` (as represented by the cached
    /// right-hand side image `g = adjoint(Y)`).
    fn project_affine(&self, z: &DVector<f64>, g: &DVector<f64>) -> DVector<f64> {
        let residual_image = &self.gram * z - g;
        z - self.gram_solve(&residual_image)
    }

    /// Exact projection onto `{c : ||A U(c) - Y||_F <= radius}` via a scalar
    /// root-find on the regularization weight.
    fn project_ball(
        &self,
        z: &DVector<f64>,
        g: &DVector<f64>,
        y_norm_sq: f64,
        radius: f64,
    ) -> DVector<f64> {
        let (vectors, values) = match &self.solver {
            GramSolver::Eigen { vectors, values, .. } => (vectors, values),
            GramSolver::Cholesky(_) => unreachable!("ball projection always uses the eigen path"),
        };
        let z_coords = vectors.transpose() * z;
        let g_coords = vectors.transpose() * g;
        let residual_sq = |nu: f64| -> f64 {
            let mut quad = 0.0;
            let mut cross = 0.0;
            for i in 0..values.len() {
                let ci = (z_coords[i] + nu * g_coords[i]) / (1.0 + nu * values[i]);
                quad += values[i] * ci * ci;
                cross += ci * g_coords[i];
            }
            (quad - 2.0 * cross + y_norm_sq).max(0.0)
        };
        let target = radius * radius;
        if residual_sq(0.0) <= target {
            return z.clone();
        }
        // The residual is monotone decreasing in nu: bracket then bisect.
        let mut hi = 1.0;
        while residual_sq(hi) > target && hi < 1e18 {
            hi *= 4.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if residual_sq(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-14 * hi.max(1.0) {
                break;
            }
        }
        let nu = hi;
        let mut coords = DVector::zeros(values.len());
        for i in 0..values.len() {
            coords[i] = (z_coords[i] + nu * g_coords[i]) / (1.0 + nu * values[i]);
        }
        vectors * coords
    }

    fn force_eigen(&mut self) {
        if matches!(self.solver, GramSolver::Cholesky(_)) {
            self.solver = eigen_solver(&self.gram);
        }
    }
}

fn assemble_gram(
    a: &MeasurementMatrix,
    frame: &FusionFrame,
    dims: &[usize],
    offsets: &[usize],
    total: usize,
) -> DMatrix<f64> {
    let col_gram = a.entries().transpose() * a.entries();
    let mut gram = DMatrix::zeros(total, total);
    for j in 0..frame.len() {
        for k in j..frame.len() {
            let weight = col_gram[(j, k)];
            if weight == 0.0 && j != k {
                continue;
            }
            let cross = frame.subspace(j).basis().transpose() * frame.subspace(k).basis();
            for p in 0..dims[j] {
                for q in 0..dims[k] {
                    let v = weight * cross[(p, q)];
                    gram[(offsets[j] + p, offsets[k] + q)] = v;
                    if j != k {
                        gram[(offsets[k] + q, offsets[j] + p)] = v;
                    }
                }
            }
        }
    }
    gram
}

fn build_gram_solver(gram: &DMatrix<f64>) -> GramSolver {
    if let Some(chol) = Cholesky::new(gram.clone()) {
        let diag = chol.l_dirty();
        let mut lo = f64::INFINITY;
        let mut hi = 0.0_f64;
        for i in 0..gram.nrows() {
            let d = diag[(i, i)];
            lo = lo.min(d);
            hi = hi.max(d);
        }
        if lo > 1e-7 * hi {
            return GramSolver::Cholesky(chol);
        }
    }
    eigen_solver(gram)
}

fn eigen_solver(gram: &DMatrix<f64>) -> GramSolver {
    let eig = gram.clone().symmetric_eigen();
    let lam_max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    // Rank cutoff sits above the eigensolver's noise floor for zero modes.
    let cutoff = 1e-12 * lam_max.max(f64::MIN_POSITIVE);
    GramSolver::Eigen { vectors: eig.eigenvectors, values: eig.eigenvalues, cutoff }
}

/// Block soft-thresholding: the proximal step of the weighted group norm.
fn block_shrink(w: &DVector<f64>, dims: &[usize], offsets: &[usize], thresholds: &[f64]) -> DVector<f64> {
    let mut out = DVector::zeros(w.len());
    for j in 0..dims.len() {
        let block = w.rows(offsets[j], dims[j]);
        let norm = block.norm();
        if norm > thresholds[j] {
            let scale = 1.0 - thresholds[j] / norm;
            out.rows_mut(offsets[j], dims[j]).copy_from(&(block * scale));
        }
    }
    out
}

enum ConstraintSet {
    Affine,
    Ball { radius: f64 },
}

/// Minimize the weighted group norm subject to `A U(c) = Y`.
pub fn solve_p1(
    a: &MeasurementMatrix,
    frame: &FusionFrame,
    y: &DMatrix<f64>,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    let system = LiftedSystem::new(a, frame)?;
    run_splitting(system, a, frame, y, opts, ConstraintSet::Affine)
}

/// Minimize the weighted group norm subject to `||A U(c) - Y||_F <= eta`.
///
/// At `eta = 0` this agrees with [`solve_p1`] up to solver tolerances.
pub fn solve_p1_noisy(
    a: &MeasurementMatrix,
    frame: &FusionFrame,
    y: &DMatrix<f64>,
    eta: f64,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    if !(eta >= 0.0) {
        return Err(Error::Argument(format!("noise radius must be nonnegative, got {eta}")));
    }
    let mut system = LiftedSystem::new(a, frame)?;
    if eta == 0.0 {
        return run_splitting(system, a, frame, y, opts, ConstraintSet::Affine);
    }
    system.force_eigen();
    let radius = eta * (1.0 + 1e-8);
    run_splitting(system, a, frame, y, opts, ConstraintSet::Ball { radius })
}

fn run_splitting(
    system: LiftedSystem<'_>,
    a: &MeasurementMatrix,
    frame: &FusionFrame,
    y: &DMatrix<f64>,
    opts: &SolverOptions,
    constraint: ConstraintSet,
) -> Result<SolveReport> {
    opts.validate()?;
    if y.nrows() != a.num_rows() || y.ncols() != frame.ambient_dim() {
        return Err(Error::Shape(format!(
            "measurements are {}x{}, expected {}x{}",
            y.nrows(),
            y.ncols(),
            a.num_rows(),
            frame.ambient_dim()
        )));
    }
    let weights = frame.weights().to_vec();
    let dims = system.dims.clone();
    let offsets = system.offsets.clone();
    let total = system.total_dim();

    let y_norm = y.norm();
    let scale = 1.0 + y_norm;
    let g = system.apply_adjoint(y);

    // Constraint-set distance of a residual norm.
    let constraint_gap = |res: f64| -> f64 {
        match constraint {
            ConstraintSet::Affine => res,
            ConstraintSet::Ball { radius } => (res - radius).max(0.0),
        }
    };

    // Feasibility precheck: the least-squares point attains the minimal
    // possible residual over the whole space.
    let least_squares = system.gram_solve(&g);
    let ls_residual = (system.apply(&least_squares) - y).norm();
    if constraint_gap(ls_residual) > opts.feasibility_tol * scale {
        let coeffs = finalize(&least_squares, &dims, opts.hard_threshold);
        let objective = crate::signal::mixed_norm(&coeffs, &weights, 1)?;
        return Ok(SolveReport {
            status: SolveStatus::Infeasible,
            iterations: 0,
            final_feasibility_residual: constraint_gap(ls_residual),
            final_objective: objective,
            coefficients: coeffs,
        });
    }

    let project = |z: &DVector<f64>| -> DVector<f64> {
        match constraint {
            ConstraintSet::Affine => system.project_affine(z, &g),
            ConstraintSet::Ball { radius } => {
                system.project_ball(z, &g, y_norm * y_norm, radius)
            }
        }
    };

    let mut rho = opts.penalty_parameter;
    let mut z = DVector::zeros(total);
    let mut u = DVector::zeros(total);
    let cert_tol = 10.0 * opts.objective_rel_tol;
    let mut objective_history: Vec<f64> = Vec::new();
    let mut best: Option<(f64, DVector<f64>, usize)> = None;
    let mut iterations = 0;

    for iter in 1..=opts.max_iterations {
        iterations = iter;
        let thresholds: Vec<f64> = weights.iter().map(|&v| v / rho).collect();
        let x = project(&(&z - &u));
        let z_prev = z.clone();
        let w = &x + &u;
        z = block_shrink(&w, &dims, &offsets, &thresholds);
        u = &u + &x - &z;

        let objective: f64 = (0..dims.len())
            .map(|j| weights[j] * z.rows(offsets[j], dims[j]).norm())
            .sum();
        objective_history.push(objective);

        let check_now = iter % 10 == 0 || iter == opts.max_iterations;
        if check_now {
            let residual = constraint_gap((system.apply(&z) - y).norm());
            match &best {
                Some((r, _, _)) if *r <= residual => {}
                _ => best = Some((residual, z.clone(), iter)),
            }
            let feasible = residual <= opts.feasibility_tol * scale;
            let stalled = objective_history.len() > 10 && {
                let now = objective;
                let then = objective_history[objective_history.len() - 11];
                (now - then).abs() <= opts.objective_rel_tol * (1.0 + now.abs())
            };
            if feasible
                && stalled
                && certificate_holds(&system, &z, &u, rho, &dims, &offsets, &weights, cert_tol, opts.hard_threshold)
            {
                let coeffs = finalize(&z, &dims, opts.hard_threshold);
                let final_residual = constraint_gap((system.apply(&coeffs.concatenated()) - y).norm());
                let final_objective = crate::signal::mixed_norm(&coeffs, &weights, 1)?;
                return Ok(SolveReport {
                    status: SolveStatus::Converged,
                    iterations: iter,
                    final_feasibility_residual: final_residual,
                    final_objective,
                    coefficients: coeffs,
                });
            }
        }

        // Residual balancing keeps the splitting penalty in a useful range.
        if iter % 50 == 0 {
            let primal = (&x - &z).norm();
            let dual = rho * (&z - &z_prev).norm();
            if dual > 0.0 || primal > 0.0 {
                let ratio = primal / dual.max(1e-300);
                if ratio > 10.0 {
                    rho *= 2.0;
                    u /= 2.0;
                } else if ratio < 0.1 {
                    rho /= 2.0;
                    u *= 2.0;
                }
            }
        }
    }

    // Out of budget: report the best feasible-ish iterate seen.
    let (residual, best_z, _) = best.unwrap_or((constraint_gap((system.apply(&z) - y).norm()), z, iterations));
    let coeffs = finalize(&best_z, &dims, opts.hard_threshold);
    let final_objective = crate::signal::mixed_norm(&coeffs, &weights, 1)?;
    Ok(SolveReport {
        status: SolveStatus::MaxIters,
        iterations,
        final_feasibility_residual: residual,
        final_objective,
        coefficients: coeffs,
    })
}

/// First-order optimality: the range projection of the scaled dual must be a
/// valid (weighted) subgradient of the group norm at the candidate, block by
/// block, within `cert_tol`.
#[allow(clippy::too_many_arguments)]
fn certificate_holds(
    system: &LiftedSystem<'_>,
    z: &DVector<f64>,
    u: &DVector<f64>,
    rho: f64,
    dims: &[usize],
    offsets: &[usize],
    weights: &[f64],
    cert_tol: f64,
    hard_threshold: f64,
) -> bool {
    let dual_image = &system.gram * system.gram_solve(&(u * rho));
    for j in 0..dims.len() {
        let tj = dual_image.rows(offsets[j], dims[j]);
        let zj = z.rows(offsets[j], dims[j]);
        let norm = zj.norm();
        if norm > hard_threshold {
            let g = zj * (weights[j] / norm);
            if (tj - g).norm() > cert_tol {
                return false;
            }
        } else if tj.norm() > weights[j] + cert_tol {
            return false;
        }
    }
    true
}

fn finalize(c: &DVector<f64>, dims: &[usize], hard_threshold: f64) -> BlockCoefficients {
    BlockCoefficients::from_concatenated(c, dims)
        .expect("internal block layout")
        .hard_thresholded(hard_threshold)
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

/// Enumeration budget for combinatorial searches.
pub const ENUMERATION_BUDGET: u128 = 1_000_000;

/// Exhaustive minimum-block-count recovery: scan supports of size 0, 1, ...,
/// `k_max` in lexicographic order and return the first size admitting a
/// feasible least-squares fit. Intended as a ground-truth oracle at desk
/// scale; the search space is guarded by [`ENUMERATION_BUDGET`].
pub fn solve_p0_bruteforce(
    a: &MeasurementMatrix,
    frame: &FusionFrame,
    y: &DMatrix<f64>,
    k_max: usize,
    opts: &SolverOptions,
) -> Result<BruteForceReport> {
    opts.validate()?;
    if a.num_cols() != frame.len() {
        return Err(Error::Shape(format!(
            "matrix has {} columns but frame has {} subspaces",
            a.num_cols(),
            frame.len()
        )));
    }
    if y.nrows() != a.num_rows() || y.ncols() != frame.ambient_dim() {
        return Err(Error::Shape("measurement shape mismatch".into()));
    }
    let n_blocks = frame.len();
    let k_max = k_max.min(n_blocks);
    if binomial(n_blocks, k_max) > ENUMERATION_BUDGET {
        return Err(Error::Resource(format!(
            "C({n_blocks}, {k_max}) exceeds the enumeration budget of {ENUMERATION_BUDGET}"
        )));
    }
    let dims = frame.block_dims();
    let scale = 1.0 + y.norm();
    let mut enumerated = 0usize;

    for size in 0..=k_max {
        let mut feasible: Vec<(SupportSet, BlockCoefficients, f64)> = Vec::new();
        for combo in (0..n_blocks).combinations(size) {
            enumerated += 1;
            let support = SupportSet::new(combo.clone()).expect("combinations are sorted");
            let stacked = crate::measurement::stacked_support_columns(a, frame, &combo);
            let b = crate::signal::vectorize_rows(y);
            let (solution, residual) = if size == 0 {
                (DVector::zeros(0), b.norm())
            } else {
                let pinv = crate::linalg::pseudo_inverse(&stacked);
                let sol = &pinv * &b;
                let res = (&stacked * &sol - &b).norm();
                (sol, res)
            };
            if residual <= opts.feasibility_tol * scale {
                let mut blocks: Vec<DVector<f64>> =
                    dims.iter().map(|&d| DVector::zeros(d)).collect();
                let mut offset = 0;
                for &j in &combo {
                    blocks[j] = solution.rows(offset, dims[j]).into_owned();
                    offset += dims[j];
                }
                let coeffs = BlockCoefficients::new(blocks).hard_thresholded(opts.hard_threshold);
                feasible.push((support, coeffs, residual));
            }
        }
        if let Some((support, coeffs, residual)) = feasible.first().cloned() {
            let unique = feasible.len() == 1;
            let optimal_supports: Vec<SupportSet> =
                feasible.into_iter().map(|(s, _, _)| s).collect();
            let objective = frame.mixed_norm(&coeffs, 1)?;
            return Ok(BruteForceReport {
                report: SolveReport {
                    status: SolveStatus::Converged,
                    iterations: enumerated,
                    final_feasibility_residual: residual,
                    final_objective: objective,
                    coefficients: coeffs,
                },
                support,
                optimal_supports,
                unique,
                supports_enumerated: enumerated,
            });
        }
    }

    Ok(BruteForceReport {
        report: SolveReport {
            status: SolveStatus::Infeasible,
            iterations: enumerated,
            final_feasibility_residual: f64::INFINITY,
            final_objective: 0.0,
            coefficients: BlockCoefficients::zeros_like(frame),
        },
        support: SupportSet::empty(),
        optimal_supports: Vec::new(),
        unique: false,
        supports_enumerated: enumerated,
    })
}

/// Success criterion for recovery experiments:
/// `||c_hat - c_true|| <= rel_tol * max(||c_true||, 1e-12)` on the
/// concatenated coefficient vectors. Mismatched shapes never count as
/// recovered.
pub fn recovered(c_true: &BlockCoefficients, c_hat: &BlockCoefficients, rel_tol: f64) -> bool {
    if c_true.block_dims() != c_hat.block_dims() {
        return false;
    }
    let diff = (c_true.concatenated() - c_hat.concatenated()).norm();
    diff <= rel_tol * c_true.norm().max(1e-12)
}
