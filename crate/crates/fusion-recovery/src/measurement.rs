//! The sampling operator `A`, the lifted block operators, the measurement map
//! `Y = A U(c)` and matrix analytics: coherence, fusion coherence and the
//! support conditioning quantity alpha.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::frame::FusionFrame;
use crate::linalg;
use crate::rng;
use crate::signal::{synthesize, BlockCoefficients, SupportSet};

/// Tolerance for the unit-column-norm invariant.
pub const COLUMN_NORM_TOL: f64 = 1e-10;

/// An `n x N` sampling matrix with unit-norm columns.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    entries: DMatrix<f64>,
    renormalized: bool,
}

impl MeasurementMatrix {
    /// Wrap a matrix whose columns are already unit norm.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::Argument("measurement matrix must be nonempty".into()));
        }
        for j in 0..entries.ncols() {
            let norm = entries.column(j).norm();
            if (norm - 1.0).abs() > COLUMN_NORM_TOL {
                return Err(Error::Argument(format!(
                    "column {j} has norm {norm}, expected 1 (renormalize to accept)"
                )));
            }
        }
        Ok(Self { entries, renormalized: false })
    }

    /// Wrap an arbitrary matrix, scaling each column to unit norm. The
    /// `renormalized` flag records whether any column actually changed.
    pub fn new_renormalized(mut entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::Argument("measurement matrix must be nonempty".into()));
        }
        let mut changed = false;
        for j in 0..entries.ncols() {
            let norm = entries.column(j).norm();
            if norm == 0.0 {
                return Err(Error::Argument(format!("column {j} is zero and cannot be normalized")));
            }
            if (norm - 1.0).abs() > COLUMN_NORM_TOL {
                changed = true;
                entries.column_mut(j).scale_mut(1.0 / norm);
            }
        }
        Ok(Self { entries, renormalized: changed })
    }

    /// Number of measurements (rows).
    pub fn num_rows(&self) -> usize {
        self.entries.nrows()
    }

    /// Number of sampled components (columns).
    pub fn num_cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn column(&self, j: usize) -> DVector<f64> {
        self.entries.column(j).into_owned()
    }

    /// Whether construction had to rescale any column.
    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    /// Submatrix of the columns listed in `support`.
    pub fn columns_of(&self, support: &SupportSet) -> DMatrix<f64> {
        let mut sub = DMatrix::zeros(self.num_rows(), support.len());
        for (k, &j) in support.indices().iter().enumerate() {
            sub.set_column(k, &self.entries.column(j));
        }
        sub
    }
}

/// Gaussian matrix with every column scaled to unit norm. Deterministic for a
/// fixed seed.
pub fn random_measurement_matrix(rows: usize, cols: usize, seed: u64) -> Result<MeasurementMatrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::Argument("matrix dimensions must be positive".into()));
    }
    let mut rng = rng::stream(seed);
    let raw = DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng));
    MeasurementMatrix::new_renormalized(raw)
}

/// `[I | H/sqrt(n)]`: the union of the standard basis and a normalized
/// Sylvester-Hadamard basis, a deterministic `n x 2n` matrix with coherence
/// `1/sqrt(n)`. Requires `n` to be a power of two.
pub fn union_of_orthobases(n: usize) -> Result<MeasurementMatrix> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Argument(format!("need a power-of-two size, got {n}")));
    }
    let mut h = DMatrix::from_element(1, 1, 1.0);
    while h.nrows() < n {
        let k = h.nrows();
        let mut next = DMatrix::zeros(2 * k, 2 * k);
        next.view_mut((0, 0), (k, k)).copy_from(&h);
        next.view_mut((0, k), (k, k)).copy_from(&h);
        next.view_mut((k, 0), (k, k)).copy_from(&h);
        next.view_mut((k, k), (k, k)).copy_from(&(-&h));
        h = next;
    }
    let scale = 1.0 / (n as f64).sqrt();
    let mut entries = DMatrix::zeros(n, 2 * n);
    entries.view_mut((0, 0), (n, n)).copy_from(&DMatrix::identity(n, n));
    entries.view_mut((0, n), (n, n)).copy_from(&(h * scale));
    MeasurementMatrix::new(entries)
}

/// Apply the measurement map: `Y = A U(c)`, an `n x M` matrix.
pub fn measure(
    a: &MeasurementMatrix,
    frame: &FusionFrame,
    c: &BlockCoefficients,
) -> Result<DMatrix<f64>> {
    if a.num_cols() != frame.len() {
        return Err(Error::Shape(format!(
            "matrix has {} columns but frame has {} subspaces",
            a.num_cols(),
            frame.len()
        )));
    }
    let x = synthesize(frame, c)?;
    Ok(a.entries() * x.entries())
}

/// Which lifted operator a [`BlockOperator`] realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockOperatorKind {
    /// Blocks `a_ij P_j`, acting on stacked ambient vectors (size `nM x NM`).
    Projection,
    /// Blocks `a_ij U_j`, acting on concatenated coefficients (size `nM x sum m_j`).
    Basis,
}

/// Dense realization of a lifted block operator.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    kind: BlockOperatorKind,
    num_rows: usize,
    num_cols: usize,
    ambient_dim: usize,
    block_dims: Vec<usize>,
    matrix: DMatrix<f64>,
}

impl BlockOperator {
    pub fn kind(&self) -> BlockOperatorKind {
        self.kind
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    /// Measurement count `n` and subspace count `N` of the underlying pair.
    pub fn layout(&self) -> (usize, usize) {
        (self.num_rows, self.num_cols)
    }
}

/// Realize the lifted operator as an explicit dense matrix.
pub fn build_block_operator(
    a: &MeasurementMatrix,
    frame: &FusionFrame,
    kind: BlockOperatorKind,
) -> Result<BlockOperator> {
    if a.num_cols() != frame.len() {
        return Err(Error::Shape(format!(
            "matrix has {} columns but frame has {} subspaces",
            a.num_cols(),
            frame.len()
        )));
    }
    let (n, big_n) = (a.num_rows(), a.num_cols());
    let m = frame.ambient_dim();
    let dims = frame.block_dims();
    let matrix = match kind {
        BlockOperatorKind::Projection => {
            let mut out = DMatrix::zeros(n * m, big_n * m);
            for (j, sub) in frame.subspaces().iter().enumerate() {
                let p = sub.projection();
                for i in 0..n {
                    let scaled = &p * a.entries()[(i, j)];
                    out.view_mut((i * m, j * m), (m, m)).copy_from(&scaled);
                }
            }
            out
        }
        BlockOperatorKind::Basis => {
            let total: usize = dims.iter().sum();
            let offsets = block_offsets(&dims);
            let mut out = DMatrix::zeros(n * m, total);
            for (j, sub) in frame.subspaces().iter().enumerate() {
                for i in 0..n {
                    let scaled = sub.basis() * a.entries()[(i, j)];
                    out.view_mut((i * m, offsets[j]), (m, dims[j])).copy_from(&scaled);
                }
            }
            out
        }
    };
    Ok(BlockOperator {
        kind,
        num_rows: n,
        num_cols: big_n,
        ambient_dim: m,
        block_dims: dims,
        matrix,
    })
}

/// Stack the lifted columns `a_ij U_j` for the listed subspaces into a dense
/// `n*M x sum m_j` matrix.
pub(crate) fn stacked_support_columns(
    a: &MeasurementMatrix,
    frame: &FusionFrame,
    indices: &[usize],
) -> DMatrix<f64> {
    let n = a.num_rows();
    let m = frame.ambient_dim();
    let total: usize = indices.iter().map(|&j| frame.subspace(j).dim()).sum();
    let mut stacked = DMatrix::zeros(n * m, total);
    let mut col = 0;
    for &j in indices {
        let dim = frame.subspace(j).dim();
        for i in 0..n {
            let block = frame.subspace(j).basis() * a.entries()[(i, j)];
            stacked.view_mut((i * m, col), (m, dim)).copy_from(&block);
        }
        col += dim;
    }
    stacked
}

/// Plain column submatrix for a sorted index list.
pub(crate) fn classical_support_columns(a: &MeasurementMatrix, indices: &[usize]) -> DMatrix<f64> {
    let mut sub = DMatrix::zeros(a.num_rows(), indices.len());
    for (k, &j) in indices.iter().enumerate() {
        sub.set_column(k, &a.entries().column(j));
    }
    sub
}

pub(crate) fn block_offsets(dims: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(dims.len());
    let mut acc = 0;
    for &d in dims {
        offsets.push(acc);
        acc += d;
    }
    offsets
}

/// Classical coherence: the largest absolute inner product between distinct
/// columns.
pub fn coherence(a: &MeasurementMatrix) -> Result<f64> {
    let n_cols = a.num_cols();
    if n_cols < 2 {
        return Err(Error::Argument("coherence needs at least two columns".into()));
    }
    let gram = a.entries().transpose() * a.entries();
    let mut worst = 0.0_f64;
    for i in 0..n_cols {
        for j in (i + 1)..n_cols {
            worst = worst.max(gram[(i, j)].abs());
        }
    }
    Ok(worst.min(1.0))
}

/// Fusion coherence: the largest over column pairs of
/// `|<a_j, a_k>| * overlap(j, k)`. Never exceeds the classical coherence.
pub fn fusion_coherence(a: &MeasurementMatrix, frame: &FusionFrame) -> Result<f64> {
    let n_cols = a.num_cols();
    if n_cols != frame.len() {
        return Err(Error::Shape(format!(
            "matrix has {n_cols} columns but frame has {} subspaces",
            frame.len()
        )));
    }
    if n_cols < 2 {
        return Err(Error::Argument("fusion coherence needs at least two columns".into()));
    }
    let gram = a.entries().transpose() * a.entries();
    let mut worst = 0.0_f64;
    for i in 0..n_cols {
        for j in (i + 1)..n_cols {
            let ip = gram[(i, j)].abs();
            if ip == 0.0 {
                continue;
            }
            worst = worst.max(ip * frame.subspace_overlap(i, j)?);
        }
    }
    Ok(worst.min(1.0))
}

/// `max_{j not in S} ||A_S^+ a_j||_2`, the conditioning of the off-support
/// columns against the support ones. Returns 0 when the support covers all
/// columns (vacuous maximum).
pub fn alpha_of_support(a: &MeasurementMatrix, support: &SupportSet) -> Result<f64> {
    support.validate(a.num_cols())?;
    let outside = support.complement(a.num_cols());
    if outside.is_empty() || support.is_empty() {
        return Ok(0.0);
    }
    let a_s = a.columns_of(support);
    if linalg::smallest_singular_value(&a_s) <= 1e-10 {
        return Err(Error::Singular(
            "support columns are rank deficient; alpha is undefined".into(),
        ));
    }
    let pinv = linalg::pseudo_inverse(&a_s);
    let mut worst = 0.0_f64;
    for j in outside {
        let image = &pinv * a.entries().column(j);
        worst = worst.max(image.norm());
    }
    Ok(worst)
}
