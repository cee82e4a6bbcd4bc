//! Block coefficient vectors, the synthesis map `c -> U(c)`, mixed norms,
//! the row-sign operator and the Gaussian block-sparse signal model.

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::frame::FusionFrame;
use crate::rng;

/// Blocks with Euclidean norm at or below this threshold count as zero for
/// support extraction and the block-count norm. Sits below solver feasibility
/// noise so thresholded solver output classifies stably.
pub const ZERO_BLOCK_THRESHOLD: f64 = 1e-9;

/// A set of block indices, strictly increasing, 0-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SupportSet {
    indices: Vec<usize>,
}

impl SupportSet {
    /// Build from a strictly increasing index list.
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Argument(
                "support indices must be strictly increasing".into(),
            ));
        }
        Ok(Self { indices })
    }

    /// Build from indices in any order, rejecting duplicates.
    pub fn from_unsorted(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Argument("support indices must be distinct".into()));
        }
        Ok(Self { indices })
    }

    pub fn empty() -> Self {
        Self { indices: Vec::new() }
    }

    /// Uniformly random size-`k` subset of `0..n`.
    pub fn random(n: usize, k: usize, seed: u64) -> Result<Self> {
        if k > n {
            return Err(Error::Argument(format!("cannot choose {k} of {n} indices")));
        }
        let mut rng = rng::stream(seed);
        let mut pool: Vec<usize> = (0..n).collect();
        // Partial Fisher-Yates: the first k entries become the sample.
        for i in 0..k {
            let j = i + (rand::Rng::gen_range(&mut rng, 0..(n - i) as u64) as usize);
            pool.swap(i, j);
        }
        Self::from_unsorted(pool[..k].to_vec())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }

    /// Indices of `0..n` not in the set.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|j| !self.contains(*j)).collect()
    }

    /// Check all indices lie in `0..n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self.indices.last() {
            Some(&last) if last >= n => Err(Error::Index(format!(
                "support index {last} out of range 0..{n}"
            ))),
            _ => Ok(()),
        }
    }
}

/// The per-subspace coefficient blocks `c = (c_j)`, block `j` of length `m_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCoefficients {
    blocks: Vec<DVector<f64>>,
}

impl BlockCoefficients {
    pub fn new(blocks: Vec<DVector<f64>>) -> Self {
        Self { blocks }
    }

    /// All-zero coefficients matching the frame's block dimensions.
    pub fn zeros_like(frame: &FusionFrame) -> Self {
        Self {
            blocks: frame.block_dims().iter().map(|&m| DVector::zeros(m)).collect(),
        }
    }

    /// Rebuild from a concatenated vector and block dimensions.
    pub fn from_concatenated(v: &DVector<f64>, dims: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().sum();
        if v.len() != total {
            return Err(Error::Shape(format!(
                "vector length {} does not match total block length {total}",
                v.len()
            )));
        }
        let mut blocks = Vec::with_capacity(dims.len());
        let mut offset = 0;
        for &m in dims {
            blocks.push(DVector::from_iterator(m, (0..m).map(|i| v[offset + i])));
            offset += m;
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[DVector<f64>] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &DVector<f64> {
        &self.blocks[j]
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.len()).collect()
    }

    /// Whether block lengths match the frame's subspace dimensions.
    pub fn matches(&self, frame: &FusionFrame) -> bool {
        self.num_blocks() == frame.len()
            && self
                .blocks
                .iter()
                .zip(frame.subspaces())
                .all(|(b, s)| b.len() == s.dim())
    }

    /// Stack all blocks into one vector.
    pub fn concatenated(&self) -> DVector<f64> {
        let total: usize = self.blocks.iter().map(|b| b.len()).sum();
        DVector::from_iterator(total, self.blocks.iter().flat_map(|b| b.iter().cloned()))
    }

    /// Indices of blocks with norm above [`ZERO_BLOCK_THRESHOLD`].
    pub fn support(&self) -> SupportSet {
        SupportSet {
            indices: (0..self.blocks.len())
                .filter(|&j| self.blocks[j].norm() > ZERO_BLOCK_THRESHOLD)
                .collect(),
        }
    }

    /// Zero out every block whose norm is at most `threshold`.
    pub fn hard_thresholded(&self, threshold: f64) -> Self {
        Self {
            blocks: self
                .blocks
                .iter()
                .map(|b| {
                    if b.norm() <= threshold {
                        DVector::zeros(b.len())
                    } else {
                        b.clone()
                    }
                })
                .collect(),
        }
    }

    /// Euclidean norm of the concatenation (the mixed 2,2-norm with unit weights).
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.norm_squared()).sum::<f64>().sqrt()
    }
}

/// The stacked synthesis matrix `U(c)`, whose row `j` is `(U_j c_j)^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMatrix {
    entries: DMatrix<f64>,
}

impl SignalMatrix {
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }
}

/// Build `U(c)`: an `N x M` matrix with `(U_j c_j)^T` as row `j`.
pub fn synthesize(frame: &FusionFrame, c: &BlockCoefficients) -> Result<SignalMatrix> {
    if !c.matches(frame) {
        return Err(Error::Shape(format!(
            "coefficient block dims {:?} do not match frame dims {:?}",
            c.block_dims(),
            frame.block_dims()
        )));
    }
    let mut entries = DMatrix::zeros(frame.len(), frame.ambient_dim());
    for (j, sub) in frame.subspaces().iter().enumerate() {
        let row = sub.basis() * c.block(j);
        entries.row_mut(j).copy_from(&row.transpose());
    }
    Ok(SignalMatrix { entries })
}

/// Mixed norm of the coefficient blocks.
///
/// `p = 1` gives `sum_j v_j ||c_j||_2`, `p = 2` gives
/// `(sum_j v_j^2 ||c_j||_2^2)^(1/2)`, and `p = 0` counts blocks with norm
/// above [`ZERO_BLOCK_THRESHOLD`] (weights ignored).
pub fn mixed_norm(c: &BlockCoefficients, weights: &[f64], p: u8) -> Result<f64> {
    if weights.len() != c.num_blocks() {
        return Err(Error::Shape(format!(
            "{} weights for {} blocks",
            weights.len(),
            c.num_blocks()
        )));
    }
    match p {
        0 => Ok(c
            .blocks()
            .iter()
            .filter(|b| b.norm() > ZERO_BLOCK_THRESHOLD)
            .count() as f64),
        1 => Ok(c
            .blocks()
            .iter()
            .zip(weights)
            .map(|(b, &v)| v * b.norm())
            .sum()),
        2 => Ok(c
            .blocks()
            .iter()
            .zip(weights)
            .map(|(b, &v)| v * v * b.norm_squared())
            .sum::<f64>()
            .sqrt()),
        other => Err(Error::Argument(format!("mixed norm order {other} not in {{0, 1, 2}}"))),
    }
}

impl FusionFrame {
    /// Mixed norm of `c` using this frame's weights.
    pub fn mixed_norm(&self, c: &BlockCoefficients, p: u8) -> Result<f64> {
        mixed_norm(c, self.weights(), p)
    }
}

/// Normalize every nonzero row of `x` to unit Euclidean norm; zero rows stay
/// zero. Idempotent.
pub fn sgn_rows(x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = x.clone();
    for mut row in out.row_iter_mut() {
        let norm = row.norm();
        if norm != 0.0 {
            row /= norm;
        }
    }
    out
}

/// Concatenate the rows of a `k x M` matrix into one vector of length `k*M`.
pub fn vectorize_rows(x: &DMatrix<f64>) -> DVector<f64> {
    let (k, m) = (x.nrows(), x.ncols());
    DVector::from_fn(k * m, |i, _| x[(i / m, i % m)])
}

/// Inverse of [`vectorize_rows`] given the row count.
pub fn unvectorize_rows(v: &DVector<f64>, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    if v.len() != rows * cols {
        return Err(Error::Shape(format!(
            "vector of length {} cannot reshape to {rows}x{cols}",
            v.len()
        )));
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| v[i * cols + j]))
}

/// Coefficients that are independent standard normal on the blocks of `support`
/// and exactly zero elsewhere. Deterministic for a fixed seed.
pub fn random_gaussian_signal(
    frame: &FusionFrame,
    support: &SupportSet,
    seed: u64,
) -> Result<BlockCoefficients> {
    support.validate(frame.len())?;
    let mut rng = rng::stream(seed);
    let mut c = BlockCoefficients::zeros_like(frame);
    for &j in support.indices() {
        let m = frame.subspace(j).dim();
        c.blocks[j] = DVector::from_fn(m, |_, _| StandardNormal.sample(&mut rng));
    }
    Ok(c)
}
