//! Fusion frames: collections of subspaces of `R^M` used as a signal
//! dictionary, together with their basic analytics (frame bounds, pairwise
//! overlaps and the support-overlap quantity theta).

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rng;
use crate::signal::SupportSet;

/// Entrywise tolerance for orthonormality and idempotence checks.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// A subspace of `R^M` represented by an orthonormal basis, stored as the
/// columns of an `M x m` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    basis: DMatrix<f64>,
}

impl SubspaceBasis {
    /// Wrap an `M x m` matrix whose columns are orthonormal.
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let (ambient, dim) = (basis.nrows(), basis.ncols());
        if dim == 0 || dim > ambient {
            return Err(Error::Dimension(format!(
                "subspace dimension {dim} must satisfy 1 <= dim <= ambient {ambient}"
            )));
        }
        let gram = basis.transpose() * &basis;
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - expect).abs() > ORTHONORMALITY_TOL {
                    return Err(Error::Argument(format!(
                        "basis columns are not orthonormal: gram[({i},{j})] = {}",
                        gram[(i, j)]
                    )));
                }
            }
        }
        Ok(Self { basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Orthogonal projection `P = U U^T` onto the subspace.
    ///
    /// The result is symmetric and idempotent with trace equal to `dim`.
    pub fn projection(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }
}

/// Draw a subspace spanned by `dim` orthonormalized standard-normal columns.
///
/// Deterministic for a fixed seed; the triangular factor of the underlying QR
/// is sign-normalized so the basis does not depend on platform details.
pub fn random_subspace(ambient_dim: usize, dim: usize, seed: u64) -> Result<SubspaceBasis> {
    if dim == 0 || dim > ambient_dim {
        return Err(Error::Dimension(format!(
            "cannot draw a {dim}-dimensional subspace of R^{ambient_dim}"
        )));
    }
    let mut rng = rng::stream(seed);
    let raw = DMatrix::from_fn(ambient_dim, dim, |_, _| StandardNormal.sample(&mut rng));
    SubspaceBasis::new(linalg::orthonormalize(raw))
}

/// An ordered collection of subspaces of a common ambient space, with
/// positive weights (all 1 by default).
#[derive(Debug, Clone)]
pub struct FusionFrame {
    subspaces: Vec<SubspaceBasis>,
    weights: Vec<f64>,
}

impl FusionFrame {
    /// Unit-weight frame over the given subspaces.
    pub fn new(subspaces: Vec<SubspaceBasis>) -> Result<Self> {
        let weights = vec![1.0; subspaces.len()];
        Self::with_weights(subspaces, weights)
    }

    pub fn with_weights(subspaces: Vec<SubspaceBasis>, weights: Vec<f64>) -> Result<Self> {
        if subspaces.is_empty() {
            return Err(Error::Argument("a fusion frame needs at least one subspace".into()));
        }
        if weights.len() != subspaces.len() {
            return Err(Error::Shape(format!(
                "{} weights for {} subspaces",
                weights.len(),
                subspaces.len()
            )));
        }
        let ambient = subspaces[0].ambient_dim();
        if subspaces.iter().any(|s| s.ambient_dim() != ambient) {
            return Err(Error::Dimension(
                "all subspaces must share the same ambient dimension".into(),
            ));
        }
        if weights.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::Argument("weights must be strictly positive".into()));
        }
        Ok(Self { subspaces, weights })
    }

    /// Frame with `count` independently drawn random subspaces of equal dimension.
    pub fn random(
        ambient_dim: usize,
        dim: usize,
        count: usize,
        seed: u64,
    ) -> Result<Self> {
        let subspaces = (0..count)
            .map(|j| random_subspace(ambient_dim, dim, rng::derive_seed(seed, 0x5f, j as u64)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(subspaces)
    }

    pub fn ambient_dim(&self) -> usize {
        self.subspaces[0].ambient_dim()
    }

    /// Number of subspaces.
    pub fn len(&self) -> usize {
        self.subspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least one subspace
    }

    pub fn subspace(&self, j: usize) -> &SubspaceBasis {
        &self.subspaces[j]
    }

    pub fn subspaces(&self) -> &[SubspaceBasis] {
        &self.subspaces
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Per-subspace dimensions `m_j`.
    pub fn block_dims(&self) -> Vec<usize> {
        self.subspaces.iter().map(|s| s.dim()).collect()
    }

    /// Total coefficient length `sum_j m_j`.
    pub fn total_dim(&self) -> usize {
        self.subspaces.iter().map(|s| s.dim()).sum()
    }

    /// True when all weights are 1 (the setting the recovery guarantees assume).
    pub fn has_unit_weights(&self) -> bool {
        self.weights.iter().all(|&w| (w - 1.0).abs() <= 1e-12)
    }

    /// Smallest and largest eigenvalues of `S = sum_j v_j^2 P_j`.
    ///
    /// These sandwich the projection energy of every vector:
    /// `A ||x||^2 <= sum_j v_j^2 ||P_j x||^2 <= B ||x||^2`.
    pub fn frame_bounds(&self) -> (f64, f64) {
        let m = self.ambient_dim();
        let mut s = DMatrix::zeros(m, m);
        for (sub, &w) in self.subspaces.iter().zip(&self.weights) {
            s += sub.projection() * (w * w);
        }
        let eig = s.symmetric_eigen();
        let lo = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo.max(0.0), hi)
    }

    /// Whether the lower frame bound is strictly positive.
    pub fn is_frame(&self) -> bool {
        self.frame_bounds().0 > 1e-10
    }

    /// Whether the frame is tight (equal frame bounds).
    pub fn is_tight(&self) -> bool {
        let (a, b) = self.frame_bounds();
        (a - b).abs() <= 1e-10
    }

    /// Largest cosine of the principal angles between subspaces `i` and `j`,
    /// i.e. the largest singular value of `U_i^T U_j`. Lies in `[0, 1]`.
    pub fn subspace_overlap(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.len();
        if i >= n || j >= n {
            return Err(Error::Index(format!("subspace pair ({i},{j}) out of range 0..{n}")));
        }
        if i == j {
            return Err(Error::Index(
                "overlap of a subspace with itself is excluded".into(),
            ));
        }
        let cross = self.subspaces[i].basis().transpose() * self.subspaces[j].basis();
        Ok(linalg::operator_norm(&cross).min(1.0))
    }

    /// `1 + max_{i in S} sum_{j in S, j != i} overlap(i, j)`.
    ///
    /// Equals 1 for singleton or pairwise-orthogonal supports and is at most
    /// `|S|` since each overlap is at most 1.
    pub fn theta_of_support(&self, support: &SupportSet) -> Result<f64> {
        if support.is_empty() {
            return Err(Error::Argument("theta is undefined for an empty support".into()));
        }
        support.validate(self.len())?;
        let idx = support.indices();
        let mut worst = 0.0_f64;
        for &i in idx {
            let mut row_sum = 0.0;
            for &j in idx {
                if j != i {
                    row_sum += self.subspace_overlap(i, j)?;
                }
            }
            worst = worst.max(row_sum);
        }
        Ok(1.0 + worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::SupportSet;
    use approx::assert_relative_eq;
    use nalgebra::DVector;
    use rand::Rng;

    fn span(cols: &[&[f64]]) -> SubspaceBasis {
        let m = cols[0].len();
        let mat = DMatrix::from_fn(m, cols.len(), |i, j| cols[j][i]);
        SubspaceBasis::new(mat).unwrap()
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(random_subspace(5, 0, 1).is_err());
        assert!(random_subspace(5, 6, 1).is_err());
    }

    #[test]
    fn full_dimensional_subspace_projects_to_identity() {
        let s = random_subspace(3, 3, 123).unwrap();
        assert_relative_eq!(s.projection(), DMatrix::identity(3, 3), epsilon = 1e-10);
    }

    #[test]
    fn random_subspace_is_deterministic() {
        let a = random_subspace(5, 2, 7).unwrap();
        let b = random_subspace(5, 2, 7).unwrap();
        assert_eq!(a.basis(), b.basis());
    }

    #[test]
    fn random_subspace_is_orthonormal() {
        let s = random_subspace(5, 2, 7).unwrap();
        let gram = s.basis().transpose() * s.basis();
        assert_relative_eq!(gram, DMatrix::identity(2, 2), epsilon = 1e-10);
    }

    #[test]
    fn projection_of_axis_vector() {
        let s = span(&[&[1.0, 0.0]]);
        let p = s.projection();
        assert_relative_eq!(p, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn projection_of_diagonal_line() {
        // Hand multiplication of U U^T for U = (e1+e2)/sqrt(2).
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s = span(&[&[r, r]]);
        let p = s.projection();
        assert_relative_eq!(
            p,
            DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]),
            epsilon = 1e-12
        );
    }

    #[test]
    fn projections_are_symmetric_idempotent() {
        for seed in 0..5 {
            let s = random_subspace(6, 3, seed).unwrap();
            let p = s.projection();
            assert_relative_eq!(p.transpose(), p, epsilon = 1e-10);
            assert_relative_eq!(&p * &p, p, epsilon = 1e-10);
            assert_relative_eq!(p.trace(), 3.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn orthonormal_partition_is_tight() {
        let f = FusionFrame::new(vec![span(&[&[1.0, 0.0]]), span(&[&[0.0, 1.0]])]).unwrap();
        let (a, b) = f.frame_bounds();
        assert_relative_eq!(a, 1.0, epsilon = 1e-12);
        assert_relative_eq!(b, 1.0, epsilon = 1e-12);
        assert!(f.is_tight());
        assert!(f.is_frame());
    }

    #[test]
    fn duplicated_full_space_doubles_bounds() {
        let full = || random_subspace(3, 3, 9).unwrap();
        let f = FusionFrame::new(vec![full(), full()]).unwrap();
        let (a, b) = f.frame_bounds();
        assert_relative_eq!(a, 2.0, epsilon = 1e-10);
        assert_relative_eq!(b, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn degenerate_frame_is_reported_not_rejected() {
        let f = FusionFrame::new(vec![span(&[&[1.0, 0.0]]), span(&[&[1.0, 0.0]])]).unwrap();
        let (a, b) = f.frame_bounds();
        assert_relative_eq!(a, 0.0, epsilon = 1e-12);
        assert_relative_eq!(b, 2.0, epsilon = 1e-12);
        assert!(!f.is_frame());
    }

    #[test]
    fn frame_bounds_sandwich_random_vectors() {
        let f = FusionFrame::random(6, 2, 5, 31).unwrap();
        let (a, b) = f.frame_bounds();
        let mut rng = crate::rng::stream(99);
        for _ in 0..100 {
            let x = DVector::from_fn(6, |_, _| rng.gen::<f64>() - 0.5).normalize();
            let energy: f64 = f
                .subspaces()
                .iter()
                .zip(f.weights())
                .map(|(s, &w)| {
                    let px = s.projection() * &x;
                    w * w * px.norm_squared()
                })
                .sum();
            assert!(energy >= a - 1e-8, "energy {energy} below lower bound {a}");
            assert!(energy <= b + 1e-8, "energy {energy} above upper bound {b}");
        }
    }

    #[test]
    fn overlap_extremes() {
        let same = FusionFrame::new(vec![span(&[&[1.0, 0.0]]), span(&[&[1.0, 0.0]])]).unwrap();
        assert_relative_eq!(same.subspace_overlap(0, 1).unwrap(), 1.0, epsilon = 1e-12);

        let orth = FusionFrame::new(vec![span(&[&[1.0, 0.0]]), span(&[&[0.0, 1.0]])]).unwrap();
        assert_relative_eq!(orth.subspace_overlap(0, 1).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn overlap_of_diagonal_pair() {
        // Eigen-decomposition of P1 P2: the nonzero eigenvalue is 1/2, so the
        // overlap is sqrt(1/2).
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let f = FusionFrame::new(vec![span(&[&[1.0, 0.0]]), span(&[&[r, r]])]).unwrap();
        assert_relative_eq!(f.subspace_overlap(0, 1).unwrap(), r, epsilon = 1e-10);
    }

    #[test]
    fn overlap_rejects_diagonal_and_out_of_range() {
        let f = FusionFrame::random(4, 2, 3, 1).unwrap();
        assert!(f.subspace_overlap(1, 1).is_err());
        assert!(f.subspace_overlap(0, 3).is_err());
    }

    #[test]
    fn overlap_squared_matches_projection_product_eigenvalue() {
        // lambda_max(P_i P_j) computed by dense eigendecomposition of the
        // symmetrized product P_j P_i P_j, which shares its spectrum.
        let f = FusionFrame::random(6, 2, 4, 17).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    continue;
                }
                let pi = f.subspace(i).projection();
                let pj = f.subspace(j).projection();
                let sym = &pj * &pi * &pj;
                let lam_max = sym
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .cloned()
                    .fold(0.0_f64, f64::max);
                let overlap = f.subspace_overlap(i, j).unwrap();
                assert!((overlap * overlap - lam_max).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn theta_cases() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let f = FusionFrame::new(vec![
            span(&[&[1.0, 0.0, 0.0]]),
            span(&[&[0.0, 1.0, 0.0]]),
            span(&[&[r, r, 0.0]]),
            span(&[&[1.0, 0.0, 0.0]]),
        ])
        .unwrap();

        // Singleton support: empty sum.
        let s1 = SupportSet::new(vec![2]).unwrap();
        assert_relative_eq!(f.theta_of_support(&s1).unwrap(), 1.0);

        // Pairwise orthogonal pair.
        let s2 = SupportSet::new(vec![0, 1]).unwrap();
        assert_relative_eq!(f.theta_of_support(&s2).unwrap(), 1.0, epsilon = 1e-12);

        // Identical subspaces: theta = |S|.
        let s3 = SupportSet::new(vec![0, 3]).unwrap();
        assert_relative_eq!(f.theta_of_support(&s3).unwrap(), 2.0, epsilon = 1e-12);

        // Never exceeds |S|.
        let s4 = SupportSet::new(vec![0, 1, 2, 3]).unwrap();
        let theta = f.theta_of_support(&s4).unwrap();
        assert!((1.0..=4.0 + 1e-12).contains(&theta));

        assert!(f.theta_of_support(&SupportSet::empty()).is_err());
    }

    #[test]
    fn weights_must_be_positive() {
        let subs = vec![span(&[&[1.0, 0.0]]), span(&[&[0.0, 1.0]])];
        assert!(FusionFrame::with_weights(subs, vec![1.0, 0.0]).is_err());
    }
}
