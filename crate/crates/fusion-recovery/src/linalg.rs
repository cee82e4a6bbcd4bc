//! Shared dense linear-algebra helpers.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff used when forming pseudo-inverses.
pub(crate) const PINV_CUTOFF: f64 = 1e-10;

/// Orthonormalize the columns of `a` by a thin QR factorization, with the
/// diagonal of the triangular factor forced positive so the result is
/// deterministic (QR is unique up to column signs for full-rank input).
pub(crate) fn orthonormalize(a: DMatrix<f64>) -> DMatrix<f64> {
    let cols = a.ncols();
    let qr = a.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..cols {
        if r[(j, j)] < 0.0 {
            for i in 0..q.nrows() {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Largest singular value, or 0 for an empty matrix.
pub(crate) fn operator_norm(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    a.clone().singular_values().max()
}

/// Moore-Penrose pseudo-inverse with singular values below
/// `PINV_CUTOFF * sigma_max` treated as zero.
pub(crate) fn pseudo_inverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    let svd = a.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd with u");
    let v_t = svd.v_t.as_ref().expect("svd with v_t");
    let smax = svd.singular_values.max();
    let cutoff = PINV_CUTOFF * smax;
    let inv_s: DVector<f64> = svd
        .singular_values
        .map(|s| if s > cutoff { 1.0 / s } else { 0.0 });
    // V * S^+ * U^T without materializing the diagonal.
    let mut vs = v_t.transpose();
    for (j, f) in inv_s.iter().enumerate() {
        for i in 0..vs.nrows() {
            vs[(i, j)] *= f;
        }
    }
    vs * u.transpose()
}

/// Smallest singular value (0 for an empty matrix).
pub(crate) fn smallest_singular_value(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    a.clone().singular_values().min()
}

/// Orthonormal basis of the null space of `a`, as matrix columns.
///
/// The row space comes from the singular vectors of `a^T` with singular value
/// above `PINV_CUTOFF * sigma_max`; the null space is its orthogonal
/// complement, read off the complementary projector (whose spectrum is {0, 1},
/// so the eigenvalue split is unambiguous).
pub(crate) fn nullspace_basis(a: &DMatrix<f64>) -> DMatrix<f64> {
    let t = a.ncols();
    let svd = a.transpose().clone_owned().svd(true, false);
    let u = svd.u.as_ref().expect("svd with u");
    let smax = svd.singular_values.max();
    let cutoff = PINV_CUTOFF * smax;
    let row_cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cutoff)
        .collect();
    let rank = row_cols.len();
    if rank == t {
        return DMatrix::zeros(t, 0);
    }
    let mut row_basis = DMatrix::zeros(t, rank);
    for (k, &i) in row_cols.iter().enumerate() {
        row_basis.set_column(k, &u.column(i));
    }
    let projector = DMatrix::identity(t, t) - &row_basis * row_basis.transpose();
    let eig = projector.symmetric_eigen();
    let null_cols: Vec<usize> = (0..t).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    let mut basis = DMatrix::zeros(t, null_cols.len());
    for (k, &i) in null_cols.iter().enumerate() {
        basis.set_column(k, &eig.eigenvectors.column(i));
    }
    basis
}
