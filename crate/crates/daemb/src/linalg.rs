//! Small dense linear-algebra helpers shared by the CCA/KCCA/LSA modules.

use nalgebra::{DMatrix, DVector, RowDVector};

use crate::error::{Error, Result};

/// Column means of a matrix whose rows are observations.
pub fn mean_rows(m: &DMatrix<f64>) -> RowDVector<f64> {
    let n = m.nrows() as f64;
    let mut mean = RowDVector::zeros(m.ncols());
    for i in 0..m.nrows() {
        mean += m.row(i);
    }
    mean / n
}

/// Subtracts the column means from every row; returns (centered, means).
pub fn center_rows(m: &DMatrix<f64>) -> (DMatrix<f64>, RowDVector<f64>) {
    let mean = mean_rows(m);
    let mut c = m.clone();
    for i in 0..c.nrows() {
        let mut row = c.row_mut(i);
        row -= &mean;
    }
    (c, mean)
}

/// Empirical covariance (1/n convention) of two centered views.
pub fn cross_covariance(xc: &DMatrix<f64>, yc: &DMatrix<f64>) -> DMatrix<f64> {
    let n = xc.nrows() as f64;
    (xc.transpose() * yc) / n
}

/// Symmetric eigendecomposition with eigenpairs sorted by descending eigenvalue.
pub fn sym_eigen_desc(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let k = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let values = DVector::from_iterator(k, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(m.nrows(), k);
    for (j, &i) in order.iter().enumerate() {
        vectors.column_mut(j).copy_from(&eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Inverse symmetric square root of a positive-definite matrix.
///
/// Fails when the smallest eigenvalue is below `floor`, relative to the
/// largest; the caller is expected to add a ridge before retrying.
pub fn inv_sqrt_spd(m: &DMatrix<f64>, floor: f64) -> Result<DMatrix<f64>> {
    let (vals, vecs) = sym_eigen_desc(m);
    let max = vals[0].max(0.0);
    let min = vals[vals.len() - 1];
    if min <= floor.max(max * 1e-14) {
        return Err(Error::Numeric(format!(
            "matrix is singular or near-singular (min eigenvalue {min:.3e}); \
             use a nonzero ridge/regularizer"
        )));
    }
    let inv_sqrt = DMatrix::from_diagonal(&vals.map(|v| 1.0 / v.sqrt()));
    Ok(&vecs * inv_sqrt * vecs.transpose())
}

/// Symmetric square root of a positive semidefinite matrix (negative
/// round-off eigenvalues are clamped to zero).
pub fn sqrt_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = sym_eigen_desc(m);
    let sqrt = DMatrix::from_diagonal(&vals.map(|v| v.max(0.0).sqrt()));
    &vecs * sqrt * vecs.transpose()
}

/// Index of the largest-magnitude entry of a column (first on ties).
fn dominant_index(col: nalgebra::DVectorView<f64>) -> usize {
    let mut best = 0;
    let mut best_abs = col[0].abs();
    for (i, v) in col.iter().enumerate().skip(1) {
        if v.abs() > best_abs {
            best = i;
            best_abs = v.abs();
        }
    }
    best
}

/// Flips column signs so the largest-magnitude entry of each column of
/// `primary` is positive; the matching column of `tandem`, when given, is
/// flipped in lockstep.
pub fn fix_column_signs(primary: &mut DMatrix<f64>, tandem: Option<&mut DMatrix<f64>>) {
    let mut flips = vec![false; primary.ncols()];
    for j in 0..primary.ncols() {
        let i = dominant_index(primary.column(j));
        if primary[(i, j)] < 0.0 {
            primary.column_mut(j).neg_mut();
            flips[j] = true;
        }
    }
    if let Some(t) = tandem {
        for (j, &flip) in flips.iter().enumerate() {
            if flip {
                t.column_mut(j).neg_mut();
            }
        }
    }
}

/// Thin SVD with singular values sorted in descending order. Computed from
/// the symmetric eigendecomposition of the smaller Gram matrix rather than
/// `nalgebra`'s bidiagonal SVD, which can return an inconsistent
/// factorization on rank-deficient input (e.g. duplicated column blocks).
///
/// Factor columns/rows belonging to (numerically) zero singular values are
/// left as zeros; callers only consume directions with significant singular
/// values.
pub fn svd_desc(
    m: &DMatrix<f64>,
    compute_u: bool,
    compute_v: bool,
) -> (Option<DMatrix<f64>>, DVector<f64>, Option<DMatrix<f64>>) {
    let (n, p) = m.shape();
    let k = n.min(p);

    // eigendecompose the smaller Gram; its eigenvectors are the singular
    // vectors on that side, the other side follows by one multiplication
    let (s, left, right_t) = if p <= n {
        let gram = m.transpose() * m;
        let (vals, v) = sym_eigen_desc(&gram);
        let s = DVector::from_fn(k, |i, _| vals[i].max(0.0).sqrt());
        let mut u = DMatrix::zeros(n, k);
        let tol = s[0] * 1e-12;
        for j in 0..k {
            if s[j] > tol {
                let col = m * v.column(j) / s[j];
                u.column_mut(j).copy_from(&col);
            }
        }
        (s, u, v.columns(0, k).transpose())
    } else {
        let gram = m * m.transpose();
        let (vals, u) = sym_eigen_desc(&gram);
        let s = DVector::from_fn(k, |i, _| vals[i].max(0.0).sqrt());
        let mut v_t = DMatrix::zeros(k, p);
        let tol = s[0] * 1e-12;
        for j in 0..k {
            if s[j] > tol {
                let row = (u.column(j).transpose() * m) / s[j];
                v_t.row_mut(j).copy_from(&row);
            }
        }
        (s, u.columns(0, k).clone_owned(), v_t)
    };

    (
        compute_u.then_some(left),
        s,
        compute_v.then_some(right_t),
    )
}

/// Pearson correlation of two equal-length slices.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    cov / (va.sqrt() * vb.sqrt())
}
