//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

use crate::tol::RANK_CUTOFF;

/// Singular values in descending order.
pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Number of singular values above `RANK_CUTOFF * σ_max`.
pub fn rank_from_singular_values(s: &[f64]) -> usize {
    let smax = s.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > RANK_CUTOFF * smax).count()
}

pub fn numerical_rank(a: &DMatrix<f64>) -> usize {
    rank_from_singular_values(&singular_values(a))
}

/// Orthonormal basis (as columns) of the null space of `c`.
///
/// Zero rows are appended when `c` is wide so the SVD returns a full `V`.
pub fn null_space(c: &DMatrix<f64>) -> DMatrix<f64> {
    let n = c.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let padded = if c.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (c.nrows(), n)).copy_from(c);
        p
    } else {
        c.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let s = &svd.singular_values;
    let smax = s.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..s.len())
        .filter(|&i| smax == 0.0 || s[i] <= RANK_CUTOFF * smax)
        .collect();
    let mut basis = DMatrix::zeros(n, keep.len());
    for (col, &i) in keep.iter().enumerate() {
        for r in 0..n {
            basis[(r, col)] = v_t[(i, r)];
        }
    }
    basis
}

/// Minimum-norm least-squares solution of `a x ≈ b` via a rank-revealing SVD.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    if a.ncols() == 0 {
        return DVector::zeros(0);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return DVector::zeros(a.ncols());
    }
    svd.solve(b, RANK_CUTOFF * smax)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_zero_matrix_is_zero() {
        assert_eq!(numerical_rank(&DMatrix::zeros(3, 4)), 0);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        // x + y + z = 0 has a 2-dimensional solution space
        let c = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]);
        let n = null_space(&c);
        assert_eq!(n.ncols(), 2);
        assert!((&c * &n).norm() < 1e-14);
        assert!((n.transpose() * &n - DMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn singular_values_descending() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0]);
        assert_eq!(singular_values(&a), vec![3.0, 1.0]);
    }

    #[test]
    fn lstsq_recovers_exact_solution() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let x = DVector::from_vec(vec![2.0, -1.0]);
        let b = &a * &x;
        assert!((lstsq(&a, &b) - x).norm() < 1e-13);
    }
}
