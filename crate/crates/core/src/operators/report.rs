use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::linalg::{numerical_rank, rank_from_singular_values, singular_values};

/// A square operator together with its singular values, numerical rank and eigenvalues.
#[derive(Clone, Debug)]
pub struct OperatorReport {
    pub matrix: DMatrix<f64>,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub numerical_rank: usize,
    /// Sorted lexicographically by `(re, im)`.
    pub eigenvalues: Vec<(f64, f64)>,
}

pub(crate) fn sort_eigenvalues(ev: &mut [(f64, f64)]) {
    ev.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
}

pub(crate) fn eigenvalues_of(matrix: &DMatrix<f64>) -> Vec<(f64, f64)> {
    if matrix.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<(f64, f64)> = matrix
        .complex_eigenvalues()
        .iter()
        .map(|c| (c.re, c.im))
        .collect();
    sort_eigenvalues(&mut ev);
    ev
}

impl OperatorReport {
    pub fn from_matrix(matrix: DMatrix<f64>) -> Self {
        let singular_values = singular_values(&matrix);
        let numerical_rank = rank_from_singular_values(&singular_values);
        let eigenvalues = eigenvalues_of(&matrix);
        OperatorReport {
            matrix,
            singular_values,
            numerical_rank,
            eigenvalues,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `M v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|r| (0..n).map(|c| self.matrix[(r, c)] * v[c]).sum())
            .collect()
    }

    /// Ranks of `(M − λI)^k` for `k = 1, 2, 3`.
    ///
    /// A diagnostic for Jordan structure at a real eigenvalue; it is not a
    /// Jordan normal form computation.
    pub fn power_ranks(&self, lambda: f64) -> [usize; 3] {
        let n = self.dim();
        let shifted = &self.matrix - DMatrix::identity(n, n) * lambda;
        let mut acc = shifted.clone();
        let mut out = [0; 3];
        for r in out.iter_mut() {
            *r = numerical_rank(&acc);
            acc = &acc * &shifted;
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Vec<f64>> = (0..self.dim())
            .map(|r| self.matrix.row(r).iter().copied().collect())
            .collect();
        json!({
            "matrix": rows,
            "singular_values": self.singular_values,
            "rank": self.numerical_rank,
            "eigenvalues": self.eigenvalues.iter().map(|&(re, im)| vec![re, im]).collect::<Vec<_>>(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_generator() {
        let r = OperatorReport::from_matrix(DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
        assert_eq!(r.numerical_rank, 2);
        assert!(r.singular_values.iter().all(|s| (s - 1.0).abs() < 1e-15));
        assert!((r.eigenvalues[0].1 + 1.0).abs() < 1e-14);
        assert!((r.eigenvalues[1].1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn nilpotent_power_ranks() {
        let r = OperatorReport::from_matrix(DMatrix::from_row_slice(
            3,
            3,
            &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        ));
        assert_eq!(r.power_ranks(0.0), [2, 1, 0]);
    }

    #[test]
    fn json_shape() {
        let r = OperatorReport::from_matrix(DMatrix::identity(2, 2));
        let v = r.to_json();
        assert_eq!(v["rank"], 2);
        assert_eq!(v["eigenvalues"][0][0], 1.0);
    }
}
