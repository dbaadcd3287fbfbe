use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// The model vector space `V = ℝ^m` with a diagonal inner product of signature `(p, q)`.
///
/// Timelike (negative) directions come first.
#[derive(Clone, Debug, PartialEq)]
pub struct Space {
    m: usize,
    p: usize,
    q: usize,
    diag: Vec<f64>,
}

impl Space {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        let m = match p.checked_add(q) {
            Some(m) if m > 0 => m,
            _ => return Err(Error::InvalidSignature { p, q, m: 0 }),
        };
        if m > crate::tol::MAX_LOAD_DIM {
            return Err(Error::UnsupportedDimension {
                m,
                min: 1,
                max: crate::tol::MAX_LOAD_DIM,
            });
        }
        let diag = (0..m).map(|i| if i < p { -1.0 } else { 1.0 }).collect();
        Ok(Space { m, p, q, diag })
    }

    pub fn riemannian(m: usize) -> Result<Self> {
        Self::new(0, m)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn signature(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn is_riemannian(&self) -> bool {
        self.p == 0
    }

    pub fn metric_diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn metric_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.diag))
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter()
            .zip(y)
            .zip(&self.diag)
            .map(|((a, b), s)| s * a * b)
            .sum()
    }

    pub fn norm_sq(&self, x: &[f64]) -> f64 {
        self.inner(x, x)
    }

    pub fn expect_vector(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: v.len(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negatives_first() {
        let s = Space::new(2, 3).unwrap();
        assert_eq!(s.metric_diagonal(), &[-1.0, -1.0, 1.0, 1.0, 1.0]);
        assert_eq!(s.m(), 5);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(Space::new(0, 0).is_err());
    }

    #[test]
    fn inner_uses_signs() {
        let s = Space::new(1, 1).unwrap();
        assert_eq!(s.norm_sq(&[1.0, 1.0]), 0.0);
        assert_eq!(s.norm_sq(&[2.0, 1.0]), -3.0);
    }
}
