//! Totally symmetric 2- and 3-forms on `V`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::rng::{normal, Rng};
use crate::tol::FORM_SYMMETRY;

/// A symmetric bilinear form `Ψ ∈ S²(V)`, stored densely (row-major `m × m`).
#[derive(Clone, Debug, PartialEq)]
pub struct SymForm2 {
    m: usize,
    data: Vec<f64>,
}

impl SymForm2 {
    pub fn zeros(m: usize) -> Self {
        SymForm2 {
            m,
            data: vec![0.0; m * m],
        }
    }

    pub fn identity(m: usize) -> Self {
        Self::from_fn(m, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// Builds the form from `f(i, j)` evaluated on `i ≤ j`.
    pub fn from_fn(m: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut out = Self::zeros(m);
        for i in 0..m {
            for j in i..m {
                let v = f(i, j);
                out.data[i * m + j] = v;
                out.data[j * m + i] = v;
            }
        }
        out
    }

    /// Accepts a row-major array if it is symmetric to within `1e-14·max(1, max|entry|)`.
    pub fn from_row_major(m: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != m * m {
            return Err(Error::DimensionMismatch {
                expected: m * m,
                got: data.len(),
            });
        }
        let scale = data.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
        let mut worst = 0.0_f64;
        for i in 0..m {
            for j in 0..m {
                worst = worst.max((data[i * m + j] - data[j * m + i]).abs());
            }
        }
        if worst > FORM_SYMMETRY * scale {
            return Err(Error::Symmetry {
                what: "symmetric 2-form",
                violation: worst,
                limit: FORM_SYMMETRY * scale,
            });
        }
        Ok(Self::from_fn(m, |i, j| 0.5 * (data[i * m + j] + data[j * m + i])))
    }

    pub fn from_matrix(a: &DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::InvalidInput("matrix is not square".into()));
        }
        let m = a.nrows();
        Self::from_row_major(m, (0..m * m).map(|k| a[(k / m, k % m)]).collect())
    }

    /// `v ⊗ v`.
    pub fn outer(v: &[f64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j])
    }

    pub fn random(m: usize, rng: &mut Rng) -> Self {
        let mut out = Self::zeros(m);
        for i in 0..m {
            for j in i..m {
                let v = normal(rng);
                out.data[i * m + j] = v;
                out.data[j * m + i] = v;
            }
        }
        out
    }

    /// Number of independent entries, `m(m+1)/2`.
    pub fn param_count(m: usize) -> usize {
        m * (m + 1) / 2
    }

    /// Independent entries `(i ≤ j)` in row-major order.
    pub fn to_params(&self) -> Vec<f64> {
        let m = self.m;
        let mut out = Vec::with_capacity(Self::param_count(m));
        for i in 0..m {
            for j in i..m {
                out.push(self.get(i, j));
            }
        }
        out
    }

    pub fn from_params(m: usize, params: &[f64]) -> Self {
        debug_assert_eq!(params.len(), Self::param_count(m));
        let mut out = Self::zeros(m);
        let mut k = 0;
        for i in 0..m {
            for j in i..m {
                out.data[i * m + j] = params[k];
                out.data[j * m + i] = params[k];
                k += 1;
            }
        }
        out
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.m + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn as_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.m, self.m, &self.data)
    }

    pub fn scaled(&self, c: f64) -> Self {
        SymForm2 {
            m: self.m,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    /// `Ψ(x, y)`.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let m = self.m;
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += self.data[i * m + j] * x[i] * y[j];
            }
        }
        s
    }
}

/// A totally symmetric trilinear form `Ψ₁ ∈ S³(V)`, stored densely.
#[derive(Clone, Debug, PartialEq)]
pub struct SymForm3 {
    m: usize,
    data: Vec<f64>,
}

fn perms3(i: usize, j: usize, k: usize) -> [(usize, usize, usize); 6] {
    [
        (i, j, k),
        (i, k, j),
        (j, i, k),
        (j, k, i),
        (k, i, j),
        (k, j, i),
    ]
}

impl SymForm3 {
    pub fn zeros(m: usize) -> Self {
        SymForm3 {
            m,
            data: vec![0.0; m * m * m],
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.m + j) * self.m + k
    }

    fn set_all(&mut self, i: usize, j: usize, k: usize, v: f64) {
        for (a, b, c) in perms3(i, j, k) {
            let ix = self.idx(a, b, c);
            self.data[ix] = v;
        }
    }

    /// Builds the form from `f(i, j, k)` evaluated on `i ≤ j ≤ k`.
    pub fn from_fn(m: usize, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let mut out = Self::zeros(m);
        for i in 0..m {
            for j in i..m {
                for k in j..m {
                    out.set_all(i, j, k, f(i, j, k));
                }
            }
        }
        out
    }

    pub fn from_dense(m: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != m * m * m {
            return Err(Error::DimensionMismatch {
                expected: m * m * m,
                got: data.len(),
            });
        }
        let scale = data.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
        let at = |i: usize, j: usize, k: usize| data[(i * m + j) * m + k];
        let mut worst = 0.0_f64;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let v = at(i, j, k);
                    for (a, b, c) in perms3(i, j, k) {
                        worst = worst.max((v - at(a, b, c)).abs());
                    }
                }
            }
        }
        if worst > FORM_SYMMETRY * scale {
            return Err(Error::Symmetry {
                what: "symmetric 3-form",
                violation: worst,
                limit: FORM_SYMMETRY * scale,
            });
        }
        Ok(Self::from_fn(m, |i, j, k| {
            perms3(i, j, k).iter().map(|&(a, b, c)| at(a, b, c)).sum::<f64>() / 6.0
        }))
    }

    pub fn random(m: usize, rng: &mut Rng) -> Self {
        let mut out = Self::zeros(m);
        for i in 0..m {
            for j in i..m {
                for k in j..m {
                    out.set_all(i, j, k, normal(rng));
                }
            }
        }
        out
    }

    /// Number of independent entries, `m(m+1)(m+2)/6`.
    pub fn param_count(m: usize) -> usize {
        m * (m + 1) * (m + 2) / 6
    }

    /// Independent entries `(i ≤ j ≤ k)` in lexicographic order.
    pub fn to_params(&self) -> Vec<f64> {
        let m = self.m;
        let mut out = Vec::with_capacity(Self::param_count(m));
        for i in 0..m {
            for j in i..m {
                for k in j..m {
                    out.push(self.get(i, j, k));
                }
            }
        }
        out
    }

    pub fn from_params(m: usize, params: &[f64]) -> Self {
        debug_assert_eq!(params.len(), Self::param_count(m));
        let mut out = Self::zeros(m);
        let mut n = 0;
        for i in 0..m {
            for j in i..m {
                for k in j..m {
                    out.set_all(i, j, k, params[n]);
                    n += 1;
                }
            }
        }
        out
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(i, j, k)]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn scaled(&self, c: f64) -> Self {
        SymForm3 {
            m: self.m,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    /// The symmetric matrix `Ψ₁(·, ·, z)`.
    pub fn contract(&self, z: &[f64]) -> SymForm2 {
        let m = self.m;
        SymForm2::from_fn(m, |i, j| (0..m).map(|k| self.get(i, j, k) * z[k]).sum())
    }
}
