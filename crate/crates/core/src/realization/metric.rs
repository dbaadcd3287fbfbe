//! Metric fields: polynomial (exact jets) and arbitrary smooth evaluators.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tensor_core::{RawTensor, Space};

use super::poly::Polynomial;

/// A metric field `x ↦ g(x)` near a point.
pub trait MetricField: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> DMatrix<f64>;
}

/// Metric given by an arbitrary re-entrant evaluator.
pub struct SmoothMetric<F> {
    m: usize,
    f: F,
}

impl<F> SmoothMetric<F>
where
    F: Fn(&[f64]) -> DMatrix<f64> + Sync,
{
    pub fn new(m: usize, f: F) -> Self {
        SmoothMetric { m, f }
    }
}

impl<F> MetricField for SmoothMetric<F>
where
    F: Fn(&[f64]) -> DMatrix<f64> + Sync,
{
    fn dim(&self) -> usize {
        self.m
    }
    fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        (self.f)(x)
    }
}

/// Metric whose entries are polynomials in the coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMetric {
    m: usize,
    entries: Vec<Polynomial>,
}

/// Value and first three derivatives of a metric at a point.
///
/// `dg[i,k,a] = ∂_a g_{ik}`, `d2g[i,k,a,b] = ∂_a∂_b g_{ik}`, and so on.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub g: DMatrix<f64>,
    pub dg: RawTensor,
    pub d2g: RawTensor,
    pub d3g: RawTensor,
}

impl MetricJet {
    pub fn m(&self) -> usize {
        self.g.nrows()
    }
}

impl PolyMetric {
    /// `entries` is row-major; symmetry `g_{ik} = g_{ki}` is required.
    pub fn new(m: usize, entries: Vec<Polynomial>) -> Result<Self> {
        if entries.len() != m * m {
            return Err(Error::DimensionMismatch {
                expected: m * m,
                got: entries.len(),
            });
        }
        for (n, e) in entries.iter().enumerate() {
            if e.nvars() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: e.nvars(),
                });
            }
            let (i, k) = (n / m, n % m);
            if entries[k * m + i] != *e {
                return Err(Error::InvalidInput(format!(
                    "metric entries ({i},{k}) and ({k},{i}) differ"
                )));
            }
        }
        Ok(PolyMetric { m, entries })
    }

    /// Constant metric of the given signature.
    pub fn flat(space: &Space) -> Self {
        let m = space.m();
        let s = space.metric_diagonal();
        let entries = (0..m * m)
            .map(|n| {
                let (i, k) = (n / m, n % m);
                Polynomial::constant(m, if i == k { s[i] } else { 0.0 })
            })
            .collect();
        PolyMetric { m, entries }
    }

    pub fn entry(&self, i: usize, k: usize) -> &Polynomial {
        &self.entries[i * self.m + k]
    }

    /// Exact value and derivatives up to third order at `x`.
    pub fn jet_at(&self, x: &[f64]) -> MetricJet {
        let m = self.m;
        let mut g = DMatrix::zeros(m, m);
        let mut dg = RawTensor::zeros(m, 3);
        let mut d2g = RawTensor::zeros(m, 4);
        let mut d3g = RawTensor::zeros(m, 5);
        for i in 0..m {
            for k in i..m {
                let p = self.entry(i, k);
                let v = p.eval(x);
                g[(i, k)] = v;
                g[(k, i)] = v;
                for a in 0..m {
                    let pa = p.derivative(a);
                    let v = pa.eval(x);
                    dg.set(&[i, k, a], v);
                    dg.set(&[k, i, a], v);
                    for b in 0..m {
                        let pab = pa.derivative(b);
                        let v = pab.eval(x);
                        d2g.set(&[i, k, a, b], v);
                        d2g.set(&[k, i, a, b], v);
                        for c in 0..m {
                            let v = pab.derivative(c).eval(x);
                            d3g.set(&[i, k, a, b, c], v);
                            d3g.set(&[k, i, a, b, c], v);
                        }
                    }
                }
            }
        }
        MetricJet { g, dg, d2g, d3g }
    }
}

impl MetricField for PolyMetric {
    fn dim(&self) -> usize {
        self.m
    }
    fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        let m = self.m;
        let mut g = DMatrix::zeros(m, m);
        for i in 0..m {
            for k in i..m {
                let v = self.entry(i, k).eval(x);
                g[(i, k)] = v;
                g[(k, i)] = v;
            }
        }
        g
    }
}

/// Inverse of a metric matrix, failing when `|det| ≤ 1e-12`.
pub fn metric_inverse(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let det = g.determinant();
    if det.abs() <= 1e-12 || !det.is_finite() {
        return Err(Error::SingularMetric { det });
    }
    g.clone()
        .try_inverse()
        .ok_or(Error::SingularMetric { det })
}

/// A basis `T` with `Tᵀ g T = diag(−1,…,−1,+1,…,+1)` (negatives first), and
/// the matching [`Space`].
pub fn orthonormal_frame(g: &DMatrix<f64>) -> Result<(Space, DMatrix<f64>)> {
    let m = g.nrows();
    let det = g.determinant();
    let eig = nalgebra::SymmetricEigen::new(g.clone());
    if eig.eigenvalues.iter().any(|v| v.abs() <= 1e-12) {
        return Err(Error::SingularMetric { det });
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let p = order.iter().filter(|&&i| eig.eigenvalues[i] < 0.0).count();
    let mut t = DMatrix::zeros(m, m);
    for (col, &i) in order.iter().enumerate() {
        let s = eig.eigenvalues[i].abs().sqrt().recip();
        for r in 0..m {
            t[(r, col)] = eig.eigenvectors[(r, i)] * s;
        }
    }
    Ok((Space::new(p, m - p)?, t))
}
