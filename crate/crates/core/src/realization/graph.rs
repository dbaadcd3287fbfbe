//! Metrics induced on graphs `x ↦ (x, f₁(x), …, f_κ(x))` and the g_f family
//! of neutral signature.

use crate::error::{Error, Result};
use crate::tensor_core::{SymForm2, SymForm3};

use super::metric::PolyMetric;
use super::poly::Polynomial;

fn check_vars(m: usize, fs: &[Polynomial]) -> Result<()> {
    for f in fs {
        if f.nvars() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: f.nvars(),
            });
        }
    }
    Ok(())
}

/// `g_{ij} = δ_{ij} + Σ_σ ∂_if_σ ∂_jf_σ`; every `f_σ` must have zero gradient at 0.
pub fn build_graph_metric(m: usize, fs: &[Polynomial]) -> Result<PolyMetric> {
    check_vars(m, fs)?;
    let origin = vec![0.0; m];
    let grads: Vec<Vec<Polynomial>> = fs
        .iter()
        .map(|f| (0..m).map(|i| f.derivative(i)).collect())
        .collect();
    for (index, g) in grads.iter().enumerate() {
        if g.iter().any(|d| d.eval(&origin) != 0.0) {
            return Err(Error::NonzeroGradient { index });
        }
    }
    let mut entries = vec![Polynomial::zero(m); m * m];
    for i in 0..m {
        for j in i..m {
            let mut e = Polynomial::constant(m, if i == j { 1.0 } else { 0.0 });
            for g in &grads {
                e = e.add(&g[i].mul(&g[j]));
            }
            entries[i * m + j] = e.clone();
            entries[j * m + i] = e;
        }
    }
    PolyMetric::new(m, entries)
}

/// Hessian and third-derivative forms of `f` at `x`.
pub fn derivative_forms_at(f: &Polynomial, x: &[f64]) -> (SymForm2, SymForm3) {
    let m = f.nvars();
    let second: Vec<Vec<Polynomial>> = (0..m)
        .map(|i| (0..m).map(|j| f.derivative(i).derivative(j)).collect())
        .collect();
    let psi = SymForm2::from_fn(m, |i, j| second[i][j].eval(x));
    let psi1 = SymForm3::from_fn(m, |i, j, k| second[i][j].derivative(k).eval(x));
    (psi, psi1)
}

/// `(Ψ^σ, Ψ^σ₁)`: second and third derivatives of each `f_σ` at the origin.
pub fn hessian_forms(m: usize, fs: &[Polynomial]) -> Result<Vec<(SymForm2, SymForm3)>> {
    check_vars(m, fs)?;
    let origin = vec![0.0; m];
    Ok(fs.iter().map(|f| derivative_forms_at(f, &origin)).collect())
}

/// The metric on `ℝ^{2p}` with coordinates `(x, y)`:
/// `g(∂x_i,∂x_j) = ∂_if ∂_jf`, `g(∂x_i,∂y_j) = δ_ij`, `g(∂y_i,∂y_j) = 0`.
#[derive(Clone, Debug)]
pub struct GfExample {
    pub p: usize,
    pub metric: PolyMetric,
    /// Hessian of `f` at the evaluation point, extended by zero to `ℝ^{2p}`.
    pub psi: SymForm2,
    /// Third derivatives of `f`, extended by zero.
    pub psi1: SymForm3,
}

/// Builds the g_f metric for `f(x₁…x_p)`; `point` has length `2p`, and only
/// its x-part enters `Ψ, Ψ₁`.
pub fn build_gf_metric(f: &Polynomial, point: &[f64]) -> Result<GfExample> {
    let p = f.nvars();
    if p == 0 {
        return Err(Error::InvalidInput("f needs at least one variable".into()));
    }
    if point.len() != 2 * p {
        return Err(Error::DimensionMismatch {
            expected: 2 * p,
            got: point.len(),
        });
    }
    let m = 2 * p;
    let grad: Vec<Polynomial> = (0..p).map(|i| f.derivative(i).extend_vars(m)).collect();
    let mut entries = vec![Polynomial::zero(m); m * m];
    for i in 0..p {
        for j in 0..p {
            entries[i * m + j] = grad[i].mul(&grad[j]);
        }
        entries[i * m + p + i] = Polynomial::constant(m, 1.0);
        entries[(p + i) * m + i] = Polynomial::constant(m, 1.0);
    }
    // g_xx products are built independently for (i,j) and (j,i); mirror them.
    for i in 0..p {
        for j in 0..i {
            entries[i * m + j] = entries[j * m + i].clone();
        }
    }
    let metric = PolyMetric::new(m, entries)?;
    let (h, t) = derivative_forms_at(f, &point[..p]);
    let psi = SymForm2::from_fn(m, |i, j| if i < p && j < p { h.get(i, j) } else { 0.0 });
    let psi1 = SymForm3::from_fn(m, |i, j, k| {
        if i < p && j < p && k < p {
            t.get(i, j, k)
        } else {
            0.0
        }
    });
    Ok(GfExample {
        p,
        metric,
        psi,
        psi1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realization::metric::MetricField;

    #[test]
    fn half_square_graph() {
        let f = Polynomial::monomial(vec![2, 0], 0.5);
        let g = build_graph_metric(2, &[f]).unwrap();
        assert_eq!(g.entry(0, 0).coefficient(&[0, 0]), 1.0);
        assert_eq!(g.entry(0, 0).coefficient(&[2, 0]), 1.0);
        assert!(g.entry(0, 1).is_zero());
        assert_eq!(g.entry(1, 1), &Polynomial::constant(2, 1.0));
    }

    #[test]
    fn empty_list_is_euclidean() {
        let g = build_graph_metric(3, &[]).unwrap();
        assert_eq!(g.eval(&[0.3, -1.0, 2.0]), nalgebra::DMatrix::identity(3, 3));
    }

    #[test]
    fn linear_term_rejected() {
        let f = Polynomial::from_terms(2, [(vec![1, 0], 1.0), (vec![2, 0], 1.0)]).unwrap();
        let ok = Polynomial::monomial(vec![0, 2], 1.0);
        assert!(matches!(
            build_graph_metric(2, &[ok, f]),
            Err(Error::NonzeroGradient { index: 1 })
        ));
    }

    #[test]
    fn hessian_examples() {
        let forms = hessian_forms(
            3,
            &[
                Polynomial::monomial(vec![2, 0, 0], 0.5),
                Polynomial::monomial(vec![3, 0, 0], 1.0),
                Polynomial::monomial(vec![1, 1, 1], 1.0),
            ],
        )
        .unwrap();
        assert_eq!(forms[0].0.get(0, 0), 1.0);
        assert_eq!(forms[0].1, SymForm3::zeros(3));
        assert_eq!(forms[1].0, SymForm2::zeros(3));
        assert_eq!(forms[1].1.get(0, 0, 0), 6.0);
        assert_eq!(forms[2].1.get(2, 0, 1), 1.0);
        assert_eq!(forms[2].1.get(0, 0, 1), 0.0);
    }

    #[test]
    fn gf_block_structure() {
        let f = Polynomial::monomial(vec![3], 1.0);
        let ex = build_gf_metric(&f, &[0.5, 0.0]).unwrap();
        let g = ex.metric.eval(&[0.5, 7.0]);
        assert!((g[(0, 0)] - 0.5625).abs() < 1e-15);
        assert_eq!((g[(0, 1)], g[(1, 0)], g[(1, 1)]), (1.0, 1.0, 0.0));
        assert_eq!(ex.psi.get(0, 0), 3.0);
        assert_eq!(ex.psi1.get(0, 0, 0), 6.0);
        assert_eq!(ex.psi.get(1, 1), 0.0);
    }
}
