//! Curvature operators attached to `A ∈ 𝒜(V)` and `A₁ ∈ 𝒜₁(V)`.
//!
//! Each operator `M` is characterized by `g(M z, w) = B(z, w)` for a bilinear
//! form `B` obtained by contracting the tensor, so `M = g⁻¹ Bᵀ`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tensor_core::{ClassTensor, CovDerivTensor, CurvTensor, RawTensor, Space};
use crate::tol::ORTHONORMAL;

use super::report::OperatorReport;

fn check_dims(space: &Space, m: usize, vectors: &[&[f64]]) -> Result<()> {
    if m != space.m() {
        return Err(Error::DimensionMismatch {
            expected: space.m(),
            got: m,
        });
    }
    for v in vectors {
        space.expect_vector(v)?;
    }
    Ok(())
}

/// `M_{cd} = s_c B_{dc}` where `s` is the metric diagonal.
fn raise(space: &Space, b: &RawTensor) -> DMatrix<f64> {
    let m = space.m();
    let s = space.metric_diagonal();
    DMatrix::from_fn(m, m, |c, d| s[c] * b.get(&[d, c]))
}

/// `⟨ℛ_A(ξ₁,ξ₂)z, w⟩ = A(ξ₁,ξ₂,z,w)`.
pub fn curvature_operator(
    space: &Space,
    a: &CurvTensor,
    xi1: &[f64],
    xi2: &[f64],
) -> Result<OperatorReport> {
    Ok(OperatorReport::from_matrix(curvature_matrix(space, a, xi1, xi2)?))
}

pub fn curvature_matrix(space: &Space, a: &CurvTensor, xi1: &[f64], xi2: &[f64]) -> Result<DMatrix<f64>> {
    check_dims(space, a.m(), &[xi1, xi2])?;
    let b = a.raw().contract(0, xi1)?.contract(0, xi2)?;
    Ok(raise(space, &b))
}

/// `⟨ℛ_{A₁}(ξ₁,ξ₂,ξ₃)z, w⟩ = A₁(ξ₁,ξ₂,z,w;ξ₃)`.
pub fn covderiv_operator(
    space: &Space,
    a1: &CovDerivTensor,
    xi1: &[f64],
    xi2: &[f64],
    xi3: &[f64],
) -> Result<OperatorReport> {
    Ok(OperatorReport::from_matrix(covderiv_matrix(space, a1, xi1, xi2, xi3)?))
}

pub fn covderiv_matrix(
    space: &Space,
    a1: &CovDerivTensor,
    xi1: &[f64],
    xi2: &[f64],
    xi3: &[f64],
) -> Result<DMatrix<f64>> {
    check_dims(space, a1.m(), &[xi1, xi2, xi3])?;
    let b = a1
        .raw()
        .contract(4, xi3)?
        .contract(0, xi1)?
        .contract(0, xi2)?;
    Ok(raise(space, &b))
}

/// Jacobi operator, `g(J(x)y, z) = A(y, x, x, z)`.
pub fn jacobi_operator(space: &Space, a: &CurvTensor, x: &[f64]) -> Result<OperatorReport> {
    Ok(OperatorReport::from_matrix(jacobi_matrix(space, a, x)?))
}

pub fn jacobi_matrix(space: &Space, a: &CurvTensor, x: &[f64]) -> Result<DMatrix<f64>> {
    check_dims(space, a.m(), &[x])?;
    let b = a.raw().contract(1, x)?.contract(1, x)?;
    Ok(raise(space, &b))
}

/// Szabó operator, `g(J₁(x)y, z) = A₁(y, x, x, z; x)`.
pub fn szabo_operator(space: &Space, a1: &CovDerivTensor, x: &[f64]) -> Result<OperatorReport> {
    Ok(OperatorReport::from_matrix(szabo_matrix(space, a1, x)?))
}

pub fn szabo_matrix(space: &Space, a1: &CovDerivTensor, x: &[f64]) -> Result<DMatrix<f64>> {
    check_dims(space, a1.m(), &[x])?;
    let b = a1.raw().contract(4, x)?.contract(1, x)?.contract(1, x)?;
    Ok(raise(space, &b))
}

/// Skew-symmetric curvature operator of the oriented plane spanned by the
/// orthonormal pair `(e₁, e₂)`: `g(ℛ(π)y, z) = A(e₁, e₂, y, z)`.
pub fn skew_operator(space: &Space, a: &CurvTensor, e1: &[f64], e2: &[f64]) -> Result<OperatorReport> {
    check_dims(space, a.m(), &[e1, e2])?;
    let n1 = space.norm_sq(e1).abs();
    let n2 = space.norm_sq(e2).abs();
    let cross = space.inner(e1, e2);
    if (n1 - 1.0).abs() > ORTHONORMAL || (n2 - 1.0).abs() > ORTHONORMAL || cross.abs() > ORTHONORMAL {
        return Err(Error::NotOrthonormal(format!(
            "|g(e1,e1)| = {n1}, |g(e2,e2)| = {n2}, g(e1,e2) = {cross}"
        )));
    }
    curvature_operator(space, a, e1, e2)
}

/// Max entry of `Mᵀg + gM` (zero for skew-adjoint `M`).
pub fn skew_adjoint_defect(space: &Space, m: &DMatrix<f64>) -> f64 {
    let g = space.metric_matrix();
    (m.transpose() * &g + &g * m).amax()
}

/// Max entry of `gM − Mᵀg` (zero for self-adjoint `M`).
pub fn self_adjoint_defect(space: &Space, m: &DMatrix<f64>) -> f64 {
    let g = space.metric_matrix();
    (&g * m - m.transpose() * &g).amax()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::tensor_core::{build_a_psi, random_curv, SymForm2};

    #[test]
    fn equal_arguments_give_zero() {
        let space = Space::riemannian(3).unwrap();
        let a = random_curv(3, 1).unwrap();
        let x = [0.3, -1.0, 2.0];
        let r = curvature_operator(&space, &a, &x, &x).unwrap();
        assert!(r.matrix.amax() <= 1e-14);
    }

    #[test]
    fn jacobi_of_identity_generator() {
        let space = Space::riemannian(4).unwrap();
        let a = build_a_psi(&SymForm2::identity(4));
        let x = [0.5, 0.5, 0.5, 0.5];
        let r = jacobi_operator(&space, &a, &x).unwrap();
        let want = [0.0, 1.0, 1.0, 1.0];
        for (ev, w) in r.eigenvalues.iter().zip(want) {
            assert!((ev.0 - w).abs() < 1e-12 && ev.1.abs() < 1e-12);
        }
    }

    #[test]
    fn skew_operator_needs_orthonormal_pair() {
        let space = Space::riemannian(3).unwrap();
        let a = build_a_psi(&SymForm2::identity(3));
        assert!(skew_operator(&space, &a, &[1.0, 0.0, 0.0], &[1.0, 1.0, 0.0]).is_err());
        assert!(skew_operator(&space, &a, &[2.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).is_err());
        let r = skew_operator(&space, &a, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(r.numerical_rank, 2);
    }

    #[test]
    fn dimension_mismatch() {
        let space = Space::riemannian(3).unwrap();
        let a = random_curv(3, 2).unwrap();
        assert!(jacobi_operator(&space, &a, &[1.0, 0.0]).is_err());
        let other = Space::riemannian(4).unwrap();
        assert!(jacobi_operator(&other, &a, &[1.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn timelike_space_adjointness() {
        let space = Space::new(1, 3).unwrap();
        let mut rng = seeded(9);
        let a = build_a_psi(&SymForm2::random(4, &mut rng));
        let x = [0.2, 1.0, -0.4, 0.7];
        let y = [1.1, 0.1, 0.3, -0.2];
        let r = curvature_matrix(&space, &a, &x, &y).unwrap();
        assert!(skew_adjoint_defect(&space, &r) <= 1e-12 * (1.0 + r.amax()));
        let j = jacobi_matrix(&space, &a, &x).unwrap();
        assert!(self_adjoint_defect(&space, &j) <= 1e-12 * (1.0 + j.amax()));
    }
}
