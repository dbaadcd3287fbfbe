//! Dense tensors, the two symmetry classes, generators and projection.

mod forms;
pub mod io;
mod projector;
mod space;
mod tensor;

pub use forms::{SymForm2, SymForm3};
pub use projector::{
    class_dimension, project, project_covderiv, project_curv, random_covderiv, random_curv,
    random_element, ClassProjector,
};
pub use space::Space;
pub use tensor::{
    build_a1, build_a_psi, check_symmetries, polarized_a_psi, ClassKind, ClassTensor,
    CovDerivTensor, CurvTensor, RawTensor, SymmetryReport,
};

/// Closed-form dimension of `𝒜(V)`: `m²(m²−1)/12`.
pub fn curv_dimension_formula(m: usize) -> usize {
    m * m * (m * m - 1) / 12
}

/// Closed-form dimension of `𝒜₁(V)`: `m²(m²−1)(m+2)/24`.
pub fn covderiv_dimension_formula(m: usize) -> usize {
    m * m * (m * m - 1) * (m + 2) / 24
}
