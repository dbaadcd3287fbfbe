//! Numerical toolkit for algebraic curvature tensors.
//!
//! The crate builds the generator tensors `A_Ψ` and `A_{1,Ψ,Ψ₁}` from symmetric
//! forms, checks the Riemann and covariant-derivative symmetry identities,
//! evaluates the associated curvature operators (two- and three-argument,
//! Jacobi, Szabó, skew-symmetric), realizes a pair `(A, A₁)` as the curvature
//! jets of an explicit polynomial metric germ, and searches for short
//! generator decompositions.
//!
//! Everything works on dense arrays at desk scale (`m ≤ 6`).

pub mod cli;
pub mod decomposition;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod realization;
pub mod rng;
pub mod tensor_core;
pub mod tol;

pub use error::{Error, Result};
pub use tensor_core::{
    build_a1, build_a_psi, ClassKind, CovDerivTensor, CurvTensor, RawTensor, Space, SymForm2,
    SymForm3,
};
