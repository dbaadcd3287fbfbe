use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::numerical_rank;
use crate::rng::seeded;
use crate::tensor_core::{build_a1, build_a_psi, class_dimension, ClassKind, ClassTensor, SymForm2, SymForm3};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanReport {
    pub m: usize,
    pub kind: ClassKind,
    pub n_samples: usize,
    pub rank: usize,
    pub dimension: usize,
    pub full: bool,
}

/// Numerical rank of `n_samples` random generators, compared with the class
/// dimension.
pub fn span_check(m: usize, kind: ClassKind, n_samples: usize, seed: u64) -> Result<SpanReport> {
    let dimension = class_dimension(m, kind)?;
    if n_samples < dimension + 10 {
        return Err(Error::InsufficientSamples {
            needed: dimension + 10,
            got: n_samples,
        });
    }
    let mut rng = seeded(seed);
    let rows = m.pow(kind.order() as u32);
    let mut mat = DMatrix::zeros(rows, n_samples);
    for c in 0..n_samples {
        let psi = SymForm2::random(m, &mut rng);
        let col = match kind {
            ClassKind::Curv => build_a_psi(&psi).into_raw(),
            ClassKind::CovDeriv => {
                let psi1 = SymForm3::random(m, &mut rng);
                build_a1(&psi, &psi1)?.into_raw()
            }
        };
        mat.column_mut(c).copy_from_slice(col.data());
    }
    let rank = numerical_rank(&mat);
    Ok(SpanReport {
        m,
        kind,
        n_samples,
        rank,
        dimension,
        full: rank == dimension,
    })
}
