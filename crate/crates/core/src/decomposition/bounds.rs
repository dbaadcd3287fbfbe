use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{nu1_lower_bound, nu_lower_bound, DEFAULT_SAMPLES};
use crate::tensor_core::{ClassTensor, CovDerivTensor, CurvTensor, Space};

use super::{decompose_covderiv, decompose_curv, SolverConfig};

/// Empirical bracket for `ν(A)` and `ν₁(A₁)`. An upper bound is `None` when no
/// witness was found within `½m(m+1)` terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub lower: usize,
    pub upper: Option<usize>,
    pub lower1: usize,
    pub upper1: Option<usize>,
}

/// Lower bounds from sampled operator ranks; upper bounds from the smallest
/// term count, searched upward from the lower bound, at which a
/// decomposition meets `config.tolerance`.
pub fn certify_bounds(
    space: &Space,
    a: &CurvTensor,
    a1: &CovDerivTensor,
    config: &SolverConfig,
    designated: &[(Vec<f64>, Vec<f64>)],
    designated1: &[(Vec<f64>, Vec<f64>, Vec<f64>)],
) -> Result<Bounds> {
    if !space.is_riemannian() {
        let (p, q) = space.signature();
        return Err(Error::InvalidSignature { p, q, m: space.m() });
    }
    let m = space.m();
    let cap = m * (m + 1) / 2;
    let lower = nu_lower_bound(space, a, DEFAULT_SAMPLES, config.seed, designated)?;
    let lower1 = nu1_lower_bound(space, a1, DEFAULT_SAMPLES, config.seed, designated1)?;

    let upper = if a.norm() == 0.0 {
        Some(0)
    } else {
        let mut found = None;
        for k in lower.max(1)..=cap {
            let cfg = SolverConfig {
                max_terms: k,
                ..config.clone()
            };
            if decompose_curv(a, &cfg)?.succeeded(config.tolerance) {
                found = Some(k);
                break;
            }
        }
        found
    };
    let upper1 = if a1.norm() == 0.0 {
        Some(0)
    } else {
        let mut found = None;
        for k in lower1.max(1)..=cap {
            let cfg = SolverConfig {
                max_terms: k,
                ..config.clone()
            };
            if decompose_covderiv(a1, &cfg)?.succeeded(config.tolerance) {
                found = Some(k);
                break;
            }
        }
        found
    };
    Ok(Bounds {
        lower,
        upper,
        lower1,
        upper1,
    })
}
