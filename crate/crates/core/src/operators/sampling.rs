//! Sampling-based certificates: rank lower bounds for `ν`, `ν₁` and
//! eigenvalue constancy on unit pseudo-spheres.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{normal_vec, seeded, Rng};
use crate::tensor_core::{CovDerivTensor, CurvTensor, Space};
use crate::tol::NULL_REJECT;

use super::curvature::{covderiv_operator, curvature_operator, jacobi_operator, szabo_operator};

/// Default number of random argument tuples for the lower-bound samplers.
pub const DEFAULT_SAMPLES: usize = 64;

/// `⌈(max sampled rank of ℛ_A)/2⌉`, a certified lower bound for `ν(A)`.
///
/// `designated` pairs are evaluated in addition to `n_samples` Gaussian pairs.
pub fn nu_lower_bound(
    space: &Space,
    a: &CurvTensor,
    n_samples: usize,
    seed: u64,
    designated: &[(Vec<f64>, Vec<f64>)],
) -> Result<usize> {
    let mut rng = seeded(seed);
    let m = space.m();
    let mut best = 0;
    for (x, y) in designated {
        best = best.max(curvature_operator(space, a, x, y)?.numerical_rank);
    }
    for _ in 0..n_samples {
        let x = normal_vec(&mut rng, m);
        let y = normal_vec(&mut rng, m);
        best = best.max(curvature_operator(space, a, &x, &y)?.numerical_rank);
    }
    Ok(best.div_ceil(2))
}

/// `⌈(max sampled rank of ℛ_{A₁})/4⌉`, a certified lower bound for `ν₁(A₁)`.
///
/// A single generator gives `⟨ℛ z, w⟩ = (a∧c + b∧d)(z, w)` with
/// `a = Ψ(ξ₂,·)`, `b = Ψ₁(ξ₂,·,ξ₃)`, `c = Ψ₁(ξ₁,·,ξ₃)`, `d = Ψ(ξ₁,·)`, which has
/// rank 4 for generic data once `m ≥ 4`. Dividing by 2 would overstate the
/// bound.
pub fn nu1_lower_bound(
    space: &Space,
    a1: &CovDerivTensor,
    n_samples: usize,
    seed: u64,
    designated: &[(Vec<f64>, Vec<f64>, Vec<f64>)],
) -> Result<usize> {
    let mut rng = seeded(seed);
    let m = space.m();
    let mut best = 0;
    for (x, y, z) in designated {
        best = best.max(covderiv_operator(space, a1, x, y, z)?.numerical_rank);
    }
    for _ in 0..n_samples {
        let x = normal_vec(&mut rng, m);
        let y = normal_vec(&mut rng, m);
        let z = normal_vec(&mut rng, m);
        best = best.max(covderiv_operator(space, a1, &x, &y, &z)?.numerical_rank);
    }
    Ok(best.div_ceil(4))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Causal {
    Spacelike,
    Timelike,
}

impl Causal {
    pub fn name(self) -> &'static str {
        match self {
            Causal::Spacelike => "spacelike",
            Causal::Timelike => "timelike",
        }
    }
}

/// Which operator family to sample.
#[derive(Clone, Copy, Debug)]
pub enum OperatorFamily<'a> {
    Jacobi(&'a CurvTensor),
    Szabo(&'a CovDerivTensor),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstancyReport {
    pub constant: bool,
    /// Largest absolute pairwise spread.
    pub max_spread: f64,
    /// Largest spread divided by `max(1, σ_max)` of the two operators compared.
    pub max_relative_spread: f64,
    pub samples: usize,
}

const MAX_ATTEMPTS_PER_SAMPLE: usize = 10_000;

/// Draws a vector with `g(x,x) = ±1`, rejecting `|g(x,x)| < 1e-6` before scaling.
pub fn sample_unit(space: &Space, causal: Causal, rng: &mut Rng) -> Result<Vec<f64>> {
    let (p, q) = space.signature();
    match causal {
        Causal::Spacelike if q == 0 => return Err(Error::EmptySphere("spacelike")),
        Causal::Timelike if p == 0 => return Err(Error::EmptySphere("timelike")),
        _ => {}
    }
    let sign = match causal {
        Causal::Spacelike => 1.0,
        Causal::Timelike => -1.0,
    };
    for _ in 0..MAX_ATTEMPTS_PER_SAMPLE {
        let x = normal_vec(rng, space.m());
        let n = space.norm_sq(&x) * sign;
        if n >= NULL_REJECT {
            let s = n.sqrt().recip();
            return Ok(x.into_iter().map(|v| v * s).collect());
        }
    }
    Err(Error::InvalidInput(format!(
        "could not draw a {} unit vector",
        causal.name()
    )))
}

/// Max elementwise distance between two eigenvalue lists sorted by `(re, im)`.
pub fn spectrum_spread(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| ((x.0 - y.0).powi(2) + (x.1 - y.1).powi(2)).sqrt())
        .fold(0.0, f64::max)
}

/// Samples unit vectors and compares the eigenvalue multisets of the chosen
/// operator; constant iff every pairwise spread is at most `tol·max(1, σ_max)`.
///
/// The scaling matters for non-normal operators: a nilpotent `J₁(x)` with
/// `J₁(x)² = 0` has computed eigenvalues of size `√ε·σ_max`, and on an
/// indefinite unit sphere `σ_max` is unbounded.
pub fn eigenvalue_constancy(
    space: &Space,
    family: OperatorFamily<'_>,
    causal: Causal,
    n_samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ConstancyReport> {
    let mut rng = seeded(seed);
    let mut spectra = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let x = sample_unit(space, causal, &mut rng)?;
        let report = match family {
            OperatorFamily::Jacobi(a) => jacobi_operator(space, a, &x)?,
            OperatorFamily::Szabo(a1) => szabo_operator(space, a1, &x)?,
        };
        let scale = report.singular_values.first().copied().unwrap_or(0.0).max(1.0);
        spectra.push((report.eigenvalues, scale));
    }
    let mut max_spread = 0.0_f64;
    let mut max_relative_spread = 0.0_f64;
    for i in 0..spectra.len() {
        for j in i + 1..spectra.len() {
            let d = spectrum_spread(&spectra[i].0, &spectra[j].0);
            max_spread = max_spread.max(d);
            max_relative_spread = max_relative_spread.max(d / spectra[i].1.max(spectra[j].1));
        }
    }
    Ok(ConstancyReport {
        constant: max_relative_spread <= tol,
        max_spread,
        max_relative_spread,
        samples: n_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor_core::{build_a_psi, random_curv, ClassTensor, SymForm2};

    #[test]
    fn empty_spheres() {
        let riem = Space::riemannian(3).unwrap();
        let mut rng = seeded(0);
        assert!(matches!(
            sample_unit(&riem, Causal::Timelike, &mut rng),
            Err(Error::EmptySphere("timelike"))
        ));
        let neg = Space::new(2, 0).unwrap();
        assert!(sample_unit(&neg, Causal::Spacelike, &mut rng).is_err());
    }

    #[test]
    fn unit_vectors_have_unit_norm() {
        let s = Space::new(2, 3).unwrap();
        let mut rng = seeded(4);
        for causal in [Causal::Spacelike, Causal::Timelike] {
            for _ in 0..20 {
                let x = sample_unit(&s, causal, &mut rng).unwrap();
                let want = if causal == Causal::Spacelike { 1.0 } else { -1.0 };
                assert!((s.norm_sq(&x) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_tensor_bounds() {
        let s = Space::riemannian(4).unwrap();
        assert_eq!(nu_lower_bound(&s, &CurvTensor::zeros(4), 16, 1, &[]).unwrap(), 0);
        assert_eq!(nu1_lower_bound(&s, &CovDerivTensor::zeros(4), 16, 1, &[]).unwrap(), 0);
    }

    #[test]
    fn single_covderiv_generator_reaches_rank_four() {
        use crate::tensor_core::{build_a1, SymForm3};
        let s = Space::riemannian(4).unwrap();
        let mut rng = seeded(21);
        let a1 = build_a1(&SymForm2::random(4, &mut rng), &SymForm3::random(4, &mut rng)).unwrap();
        let x = normal_vec(&mut rng, 4);
        let y = normal_vec(&mut rng, 4);
        let z = normal_vec(&mut rng, 4);
        assert_eq!(covderiv_operator(&s, &a1, &x, &y, &z).unwrap().numerical_rank, 4);
        assert_eq!(nu1_lower_bound(&s, &a1, 32, 5, &[]).unwrap(), 1);
    }

    #[test]
    fn identity_generator_is_osserman() {
        let s = Space::riemannian(4).unwrap();
        let a = build_a_psi(&SymForm2::identity(4));
        let r = eigenvalue_constancy(&s, OperatorFamily::Jacobi(&a), Causal::Spacelike, 20, 3, 1e-9)
            .unwrap();
        assert!(r.constant, "spread {}", r.max_spread);
    }

    #[test]
    fn random_tensor_is_not_osserman() {
        let s = Space::riemannian(4).unwrap();
        let a = random_curv(4, 8).unwrap();
        let r = eigenvalue_constancy(&s, OperatorFamily::Jacobi(&a), Causal::Spacelike, 20, 3, 1e-6)
            .unwrap();
        assert!(!r.constant);
        assert!(r.max_spread > 1e-3);
    }
}
