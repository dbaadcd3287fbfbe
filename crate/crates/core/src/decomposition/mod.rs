//! Generator decompositions `A = Σ λ_i A_{Ψ_i}` and `A₁ = Σ A_{1,Ψ_i,Ψ_{1,i}}`,
//! span verification, and certified bounds on the term count.

mod bounds;
mod decompose;
mod solver;
mod span;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::tensor_core::{
    build_a1, build_a_psi, ClassTensor, CovDerivTensor, CurvTensor, SymForm2, SymForm3,
};
use crate::tol::DECOMPOSITION;

pub use bounds::{certify_bounds, Bounds};
pub use decompose::{decompose_covderiv, decompose_curv, decompose_from_embedding, decompose_pair};
pub use span::{span_check, SpanReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetKind {
    Curv,
    Pair,
    Covderiv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every `λ_i = 1`.
    Unsigned,
    /// `λ_i ∈ {−1, +1}`; restart `r` uses `r mod (k+1)` negative signs.
    Signed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub max_terms: usize,
    pub restarts: usize,
    pub max_iterations: usize,
    /// Relative residual counted as success.
    pub tolerance: f64,
    pub seed: u64,
    pub mode: Mode,
    pub init_scale: f64,
    /// Per-term alternating passes before the joint refinement.
    pub alternating_sweeps: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_terms: 1,
            restarts: 20,
            max_iterations: 200,
            tolerance: DECOMPOSITION,
            seed: 0,
            mode: Mode::Unsigned,
            init_scale: 1.0,
            alternating_sweeps: 2,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 1 {
            return Err(Error::InvalidInput("max_terms must be at least 1".into()));
        }
        if self.restarts < 1 {
            return Err(Error::InvalidInput("restarts must be at least 1".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidInput("tolerance must be positive".into()));
        }
        if !(self.init_scale > 0.0 && self.init_scale.is_finite()) {
            return Err(Error::InvalidInput("init_scale must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub lambda: f64,
    pub psi: SymForm2,
    pub psi1: Option<SymForm3>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub m: usize,
    pub terms: Vec<Term>,
    pub target_kind: TargetKind,
    pub residual_curv: f64,
    pub residual_covderiv: f64,
    pub term_count: usize,
}

/// `‖target − approx‖/‖target‖`, or `‖approx‖` when the target vanishes.
pub fn relative_residual<T: ClassTensor>(target: &T, approx: &T) -> f64 {
    let diff = target.sub(approx).expect("same dimension").norm();
    let n = target.norm();
    if n > 0.0 {
        diff / n
    } else {
        diff
    }
}

impl Decomposition {
    pub(crate) fn new(m: usize, terms: Vec<Term>, target_kind: TargetKind) -> Self {
        let term_count = terms.len();
        Decomposition {
            m,
            terms,
            target_kind,
            residual_curv: 0.0,
            residual_covderiv: 0.0,
            term_count,
        }
    }

    /// `Σ λ_i A_{Ψ_i}`.
    pub fn reconstruct_curv(&self) -> CurvTensor {
        let mut out = CurvTensor::zeros(self.m);
        for t in &self.terms {
            out = out.add(&build_a_psi(&t.psi).scaled(t.lambda)).expect("same dimension");
        }
        out
    }

    /// `Σ λ_i A_{1,Ψ_i,Ψ_{1,i}}`; terms without `Ψ₁` contribute nothing.
    pub fn reconstruct_covderiv(&self) -> CovDerivTensor {
        let mut out = CovDerivTensor::zeros(self.m);
        for t in &self.terms {
            if let Some(psi1) = &t.psi1 {
                let g = build_a1(&t.psi, psi1).expect("same dimension");
                out = out.add(&g.scaled(t.lambda)).expect("same dimension");
            }
        }
        out
    }

    /// Recomputes the stored residuals against the given targets.
    pub(crate) fn with_residuals(mut self, a: Option<&CurvTensor>, a1: Option<&CovDerivTensor>) -> Self {
        self.residual_curv = a.map_or(0.0, |a| relative_residual(a, &self.reconstruct_curv()));
        self.residual_covderiv =
            a1.map_or(0.0, |a1| relative_residual(a1, &self.reconstruct_covderiv()));
        self
    }

    /// Largest of the two stored residuals.
    pub fn residual(&self) -> f64 {
        self.residual_curv.max(self.residual_covderiv)
    }

    pub fn succeeded(&self, tolerance: f64) -> bool {
        self.residual() <= tolerance
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|t| {
                let m = self.m;
                let psi: Vec<Vec<f64>> =
                    (0..m).map(|i| (0..m).map(|j| t.psi.get(i, j)).collect()).collect();
                let mut v = json!({ "lambda": t.lambda, "psi": psi });
                if let Some(p1) = &t.psi1 {
                    let psi1: Vec<Vec<Vec<f64>>> = (0..m)
                        .map(|i| {
                            (0..m)
                                .map(|j| (0..m).map(|k| p1.get(i, j, k)).collect())
                                .collect()
                        })
                        .collect();
                    v["psi1"] = json!(psi1);
                }
                v
            })
            .collect();
        json!({
            "m": self.m,
            "target_kind": self.target_kind,
            "terms": terms,
            "residual_curv": self.residual_curv,
            "residual_covderiv": self.residual_covderiv,
            "term_count": self.term_count,
        })
    }
}

#[cfg(test)]
mod tests;
