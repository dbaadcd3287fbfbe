//! Curvature operators, their ranks and spectra, and the rank-`2m̄` construction.

mod curvature;
mod lemma21;
mod report;
mod sampling;

pub use curvature::{
    covderiv_matrix, covderiv_operator, curvature_matrix, curvature_operator, jacobi_matrix,
    jacobi_operator, self_adjoint_defect, skew_adjoint_defect, skew_operator, szabo_matrix,
    szabo_operator,
};
pub use lemma21::{lemma21_instance, Lemma21Instance};
pub use report::OperatorReport;
pub use sampling::{
    eigenvalue_constancy, nu1_lower_bound, nu_lower_bound, sample_unit, spectrum_spread, Causal,
    ConstancyReport, OperatorFamily, DEFAULT_SAMPLES,
};

impl Lemma21Instance {
    /// Designated `(ξ₁, ξ₂)` for [`nu_lower_bound`].
    pub fn designated_pair(&self) -> Vec<(Vec<f64>, Vec<f64>)> {
        vec![(self.xi1.clone(), self.xi2.clone())]
    }

    /// Designated `(ξ₁, ξ₂, ξ₃)` and `(ξ₁, ξ₂, ξ₁)` for [`nu1_lower_bound`].
    pub fn designated_triples(&self) -> Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        vec![
            (self.xi1.clone(), self.xi2.clone(), self.xi3.clone()),
            (self.xi1.clone(), self.xi2.clone(), self.xi1.clone()),
        ]
    }
}
