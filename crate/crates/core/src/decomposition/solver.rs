//! Levenberg–Marquardt over generator sums.
//!
//! Parameters are laid out term by term: the `i ≤ j` entries of `Ψ_i`,
//! followed by the `i ≤ j ≤ k` entries of `Ψ_{1,i}` when `Ψ₁` is unknown.

use nalgebra::{DMatrix, DVector};

use crate::tensor_core::{build_a1, build_a_psi, polarized_a_psi, ClassTensor, SymForm2, SymForm3};

/// Which blocks the residual contains and what they must match.
pub(crate) struct Problem<'a> {
    pub m: usize,
    pub lambdas: Vec<f64>,
    /// Normalized curvature target; residual block `Σλ_iA_{Ψ_i} − A`.
    pub curv: Option<&'a [f64]>,
    /// Normalized covariant-derivative target; residual block `Σ A_{1,Ψ_i,Ψ_{1,i}} − A₁`.
    pub covderiv: Option<&'a [f64]>,
}

impl Problem<'_> {
    pub fn terms(&self) -> usize {
        self.lambdas.len()
    }

    fn p2(&self) -> usize {
        SymForm2::param_count(self.m)
    }

    fn p3(&self) -> usize {
        if self.covderiv.is_some() {
            SymForm3::param_count(self.m)
        } else {
            0
        }
    }

    pub fn stride(&self) -> usize {
        self.p2() + self.p3()
    }

    pub fn param_len(&self) -> usize {
        self.stride() * self.terms()
    }

    pub fn psi(&self, theta: &[f64], i: usize) -> SymForm2 {
        let s = i * self.stride();
        SymForm2::from_params(self.m, &theta[s..s + self.p2()])
    }

    pub fn psi1(&self, theta: &[f64], i: usize) -> Option<SymForm3> {
        self.covderiv.map(|_| {
            let s = i * self.stride() + self.p2();
            SymForm3::from_params(self.m, &theta[s..s + self.p3()])
        })
    }

    fn curv_len(&self) -> usize {
        self.curv.map_or(0, <[f64]>::len)
    }

    fn residual_len(&self) -> usize {
        self.curv_len() + self.covderiv.map_or(0, <[f64]>::len)
    }

    pub fn residual(&self, theta: &[f64]) -> DVector<f64> {
        let mut r = DVector::zeros(self.residual_len());
        let nc = self.curv_len();
        if let Some(t) = self.curv {
            for (ri, ti) in r.iter_mut().zip(t) {
                *ri = -ti;
            }
        }
        if let Some(t) = self.covderiv {
            for (ri, ti) in r.iter_mut().skip(nc).zip(t) {
                *ri = -ti;
            }
        }
        for i in 0..self.terms() {
            let psi = self.psi(theta, i);
            if self.curv.is_some() {
                let a = build_a_psi(&psi);
                for (ri, v) in r.iter_mut().zip(a.raw().data()) {
                    *ri += self.lambdas[i] * v;
                }
            }
            if let Some(psi1) = self.psi1(theta, i) {
                let a1 = build_a1(&psi, &psi1).expect("same dimension");
                for (ri, v) in r.iter_mut().skip(nc).zip(a1.raw().data()) {
                    *ri += v;
                }
            }
        }
        r
    }

    /// Jacobian columns for the parameters of terms in `active`.
    fn jacobian(&self, theta: &[f64], active: std::ops::Range<usize>) -> DMatrix<f64> {
        let (p2, p3, stride) = (self.p2(), self.p3(), self.stride());
        let nc = self.curv_len();
        let mut jac = DMatrix::zeros(self.residual_len(), active.len() * stride);
        let mut unit2 = vec![0.0; p2];
        let mut unit3 = vec![0.0; p3];
        for (slot, i) in active.enumerate() {
            let psi = self.psi(theta, i);
            let psi1 = self.psi1(theta, i);
            for p in 0..p2 {
                unit2[p] = 1.0;
                let e = SymForm2::from_params(self.m, &unit2);
                unit2[p] = 0.0;
                let mut col = jac.column_mut(slot * stride + p);
                if self.curv.is_some() {
                    let d = polarized_a_psi(&psi, &e).expect("same dimension");
                    for (c, v) in col.iter_mut().zip(d.raw().data()) {
                        *c = 2.0 * self.lambdas[i] * v;
                    }
                }
                if let Some(psi1) = &psi1 {
                    let d = build_a1(&e, psi1).expect("same dimension");
                    for (c, v) in col.iter_mut().skip(nc).zip(d.raw().data()) {
                        *c = *v;
                    }
                }
            }
            for q in 0..p3 {
                unit3[q] = 1.0;
                let f = SymForm3::from_params(self.m, &unit3);
                unit3[q] = 0.0;
                let d = build_a1(&psi, &f).expect("same dimension");
                let mut col = jac.column_mut(slot * stride + p2 + q);
                for (c, v) in col.iter_mut().skip(nc).zip(d.raw().data()) {
                    *c = *v;
                }
            }
        }
        jac
    }

    /// Damped Gauss–Newton on the parameters of the terms in `active`;
    /// returns the final residual norm.
    pub fn levenberg_marquardt(
        &self,
        theta: &mut [f64],
        active: std::ops::Range<usize>,
        max_iterations: usize,
        target_norm: f64,
    ) -> f64 {
        let offset = active.start * self.stride();
        let mut r = self.residual(theta);
        let mut cost = r.norm_squared();
        let mut mu = 1e-3;
        let mut stalls = 0;
        for _ in 0..max_iterations {
            if cost.sqrt() <= target_norm {
                break;
            }
            let jac = self.jacobian(theta, active.clone());
            let jtj = jac.transpose() * &jac;
            let g = jac.transpose() * &r;
            let scale = jtj.diagonal().amax().max(1e-300);
            let mut accepted = false;
            while mu < 1e12 {
                let mut lhs = jtj.clone();
                for d in 0..lhs.nrows() {
                    lhs[(d, d)] += mu * scale;
                }
                let Some(chol) = lhs.cholesky() else {
                    mu *= 4.0;
                    continue;
                };
                let step = chol.solve(&g);
                let mut trial = theta.to_vec();
                for (t, s) in trial[offset..].iter_mut().zip(step.iter()) {
                    *t -= s;
                }
                let rt = self.residual(&trial);
                let ct = rt.norm_squared();
                if ct < cost {
                    let improvement = (cost - ct) / cost.max(1e-300);
                    theta.copy_from_slice(&trial);
                    r = rt;
                    cost = ct;
                    mu = (mu / 3.0).max(1e-12);
                    accepted = true;
                    stalls = if improvement < 1e-12 { stalls + 1 } else { 0 };
                    break;
                }
                mu *= 4.0;
            }
            if !accepted || stalls >= 3 {
                break;
            }
        }
        cost.sqrt()
    }
}
