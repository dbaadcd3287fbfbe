//! The explicit construction certifying that curvature operators of
//! `m̄`-term sums can reach rank `2m̄`.
//!
//! Coordinates are ordered `e₁ … e_m̄, f₁ … f_m̄` followed by an optional
//! padding vector on which everything vanishes.

use crate::tensor_core::{build_a1, build_a_psi, ClassTensor, CovDerivTensor, CurvTensor, Space, SymForm2, SymForm3};

#[derive(Clone, Debug)]
pub struct Lemma21Instance {
    pub mbar: usize,
    pub m: usize,
    pub a: CurvTensor,
    pub a1: CovDerivTensor,
    pub xi1: Vec<f64>,
    pub xi2: Vec<f64>,
    pub xi3: Vec<f64>,
    pub psi_list: Vec<SymForm2>,
    pub psi1_list: Vec<SymForm3>,
}

impl Lemma21Instance {
    pub fn e(&self, i: usize) -> Vec<f64> {
        unit(self.m, i)
    }

    pub fn f(&self, i: usize) -> Vec<f64> {
        unit(self.m, self.mbar + i)
    }

    pub fn space(&self) -> Space {
        Space::riemannian(self.m).expect("m >= 2")
    }
}

fn unit(m: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; m];
    v[i] = 1.0;
    v
}

/// Builds the instance for `m = 2·mbar` (or `2·mbar + 1` with `odd_pad`).
///
/// # Panics
/// If `mbar == 0`.
pub fn lemma21_instance(mbar: usize, odd_pad: bool) -> Lemma21Instance {
    assert!(mbar >= 1, "mbar must be at least 1");
    let m = 2 * mbar + usize::from(odd_pad);
    let psi_list: Vec<SymForm2> = (0..mbar)
        .map(|i| {
            SymForm2::from_fn(m, |j, k| {
                if j == k && (j == i || j == mbar + i) {
                    1.0
                } else {
                    0.0
                }
            })
        })
        .collect();
    let psi1_list: Vec<SymForm3> = (0..mbar)
        .map(|i| {
            SymForm3::from_fn(m, |j, k, l| {
                if j == k && k == l && (j == i || j == mbar + i) {
                    1.0
                } else {
                    0.0
                }
            })
        })
        .collect();
    let mut a = CurvTensor::zeros(m);
    let mut a1 = CovDerivTensor::zeros(m);
    for (psi, psi1) in psi_list.iter().zip(&psi1_list) {
        a = a.add(&build_a_psi(psi)).expect("same m");
        a1 = a1.add(&build_a1(psi, psi1).expect("same m")).expect("same m");
    }
    let xi1: Vec<f64> = (0..m).map(|c| if c < mbar { 1.0 } else { 0.0 }).collect();
    let xi2: Vec<f64> = (0..m)
        .map(|c| if (mbar..2 * mbar).contains(&c) { 1.0 } else { 0.0 })
        .collect();
    let xi3 = xi1.iter().zip(&xi2).map(|(a, b)| a + b).collect();
    Lemma21Instance {
        mbar,
        m,
        a,
        a1,
        xi1,
        xi2,
        xi3,
        psi_list,
        psi1_list,
    }
}
