use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{normal, Rng};

use super::forms::{SymForm2, SymForm3};

/// The two symmetry classes: `𝒜(V) ⊂ ⊗⁴V*` and `𝒜₁(V) ⊂ ⊗⁵V*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassKind {
    Curv,
    CovDeriv,
}

impl ClassKind {
    pub fn order(self) -> usize {
        match self {
            ClassKind::Curv => 4,
            ClassKind::CovDeriv => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassKind::Curv => "curv",
            ClassKind::CovDeriv => "covderiv",
        }
    }
}

/// Dense real array of shape `m × … × m` (row-major, last index fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct RawTensor {
    m: usize,
    order: usize,
    data: Vec<f64>,
}

impl RawTensor {
    pub fn zeros(m: usize, order: usize) -> Self {
        RawTensor {
            m,
            order,
            data: vec![0.0; m.pow(order as u32)],
        }
    }

    pub fn from_vec(m: usize, order: usize, data: Vec<f64>) -> Result<Self> {
        let expected = m.pow(order as u32);
        if data.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: data.len(),
            });
        }
        Ok(RawTensor { m, order, data })
    }

    /// Seeded i.i.d. standard-normal entries.
    pub fn random_normal(m: usize, order: usize, rng: &mut Rng) -> Self {
        let n = m.pow(order as u32);
        RawTensor {
            m,
            order,
            data: (0..n).map(|_| normal(rng)).collect(),
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.m + i)
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.order];
        for slot in (0..self.order).rev() {
            out[slot] = flat % self.m;
            flat /= self.m;
        }
        out
    }

    #[inline]
    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flat_index(idx)]
    }

    #[inline]
    pub fn set(&mut self, idx: &[usize], v: f64) {
        let k = self.flat_index(idx);
        self.data[k] = v;
    }

    pub fn norm_inf(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn expect_same_shape(&self, other: &Self) -> Result<()> {
        if self.m != other.m || self.order != other.order {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(())
    }

    /// Component-wise Euclidean inner product.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.expect_same_shape(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.expect_same_shape(other)?;
        Ok(RawTensor {
            m: self.m,
            order: self.order,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, c: f64) -> Self {
        RawTensor {
            m: self.m,
            order: self.order,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add_scaled_in_place(&mut self, c: f64, other: &Self) -> Result<()> {
        self.expect_same_shape(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.expect_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |a, (x, y)| a.max((x - y).abs())))
    }

    /// Contracts `slot` against `v`, lowering the order by one.
    pub fn contract(&self, slot: usize, v: &[f64]) -> Result<Self> {
        if slot >= self.order {
            return Err(Error::InvalidInput(format!(
                "slot {slot} out of range for order {}",
                self.order
            )));
        }
        if v.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: v.len(),
            });
        }
        let m = self.m;
        let inner = m.pow((self.order - 1 - slot) as u32);
        let outer = m.pow(slot as u32);
        let mut out = RawTensor::zeros(m, self.order - 1);
        for o in 0..outer {
            for (a, &va) in v.iter().enumerate() {
                if va == 0.0 {
                    continue;
                }
                let src = (o * m + a) * inner;
                let dst = o * inner;
                for r in 0..inner {
                    out.data[dst + r] += va * self.data[src + r];
                }
            }
        }
        Ok(out)
    }

    /// Change of basis on every slot: `T'_{a…} = Σ T_{i…} B_{ia} …`.
    pub fn pullback(&self, basis: &nalgebra::DMatrix<f64>) -> Result<Self> {
        let m = self.m;
        if basis.nrows() != m || basis.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: basis.nrows(),
            });
        }
        let mut cur = self.clone();
        for slot in 0..self.order {
            let inner = m.pow((self.order - 1 - slot) as u32);
            let outer = m.pow(slot as u32);
            let mut next = RawTensor::zeros(m, self.order);
            for o in 0..outer {
                for a in 0..m {
                    let dst = (o * m + a) * inner;
                    for i in 0..m {
                        let b = basis[(i, a)];
                        if b == 0.0 {
                            continue;
                        }
                        let src = (o * m + i) * inner;
                        for r in 0..inner {
                            next.data[dst + r] += b * cur.data[src + r];
                        }
                    }
                }
            }
            cur = next;
        }
        Ok(cur)
    }
}

/// Maximal violation of each defining identity, together with `‖t‖∞`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub antisymmetry: f64,
    pub pair_symmetry: f64,
    pub first_bianchi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_bianchi: Option<f64>,
    pub norm_inf: f64,
}

impl SymmetryReport {
    pub fn max_violation(&self) -> f64 {
        self.antisymmetry
            .max(self.pair_symmetry)
            .max(self.first_bianchi)
            .max(self.second_bianchi.unwrap_or(0.0))
    }

    /// All violations at most `tol · ‖t‖∞`.
    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation() <= tol * self.norm_inf
    }
}

/// Evaluates the identities of `kind` on a raw array of the matching order.
pub fn check_symmetries(kind: ClassKind, t: &RawTensor) -> Result<SymmetryReport> {
    if t.order() != kind.order() {
        return Err(Error::InvalidInput(format!(
            "{} tensors have order {}, got {}",
            kind.name(),
            kind.order(),
            t.order()
        )));
    }
    let m = t.m();
    let mut rep = SymmetryReport {
        antisymmetry: 0.0,
        pair_symmetry: 0.0,
        first_bianchi: 0.0,
        second_bianchi: (kind == ClassKind::CovDeriv).then_some(0.0),
        norm_inf: t.norm_inf(),
    };
    let fifth = if kind == ClassKind::CovDeriv { m } else { 1 };
    for n in 0..fifth {
        let at = |i: usize, j: usize, k: usize, l: usize| match kind {
            ClassKind::Curv => t.get(&[i, j, k, l]),
            ClassKind::CovDeriv => t.get(&[i, j, k, l, n]),
        };
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let v = at(i, j, k, l);
                        rep.antisymmetry = rep.antisymmetry.max((v + at(j, i, k, l)).abs());
                        rep.pair_symmetry = rep.pair_symmetry.max((v - at(k, l, i, j)).abs());
                        rep.first_bianchi = rep
                            .first_bianchi
                            .max((v + at(j, k, i, l) + at(k, i, j, l)).abs());
                    }
                }
            }
        }
    }
    if kind == ClassKind::CovDeriv {
        let mut worst = 0.0_f64;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        for n in 0..m {
                            let s = t.get(&[i, j, k, l, n])
                                + t.get(&[i, j, l, n, k])
                                + t.get(&[i, j, n, k, l]);
                            worst = worst.max(s.abs());
                        }
                    }
                }
            }
        }
        rep.second_bianchi = Some(worst);
    }
    Ok(rep)
}

/// Shared behaviour of the two symmetry classes.
pub trait ClassTensor: Sized + Clone {
    const KIND: ClassKind;

    fn raw(&self) -> &RawTensor;

    fn into_raw(self) -> RawTensor;

    /// Wraps an array without validating the identities.
    fn from_raw_unchecked(raw: RawTensor) -> Self;

    /// Wraps an array whose identities hold to within `rel_tol · ‖t‖∞`.
    fn try_from_raw(raw: RawTensor, rel_tol: f64) -> Result<Self> {
        let rep = check_symmetries(Self::KIND, &raw)?;
        if !rep.passes(rel_tol) {
            return Err(Error::Symmetry {
                what: Self::KIND.name(),
                violation: rep.max_violation(),
                limit: rel_tol * rep.norm_inf,
            });
        }
        Ok(Self::from_raw_unchecked(raw))
    }

    fn zeros(m: usize) -> Self {
        Self::from_raw_unchecked(RawTensor::zeros(m, Self::KIND.order()))
    }

    fn m(&self) -> usize {
        self.raw().m()
    }

    fn check(&self) -> SymmetryReport {
        check_symmetries(Self::KIND, self.raw()).expect("order matches kind")
    }

    fn inner(&self, other: &Self) -> Result<f64> {
        self.raw().inner(other.raw())
    }

    fn norm(&self) -> f64 {
        self.raw().norm()
    }

    fn norm_inf(&self) -> f64 {
        self.raw().norm_inf()
    }

    fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self::from_raw_unchecked(self.raw().add(other.raw())?))
    }

    fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self::from_raw_unchecked(self.raw().sub(other.raw())?))
    }

    fn scaled(&self, c: f64) -> Self {
        Self::from_raw_unchecked(self.raw().scaled(c))
    }

    fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.raw().max_abs_diff(other.raw())
    }
}

/// An element of `𝒜(V)`: antisymmetric in the first pair, pair symmetric, first Bianchi.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvTensor(RawTensor);

/// An element of `𝒜₁(V)`; the fifth index is the derivative slot.
#[derive(Clone, Debug, PartialEq)]
pub struct CovDerivTensor(RawTensor);

impl ClassTensor for CurvTensor {
    const KIND: ClassKind = ClassKind::Curv;
    fn raw(&self) -> &RawTensor {
        &self.0
    }
    fn into_raw(self) -> RawTensor {
        self.0
    }
    fn from_raw_unchecked(raw: RawTensor) -> Self {
        debug_assert_eq!(raw.order(), 4);
        CurvTensor(raw)
    }
}

impl ClassTensor for CovDerivTensor {
    const KIND: ClassKind = ClassKind::CovDeriv;
    fn raw(&self) -> &RawTensor {
        &self.0
    }
    fn into_raw(self) -> RawTensor {
        self.0
    }
    fn from_raw_unchecked(raw: RawTensor) -> Self {
        debug_assert_eq!(raw.order(), 5);
        CovDerivTensor(raw)
    }
}

impl CurvTensor {
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.0.get(&[i, j, k, l])
    }

    /// `A(x, y, z, w)`.
    pub fn eval(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> Result<f64> {
        let r = self.0.contract(0, x)?.contract(0, y)?.contract(0, z)?.contract(0, w)?;
        Ok(r.data()[0])
    }
}

impl CovDerivTensor {
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize, n: usize) -> f64 {
        self.0.get(&[i, j, k, l, n])
    }
}

/// `A_Ψ(x,y,z,w) = Ψ(x,w)Ψ(y,z) − Ψ(x,z)Ψ(y,w)`.
pub fn build_a_psi(psi: &SymForm2) -> CurvTensor {
    polarized_a_psi(psi, psi).expect("same dimension")
}

/// The symmetric bilinear map `B(X, Y)` with `B(Ψ, Ψ) = A_Ψ`.
pub fn polarized_a_psi(x: &SymForm2, y: &SymForm2) -> Result<CurvTensor> {
    let m = x.m();
    if y.m() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: y.m(),
        });
    }
    let mut out = RawTensor::zeros(m, 4);
    let d = out.data_mut();
    let mut n = 0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    d[n] = 0.5
                        * (x.get(i, l) * y.get(j, k) + y.get(i, l) * x.get(j, k)
                            - x.get(i, k) * y.get(j, l)
                            - y.get(i, k) * x.get(j, l));
                    n += 1;
                }
            }
        }
    }
    Ok(CurvTensor(out))
}

/// `A_{1,Ψ,Ψ₁}(x,y,z,w;v) = Ψ₁(x,w,v)Ψ(y,z) + Ψ(x,w)Ψ₁(y,z,v) − Ψ₁(x,z,v)Ψ(y,w) − Ψ(x,z)Ψ₁(y,w,v)`.
pub fn build_a1(psi: &SymForm2, psi1: &SymForm3) -> Result<CovDerivTensor> {
    let m = psi.m();
    if psi1.m() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: psi1.m(),
        });
    }
    let mut out = RawTensor::zeros(m, 5);
    let d = out.data_mut();
    let mut idx = 0;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    for n in 0..m {
                        d[idx] = psi1.get(i, l, n) * psi.get(j, k)
                            + psi.get(i, l) * psi1.get(j, k, n)
                            - psi1.get(i, k, n) * psi.get(j, l)
                            - psi.get(i, k) * psi1.get(j, l, n);
                        idx += 1;
                    }
                }
            }
        }
    }
    Ok(CovDerivTensor(out))
}
