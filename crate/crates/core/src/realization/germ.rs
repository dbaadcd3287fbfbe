//! Polynomial metric germs `g_{ik}(x) = ⟨e_i,e_k⟩ + Σ Q_{ik,jl}x_jx_l + Σ C_{ik,jln}x_jx_lx_n`.

use nalgebra::DMatrix;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::tensor_core::{ClassTensor, CovDerivTensor, CurvTensor, RawTensor, Space};
use crate::tol::{LOAD_SYMMETRY, MAX_LOAD_DIM, WRITE_ZERO};

use super::jets::{origin_covderiv, origin_curvature};
use super::metric::{MetricField, MetricJet, PolyMetric};
use super::poly::Polynomial;

/// Metric germ with vanishing 1-jet at the origin.
///
/// `quadratic[i,k,j,l]` is symmetric in `(j,l)` and `cubic[i,k,j,l,n]` in
/// `(j,l,n)`; both are symmetric in `(i,k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricGerm {
    space: Space,
    quadratic: RawTensor,
    cubic: RawTensor,
}

/// Average over all orderings of the trailing `tail` slots.
fn symmetrize_tail(t: &RawTensor, tail: usize) -> RawTensor {
    let order = t.order();
    let head = order - tail;
    let perms = permutations(tail);
    let mut out = RawTensor::zeros(t.m(), order);
    for flat in 0..t.len() {
        let idx = t.multi_index(flat);
        let mut acc = 0.0;
        let mut src = idx.clone();
        for p in &perms {
            for (s, &q) in p.iter().enumerate() {
                src[head + s] = idx[head + q];
            }
            acc += t.get(&src);
        }
        out.data_mut()[flat] = acc / perms.len() as f64;
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Largest `|t[i,k,..] − t[k,i,..]|`.
fn head_asymmetry(t: &RawTensor) -> f64 {
    let mut worst: f64 = 0.0;
    for flat in 0..t.len() {
        let mut idx = t.multi_index(flat);
        let v = t.data()[flat];
        idx.swap(0, 1);
        worst = worst.max((v - t.get(&idx)).abs());
    }
    worst
}

impl MetricGerm {
    /// Symmetrizes the monomial slots, then requires `(i,k)` symmetry within
    /// `1e-9·max|coefficient|`.
    pub fn new(space: Space, quadratic: RawTensor, cubic: RawTensor) -> Result<Self> {
        let m = space.m();
        for (t, order) in [(&quadratic, 4), (&cubic, 5)] {
            if t.m() != m || t.order() != order {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: t.m(),
                });
            }
        }
        let quadratic = symmetrize_tail(&quadratic, 2);
        let cubic = symmetrize_tail(&cubic, 3);
        for (what, t) in [
            ("(i,k) symmetry of the quadratic germ coefficients", &quadratic),
            ("(i,k) symmetry of the cubic germ coefficients", &cubic),
        ] {
            let violation = head_asymmetry(t);
            let limit = LOAD_SYMMETRY * t.norm_inf().max(1.0);
            if violation > limit {
                return Err(Error::Symmetry {
                    what,
                    violation,
                    limit,
                });
            }
        }
        Ok(MetricGerm {
            space,
            quadratic,
            cubic,
        })
    }

    pub fn flat(space: Space) -> Self {
        let m = space.m();
        MetricGerm {
            space,
            quadratic: RawTensor::zeros(m, 4),
            cubic: RawTensor::zeros(m, 5),
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn m(&self) -> usize {
        self.space.m()
    }

    pub fn quadratic(&self) -> &RawTensor {
        &self.quadratic
    }

    pub fn cubic(&self) -> &RawTensor {
        &self.cubic
    }

    /// Exact jet at the origin: `g = diag(s)`, `dg = 0`, `d²g = 2Q`, `d³g = 6C`.
    pub fn origin_jet(&self) -> MetricJet {
        let m = self.m();
        MetricJet {
            g: self.space.metric_matrix(),
            dg: RawTensor::zeros(m, 3),
            d2g: self.quadratic.scaled(2.0),
            d3g: self.cubic.scaled(6.0),
        }
    }

    pub fn curvature_at_origin(&self) -> CurvTensor {
        origin_curvature(&self.origin_jet())
    }

    pub fn covderiv_at_origin(&self) -> CovDerivTensor {
        origin_covderiv(&self.origin_jet())
    }

    /// The same metric with polynomial entries.
    pub fn to_poly_metric(&self) -> PolyMetric {
        let m = self.m();
        let s = self.space.metric_diagonal();
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for k in 0..m {
                let mut terms = vec![(vec![0; m], if i == k { s[i] } else { 0.0 })];
                for j in 0..m {
                    for l in 0..m {
                        let mut e = vec![0u32; m];
                        e[j] += 1;
                        e[l] += 1;
                        terms.push((e.clone(), self.quadratic.get(&[i, k, j, l])));
                        for n in 0..m {
                            let mut f = e.clone();
                            f[n] += 1;
                            terms.push((f, self.cubic.get(&[i, k, j, l, n])));
                        }
                    }
                }
                entries.push(Polynomial::from_terms(m, terms).expect("exponent length is m"));
            }
        }
        // Symmetrized coefficients make (i,k) and (k,i) agree only up to
        // rounding; use one triangle for both.
        for i in 0..m {
            for k in 0..i {
                entries[i * m + k] = entries[k * m + i].clone();
            }
        }
        PolyMetric::new(m, entries).expect("entries mirrored")
    }

    pub fn to_json(&self) -> Value {
        let m = self.m();
        let (p, q) = self.space.signature();
        let mut quadratic = Vec::new();
        for flat in 0..self.quadratic.len() {
            let v = self.quadratic.data()[flat];
            if v.abs() > WRITE_ZERO {
                let idx = self.quadratic.multi_index(flat);
                quadratic.push(json!([idx[0], idx[1], idx[2], idx[3], v]));
            }
        }
        let mut cubic = Vec::new();
        for flat in 0..self.cubic.len() {
            let v = self.cubic.data()[flat];
            if v.abs() > WRITE_ZERO {
                let idx = self.cubic.multi_index(flat);
                cubic.push(json!([idx[0], idx[1], idx[2], idx[3], idx[4], v]));
            }
        }
        json!({ "m": m, "signature": [p, q], "quadratic": quadratic, "cubic": cubic })
    }
}

impl MetricField for MetricGerm {
    fn dim(&self) -> usize {
        self.m()
    }

    fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        let m = self.m();
        let s = self.space.metric_diagonal();
        DMatrix::from_fn(m, m, |i, k| {
            let (a, b) = if i <= k { (i, k) } else { (k, i) };
            let mut v = if a == b { s[a] } else { 0.0 };
            for j in 0..m {
                for l in 0..m {
                    let xx = x[j] * x[l];
                    v += self.quadratic.get(&[a, b, j, l]) * xx;
                    for n in 0..m {
                        v += self.cubic.get(&[a, b, j, l, n]) * xx * x[n];
                    }
                }
            }
            v
        })
    }
}

/// The germ `g_{ik} = ⟨e_i,e_k⟩ − ⅓Σ A_{ijlk}x_jx_l − ⅙Σ A₁_{ijlk;n}x_jx_lx_n`,
/// whose curvature and covariant derivative at 0 are `A` and `A₁`.
pub fn build_realizing_germ(space: &Space, a: &CurvTensor, a1: &CovDerivTensor) -> Result<MetricGerm> {
    let m = space.m();
    if a.m() != m || a1.m() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: if a.m() != m { a.m() } else { a1.m() },
        });
    }
    for report in [a.check(), a1.check()] {
        if !report.passes(LOAD_SYMMETRY) {
            return Err(Error::Symmetry {
                what: "input tensor",
                violation: report.max_violation(),
                limit: LOAD_SYMMETRY * report.norm_inf,
            });
        }
    }
    let mut quadratic = RawTensor::zeros(m, 4);
    let mut cubic = RawTensor::zeros(m, 5);
    for i in 0..m {
        for k in 0..m {
            for j in 0..m {
                for l in 0..m {
                    quadratic.set(&[i, k, j, l], -a.get(i, j, l, k) / 3.0);
                    for n in 0..m {
                        cubic.set(&[i, k, j, l, n], -a1.get(i, j, l, k, n) / 6.0);
                    }
                }
            }
        }
    }
    MetricGerm::new(space.clone(), quadratic, cubic)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GermWire {
    m: usize,
    signature: (usize, usize),
    #[serde(default)]
    quadratic: Vec<Vec<f64>>,
    #[serde(default)]
    cubic: Vec<Vec<f64>>,
}

fn fill(t: &mut RawTensor, rows: &[Vec<f64>], what: &str) -> Result<()> {
    let m = t.m();
    let order = t.order();
    let mut seen = vec![false; t.len()];
    for (r, row) in rows.iter().enumerate() {
        if row.len() != order + 1 {
            return Err(Error::Parse(format!(
                "{what} entry {r}: expected {} numbers, got {}",
                order + 1,
                row.len()
            )));
        }
        let mut idx = Vec::with_capacity(order);
        for &v in &row[..order] {
            if !(v.fract() == 0.0 && v >= 0.0 && v < m as f64) {
                return Err(Error::Parse(format!(
                    "{what} entry {r}: index {v} is not an integer in 0..{m}"
                )));
            }
            idx.push(v as usize);
        }
        let c = row[order];
        if !c.is_finite() {
            return Err(Error::Parse(format!("{what} entry {r}: coefficient is not finite")));
        }
        let flat = t.flat_index(&idx);
        if seen[flat] {
            return Err(Error::Parse(format!("{what} entry {r}: duplicate index {idx:?}")));
        }
        seen[flat] = true;
        t.data_mut()[flat] = c;
    }
    Ok(())
}

/// Parses a germ document; monomial slots are symmetrized on load.
pub fn parse_germ(text: &str) -> Result<MetricGerm> {
    let w: GermWire = serde_json::from_str(text)?;
    if w.m == 0 || w.m > MAX_LOAD_DIM {
        return Err(Error::UnsupportedDimension {
            m: w.m,
            min: 1,
            max: MAX_LOAD_DIM,
        });
    }
    let (p, q) = w.signature;
    if p.checked_add(q) != Some(w.m) {
        return Err(Error::InvalidSignature { p, q, m: w.m });
    }
    let space = Space::new(p, q)?;
    let mut quadratic = RawTensor::zeros(w.m, 4);
    let mut cubic = RawTensor::zeros(w.m, 5);
    fill(&mut quadratic, &w.quadratic, "quadratic")?;
    fill(&mut cubic, &w.cubic, "cubic")?;
    MetricGerm::new(space, quadratic, cubic)
}
