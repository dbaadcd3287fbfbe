//! Sparse multivariate polynomials with exact coefficient differentiation.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::tol::MAX_LOAD_DIM;

/// Largest exponent accepted from files.
pub const MAX_EXPONENT: u32 = 32;

/// `Σ c_α x^α` over `nvars` variables. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        Self::monomial(vec![0; nvars], c)
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, 1.0)
    }

    pub fn monomial(exponents: Vec<u32>, c: f64) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    got: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Vec<u32>, c: f64) {
        if c == 0.0 {
            return;
        }
        let slot = self.terms.entry(e).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.terms.retain(|_, v| *v != 0.0);
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn coefficient(&self, exponents: &[u32]) -> f64 {
        self.terms.get(exponents).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), s * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// `∂/∂x_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            out.add_term(d, c * e[i] as f64);
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(*c, |acc, (&k, &xi)| acc * xi.powi(k as i32))
            })
            .sum()
    }

    /// Embeds into a larger variable set, placing these variables first.
    pub fn extend_vars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        let mut out = Self::zero(nvars);
        for (e, c) in &self.terms {
            let mut f = e.clone();
            f.resize(nvars, 0);
            out.add_term(f, *c);
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let monomials: Vec<Value> = self.terms.iter().map(|(e, c)| json!([e, c])).collect();
        json!({ "monomials": monomials })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyWire {
    monomials: Vec<(Vec<u32>, f64)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyListWire {
    m: Option<usize>,
    functions: Vec<PolyWire>,
}

fn from_wire(w: PolyWire, nvars: Option<usize>) -> Result<Polynomial> {
    let n = match (nvars, w.monomials.first()) {
        (Some(n), _) => n,
        (None, Some((e, _))) => e.len(),
        (None, None) => {
            return Err(Error::Parse(
                "cannot infer the number of variables of an empty polynomial".into(),
            ))
        }
    };
    if n == 0 || n > MAX_LOAD_DIM {
        return Err(Error::UnsupportedDimension {
            m: n,
            min: 1,
            max: MAX_LOAD_DIM,
        });
    }
    for (k, (e, c)) in w.monomials.iter().enumerate() {
        if e.len() != n {
            return Err(Error::Parse(format!(
                "monomial {k}: exponent vector has length {}, expected {n}",
                e.len()
            )));
        }
        if e.iter().any(|&x| x > MAX_EXPONENT) {
            return Err(Error::Parse(format!(
                "monomial {k}: exponent above {MAX_EXPONENT}"
            )));
        }
        if !c.is_finite() {
            return Err(Error::Parse(format!("monomial {k}: coefficient is not finite")));
        }
    }
    Polynomial::from_terms(n, w.monomials)
}

/// Parses `{"monomials": [[exponent-vector, coefficient], ...]}`.
pub fn parse_polynomial(text: &str) -> Result<Polynomial> {
    from_wire(serde_json::from_str(text)?, None)
}

/// Parses `{"m": 3, "functions": [{"monomials": ...}, ...]}`; `m` is required
/// only when it cannot be inferred.
pub fn parse_polynomial_list(text: &str) -> Result<(usize, Vec<Polynomial>)> {
    let w: PolyListWire = serde_json::from_str(text)?;
    let mut m = w.m;
    let mut out = Vec::with_capacity(w.functions.len());
    for f in w.functions {
        let p = from_wire(f, m)?;
        m = Some(p.nvars());
        out.push(p);
    }
    let m = m.ok_or_else(|| Error::Parse("\"m\" is required for an empty function list".into()))?;
    if m == 0 || m > MAX_LOAD_DIM {
        return Err(Error::UnsupportedDimension {
            m,
            min: 1,
            max: MAX_LOAD_DIM,
        });
    }
    Ok((m, out))
}

pub fn polynomial_list_to_json(m: usize, fs: &[Polynomial]) -> Value {
    json!({ "m": m, "functions": fs.iter().map(Polynomial::to_json).collect::<Vec<_>>() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_cubic() {
        // f = x0^3 + 2 x0 x1
        let f = Polynomial::from_terms(2, [(vec![3, 0], 1.0), (vec![1, 1], 2.0)]).unwrap();
        let d0 = f.derivative(0);
        assert_eq!(d0.coefficient(&[2, 0]), 3.0);
        assert_eq!(d0.coefficient(&[0, 1]), 2.0);
        assert_eq!(f.derivative(0).derivative(0).derivative(0).coefficient(&[0, 0]), 6.0);
        assert!(f.derivative(1).derivative(1).is_zero());
    }

    #[test]
    fn eval_and_mul() {
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        let p = x.add(&y).mul(&x.add(&y.scaled(-1.0)));
        assert_eq!(p.eval(&[3.0, 2.0]), 5.0);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.coefficient(&[1, 1]), 0.0);
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = Polynomial::var(1, 0);
        assert!(x.add(&x.scaled(-1.0)).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let f = Polynomial::from_terms(3, [(vec![1, 1, 1], 1.0), (vec![2, 0, 0], 0.5)]).unwrap();
        let text = f.to_json().to_string();
        assert_eq!(parse_polynomial(&text).unwrap(), f);
    }

    #[test]
    fn malformed_polynomials() {
        for bad in [
            r#"{"monomials": [[[1,0], 1.0], [[1], 2.0]]}"#,
            r#"{"monomials": [[[100], 1.0]]}"#,
            r#"{"monomials": []}"#,
            r#"{"monomials": [[[1,2,3,4,5,6,7,8,9,10,11,12,13], 1.0]]}"#,
            r#"{"terms": []}"#,
        ] {
            assert!(parse_polynomial(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn list_needs_dimension_when_empty() {
        assert!(parse_polynomial_list(r#"{"functions": []}"#).is_err());
        let (m, fs) = parse_polynomial_list(r#"{"m": 3, "functions": []}"#).unwrap();
        assert_eq!((m, fs.len()), (3, 0));
        assert!(parse_polynomial_list(r#"{"m": 2, "functions": [{"monomials": [[[2,0,0], 1.0]]}]}"#).is_err());
    }
}
