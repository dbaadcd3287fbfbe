//! JSON tensor exchange format.
//!
//! ```json
//! {"m": 2, "kind": "curv", "entries": [[0, 1, 1, 0, 1.0], [0, 1, 0, 1, -1.0], ...]}
//! ```
//!
//! Indices are 0-based; omitted entries are zero. `kind` is one of `sym2`,
//! `sym3`, `curv`, `covderiv`.

use std::collections::HashSet;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::tol::{LOAD_SYMMETRY, MAX_LOAD_DIM, WRITE_ZERO};

use super::forms::{SymForm2, SymForm3};
use super::tensor::{check_symmetries, ClassKind, ClassTensor, CovDerivTensor, CurvTensor, RawTensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorKind {
    Sym2,
    Sym3,
    Curv,
    CovDeriv,
}

impl TensorKind {
    pub fn order(self) -> usize {
        match self {
            TensorKind::Sym2 => 2,
            TensorKind::Sym3 => 3,
            TensorKind::Curv => 4,
            TensorKind::CovDeriv => 5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TensorKind::Sym2 => "sym2",
            TensorKind::Sym3 => "sym3",
            TensorKind::Curv => "curv",
            TensorKind::CovDeriv => "covderiv",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "sym2" => TensorKind::Sym2,
            "sym3" => TensorKind::Sym3,
            "curv" => TensorKind::Curv,
            "covderiv" => TensorKind::CovDeriv,
            other => return Err(Error::Parse(format!("unknown tensor kind {other:?}"))),
        })
    }
}

impl From<ClassKind> for TensorKind {
    fn from(k: ClassKind) -> Self {
        match k {
            ClassKind::Curv => TensorKind::Curv,
            ClassKind::CovDeriv => TensorKind::CovDeriv,
        }
    }
}

/// A parsed but not yet validated tensor document.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorDoc {
    pub kind: TensorKind,
    pub tensor: RawTensor,
}

/// A validated tensor of one of the four kinds.
#[derive(Clone, Debug, PartialEq)]
pub enum Loaded {
    Sym2(SymForm2),
    Sym3(SymForm3),
    Curv(CurvTensor),
    CovDeriv(CovDerivTensor),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    m: usize,
    kind: String,
    entries: Vec<Vec<f64>>,
}

fn as_index(v: f64, m: usize, entry: usize) -> Result<usize> {
    if !v.is_finite() || v.fract() != 0.0 || v < 0.0 || v >= m as f64 {
        return Err(Error::Parse(format!(
            "entry {entry}: index {v} is not an integer in 0..{m}"
        )));
    }
    Ok(v as usize)
}

/// Parses the exchange format without checking symmetries.
pub fn parse_tensor(text: &str) -> Result<TensorDoc> {
    let wire: Wire = serde_json::from_str(text)?;
    let kind = TensorKind::parse(&wire.kind)?;
    let m = wire.m;
    if m == 0 || m > MAX_LOAD_DIM {
        return Err(Error::UnsupportedDimension {
            m,
            min: 1,
            max: MAX_LOAD_DIM,
        });
    }
    let order = kind.order();
    let mut tensor = RawTensor::zeros(m, order);
    let mut seen = HashSet::new();
    for (n, e) in wire.entries.iter().enumerate() {
        if e.len() != order + 1 {
            return Err(Error::Parse(format!(
                "entry {n}: expected {} indices and a value, got {} numbers",
                order,
                e.len()
            )));
        }
        let idx = e[..order]
            .iter()
            .map(|&v| as_index(v, m, n))
            .collect::<Result<Vec<_>>>()?;
        let value = e[order];
        if !value.is_finite() {
            return Err(Error::Parse(format!("entry {n}: value is not finite")));
        }
        let flat = tensor.flat_index(&idx);
        if !seen.insert(flat) {
            return Err(Error::Parse(format!("entry {n}: duplicate index {idx:?}")));
        }
        tensor.data_mut()[flat] = value;
    }
    Ok(TensorDoc { kind, tensor })
}

fn max_entry(t: &RawTensor) -> f64 {
    t.norm_inf()
}

impl TensorDoc {
    /// Validates symmetries at `1e-9 · max|entry|`.
    pub fn validate(self) -> Result<Loaded> {
        let limit = LOAD_SYMMETRY * max_entry(&self.tensor);
        let m = self.tensor.m();
        match self.kind {
            TensorKind::Sym2 => {
                let d = self.tensor.data();
                let worst = (0..m)
                    .flat_map(|i| (0..m).map(move |j| (i, j)))
                    .fold(0.0_f64, |a, (i, j)| a.max((d[i * m + j] - d[j * m + i]).abs()));
                if worst > limit {
                    return Err(Error::Symmetry {
                        what: "sym2",
                        violation: worst,
                        limit,
                    });
                }
                let data = self.tensor.into_data();
                Ok(Loaded::Sym2(SymForm2::from_fn(m, |i, j| {
                    0.5 * (data[i * m + j] + data[j * m + i])
                })))
            }
            TensorKind::Sym3 => {
                let t = &self.tensor;
                let mut worst = 0.0_f64;
                for i in 0..m {
                    for j in 0..m {
                        for k in 0..m {
                            let v = t.get(&[i, j, k]);
                            for p in [[i, k, j], [j, i, k], [j, k, i], [k, i, j], [k, j, i]] {
                                worst = worst.max((v - t.get(&p)).abs());
                            }
                        }
                    }
                }
                if worst > limit {
                    return Err(Error::Symmetry {
                        what: "sym3",
                        violation: worst,
                        limit,
                    });
                }
                Ok(Loaded::Sym3(SymForm3::from_fn(m, |i, j, k| {
                    let p = [[i, j, k], [i, k, j], [j, i, k], [j, k, i], [k, i, j], [k, j, i]];
                    p.iter().map(|x| t.get(x)).sum::<f64>() / 6.0
                })))
            }
            TensorKind::Curv => {
                let rep = check_symmetries(ClassKind::Curv, &self.tensor)?;
                if rep.max_violation() > limit {
                    return Err(Error::Symmetry {
                        what: "curv",
                        violation: rep.max_violation(),
                        limit,
                    });
                }
                Ok(Loaded::Curv(CurvTensor::from_raw_unchecked(self.tensor)))
            }
            TensorKind::CovDeriv => {
                let rep = check_symmetries(ClassKind::CovDeriv, &self.tensor)?;
                if rep.max_violation() > limit {
                    return Err(Error::Symmetry {
                        what: "covderiv",
                        violation: rep.max_violation(),
                        limit,
                    });
                }
                Ok(Loaded::CovDeriv(CovDerivTensor::from_raw_unchecked(self.tensor)))
            }
        }
    }
}

/// Parses and validates.
pub fn load_tensor(text: &str) -> Result<Loaded> {
    parse_tensor(text)?.validate()
}

/// Writes the exchange format as a JSON value: entries with `|value| > 1e-14`,
/// lexicographically sorted by index.
pub fn tensor_to_value(kind: TensorKind, t: &RawTensor) -> Value {
    let entries: Vec<Value> = t
        .data()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > WRITE_ZERO)
        .map(|(flat, &v)| {
            let mut row: Vec<Value> = t.multi_index(flat).into_iter().map(Value::from).collect();
            row.push(Value::from(v));
            Value::Array(row)
        })
        .collect();
    json!({ "m": t.m(), "kind": kind.as_str(), "entries": entries })
}

pub fn tensor_to_string(kind: TensorKind, t: &RawTensor) -> String {
    serde_json::to_string(&tensor_to_value(kind, t)).expect("serializable")
}

pub fn sym2_to_raw(psi: &SymForm2) -> RawTensor {
    RawTensor::from_vec(psi.m(), 2, psi.data().to_vec()).expect("m*m entries")
}

pub fn sym3_to_raw(psi1: &SymForm3) -> RawTensor {
    RawTensor::from_vec(psi1.m(), 3, psi1.data().to_vec()).expect("m^3 entries")
}

impl Loaded {
    pub fn kind(&self) -> TensorKind {
        match self {
            Loaded::Sym2(_) => TensorKind::Sym2,
            Loaded::Sym3(_) => TensorKind::Sym3,
            Loaded::Curv(_) => TensorKind::Curv,
            Loaded::CovDeriv(_) => TensorKind::CovDeriv,
        }
    }

    pub fn to_raw(&self) -> RawTensor {
        match self {
            Loaded::Sym2(f) => sym2_to_raw(f),
            Loaded::Sym3(f) => sym3_to_raw(f),
            Loaded::Curv(t) => t.raw().clone(),
            Loaded::CovDeriv(t) => t.raw().clone(),
        }
    }

    pub fn to_json_string(&self) -> String {
        tensor_to_string(self.kind(), &self.to_raw())
    }
}
