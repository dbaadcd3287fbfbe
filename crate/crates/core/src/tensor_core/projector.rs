//! Orthogonal projection onto `𝒜(V)` and `𝒜₁(V)`.
//!
//! Every identity relates components whose index tuples are permutations of
//! one another, so the stacked constraint matrix is block diagonal over index
//! multisets. Each block only depends on the multiplicity pattern of its
//! multiset; the null space is computed once per pattern with an SVD and
//! reused for every multiset sharing it.

use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::null_space;
use crate::rng::seeded;
use crate::tol::{MAX_DIM, MIN_DIM};

use super::tensor::{ClassKind, ClassTensor, CovDerivTensor, CurvTensor, RawTensor};

struct Pattern {
    /// Distinct permutations of the canonical multiset, lexicographic.
    tuples: Vec<Vec<usize>>,
    /// Orthonormal null-space basis, one column per free direction.
    basis: DMatrix<f64>,
}

struct Block {
    positions: Vec<usize>,
    pattern: Arc<Pattern>,
}

/// Projector onto one symmetry class at a fixed dimension.
pub struct ClassProjector {
    m: usize,
    kind: ClassKind,
    blocks: Vec<Block>,
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn distinct_permutations(sorted: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = sorted.to_vec();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

/// Images of a tuple under the index shuffles appearing in each identity.
fn constraint_rows(kind: ClassKind, t: &[usize]) -> Vec<Vec<(Vec<usize>, f64)>> {
    let with_tail = |head: [usize; 4]| {
        let mut v = head.to_vec();
        v.extend_from_slice(&t[4..]);
        v
    };
    let (i, j, k, l) = (t[0], t[1], t[2], t[3]);
    let mut rows = vec![
        vec![(t.to_vec(), 1.0), (with_tail([j, i, k, l]), 1.0)],
        vec![(t.to_vec(), 1.0), (with_tail([k, l, i, j]), -1.0)],
        vec![
            (t.to_vec(), 1.0),
            (with_tail([j, k, i, l]), 1.0),
            (with_tail([k, i, j, l]), 1.0),
        ],
    ];
    if kind == ClassKind::CovDeriv {
        let n = t[4];
        rows.push(vec![
            (t.to_vec(), 1.0),
            (vec![i, j, l, n, k], 1.0),
            (vec![i, j, n, k, l], 1.0),
        ]);
    }
    rows
}

fn build_pattern(kind: ClassKind, multiplicities: &[usize]) -> Pattern {
    let canonical: Vec<usize> = multiplicities
        .iter()
        .enumerate()
        .flat_map(|(label, &mult)| std::iter::repeat_n(label, mult))
        .collect();
    let tuples = distinct_permutations(&canonical);
    let local: HashMap<&[usize], usize> = tuples
        .iter()
        .enumerate()
        .map(|(n, t)| (t.as_slice(), n))
        .collect();
    let mut rows: Vec<DVector<f64>> = Vec::new();
    for t in &tuples {
        for row in constraint_rows(kind, t) {
            let mut r = DVector::zeros(tuples.len());
            for (tuple, c) in row {
                r[local[tuple.as_slice()]] += c;
            }
            rows.push(r);
        }
    }
    let mut c = DMatrix::zeros(rows.len(), tuples.len());
    for (n, r) in rows.iter().enumerate() {
        c.set_row(n, &r.transpose());
    }
    Pattern {
        basis: null_space(&c),
        tuples,
    }
}

/// Nondecreasing tuples of `len` values in `0..m`.
fn multisets(m: usize, len: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, len: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in start..m {
            cur.push(v);
            rec(m, len, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(m, len, 0, &mut Vec::new(), &mut out);
    out
}

impl ClassProjector {
    pub fn new(m: usize, kind: ClassKind) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        let order = kind.order();
        let mut patterns: HashMap<Vec<usize>, Arc<Pattern>> = HashMap::new();
        let mut blocks = Vec::new();
        let stride = |t: &[usize]| t.iter().fold(0, |acc, &i| acc * m + i);
        for ms in multisets(m, order) {
            // groups of equal values, ordered by (multiplicity desc, value asc)
            let mut groups: Vec<(usize, usize)> = Vec::new();
            for &v in &ms {
                match groups.last_mut() {
                    Some((val, mult)) if *val == v => *mult += 1,
                    _ => groups.push((v, 1)),
                }
            }
            groups.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            let mults: Vec<usize> = groups.iter().map(|g| g.1).collect();
            let pattern = patterns
                .entry(mults.clone())
                .or_insert_with(|| Arc::new(build_pattern(kind, &mults)))
                .clone();
            let positions = pattern
                .tuples
                .iter()
                .map(|t| {
                    let actual: Vec<usize> = t.iter().map(|&label| groups[label].0).collect();
                    stride(&actual)
                })
                .collect();
            blocks.push(Block { positions, pattern });
        }
        Ok(ClassProjector { m, kind, blocks })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> ClassKind {
        self.kind
    }

    /// Dimension of the class: total null-space dimension over all blocks.
    pub fn dimension(&self) -> usize {
        self.blocks.iter().map(|b| b.pattern.basis.ncols()).sum()
    }

    pub fn project_raw(&self, t: &RawTensor) -> Result<RawTensor> {
        if t.m() != self.m || t.order() != self.kind.order() {
            return Err(Error::DimensionMismatch {
                expected: self.m.pow(self.kind.order() as u32),
                got: t.len(),
            });
        }
        let mut out = RawTensor::zeros(self.m, self.kind.order());
        let src = t.data();
        let dst = out.data_mut();
        for block in &self.blocks {
            let basis = &block.pattern.basis;
            if basis.ncols() == 0 {
                continue;
            }
            let x = DVector::from_iterator(block.positions.len(), block.positions.iter().map(|&p| src[p]));
            let y = basis * (basis.transpose() * x);
            for (&p, v) in block.positions.iter().zip(y.iter()) {
                dst[p] = *v;
            }
        }
        Ok(out)
    }
}

fn check_range(m: usize) -> Result<()> {
    if !(MIN_DIM..=MAX_DIM).contains(&m) {
        return Err(Error::UnsupportedDimension {
            m,
            min: MIN_DIM,
            max: MAX_DIM,
        });
    }
    Ok(())
}

/// Dimension of `𝒜(V)` or `𝒜₁(V)` for `2 ≤ m ≤ 6`, as a null-space dimension.
pub fn class_dimension(m: usize, kind: ClassKind) -> Result<usize> {
    check_range(m)?;
    Ok(ClassProjector::new(m, kind)?.dimension())
}

/// Orthogonal projection of an arbitrary order-4 array onto `𝒜(V)`.
pub fn project_curv(t: &RawTensor) -> Result<CurvTensor> {
    let p = ClassProjector::new(t.m(), ClassKind::Curv)?;
    Ok(CurvTensor::from_raw_unchecked(p.project_raw(t)?))
}

/// Orthogonal projection of an arbitrary order-5 array onto `𝒜₁(V)`.
pub fn project_covderiv(t: &RawTensor) -> Result<CovDerivTensor> {
    let p = ClassProjector::new(t.m(), ClassKind::CovDeriv)?;
    Ok(CovDerivTensor::from_raw_unchecked(p.project_raw(t)?))
}

/// Projects onto whichever class matches the array's order.
pub fn project(t: &RawTensor) -> Result<RawTensor> {
    let kind = match t.order() {
        4 => ClassKind::Curv,
        5 => ClassKind::CovDeriv,
        o => {
            return Err(Error::InvalidInput(format!(
                "projection needs an order 4 or 5 array, got order {o}"
            )))
        }
    };
    ClassProjector::new(t.m(), kind)?.project_raw(t)
}

pub fn random_curv(m: usize, seed: u64) -> Result<CurvTensor> {
    check_range(m)?;
    let mut rng = seeded(seed);
    project_curv(&RawTensor::random_normal(m, 4, &mut rng))
}

pub fn random_covderiv(m: usize, seed: u64) -> Result<CovDerivTensor> {
    check_range(m)?;
    let mut rng = seeded(seed);
    project_covderiv(&RawTensor::random_normal(m, 5, &mut rng))
}

/// Seeded random element of the requested class (projected standard-normal array).
pub fn random_element(m: usize, kind: ClassKind, seed: u64) -> Result<RawTensor> {
    Ok(match kind {
        ClassKind::Curv => random_curv(m, seed)?.into_raw(),
        ClassKind::CovDeriv => random_covderiv(m, seed)?.into_raw(),
    })
}
