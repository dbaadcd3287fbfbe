//! Multi-restart solvers for the three decomposition targets.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::lstsq;
use crate::realization::{build_graph_metric, exact_curvature, hessian_forms, Polynomial};
use crate::rng::{normal, seeded, Rng};
use crate::tensor_core::{build_a1, ClassTensor, CovDerivTensor, CurvTensor, SymForm2, SymForm3};
use crate::tol::LOAD_SYMMETRY;

use super::solver::Problem;
use super::{Decomposition, Mode, SolverConfig, TargetKind, Term};

/// Restarts run in fixed-size batches so the set of attempted restarts, and
/// hence the selected result, does not depend on the thread count.
const BATCH: usize = 4;

/// Residual norm at which refinement stops early.
const STOP_NORM: f64 = 1e-13;

fn check_class<T: ClassTensor>(t: &T) -> Result<()> {
    let report = t.check();
    if report.passes(LOAD_SYMMETRY) {
        Ok(())
    } else {
        Err(Error::Symmetry {
            what: "decomposition target",
            violation: report.max_violation(),
            limit: LOAD_SYMMETRY * report.norm_inf,
        })
    }
}

/// Runs restarts `0..config.restarts` in batches, stopping after the first
/// batch containing a success, and picks the smallest `(residual, index)`.
fn best_of_restarts<F>(config: &SolverConfig, attempt: F) -> Decomposition
where
    F: Fn(usize) -> Decomposition + Sync,
{
    let mut best: Option<(usize, Decomposition)> = None;
    let mut start = 0;
    while start < config.restarts {
        let end = (start + BATCH).min(config.restarts);
        let batch: Vec<(usize, Decomposition)> =
            (start..end).into_par_iter().map(|r| (r, attempt(r))).collect();
        for (r, d) in batch {
            let better = match &best {
                None => true,
                Some((br, bd)) => {
                    (d.residual(), r) < (bd.residual(), *br) && !d.residual().is_nan()
                }
            };
            if better {
                best = Some((r, d));
            }
        }
        if best.as_ref().is_some_and(|(_, d)| d.succeeded(config.tolerance)) {
            break;
        }
        start = end;
    }
    best.expect("at least one restart").1
}

fn lambdas(mode: Mode, k: usize, restart: usize) -> Vec<f64> {
    match mode {
        Mode::Unsigned => vec![1.0; k],
        Mode::Signed => {
            let negatives = restart % (k + 1);
            (0..k).map(|i| if i < negatives { -1.0 } else { 1.0 }).collect()
        }
    }
}

fn random_params(rng: &mut Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * normal(rng)).collect()
}

/// Alternating per-term passes, then joint refinement of all terms.
fn refine(problem: &Problem, theta: &mut [f64], config: &SolverConfig) {
    let k = problem.terms();
    for _ in 0..config.alternating_sweeps {
        for i in 0..k {
            problem.levenberg_marquardt(theta, i..i + 1, 3, STOP_NORM);
        }
    }
    problem.levenberg_marquardt(theta, 0..k, config.max_iterations, STOP_NORM);
}

/// Unit-norm target data, or `None` for the zero tensor.
fn normalized<T: ClassTensor>(t: &T) -> (f64, Vec<f64>) {
    let n = t.norm();
    let data = if n > 0.0 {
        t.raw().data().iter().map(|v| v / n).collect()
    } else {
        vec![0.0; t.raw().len()]
    };
    (n, data)
}

/// Searches for `A = Σ_{i≤k} λ_i A_{Ψ_i}` with `k = config.max_terms`.
///
/// Never fails on non-convergence: the best attempt is returned with its
/// residual.
pub fn decompose_curv(a: &CurvTensor, config: &SolverConfig) -> Result<Decomposition> {
    config.validate()?;
    check_class(a)?;
    let m = a.m();
    let (norm, target) = normalized(a);
    if norm == 0.0 {
        return Ok(Decomposition::new(m, Vec::new(), TargetKind::Curv));
    }
    let scale = norm.sqrt();
    let k = config.max_terms;
    let init = config.init_scale / (m as f64).sqrt();
    let result = best_of_restarts(config, |r| {
        let problem = Problem {
            m,
            lambdas: lambdas(config.mode, k, r),
            curv: Some(&target),
            covderiv: None,
        };
        let mut rng = seeded(config.seed ^ r as u64);
        let mut theta = random_params(&mut rng, problem.param_len(), init);
        refine(&problem, &mut theta, config);
        let terms = (0..k)
            .map(|i| Term {
                lambda: problem.lambdas[i],
                psi: problem.psi(&theta, i).scaled(scale),
                psi1: None,
            })
            .collect();
        Decomposition::new(m, terms, TargetKind::Curv).with_residuals(Some(a), None)
    });
    Ok(result)
}

/// Least-squares `Ψ_{1,i}` for fixed `Ψ_i`; the map is linear in the `Ψ₁`.
fn solve_psi1(m: usize, psis: &[SymForm2], target: &[f64]) -> Vec<Vec<f64>> {
    let p3 = SymForm3::param_count(m);
    let mut mat = DMatrix::zeros(target.len(), psis.len() * p3);
    let mut unit = vec![0.0; p3];
    for (i, psi) in psis.iter().enumerate() {
        for q in 0..p3 {
            unit[q] = 1.0;
            let f = SymForm3::from_params(m, &unit);
            unit[q] = 0.0;
            let col = build_a1(psi, &f).expect("same dimension");
            mat.column_mut(i * p3 + q).copy_from_slice(col.raw().data());
        }
    }
    let x = lstsq(&mat, &DVector::from_column_slice(target));
    x.as_slice().chunks(p3).map(<[f64]>::to_vec).collect()
}

/// Shared by the pair and covariant-derivative solvers: given `Ψ_i` in
/// `theta`, fills the `Ψ_{1,i}` by least squares.
fn fill_psi1(problem: &Problem, theta: &mut [f64], target1: &[f64]) {
    let k = problem.terms();
    let m = problem.m;
    let p2 = SymForm2::param_count(m);
    let psis: Vec<SymForm2> = (0..k).map(|i| problem.psi(theta, i)).collect();
    let sol = solve_psi1(m, &psis, target1);
    for (i, s) in sol.iter().enumerate() {
        let start = i * problem.stride() + p2;
        theta[start..start + s.len()].copy_from_slice(s);
    }
}

/// Searches for `A = Σ A_{Ψ_i}` and `A₁ = Σ A_{1,Ψ_i,Ψ_{1,i}}` with
/// `k = config.max_terms` unsigned terms.
///
/// Each restart fits the `Ψ_i` to `A` alone, solves the linear problem for
/// the `Ψ_{1,i}`, and refines both jointly only if that leaves `A₁`
/// unmatched.
pub fn decompose_pair(a: &CurvTensor, a1: &CovDerivTensor, config: &SolverConfig) -> Result<Decomposition> {
    config.validate()?;
    if a.m() != a1.m() {
        return Err(Error::DimensionMismatch {
            expected: a.m(),
            got: a1.m(),
        });
    }
    check_class(a)?;
    check_class(a1)?;
    let m = a.m();
    let (na, n1) = (a.norm(), a1.norm());
    if na == 0.0 && n1 == 0.0 {
        return Ok(Decomposition::new(m, Vec::new(), TargetKind::Pair));
    }
    // Ψ scales by s and Ψ₁ by t so that both normalized targets have unit norm.
    let s = if na > 0.0 { na.sqrt() } else { n1.sqrt() };
    let t = if n1 > 0.0 { n1 / s } else { s };
    let target: Vec<f64> = a.raw().data().iter().map(|v| v / (s * s)).collect();
    let target1: Vec<f64> = a1.raw().data().iter().map(|v| v / (s * t)).collect();
    let k = config.max_terms;
    let init = config.init_scale / (m as f64).sqrt();

    let result = best_of_restarts(config, |r| {
        let mut rng = seeded(config.seed ^ r as u64);
        let curv_only = Problem {
            m,
            lambdas: vec![1.0; k],
            curv: Some(&target),
            covderiv: None,
        };
        let pair = Problem {
            m,
            lambdas: vec![1.0; k],
            curv: Some(&target),
            covderiv: Some(&target1),
        };
        let mut psi_params = random_params(&mut rng, curv_only.param_len(), init);
        if na > 0.0 {
            refine(&curv_only, &mut psi_params, config);
        }
        let p2 = SymForm2::param_count(m);
        let mut theta = vec![0.0; pair.param_len()];
        for i in 0..k {
            let dst = i * pair.stride();
            theta[dst..dst + p2].copy_from_slice(&psi_params[i * p2..(i + 1) * p2]);
        }
        fill_psi1(&pair, &mut theta, &target1);
        let build = |theta: &[f64]| {
            let terms = (0..k)
                .map(|i| Term {
                    lambda: 1.0,
                    psi: pair.psi(theta, i).scaled(s),
                    psi1: pair.psi1(theta, i).map(|p| p.scaled(t)),
                })
                .collect();
            Decomposition::new(m, terms, TargetKind::Pair).with_residuals(Some(a), Some(a1))
        };
        let staged = build(&theta);
        if staged.succeeded(config.tolerance) {
            return staged;
        }
        refine(&pair, &mut theta, config);
        let joint = build(&theta);
        if joint.residual() < staged.residual() {
            joint
        } else {
            staged
        }
    });
    Ok(result)
}

/// Searches for `A₁ = Σ A_{1,Ψ_i,Ψ_{1,i}}` alone. Signs are irrelevant here
/// because `A_{1,Ψ,Ψ₁}` is linear in `Ψ₁`.
pub fn decompose_covderiv(a1: &CovDerivTensor, config: &SolverConfig) -> Result<Decomposition> {
    config.validate()?;
    check_class(a1)?;
    let m = a1.m();
    let (norm, target1) = normalized(a1);
    if norm == 0.0 {
        return Ok(Decomposition::new(m, Vec::new(), TargetKind::Covderiv));
    }
    let s = norm.sqrt();
    let k = config.max_terms;
    let init = config.init_scale / (m as f64).sqrt();
    let result = best_of_restarts(config, |r| {
        let mut rng = seeded(config.seed ^ r as u64);
        let problem = Problem {
            m,
            lambdas: vec![1.0; k],
            curv: None,
            covderiv: Some(&target1),
        };
        let mut theta = random_params(&mut rng, problem.param_len(), init);
        fill_psi1(&problem, &mut theta, &target1);
        refine(&problem, &mut theta, config);
        let terms = (0..k)
            .map(|i| Term {
                lambda: 1.0,
                psi: problem.psi(&theta, i).scaled(s),
                psi1: problem.psi1(&theta, i).map(|p| p.scaled(s)),
            })
            .collect();
        Decomposition::new(m, terms, TargetKind::Covderiv).with_residuals(None, Some(a1))
    });
    Ok(result)
}

/// Terms `(1, Ψ^σ, Ψ^σ₁)` read off the Hessians of the graph functions, with
/// residuals measured against the exact jets of the graph metric at 0.
pub fn decompose_from_embedding(m: usize, fs: &[Polynomial]) -> Result<Decomposition> {
    let metric = build_graph_metric(m, fs)?;
    let forms = hessian_forms(m, fs)?;
    let (r, nabla_r) = exact_curvature(&metric, &vec![0.0; m])?;
    let terms = forms
        .into_iter()
        .map(|(psi, psi1)| Term {
            lambda: 1.0,
            psi,
            psi1: Some(psi1),
        })
        .collect();
    Ok(Decomposition::new(m, terms, TargetKind::Pair).with_residuals(Some(&r), Some(&nabla_r)))
}
