//! Nested central-difference curvature, independent of the jet formulas.
//!
//! `Γ` comes from central differences of `g`, `∂Γ` from central differences
//! of that `Γ`, and `∂R` from central differences of that `R`. Every level
//! keeps the full Christoffel product terms.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tensor_core::{ClassTensor, CovDerivTensor, CurvTensor, RawTensor};
use crate::tol::{FD_EXTRAPOLATED_STEP, FD_STEP};

use super::jets::{christoffel_from_dg, covderiv_from_parts, raise_last, riemann_from_parts};
use super::metric::{metric_inverse, MetricField};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdOptions {
    pub h: f64,
    /// Combine steps `h` and `h/2` as `(4·F(h/2) − F(h))/3`.
    pub richardson: bool,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions {
            h: FD_STEP,
            richardson: false,
        }
    }
}

impl FdOptions {
    /// Richardson extrapolation at a wider step; suited to metrics whose
    /// entries have sizeable fourth and fifth derivatives.
    pub fn extrapolated() -> Self {
        FdOptions {
            h: FD_EXTRAPOLATED_STEP,
            richardson: true,
        }
    }
}

fn shifted(x: &[f64], a: usize, d: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[a] += d;
    y
}

fn checked_eval(metric: &dyn MetricField, x: &[f64]) -> Result<DMatrix<f64>> {
    let g = metric.eval(x);
    if g.nrows() != metric.dim() || g.ncols() != metric.dim() {
        return Err(Error::DimensionMismatch {
            expected: metric.dim(),
            got: g.nrows(),
        });
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("metric evaluator returned a non-finite entry".into()));
    }
    metric_inverse(&g)?;
    Ok(g)
}

/// Central-difference `Γ_{ijk}(x)` with step `h`.
pub fn christoffel_fd(metric: &dyn MetricField, x: &[f64], h: f64) -> Result<RawTensor> {
    let m = metric.dim();
    check_point(m, x, h)?;
    checked_eval(metric, x)?;
    let mut dg = RawTensor::zeros(m, 3);
    for a in 0..m {
        let gp = checked_eval(metric, &shifted(x, a, h))?;
        let gm = checked_eval(metric, &shifted(x, a, -h))?;
        for i in 0..m {
            for k in 0..m {
                dg.set(&[i, k, a], (gp[(i, k)] - gm[(i, k)]) / (2.0 * h));
            }
        }
    }
    Ok(christoffel_from_dg(&dg))
}

fn check_point(m: usize, x: &[f64], h: f64) -> Result<()> {
    if x.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: x.len(),
        });
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidInput(format!("step must be positive, got {h}")));
    }
    Ok(())
}

fn riemann_fd(metric: &dyn MetricField, x: &[f64], h: f64) -> Result<(RawTensor, RawTensor)> {
    let m = metric.dim();
    let ginv = metric_inverse(&checked_eval(metric, x)?)?;
    let gamma = christoffel_fd(metric, x, h)?;
    let mut dgamma = RawTensor::zeros(m, 4);
    for n in 0..m {
        let gp = christoffel_fd(metric, &shifted(x, n, h), h)?;
        let gm = christoffel_fd(metric, &shifted(x, n, -h), h)?;
        for (flat, (p, q)) in gp.data().iter().zip(gm.data()).enumerate() {
            // flat indexes [i,j,k]; destination [i,j,k,n].
            dgamma.data_mut()[flat * m + n] = (p - q) / (2.0 * h);
        }
    }
    let gamma_up = raise_last(&ginv, &gamma);
    Ok((riemann_from_parts(&gamma, &gamma_up, &dgamma), gamma_up))
}

fn single_step(metric: &dyn MetricField, x: &[f64], h: f64) -> Result<(RawTensor, RawTensor)> {
    let m = metric.dim();
    let (r, gamma_up) = riemann_fd(metric, x, h)?;
    let mut dr = RawTensor::zeros(m, 5);
    for n in 0..m {
        let (rp, _) = riemann_fd(metric, &shifted(x, n, h), h)?;
        let (rm, _) = riemann_fd(metric, &shifted(x, n, -h), h)?;
        for (flat, (p, q)) in rp.data().iter().zip(rm.data()).enumerate() {
            dr.data_mut()[flat * m + n] = (p - q) / (2.0 * h);
        }
    }
    let nabla_r = covderiv_from_parts(&dr, &r, &gamma_up);
    Ok((r, nabla_r))
}

/// Finite-difference `R(x)` and `∇R(x)`; error `O(h²)`, or `O(h⁴)` with
/// Richardson extrapolation.
///
/// Fails when the metric is singular at `x` or at any stencil point.
pub fn curvature_fd(
    metric: &dyn MetricField,
    x: &[f64],
    opts: FdOptions,
) -> Result<(CurvTensor, CovDerivTensor)> {
    check_point(metric.dim(), x, opts.h)?;
    let (mut r, mut nr) = single_step(metric, x, opts.h)?;
    if opts.richardson {
        let (r2, nr2) = single_step(metric, x, opts.h / 2.0)?;
        r = r2.scaled(4.0 / 3.0).sub(&r.scaled(1.0 / 3.0))?;
        nr = nr2.scaled(4.0 / 3.0).sub(&nr.scaled(1.0 / 3.0))?;
    }
    Ok((
        CurvTensor::from_raw_unchecked(r),
        CovDerivTensor::from_raw_unchecked(nr),
    ))
}
