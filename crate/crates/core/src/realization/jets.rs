//! Curvature and its covariant derivative from metric jets.
//!
//! Conventions: `Γ_{ijk} = g(∇_{∂_i}∂_j, ∂_k)`, `Γ^a_{ij} = g^{ab} Γ_{ijb}`,
//! `R_{ijkl} = ∂_iΓ_{jkl} − ∂_jΓ_{ikl} − Γ^a_{jk}Γ_{ila} + Γ^a_{ik}Γ_{jla}`
//! and `∇R_{ijkl;n} = ∂_nR_{ijkl} − Γ^a_{ni}R_{ajkl} − Γ^a_{nj}R_{iakl}
//! − Γ^a_{nk}R_{ijal} − Γ^a_{nl}R_{ijka}`.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::tensor_core::{ClassTensor, CovDerivTensor, CurvTensor, RawTensor};

use super::metric::{metric_inverse, MetricJet, PolyMetric};

/// `Γ_{ijk}` from first derivatives `dg[i,k,a] = ∂_a g_{ik}`.
pub fn christoffel_from_dg(dg: &RawTensor) -> RawTensor {
    let m = dg.m();
    let mut out = RawTensor::zeros(m, 3);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let v = 0.5 * (dg.get(&[j, k, i]) + dg.get(&[i, k, j]) - dg.get(&[i, j, k]));
                out.set(&[i, j, k], v);
            }
        }
    }
    out
}

/// `∂_nΓ_{ijk}` stored as `[i,j,k,n]`, from `d2g[i,k,a,b] = ∂_a∂_b g_{ik}`.
fn christoffel_derivative(d2g: &RawTensor) -> RawTensor {
    let m = d2g.m();
    let mut out = RawTensor::zeros(m, 4);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for n in 0..m {
                    let v = 0.5
                        * (d2g.get(&[j, k, i, n]) + d2g.get(&[i, k, j, n])
                            - d2g.get(&[i, j, k, n]));
                    out.set(&[i, j, k, n], v);
                }
            }
        }
    }
    out
}

/// `∂_p∂_nΓ_{ijk}` stored as `[i,j,k,n,p]`.
fn christoffel_second_derivative(d3g: &RawTensor) -> RawTensor {
    let m = d3g.m();
    let mut out = RawTensor::zeros(m, 5);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for n in 0..m {
                    for p in 0..m {
                        let v = 0.5
                            * (d3g.get(&[j, k, i, n, p]) + d3g.get(&[i, k, j, n, p])
                                - d3g.get(&[i, j, k, n, p]));
                        out.set(&[i, j, k, n, p], v);
                    }
                }
            }
        }
    }
    out
}

/// Raises the last index: `Γ^a_{ij} = g^{ab}Γ_{ijb}`, stored as `[i,j,a]`.
pub(crate) fn raise_last(ginv: &DMatrix<f64>, gamma: &RawTensor) -> RawTensor {
    let m = gamma.m();
    let mut out = RawTensor::zeros(m, 3);
    for i in 0..m {
        for j in 0..m {
            for a in 0..m {
                let v: f64 = (0..m).map(|b| ginv[(a, b)] * gamma.get(&[i, j, b])).sum();
                out.set(&[i, j, a], v);
            }
        }
    }
    out
}

/// `R_{ijkl}` from `Γ`, `Γ^a` (as `[i,j,a]`) and `∂Γ` (as `[i,j,k,n]`).
pub(crate) fn riemann_from_parts(gamma: &RawTensor, gamma_up: &RawTensor, dgamma: &RawTensor) -> RawTensor {
    let m = gamma.m();
    let mut r = RawTensor::zeros(m, 4);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let mut v = dgamma.get(&[j, k, l, i]) - dgamma.get(&[i, k, l, j]);
                    for a in 0..m {
                        v -= gamma_up.get(&[j, k, a]) * gamma.get(&[i, l, a]);
                        v += gamma_up.get(&[i, k, a]) * gamma.get(&[j, l, a]);
                    }
                    r.set(&[i, j, k, l], v);
                }
            }
        }
    }
    r
}

/// `∇R_{ijkl;n}` from `∂_nR` (as `[i,j,k,l,n]`), `R` and `Γ^a` (as `[i,j,a]`).
pub(crate) fn covderiv_from_parts(dr: &RawTensor, r: &RawTensor, gamma_up: &RawTensor) -> RawTensor {
    let m = r.m();
    let mut out = RawTensor::zeros(m, 5);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    for n in 0..m {
                        let mut v = dr.get(&[i, j, k, l, n]);
                        for a in 0..m {
                            v -= gamma_up.get(&[n, i, a]) * r.get(&[a, j, k, l])
                                + gamma_up.get(&[n, j, a]) * r.get(&[i, a, k, l])
                                + gamma_up.get(&[n, k, a]) * r.get(&[i, j, a, l])
                                + gamma_up.get(&[n, l, a]) * r.get(&[i, j, k, a]);
                        }
                        out.set(&[i, j, k, l, n], v);
                    }
                }
            }
        }
    }
    out
}

/// `R(x)` and `∇R(x)` from an exact 3-jet, using the full formulas (valid
/// where the 1-jet does not vanish).
///
/// The returned tensors are not re-projected; their symmetry defects are
/// rounding-level for exact jets.
pub fn curvature_from_jet(jet: &MetricJet) -> Result<(CurvTensor, CovDerivTensor)> {
    let m = jet.m();
    let ginv = metric_inverse(&jet.g)?;
    let gamma = christoffel_from_dg(&jet.dg);
    let dgamma = christoffel_derivative(&jet.d2g);
    let d2gamma = christoffel_second_derivative(&jet.d3g);
    let gamma_up = raise_last(&ginv, &gamma);
    let r = riemann_from_parts(&gamma, &gamma_up, &dgamma);

    // ∂_nΓ^a_{ij} = −g^{ac}(∂_n g_{cd})g^{db}Γ_{ijb} + g^{ab}∂_nΓ_{ijb}, as [i,j,a,n].
    let mut dgamma_up = RawTensor::zeros(m, 4);
    for n in 0..m {
        let dgn = DMatrix::from_fn(m, m, |c, d| jet.dg.get(&[c, d, n]));
        let dginv = -(&ginv * dgn * &ginv);
        for i in 0..m {
            for j in 0..m {
                for a in 0..m {
                    let v: f64 = (0..m)
                        .map(|b| {
                            dginv[(a, b)] * gamma.get(&[i, j, b])
                                + ginv[(a, b)] * dgamma.get(&[i, j, b, n])
                        })
                        .sum();
                    dgamma_up.set(&[i, j, a, n], v);
                }
            }
        }
    }

    let mut dr = RawTensor::zeros(m, 5);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    for n in 0..m {
                        let mut v = d2gamma.get(&[j, k, l, i, n]) - d2gamma.get(&[i, k, l, j, n]);
                        for a in 0..m {
                            v -= dgamma_up.get(&[j, k, a, n]) * gamma.get(&[i, l, a])
                                + gamma_up.get(&[j, k, a]) * dgamma.get(&[i, l, a, n]);
                            v += dgamma_up.get(&[i, k, a, n]) * gamma.get(&[j, l, a])
                                + gamma_up.get(&[i, k, a]) * dgamma.get(&[j, l, a, n]);
                        }
                        dr.set(&[i, j, k, l, n], v);
                    }
                }
            }
        }
    }
    let nabla_r = covderiv_from_parts(&dr, &r, &gamma_up);
    Ok((
        CurvTensor::from_raw_unchecked(r),
        CovDerivTensor::from_raw_unchecked(nabla_r),
    ))
}

/// `R_{ijkl} = ½{∂_i∂_kg_{jl} + ∂_j∂_lg_{ik} − ∂_i∂_lg_{jk} − ∂_j∂_kg_{il}}`,
/// valid where the 1-jet vanishes.
pub fn origin_curvature(jet: &MetricJet) -> CurvTensor {
    let m = jet.m();
    let d = &jet.d2g;
    let mut r = RawTensor::zeros(m, 4);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let v = 0.5
                        * (d.get(&[j, l, i, k]) + d.get(&[i, k, j, l])
                            - d.get(&[j, k, i, l])
                            - d.get(&[i, l, j, k]));
                    r.set(&[i, j, k, l], v);
                }
            }
        }
    }
    CurvTensor::from_raw_unchecked(r)
}

/// The same with one more derivative `∂_n`, valid where the 1-jet vanishes.
pub fn origin_covderiv(jet: &MetricJet) -> CovDerivTensor {
    let m = jet.m();
    let d = &jet.d3g;
    let mut r = RawTensor::zeros(m, 5);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    for n in 0..m {
                        let v = 0.5
                            * (d.get(&[j, l, i, k, n]) + d.get(&[i, k, j, l, n])
                                - d.get(&[j, k, i, l, n])
                                - d.get(&[i, l, j, k, n]));
                        r.set(&[i, j, k, l, n], v);
                    }
                }
            }
        }
    }
    CovDerivTensor::from_raw_unchecked(r)
}

/// Exact `R(x)` and `∇R(x)` of a polynomial metric.
pub fn exact_curvature(metric: &PolyMetric, x: &[f64]) -> Result<(CurvTensor, CovDerivTensor)> {
    curvature_from_jet(&metric.jet_at(x))
}

/// Exact `Γ_{ijk}(x)` of a polynomial metric.
pub fn exact_christoffel(metric: &PolyMetric, x: &[f64]) -> Result<RawTensor> {
    let jet = metric.jet_at(x);
    metric_inverse(&jet.g)?;
    Ok(christoffel_from_dg(&jet.dg))
}
