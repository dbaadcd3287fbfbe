//! Metric germs realizing a pair `(A, A₁)`, curvature jets of polynomial
//! metrics, a finite-difference oracle, and graph metrics.

mod fd;
mod germ;
mod graph;
mod jets;
mod metric;
mod poly;

pub use fd::{christoffel_fd, curvature_fd, FdOptions};
pub use germ::{build_realizing_germ, parse_germ, MetricGerm};
pub use graph::{build_gf_metric, build_graph_metric, derivative_forms_at, hessian_forms, GfExample};
pub use jets::{
    christoffel_from_dg, curvature_from_jet, exact_christoffel, exact_curvature, origin_covderiv,
    origin_curvature,
};
pub use metric::{metric_inverse, orthonormal_frame, MetricField, MetricJet, PolyMetric, SmoothMetric};
pub use poly::{
    parse_polynomial, parse_polynomial_list, polynomial_list_to_json, Polynomial, MAX_EXPONENT,
};
