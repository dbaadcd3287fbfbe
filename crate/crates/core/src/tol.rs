//! Tolerances shared by the library, the CLI and the test suites.

/// Singular values at or below `RANK_CUTOFF * σ_max` count as zero.
pub const RANK_CUTOFF: f64 = 1e-9;

/// Relative tolerance (against `‖t‖∞`) for the symmetry identities of constructed tensors.
pub const SYMMETRY: f64 = 1e-12;

/// Relative tolerance (against `max|entry|`) used when validating loaded files.
pub const LOAD_SYMMETRY: f64 = 1e-9;

/// Symmetry tolerance for symmetric forms on ingest.
pub const FORM_SYMMETRY: f64 = 1e-14;

/// Entries at or below this magnitude are omitted by the JSON writer.
pub const WRITE_ZERO: f64 = 1e-14;

/// Self/skew-adjointness tolerance for operators.
pub const ADJOINT: f64 = 1e-12;

/// Orthonormality tolerance for the skew-symmetric curvature operator.
pub const ORTHONORMAL: f64 = 1e-10;

/// Exact (polynomial) path round trip, relative.
pub const EXACT_ROUNDTRIP: f64 = 1e-12;

/// Round-trip threshold used by `realize --verify`.
pub const CLI_ROUNDTRIP: f64 = 1e-10;

/// Finite-difference path tolerance, relative to `1 + ‖·‖∞`.
pub const FD: f64 = 1e-6;

/// Default finite-difference step.
pub const FD_STEP: f64 = 1e-3;

/// Base step for the Richardson-extrapolated stencil.
pub const FD_EXTRAPOLATED_STEP: f64 = 5e-3;

/// Embedding identities on the exact path.
pub const EMBEDDING_EXACT: f64 = 1e-10;

/// Relative residual at which a decomposition counts as successful.
pub const DECOMPOSITION: f64 = 1e-6;

/// Rejection threshold for `|g(x,x)|` when sampling unit pseudo-spheres.
pub const NULL_REJECT: f64 = 1e-6;

/// Eigenvalue-spread tolerance for constancy checks.
pub const EIGEN_SPREAD: f64 = 1e-6;

/// Supported dimension range for dense class computations.
pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 6;

/// Largest dimension accepted by the file loaders.
pub const MAX_LOAD_DIM: usize = 12;
