//! Command-line front end. [`run`] parses arguments and returns the exit code
//! and output instead of touching the process, so it can be tested directly.
//!
//! Exit codes: 0 when every check passes, 1 when a verification check fails,
//! 2 for usage errors and unreadable or invalid input.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::decomposition::{
    certify_bounds, decompose_covderiv, decompose_curv, decompose_from_embedding, decompose_pair,
    span_check, Mode, SolverConfig,
};
use crate::error::{Error, Result};
use crate::operators::{
    covderiv_operator, curvature_operator, eigenvalue_constancy, jacobi_operator,
    lemma21_instance, nu1_lower_bound, nu_lower_bound, self_adjoint_defect, skew_adjoint_defect,
    skew_operator, szabo_operator, Causal, OperatorFamily, OperatorReport,
};
use crate::realization::{
    build_gf_metric, build_graph_metric, build_realizing_germ, curvature_fd, exact_curvature,
    hessian_forms, orthonormal_frame, parse_germ, parse_polynomial, parse_polynomial_list,
    FdOptions, MetricField, Polynomial,
};
use crate::tensor_core::io::{load_tensor, parse_tensor, tensor_to_value, Loaded, TensorKind};
use crate::tensor_core::{
    build_a1, build_a_psi, check_symmetries, class_dimension, covderiv_dimension_formula,
    curv_dimension_formula, project, random_covderiv, random_curv, ClassKind, ClassTensor,
    CovDerivTensor, CurvTensor, Space,
};
use crate::tol;

#[derive(Parser, Debug)]
#[command(name = "algcurv", version, about = "Algebraic curvature tensor toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
struct OutputArgs {
    /// Report rendering.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the primary artifact (tensor, germ, decomposition or result) here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print only the canonical section (no wall time).
    #[arg(long, global = true)]
    canonical: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Text,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum KindArg {
    Curv,
    Covderiv,
}

impl From<KindArg> for ClassKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Curv => ClassKind::Curv,
            KindArg::Covderiv => ClassKind::CovDeriv,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum OpKind {
    Jacobi,
    Szabo,
    Skew,
    Curvop,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum FamilyArg {
    Jacobi,
    Szabo,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum SamplerArg {
    Spacelike,
    Timelike,
}

fn parse_signature(s: &str) -> std::result::Result<(usize, usize), String> {
    let (p, q) = s
        .split_once(',')
        .ok_or_else(|| format!("expected p,q, got {s:?}"))?;
    let p = p.trim().parse::<usize>().map_err(|e| format!("p: {e}"))?;
    let q = q.trim().parse::<usize>().map_err(|e| format!("q: {e}"))?;
    Ok((p, q))
}

/// A comma-separated vector flag; wrapped so clap treats it as one value.
#[derive(Clone, Debug, Serialize)]
#[serde(transparent)]
struct Point(Vec<f64>);

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    parse_vector(s).map(Point)
}

fn parse_vector(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            let v = t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("{t:?} is not finite"))
            }
        })
        .collect()
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build A_Ψ from a sym2 file, or A_{1,Ψ,Ψ₁} from sym2,sym3 files.
    Gen(GenArgs),
    /// Report per-identity symmetry violations of a curv/covderiv file.
    Check(CheckArgs),
    /// Project a raw order-4 or order-5 tensor onto its symmetry class.
    Project(InArgs),
    /// Class dimensions from the null-space computation.
    Dims(DimsArgs),
    /// Rank of the span of random generators.
    SpanCheck(SpanArgs),
    /// Evaluate a curvature operator.
    Op(OpArgs),
    /// The rank-2m̄ construction and its designated vectors.
    Lemma21(Lemma21Args),
    /// Bracket the number of generator terms.
    Bounds(BoundsArgs),
    /// Search for a generator decomposition.
    Decompose(DecomposeArgs),
    /// Emit a polynomial metric germ realizing (A, A₁).
    Realize(RealizeArgs),
    /// Curvature jets of a germ file, exact and finite-difference.
    CurvFromMetric(CurvFromMetricArgs),
    /// Decomposition read off a graph embedding.
    GraphDecomp(InArgs),
    /// Curvature of the neutral-signature g_f metric.
    GfExample(GfArgs),
    /// Sample Jacobi or Szabó spectra on a unit pseudo-sphere.
    EigConstancy(EigArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Check(_) => "check",
            Command::Project(_) => "project",
            Command::Dims(_) => "dims",
            Command::SpanCheck(_) => "span-check",
            Command::Op(_) => "op",
            Command::Lemma21(_) => "lemma21",
            Command::Bounds(_) => "bounds",
            Command::Decompose(_) => "decompose",
            Command::Realize(_) => "realize",
            Command::CurvFromMetric(_) => "curv-from-metric",
            Command::GraphDecomp(_) => "graph-decomp",
            Command::GfExample(_) => "gf-example",
            Command::EigConstancy(_) => "eig-constancy",
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct GenArgs {
    /// psi.json or psi.json,psi1.json
    #[arg(long = "in", value_delimiter = ',', required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CheckArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Relative tolerance against max|entry|.
    #[arg(long, default_value_t = tol::SYMMETRY)]
    tol: f64,
}

#[derive(Args, Debug, Serialize)]
struct InArgs {
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct DimsArgs {
    /// Single dimension; all of 2..=6 when omitted.
    #[arg(long)]
    m: Option<usize>,
}

#[derive(Args, Debug, Serialize)]
struct SpanArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Defaults to the class dimension plus 10.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct OpArgs {
    #[arg(value_enum)]
    operator: OpKind,
    #[arg(long = "in")]
    input: PathBuf,
    /// Repeat once per argument vector, e.g. --vec 1,0,0 --vec 0,1,0.
    #[arg(long = "vec", value_parser = parse_vector, required = true)]
    vectors: Vec<Vec<f64>>,
    /// Defaults to Riemannian.
    #[arg(long, value_parser = parse_signature)]
    signature: Option<(usize, usize)>,
}

#[derive(Args, Debug, Serialize)]
struct Lemma21Args {
    #[arg(long)]
    mbar: usize,
    /// Append a basis vector on which A and A₁ vanish.
    #[arg(long)]
    odd_pad: bool,
}

#[derive(Args, Debug, Serialize)]
struct SolverArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = tol::DECOMPOSITION)]
    tol: f64,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 200)]
    max_iterations: usize,
    /// Allow λ_i = ±1 instead of λ_i = 1.
    #[arg(long)]
    signed: bool,
}

impl SolverArgs {
    fn config(&self, max_terms: usize) -> SolverConfig {
        SolverConfig {
            max_terms,
            restarts: self.restarts,
            max_iterations: self.max_iterations,
            tolerance: self.tol,
            seed: self.seed,
            mode: if self.signed { Mode::Signed } else { Mode::Unsigned },
            ..SolverConfig::default()
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct BoundsArgs {
    /// A.json,A1.json; random elements of dimension --m when omitted.
    #[arg(long = "in", value_delimiter = ',')]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    m: Option<usize>,
    /// Use the rank-2m̄ construction with this m̄ as input.
    #[arg(long)]
    lemma21: Option<usize>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug, Serialize)]
struct DecomposeArgs {
    /// A.json, A1.json, or A.json,A1.json.
    #[arg(long = "in", value_delimiter = ',', required = true)]
    inputs: Vec<PathBuf>,
    /// Defaults to ½m(m+1).
    #[arg(long)]
    max_terms: Option<usize>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args, Debug, Serialize)]
struct RealizeArgs {
    /// A.json,A1.json
    #[arg(long = "in", value_delimiter = ',', required = true)]
    inputs: Vec<PathBuf>,
    /// Defaults to Riemannian.
    #[arg(long, value_parser = parse_signature)]
    signature: Option<(usize, usize)>,
    /// Recompute the jets at 0 from the germ and compare.
    #[arg(long)]
    verify: bool,
}

#[derive(Args, Debug, Serialize)]
struct CurvFromMetricArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = tol::FD_STEP)]
    h: f64,
    #[arg(long)]
    richardson: bool,
    /// Evaluation point; the origin when omitted.
    #[arg(long, value_parser = parse_point)]
    point: Option<Point>,
}

#[derive(Args, Debug, Serialize)]
struct GfArgs {
    #[arg(long, default_value_t = 3)]
    p: usize,
    /// Polynomial f in p variables; a default with positive definite Hessian
    /// at the point when omitted.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Point in ℝ^{2p}; defaults to (0.1, …, 0.1).
    #[arg(long, value_parser = parse_point)]
    point: Option<Point>,
}

#[derive(Args, Debug, Serialize)]
struct EigArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[arg(long, value_enum)]
    sampler: SamplerArg,
    /// Tensor file (curv for jacobi, covderiv for szabo).
    #[arg(long = "in", conflicts_with = "gf")]
    input: Option<PathBuf>,
    /// Use the g_f example with this p, in an orthonormal frame.
    #[arg(long)]
    gf: Option<usize>,
    /// Signature of the tensor file; defaults to Riemannian.
    #[arg(long, value_parser = parse_signature)]
    signature: Option<(usize, usize)>,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = tol::EIGEN_SPREAD)]
    tol: f64,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Serialize)]
struct CheckLine {
    name: String,
    passed: bool,
    value: f64,
    limit: f64,
}

#[derive(Default)]
struct Report {
    checks: Vec<CheckLine>,
    result: Value,
    artifact: Option<String>,
}

impl Report {
    /// Records `value ≤ limit`.
    fn check(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.checks.push(CheckLine {
            name: name.into(),
            passed: value <= limit,
            value,
            limit,
        });
    }

    /// Records an exact integer match.
    fn check_eq(&mut self, name: impl Into<String>, value: usize, expected: usize) {
        self.checks.push(CheckLine {
            name: name.into(),
            passed: value == expected,
            value: value as f64,
            limit: expected as f64,
        });
    }

    fn check_bool(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push(CheckLine {
            name: name.into(),
            passed: ok,
            value: if ok { 1.0 } else { 0.0 },
            limit: 1.0,
        });
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Loaded> {
    with_path(path, load_tensor(&read(path)?))
}

fn load_curv(path: &Path) -> Result<CurvTensor> {
    match load(path)? {
        Loaded::Curv(t) => Ok(t),
        other => Err(Error::InvalidInput(format!(
            "{}: expected kind curv, got {}",
            path.display(),
            other.kind().as_str()
        ))),
    }
}

fn load_covderiv(path: &Path) -> Result<CovDerivTensor> {
    match load(path)? {
        Loaded::CovDeriv(t) => Ok(t),
        other => Err(Error::InvalidInput(format!(
            "{}: expected kind covderiv, got {}",
            path.display(),
            other.kind().as_str()
        ))),
    }
}

fn space_for(m: usize, signature: Option<(usize, usize)>) -> Result<Space> {
    match signature {
        None => Space::riemannian(m),
        Some((p, q)) if p.checked_add(q) == Some(m) => Space::new(p, q),
        Some((p, q)) => Err(Error::InvalidSignature { p, q, m }),
    }
}

fn curv_value(t: &CurvTensor) -> Value {
    tensor_to_value(TensorKind::Curv, t.raw())
}

fn covderiv_value(t: &CovDerivTensor) -> Value {
    tensor_to_value(TensorKind::CovDeriv, t.raw())
}

fn rel_limit(limit: f64, scale: f64) -> f64 {
    limit * (1.0 + scale)
}

fn cmd_gen(a: &GenArgs, rep: &mut Report) -> Result<()> {
    let psi = match (a.inputs.first(), a.inputs.len()) {
        (Some(p), 1 | 2) => match load(p)? {
            Loaded::Sym2(s) => s,
            other => {
                return Err(Error::InvalidInput(format!(
                    "{}: expected kind sym2, got {}",
                    p.display(),
                    other.kind().as_str()
                )))
            }
        },
        _ => return Err(Error::InvalidInput("--in takes psi.json or psi.json,psi1.json".into())),
    };
    let (kind, raw) = if let Some(p1) = a.inputs.get(1) {
        let psi1 = match load(p1)? {
            Loaded::Sym3(s) => s,
            other => {
                return Err(Error::InvalidInput(format!(
                    "{}: expected kind sym3, got {}",
                    p1.display(),
                    other.kind().as_str()
                )))
            }
        };
        (ClassKind::CovDeriv, build_a1(&psi, &psi1)?.into_raw())
    } else {
        (ClassKind::Curv, build_a_psi(&psi).into_raw())
    };
    let report = check_symmetries(kind, &raw)?;
    rep.check(
        "symmetry",
        report.max_violation(),
        tol::SYMMETRY * report.norm_inf,
    );
    let doc = tensor_to_value(kind.into(), &raw);
    rep.artifact = Some(doc.to_string());
    rep.result = json!({ "tensor": doc, "symmetry": report });
    Ok(())
}

fn cmd_check(a: &CheckArgs, rep: &mut Report) -> Result<()> {
    let doc = with_path(&a.input, parse_tensor(&read(&a.input)?))?;
    let kind = match doc.kind {
        TensorKind::Curv => ClassKind::Curv,
        TensorKind::CovDeriv => ClassKind::CovDeriv,
        other => {
            return Err(Error::InvalidInput(format!(
                "check takes curv or covderiv tensors, got {}",
                other.as_str()
            )))
        }
    };
    let report = check_symmetries(kind, &doc.tensor)?;
    rep.check("symmetry", report.max_violation(), a.tol * report.norm_inf);
    rep.result = json!({ "kind": kind, "m": doc.tensor.m(), "symmetry": report });
    Ok(())
}

fn cmd_project(a: &InArgs, rep: &mut Report) -> Result<()> {
    let doc = with_path(&a.input, parse_tensor(&read(&a.input)?))?;
    let kind = match doc.tensor.order() {
        4 => ClassKind::Curv,
        5 => ClassKind::CovDeriv,
        o => {
            return Err(Error::InvalidInput(format!(
                "project takes order-4 or order-5 tensors, got order {o}"
            )))
        }
    };
    let projected = project(&doc.tensor)?;
    let report = check_symmetries(kind, &projected)?;
    rep.check(
        "symmetry",
        report.max_violation(),
        tol::SYMMETRY * report.norm_inf.max(1.0),
    );
    let distance = doc.tensor.sub(&projected)?.norm();
    let value = tensor_to_value(kind.into(), &projected);
    rep.artifact = Some(value.to_string());
    rep.result = json!({ "tensor": value, "distance": distance, "symmetry": report });
    Ok(())
}

fn cmd_dims(a: &DimsArgs, rep: &mut Report) -> Result<()> {
    let ms: Vec<usize> = match a.m {
        Some(m) => vec![m],
        None => (tol::MIN_DIM..=tol::MAX_DIM).collect(),
    };
    let mut rows = Vec::new();
    for m in ms {
        let curv = class_dimension(m, ClassKind::Curv)?;
        let covderiv = class_dimension(m, ClassKind::CovDeriv)?;
        rep.check_eq(format!("m={m} curv"), curv, curv_dimension_formula(m));
        rep.check_eq(format!("m={m} covderiv"), covderiv, covderiv_dimension_formula(m));
        rows.push(json!({ "m": m, "curv": curv, "covderiv": covderiv }));
    }
    rep.result = json!(rows);
    Ok(())
}

fn cmd_span(a: &SpanArgs, rep: &mut Report) -> Result<()> {
    let kind = ClassKind::from(a.kind);
    let n = match a.samples {
        Some(n) => n,
        None => class_dimension(a.m, kind)? + 10,
    };
    let r = span_check(a.m, kind, n, a.seed)?;
    rep.check_eq("rank", r.rank, r.dimension);
    rep.result = serde_json::to_value(&r)?;
    Ok(())
}

fn cmd_op(a: &OpArgs, rep: &mut Report) -> Result<()> {
    let loaded = load(&a.input)?;
    let m = loaded.to_raw().m();
    let space = space_for(m, a.signature)?;
    let need = match (a.operator, &loaded) {
        (OpKind::Jacobi | OpKind::Szabo, _) => 1,
        (OpKind::Skew, _) | (OpKind::Curvop, Loaded::Curv(_)) => 2,
        (OpKind::Curvop, _) => 3,
    };
    if a.vectors.len() != need {
        return Err(Error::InvalidInput(format!(
            "{:?} takes {need} --vec arguments, got {}",
            a.operator,
            a.vectors.len()
        )));
    }
    let v = &a.vectors;
    let (report, skew): (OperatorReport, bool) = match (a.operator, &loaded) {
        (OpKind::Jacobi, Loaded::Curv(t)) => (jacobi_operator(&space, t, &v[0])?, false),
        (OpKind::Szabo, Loaded::CovDeriv(t)) => (szabo_operator(&space, t, &v[0])?, false),
        (OpKind::Skew, Loaded::Curv(t)) => (skew_operator(&space, t, &v[0], &v[1])?, true),
        (OpKind::Curvop, Loaded::Curv(t)) => (curvature_operator(&space, t, &v[0], &v[1])?, true),
        (OpKind::Curvop, Loaded::CovDeriv(t)) => {
            (covderiv_operator(&space, t, &v[0], &v[1], &v[2])?, true)
        }
        (op, other) => {
            return Err(Error::InvalidInput(format!(
                "operator {op:?} does not apply to kind {}",
                other.kind().as_str()
            )))
        }
    };
    let scale = report.matrix.amax();
    if skew {
        rep.check(
            "skew-adjoint",
            skew_adjoint_defect(&space, &report.matrix),
            rel_limit(tol::ADJOINT, scale),
        );
    } else {
        rep.check(
            "self-adjoint",
            self_adjoint_defect(&space, &report.matrix),
            rel_limit(tol::ADJOINT, scale),
        );
    }
    rep.result = report.to_json();
    Ok(())
}

fn cmd_lemma21(a: &Lemma21Args, rep: &mut Report) -> Result<()> {
    if a.mbar == 0 {
        return Err(Error::InvalidInput("--mbar must be at least 1".into()));
    }
    let inst = lemma21_instance(a.mbar, a.odd_pad);
    let space = inst.space();
    let ra = curvature_operator(&space, &inst.a, &inst.xi1, &inst.xi2)?;
    let r1 = covderiv_operator(&space, &inst.a1, &inst.xi1, &inst.xi2, &inst.xi3)?;
    let r1_alt = covderiv_operator(&space, &inst.a1, &inst.xi1, &inst.xi2, &inst.xi1)?;
    let want = 2 * a.mbar;
    rep.check_eq("rank R_A(xi1,xi2)", ra.numerical_rank, want);
    rep.check_eq("rank R_A1(xi1,xi2,xi3)", r1.numerical_rank, want);
    rep.check_eq("rank R_A1(xi1,xi2,xi1)", r1_alt.numerical_rank, want);
    let mut worst: f64 = 0.0;
    for i in 0..a.mbar {
        let (e, f) = (inst.e(i), inst.f(i));
        let pairs = [
            (ra.apply(&e), f.iter().map(|x| -x).collect::<Vec<_>>()),
            (ra.apply(&f), e.clone()),
            (r1.apply(&e), f.iter().map(|x| -2.0 * x).collect()),
            (r1.apply(&f), e.iter().map(|x| 2.0 * x).collect()),
        ];
        for (got, expect) in pairs {
            for (g, x) in got.iter().zip(&expect) {
                worst = worst.max((g - x).abs());
            }
        }
    }
    rep.check("basis action", worst, 0.0);
    // Designated vectors only, so no seed is involved.
    let nu = nu_lower_bound(&space, &inst.a, 0, 0, &inst.designated_pair())?;
    let nu1 = nu1_lower_bound(&space, &inst.a1, 0, 0, &inst.designated_triples())?;
    rep.check_eq("nu lower bound", nu, a.mbar);
    rep.check_eq("nu1 lower bound", nu1, a.mbar.div_ceil(2));
    rep.result = json!({
        "mbar": a.mbar,
        "m": inst.m,
        "rank_curv": ra.numerical_rank,
        "rank_covderiv": r1.numerical_rank,
        "rank_covderiv_xi1": r1_alt.numerical_rank,
        "nu_lower": nu,
        "nu1_lower": nu1,
        "curv_operator": ra.to_json(),
        "covderiv_operator": r1.to_json(),
    });
    Ok(())
}

fn cmd_bounds(a: &BoundsArgs, rep: &mut Report) -> Result<()> {
    let mut designated = Vec::new();
    let mut designated1 = Vec::new();
    let (ta, ta1) = if let Some(mbar) = a.lemma21 {
        if mbar == 0 {
            return Err(Error::InvalidInput("--lemma21 must be at least 1".into()));
        }
        let inst = lemma21_instance(mbar, false);
        designated = inst.designated_pair();
        designated1 = inst.designated_triples();
        (inst.a, inst.a1)
    } else if a.inputs.len() == 2 {
        (load_curv(&a.inputs[0])?, load_covderiv(&a.inputs[1])?)
    } else if a.inputs.is_empty() {
        let m = a
            .m
            .ok_or_else(|| Error::InvalidInput("give --in A.json,A1.json, --lemma21 or --m".into()))?;
        (
            random_curv(m, a.solver.seed)?,
            random_covderiv(m, a.solver.seed.wrapping_add(1))?,
        )
    } else {
        return Err(Error::InvalidInput("--in takes A.json,A1.json".into()));
    };
    let space = Space::riemannian(ta.m())?;
    let config = a.solver.config(1);
    let b = certify_bounds(&space, &ta, &ta1, &config, &designated, &designated1)?;
    rep.check_bool("upper bound found", b.upper.is_some());
    rep.check_bool("upper1 bound found", b.upper1.is_some());
    rep.check_bool(
        "lower <= upper",
        b.upper.is_none_or(|u| b.lower <= u) && b.upper1.is_none_or(|u| b.lower1 <= u),
    );
    rep.result = serde_json::to_value(&b)?;
    Ok(())
}

fn cmd_decompose(a: &DecomposeArgs, rep: &mut Report) -> Result<()> {
    let first = load(&a.inputs[0])?;
    let m = first.to_raw().m();
    let k = a.max_terms.unwrap_or(m * (m + 1) / 2);
    let config = a.solver.config(k);
    let d = match (first, a.inputs.get(1), a.inputs.len()) {
        (Loaded::Curv(t), None, 1) => decompose_curv(&t, &config)?,
        (Loaded::CovDeriv(t), None, 1) => decompose_covderiv(&t, &config)?,
        (Loaded::Curv(t), Some(p), 2) => decompose_pair(&t, &load_covderiv(p)?, &config)?,
        _ => {
            return Err(Error::InvalidInput(
                "--in takes A.json, A1.json, or A.json,A1.json".into(),
            ))
        }
    };
    rep.check("residual_curv", d.residual_curv, a.solver.tol);
    rep.check("residual_covderiv", d.residual_covderiv, a.solver.tol);
    let value = d.to_json();
    rep.artifact = Some(value.to_string());
    rep.result = value;
    Ok(())
}

fn cmd_realize(a: &RealizeArgs, rep: &mut Report) -> Result<()> {
    if a.inputs.len() != 2 {
        return Err(Error::InvalidInput("--in takes A.json,A1.json".into()));
    }
    let ta = load_curv(&a.inputs[0])?;
    let ta1 = load_covderiv(&a.inputs[1])?;
    let space = space_for(ta.m(), a.signature)?;
    let germ = build_realizing_germ(&space, &ta, &ta1)?;
    let value = germ.to_json();
    let mut result = json!({ "germ": value });
    if a.verify {
        let back = parse_germ(&value.to_string())?;
        let ea = back.curvature_at_origin().max_abs_diff(&ta)? / ta.norm_inf().max(1.0);
        let e1 = back.covderiv_at_origin().max_abs_diff(&ta1)? / ta1.norm_inf().max(1.0);
        rep.check("round trip curv", ea, tol::CLI_ROUNDTRIP);
        rep.check("round trip covderiv", e1, tol::CLI_ROUNDTRIP);
        result["round_trip_error"] = json!(ea.max(e1));
    }
    rep.artifact = Some(value.to_string());
    rep.result = result;
    Ok(())
}

fn cmd_curv_from_metric(a: &CurvFromMetricArgs, rep: &mut Report) -> Result<()> {
    let germ = with_path(&a.input, parse_germ(&read(&a.input)?))?;
    let m = germ.m();
    let point = a.point.clone().map_or_else(|| vec![0.0; m], |p| p.0);
    if point.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: point.len(),
        });
    }
    let (re, ne) = exact_curvature(&germ.to_poly_metric(), &point)?;
    let opts = FdOptions {
        h: a.h,
        richardson: a.richardson,
    };
    let (rf, nf) = curvature_fd(&germ, &point, opts)?;
    let dr = rf.max_abs_diff(&re)?;
    let dn = nf.max_abs_diff(&ne)?;
    rep.check("fd curv", dr, rel_limit(tol::FD, re.norm_inf()));
    rep.check("fd covderiv", dn, rel_limit(tol::FD, ne.norm_inf()));
    if point.iter().all(|&x| x == 0.0) {
        let d0 = germ.curvature_at_origin().max_abs_diff(&re)?;
        let d1 = germ.covderiv_at_origin().max_abs_diff(&ne)?;
        rep.check("origin formula curv", d0, rel_limit(tol::EXACT_ROUNDTRIP, re.norm_inf()));
        rep.check("origin formula covderiv", d1, rel_limit(tol::EXACT_ROUNDTRIP, ne.norm_inf()));
    }
    rep.result = json!({
        "point": point,
        "exact": { "curv": curv_value(&re), "covderiv": covderiv_value(&ne) },
        "fd": { "curv": curv_value(&rf), "covderiv": covderiv_value(&nf) },
        "fd_deviation": { "curv": dr, "covderiv": dn },
    });
    Ok(())
}

fn cmd_graph_decomp(a: &InArgs, rep: &mut Report) -> Result<()> {
    let (m, fs) = with_path(&a.input, parse_polynomial_list(&read(&a.input)?))?;
    let d = decompose_from_embedding(m, &fs)?;
    rep.check("exact residual_curv", d.residual_curv, tol::EMBEDDING_EXACT);
    rep.check("exact residual_covderiv", d.residual_covderiv, tol::EMBEDDING_EXACT);
    let metric = build_graph_metric(m, &fs)?;
    let (rf, nf) = curvature_fd(&metric, &vec![0.0; m], FdOptions::extrapolated())?;
    let (ra, na) = (d.reconstruct_curv(), d.reconstruct_covderiv());
    rep.check("fd curv", rf.max_abs_diff(&ra)?, tol::FD);
    rep.check("fd covderiv", nf.max_abs_diff(&na)?, tol::FD);
    let value = d.to_json();
    rep.artifact = Some(value.to_string());
    rep.result = json!({
        "decomposition": value,
        "curv": curv_value(&ra),
        "covderiv": covderiv_value(&na),
        "hessian_count": hessian_forms(m, &fs)?.len(),
    });
    Ok(())
}

/// `f = Σ x_i² + ¼Σ_{i<j} x_i x_j + x_1³ + ½x_1x_2x_p`; its Hessian is
/// positive definite near the origin.
fn default_f(p: usize) -> Polynomial {
    let mut terms = Vec::new();
    for i in 0..p {
        let mut e = vec![0; p];
        e[i] = 2;
        terms.push((e, 1.0));
        for j in i + 1..p {
            let mut e = vec![0; p];
            e[i] = 1;
            e[j] = 1;
            terms.push((e, 0.25));
        }
    }
    let mut cube = vec![0; p];
    cube[0] = 3;
    terms.push((cube, 1.0));
    if p >= 2 {
        let mut e = vec![0; p];
        e[0] += 1;
        e[1] += 1;
        e[p - 1] += 1;
        terms.push((e, 0.5));
    }
    Polynomial::from_terms(p, terms).expect("length p")
}

fn gf_setup(p: usize, input: Option<&Path>, point: Option<&[f64]>) -> Result<(Polynomial, Vec<f64>)> {
    if p == 0 {
        return Err(Error::InvalidInput("--p must be at least 1".into()));
    }
    let f = match input {
        Some(path) => with_path(path, parse_polynomial(&read(path)?))?,
        None => default_f(p),
    };
    if f.nvars() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: f.nvars(),
        });
    }
    let point = point.map_or_else(|| vec![0.1; 2 * p], <[f64]>::to_vec);
    Ok((f, point))
}

fn cmd_gf(a: &GfArgs, rep: &mut Report) -> Result<()> {
    let (f, point) = gf_setup(a.p, a.input.as_deref(), a.point.as_ref().map(|p| p.0.as_slice()))?;
    let ex = build_gf_metric(&f, &point)?;
    let ta = build_a_psi(&ex.psi);
    let ta1 = build_a1(&ex.psi, &ex.psi1)?;
    let (re, ne) = exact_curvature(&ex.metric, &point)?;
    let (rf, nf) = curvature_fd(&ex.metric, &point, FdOptions::extrapolated())?;
    rep.check("exact curv", re.max_abs_diff(&ta)?, tol::EMBEDDING_EXACT);
    rep.check("exact covderiv", ne.max_abs_diff(&ta1)?, tol::EMBEDDING_EXACT);
    rep.check("fd curv", rf.max_abs_diff(&ta)?, tol::FD);
    rep.check("fd covderiv", nf.max_abs_diff(&ta1)?, tol::FD);
    let eig = nalgebra::SymmetricEigen::new(ex.psi.as_matrix().view((0, 0), (a.p, a.p)).into_owned());
    let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    rep.result = json!({
        "p": a.p,
        "point": point,
        "f": f.to_json(),
        "psi_min_eigenvalue": min_eig,
        "psi_positive_definite": min_eig > 0.0,
        "curv": curv_value(&ta),
        "covderiv": covderiv_value(&ta1),
        "metric_at_point": ex.metric.eval(&point).row_iter().map(|r| r.iter().copied().collect::<Vec<f64>>()).collect::<Vec<_>>(),
    });
    Ok(())
}

fn cmd_eig(a: &EigArgs, rep: &mut Report) -> Result<()> {
    let causal = match a.sampler {
        SamplerArg::Spacelike => Causal::Spacelike,
        SamplerArg::Timelike => Causal::Timelike,
    };
    let (space, loaded) = match (&a.input, a.gf) {
        (Some(path), None) => {
            let l = load(path)?;
            (space_for(l.to_raw().m(), a.signature)?, l)
        }
        (None, Some(p)) => {
            let (f, point) = gf_setup(p, None, None)?;
            let ex = build_gf_metric(&f, &point)?;
            let (space, frame) = orthonormal_frame(&ex.metric.eval(&point))?;
            let l = match a.family {
                FamilyArg::Jacobi => Loaded::Curv(CurvTensor::from_raw_unchecked(
                    build_a_psi(&ex.psi).raw().pullback(&frame)?,
                )),
                FamilyArg::Szabo => Loaded::CovDeriv(CovDerivTensor::from_raw_unchecked(
                    build_a1(&ex.psi, &ex.psi1)?.raw().pullback(&frame)?,
                )),
            };
            (space, l)
        }
        _ => return Err(Error::InvalidInput("give exactly one of --in or --gf".into())),
    };
    let family = match (a.family, &loaded) {
        (FamilyArg::Jacobi, Loaded::Curv(t)) => OperatorFamily::Jacobi(t),
        (FamilyArg::Szabo, Loaded::CovDeriv(t)) => OperatorFamily::Szabo(t),
        (fam, other) => {
            return Err(Error::InvalidInput(format!(
                "{fam:?} needs a {} tensor, got {}",
                if fam == FamilyArg::Jacobi { "curv" } else { "covderiv" },
                other.kind().as_str()
            )))
        }
    };
    let r = eigenvalue_constancy(&space, family, causal, a.samples, a.seed, a.tol)?;
    rep.check("max relative spread", r.max_relative_spread, a.tol);
    let (p, q) = space.signature();
    rep.result = json!({
        "signature": [p, q],
        "constant": r.constant,
        "max_spread": r.max_spread,
        "max_relative_spread": r.max_relative_spread,
        "samples": r.samples,
    });
    Ok(())
}

fn seed_of(cmd: &Command) -> Option<u64> {
    match cmd {
        Command::SpanCheck(a) => Some(a.seed),
        Command::Bounds(a) => Some(a.solver.seed),
        Command::Decompose(a) => Some(a.solver.seed),
        Command::EigConstancy(a) => Some(a.seed),
        _ => None,
    }
}

fn params_of(cmd: &Command) -> Result<Value> {
    Ok(match cmd {
        Command::Gen(a) => serde_json::to_value(a)?,
        Command::Check(a) => serde_json::to_value(a)?,
        Command::Project(a) | Command::GraphDecomp(a) => serde_json::to_value(a)?,
        Command::Dims(a) => serde_json::to_value(a)?,
        Command::SpanCheck(a) => serde_json::to_value(a)?,
        Command::Op(a) => serde_json::to_value(a)?,
        Command::Lemma21(a) => serde_json::to_value(a)?,
        Command::Bounds(a) => serde_json::to_value(a)?,
        Command::Decompose(a) => serde_json::to_value(a)?,
        Command::Realize(a) => serde_json::to_value(a)?,
        Command::CurvFromMetric(a) => serde_json::to_value(a)?,
        Command::GfExample(a) => serde_json::to_value(a)?,
        Command::EigConstancy(a) => serde_json::to_value(a)?,
    })
}

fn execute(cmd: &Command, rep: &mut Report) -> Result<()> {
    match cmd {
        Command::Gen(a) => cmd_gen(a, rep),
        Command::Check(a) => cmd_check(a, rep),
        Command::Project(a) => cmd_project(a, rep),
        Command::Dims(a) => cmd_dims(a, rep),
        Command::SpanCheck(a) => cmd_span(a, rep),
        Command::Op(a) => cmd_op(a, rep),
        Command::Lemma21(a) => cmd_lemma21(a, rep),
        Command::Bounds(a) => cmd_bounds(a, rep),
        Command::Decompose(a) => cmd_decompose(a, rep),
        Command::Realize(a) => cmd_realize(a, rep),
        Command::CurvFromMetric(a) => cmd_curv_from_metric(a, rep),
        Command::GraphDecomp(a) => cmd_graph_decomp(a, rep),
        Command::GfExample(a) => cmd_gf(a, rep),
        Command::EigConstancy(a) => cmd_eig(a, rep),
    }
}

fn render_text(canonical: &Value, wall_ms: Option<f64>) -> String {
    let manifest = &canonical["manifest"];
    let mut out = format!(
        "algcurv {} {}\n",
        manifest["version"].as_str().unwrap_or(""),
        manifest["command"].as_str().unwrap_or("")
    );
    if let Some(seed) = manifest["seed"].as_u64() {
        out.push_str(&format!("seed: {seed}\n"));
    }
    for c in manifest["checks"].as_array().into_iter().flatten() {
        out.push_str(&format!(
            "{} {}: {} (limit {})\n",
            if c["passed"].as_bool() == Some(true) { "PASS" } else { "FAIL" },
            c["name"].as_str().unwrap_or(""),
            c["value"],
            c["limit"],
        ));
    }
    if let Some(ms) = wall_ms {
        out.push_str(&format!("wall time: {ms:.1} ms\n"));
    }
    out.push_str("result:\n");
    out.push_str(&serde_json::to_string_pretty(&canonical["result"]).unwrap_or_default());
    out.push('\n');
    out
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let started = Instant::now();
    let mut rep = Report::default();
    let outcome = params_of(&cli.command).and_then(|params| {
        execute(&cli.command, &mut rep)?;
        Ok(params)
    });
    let params = match outcome {
        Ok(p) => p,
        Err(e) => {
            return Outcome {
                code: 2,
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
            }
        }
    };
    let passed = rep.checks.iter().all(|c| c.passed);
    let canonical = json!({
        "manifest": {
            "command": cli.command.name(),
            "params": params,
            "seed": seed_of(&cli.command),
            "version": env!("CARGO_PKG_VERSION"),
            "checks": rep.checks,
            "passed": passed,
        },
        "result": rep.result,
    });
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    if let Some(path) = &cli.output.out {
        let artifact = rep
            .artifact
            .take()
            .unwrap_or_else(|| canonical["result"].to_string());
        if let Err(e) = std::fs::write(path, artifact + "\n") {
            return Outcome {
                code: 2,
                stdout: String::new(),
                stderr: format!("error: {}: {e}\n", path.display()),
            };
        }
    }
    let stdout = match (cli.output.format, cli.output.canonical) {
        (Format::Json, true) => canonical.to_string() + "\n",
        (Format::Json, false) => {
            json!({ "canonical": canonical, "wall_time_ms": wall_ms }).to_string() + "\n"
        }
        (Format::Text, true) => render_text(&canonical, None),
        (Format::Text, false) => render_text(&canonical, Some(wall_ms)),
    };
    Outcome {
        code: if passed { 0 } else { 1 },
        stdout,
        stderr: String::new(),
    }
}
