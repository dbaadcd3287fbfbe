//! End-to-end acceptance run. Prints one `criterion N: PASS|FAIL` line per
//! criterion and exits non-zero if any fails.

mod common;

use std::process::Command;
use std::time::Instant;

use algcurv::decomposition::{certify_bounds, decompose_curv, decompose_pair, span_check, SolverConfig};
use algcurv::operators::{
    covderiv_matrix, covderiv_operator, curvature_matrix, curvature_operator, lemma21_instance,
    nu_lower_bound,
};
use algcurv::realization::{
    build_gf_metric, build_graph_metric, build_realizing_germ, curvature_fd, exact_curvature,
    hessian_forms, FdOptions, Polynomial,
};
use algcurv::rng::{normal_vec, seeded};
use algcurv::tensor_core::{
    build_a1, build_a_psi, class_dimension, random_covderiv, random_curv, ClassKind, ClassTensor,
    CovDerivTensor, CurvTensor, Space, SymForm2, SymForm3,
};

type Outcome = Result<String, String>;
type Pairs = Vec<(Vec<f64>, Vec<f64>)>;
type Triples = Vec<(Vec<f64>, Vec<f64>, Vec<f64>)>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel(err: f64, scale: f64) -> f64 {
    err / (1.0 + scale)
}

fn generator_validity() -> Outcome {
    let mut worst = 0.0_f64;
    for m in 2..=6 {
        let mut rng = seeded(1000 + m as u64);
        for trial in 0..100 {
            let psi = SymForm2::random(m, &mut rng);
            let psi1 = SymForm3::random(m, &mut rng);
            let a = build_a_psi(&psi);
            let a1 = build_a1(&psi, &psi1).map_err(|e| e.to_string())?;
            for r in [a.check(), a1.check()] {
                let v = r.max_violation() / r.norm_inf.max(f64::MIN_POSITIVE);
                worst = worst.max(v);
                ensure(r.passes(1e-12), || format!("m={m} trial={trial}: relative violation {v:e}"))?;
            }
        }
    }
    Ok(format!("500 pairs, worst relative violation {worst:.1e}"))
}

fn span() -> Outcome {
    let mut notes = Vec::new();
    for m in 2..=4 {
        for kind in [ClassKind::Curv, ClassKind::CovDeriv] {
            let dim = class_dimension(m, kind).map_err(|e| e.to_string())?;
            let start = Instant::now();
            let r = span_check(m, kind, dim + 10, 7).map_err(|e| e.to_string())?;
            let secs = start.elapsed().as_secs_f64();
            ensure(r.rank == dim, || format!("m={m} {kind:?}: rank {} of {dim}", r.rank))?;
            if m == 4 && kind == ClassKind::CovDeriv {
                ensure(secs < 30.0, || format!("m=4 covderiv took {secs:.1}s"))?;
                notes.push(format!("m=4 covderiv rank {dim} in {secs:.2}s"));
            }
        }
    }
    Ok(notes.join(", "))
}

fn round_trip() -> Outcome {
    let (mut worst_exact, mut worst_fd) = (0.0_f64, 0.0_f64);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for m in 2..=4 {
        for (p, q) in [(0, m), (1, m - 1)] {
            let space = Space::new(p, q).map_err(|e| e.to_string())?;
            for seed in 0..25u64 {
                let a = random_curv(m, 100 * m as u64 + seed).map_err(|e| e.to_string())?;
                let a1 = random_covderiv(m, 500 * m as u64 + seed).map_err(|e| e.to_string())?;
                let germ = build_realizing_germ(&space, &a, &a1).map_err(|e| e.to_string())?;
                let origin = vec![0.0; m];
                let poly = germ.to_poly_metric();
                let (re, ne) = exact_curvature(&poly, &origin).map_err(|e| e.to_string())?;
                let ex = (re.max_abs_diff(&a).unwrap() / a.norm_inf())
                    .max(ne.max_abs_diff(&a1).unwrap() / a1.norm_inf());
                worst_exact = worst_exact.max(ex);
                ensure(ex <= 1e-12, || format!("m={m} ({p},{q}) seed={seed}: exact {ex:e}"))?;

                let (rf, nf) =
                    curvature_fd(&germ, &origin, FdOptions::default()).map_err(|e| e.to_string())?;
                let fd = rel(rf.max_abs_diff(&a).unwrap(), a.norm_inf())
                    .max(rel(nf.max_abs_diff(&a1).unwrap(), a1.norm_inf()));
                worst_fd = worst_fd.max(fd);
                ensure(fd <= 1e-6, || format!("m={m} ({p},{q}) seed={seed}: fd {fd:e}"))?;

                // Order under halving, at a point where the Christoffel terms
                // are active and at steps where truncation dominates.
                let mut rng = seeded(seed);
                let x: Vec<f64> = normal_vec(&mut rng, m).iter().map(|v| 0.1 * v).collect();
                let (re, ne) = exact_curvature(&poly, &x).map_err(|e| e.to_string())?;
                let dev = |h: f64| -> Result<(f64, f64), String> {
                    let (rf, nf) = curvature_fd(&germ, &x, FdOptions { h, richardson: false })
                        .map_err(|e| e.to_string())?;
                    Ok((rf.max_abs_diff(&re).unwrap(), nf.max_abs_diff(&ne).unwrap()))
                };
                let (r1, n1) = dev(2e-2)?;
                let (r2, n2) = dev(1e-2)?;
                for (name, e1, e2) in [("R", r1, r2), ("nabla R", n1, n2)] {
                    let order = (e1 / e2).log2();
                    lo = lo.min(order);
                    hi = hi.max(order);
                    ensure((1.5..=2.5).contains(&order), || {
                        format!("m={m} ({p},{q}) seed={seed}: {name} order {order:.2}")
                    })?;
                }
            }
        }
    }
    Ok(format!(
        "150 germs, exact {worst_exact:.1e}, fd {worst_fd:.1e}, order in [{lo:.2}, {hi:.2}]"
    ))
}

fn lemma21() -> Outcome {
    let mut issues = Vec::new();
    // (a) single generators: max sampled ranks per m
    let mut ranks_a = Vec::new();
    for m in 2..=6 {
        let space = Space::riemannian(m).unwrap();
        let mut rng = seeded(40 + m as u64);
        let psi = SymForm2::random(m, &mut rng);
        let psi1 = SymForm3::random(m, &mut rng);
        let a = build_a_psi(&psi);
        let a1 = build_a1(&psi, &psi1).unwrap();
        let (mut worst, mut worst1) = (0, 0);
        for _ in 0..64 {
            let (x, y, z) = (normal_vec(&mut rng, m), normal_vec(&mut rng, m), normal_vec(&mut rng, m));
            worst = worst.max(curvature_operator(&space, &a, &x, &y).unwrap().numerical_rank);
            worst1 = worst1.max(covderiv_operator(&space, &a1, &x, &y, &z).unwrap().numerical_rank);
        }
        if worst > 2 {
            issues.push(format!("(a) m={m}: single A_Psi operator rank {worst}"));
        }
        if worst1 > 2 {
            issues.push(format!("(a) m={m}: single A1 operator rank {worst1}"));
        }
        ranks_a.push(format!("{worst}/{worst1}"));
    }
    // (b) and (c)
    for mbar in 1..=3 {
        for odd_pad in [false, true] {
            let inst = lemma21_instance(mbar, odd_pad);
            let space = inst.space();
            let ra = curvature_matrix(&space, &inst.a, &inst.xi1, &inst.xi2).unwrap();
            let r1 = covderiv_matrix(&space, &inst.a1, &inst.xi1, &inst.xi2, &inst.xi3).unwrap();
            let ranks = [
                curvature_operator(&space, &inst.a, &inst.xi1, &inst.xi2).unwrap().numerical_rank,
                covderiv_operator(&space, &inst.a1, &inst.xi1, &inst.xi2, &inst.xi3).unwrap().numerical_rank,
                covderiv_operator(&space, &inst.a1, &inst.xi1, &inst.xi2, &inst.xi1).unwrap().numerical_rank,
            ];
            if ranks.iter().any(|&r| r != 2 * mbar) {
                issues.push(format!("(b) mbar={mbar} pad={odd_pad}: ranks {ranks:?}"));
            }
            let apply = |mat: &nalgebra::DMatrix<f64>, v: &[f64]| -> Vec<f64> {
                (mat * nalgebra::DVector::from_column_slice(v)).as_slice().to_vec()
            };
            let scaled = |v: &[f64], c: f64| -> Vec<f64> { v.iter().map(|x| c * x).collect() };
            for i in 0..mbar {
                let (e, f) = (inst.e(i), inst.f(i));
                let cases = [
                    ("R_A e", apply(&ra, &e), scaled(&f, -1.0)),
                    ("R_A f", apply(&ra, &f), e.clone()),
                    ("R_A1 e", apply(&r1, &e), scaled(&f, -2.0)),
                    ("R_A1 f", apply(&r1, &f), scaled(&e, 2.0)),
                ];
                for (name, got, want) in cases {
                    if got != want {
                        issues.push(format!("(b) mbar={mbar} i={i}: {name} = {got:?}"));
                    }
                }
            }
            let lower = nu_lower_bound(&space, &inst.a, 64, 3, &inst.designated_pair()).unwrap();
            if lower != mbar {
                issues.push(format!("(c) mbar={mbar}: nu lower bound {lower}"));
            }
        }
    }
    let summary = format!("max single-generator ranks (curv/covderiv) for m=2..6: {}", ranks_a.join(" "));
    if issues.is_empty() {
        Ok(format!("{summary}; construction ranks, proof identities and nu >= mbar hold"))
    } else {
        Err(format!("{summary}; {}", issues.join("; ")))
    }
}

fn upper_bounds() -> Outcome {
    let mut notes = Vec::new();
    for (m, k) in [(2, 1), (3, 2)] {
        let mut worst = 0.0_f64;
        for seed in 0..10u64 {
            let a = random_curv(m, 2000 + seed).unwrap();
            let cfg = SolverConfig { max_terms: k, seed, ..SolverConfig::default() };
            let d = decompose_curv(&a, &cfg).map_err(|e| e.to_string())?;
            worst = worst.max(d.residual());
            ensure(d.succeeded(cfg.tolerance), || {
                format!("curv m={m} k={k} seed={seed}: residual {:e}", d.residual())
            })?;
        }
        notes.push(format!("curv m={m} k={k} worst {worst:.1e}"));
    }
    for m in 2..=4 {
        let k = m * (m + 1) / 2;
        let mut worst = 0.0_f64;
        for seed in 0..10u64 {
            let a = random_curv(m, 3000 + seed).unwrap();
            let a1 = random_covderiv(m, 4000 + seed).unwrap();
            let cfg = SolverConfig { max_terms: k, seed, restarts: 20, ..SolverConfig::default() };
            let d = decompose_pair(&a, &a1, &cfg).map_err(|e| e.to_string())?;
            worst = worst.max(d.residual());
            ensure(d.succeeded(cfg.tolerance), || {
                format!("pair m={m} k={k} seed={seed}: residual {:e}", d.residual())
            })?;
        }
        notes.push(format!("pair m={m} k={k} worst {worst:.1e}"));
    }
    let mut cases: Vec<(Space, CurvTensor, CovDerivTensor, Pairs, Triples)> = Vec::new();
    for m in 2..=3 {
        for seed in 0..3u64 {
            cases.push((
                Space::riemannian(m).unwrap(),
                random_curv(m, 5000 + seed).unwrap(),
                random_covderiv(m, 6000 + seed).unwrap(),
                Vec::new(),
                Vec::new(),
            ));
        }
    }
    for mbar in 1..=2 {
        let inst = lemma21_instance(mbar, false);
        cases.push((inst.space(), inst.a.clone(), inst.a1.clone(), inst.designated_pair(), inst.designated_triples()));
    }
    for (n, (space, a, a1, d, d1)) in cases.iter().enumerate() {
        let cfg = SolverConfig { seed: n as u64, ..SolverConfig::default() };
        let b = certify_bounds(space, a, a1, &cfg, d, d1).map_err(|e| e.to_string())?;
        let ok = b.upper.is_none_or(|u| b.lower <= u) && b.upper1.is_none_or(|u| b.lower1 <= u);
        ensure(ok, || format!("case {n}: bounds {b:?}"))?;
    }
    notes.push(format!("{} bound brackets consistent", cases.len()));
    Ok(notes.join(", "))
}

fn embedding() -> Outcome {
    let (mut worst_exact, mut worst_fd) = (0.0_f64, 0.0_f64);
    for m in 2..=3 {
        let cap = m * (m + 1) / 2;
        for seed in 0..10u64 {
            let kappa = 1 + seed as usize % cap;
            let fs = common::random_f_list(m, kappa, 70 * m as u64 + seed);
            let metric = build_graph_metric(m, &fs).map_err(|e| e.to_string())?;
            let mut a = CurvTensor::zeros(m);
            let mut a1 = CovDerivTensor::zeros(m);
            for (psi, psi1) in hessian_forms(m, &fs).map_err(|e| e.to_string())? {
                a = a.add(&build_a_psi(&psi)).unwrap();
                a1 = a1.add(&build_a1(&psi, &psi1).unwrap()).unwrap();
            }
            let origin = vec![0.0; m];
            let (re, ne) = exact_curvature(&metric, &origin).map_err(|e| e.to_string())?;
            let ex = re.max_abs_diff(&a).unwrap().max(ne.max_abs_diff(&a1).unwrap());
            worst_exact = worst_exact.max(ex);
            ensure(ex <= 1e-10, || format!("m={m} seed={seed}: exact {ex:e}"))?;
            let (rf, nf) = curvature_fd(&metric, &origin, FdOptions::extrapolated())
                .map_err(|e| e.to_string())?;
            let fd = rf.max_abs_diff(&a).unwrap().max(nf.max_abs_diff(&a1).unwrap());
            worst_fd = worst_fd.max(fd);
            ensure(fd <= 1e-6, || format!("m={m} seed={seed}: fd {fd:e}"))?;
        }
    }
    Ok(format!("20 lists, exact {worst_exact:.1e}, fd {worst_fd:.1e}"))
}

fn gf_family() -> Outcome {
    let mut worst = 0.0_f64;
    let mut worst_quadratic = 0.0_f64;
    for p in 3..=4 {
        let mut point: Vec<f64> = (0..2 * p).map(|i| 0.05 * (i as f64 + 1.0)).collect();
        point[1] = -0.1;
        let e = |i: usize, n: u32| {
            let mut v = vec![0u32; p];
            v[i] += n;
            v
        };
        let quad: Vec<(Vec<u32>, f64)> = (0..p).map(|i| (e(i, 2), 1.0 + 0.5 * i as f64)).collect();
        let mut fs = Vec::new();
        // Σ a_i x_i² + x₁³
        let mut t = quad.clone();
        t.push((e(0, 3), 1.0));
        fs.push(t);
        // Σ a_i x_i² + x₁x₂x_p − ½x₂³
        let mut t = quad.clone();
        let mut mixed = vec![0u32; p];
        mixed[0] += 1;
        mixed[1] += 1;
        mixed[p - 1] += 1;
        t.push((mixed, 1.0));
        t.push((e(1, 3), -0.5));
        fs.push(t);
        // Σ a_i x_i² + ¼x₁x₂ + x_p³ + x₁²x₂
        let mut t = quad.clone();
        let mut x12 = vec![0u32; p];
        x12[0] = 1;
        x12[1] = 1;
        t.push((x12, 0.25));
        t.push((e(p - 1, 3), 1.0));
        let mut x1x1x2 = vec![0u32; p];
        x1x1x2[0] = 2;
        x1x1x2[1] = 1;
        t.push((x1x1x2, 1.0));
        fs.push(t);
        for (n, terms) in fs.into_iter().enumerate() {
            let f = Polynomial::from_terms(p, terms).unwrap();
            let ex = build_gf_metric(&f, &point).map_err(|e| e.to_string())?;
            let eig = ex.psi.as_matrix().view((0, 0), (p, p)).into_owned().symmetric_eigenvalues();
            ensure(eig.min() > 0.0, || format!("p={p} f{n}: x-block Hessian not positive definite"))?;
            let a = build_a_psi(&ex.psi);
            let a1 = build_a1(&ex.psi, &ex.psi1).unwrap();
            let (rf, nf) = curvature_fd(&ex.metric, &point, FdOptions::extrapolated())
                .map_err(|e| e.to_string())?;
            let d = rf.max_abs_diff(&a).unwrap().max(nf.max_abs_diff(&a1).unwrap());
            worst = worst.max(d);
            ensure(d <= 1e-6, || format!("p={p} f{n}: fd deviation {d:e}"))?;
        }
        let f = Polynomial::from_terms(p, quad).unwrap();
        let ex = build_gf_metric(&f, &point).map_err(|e| e.to_string())?;
        let (_, nf) = curvature_fd(&ex.metric, &point, FdOptions::extrapolated()).map_err(|e| e.to_string())?;
        worst_quadratic = worst_quadratic.max(nf.norm_inf());
        ensure(nf.norm_inf() <= 1e-8, || format!("p={p} quadratic: |nabla R| {:e}", nf.norm_inf()))?;
    }
    Ok(format!("6 cubic f, worst {worst:.1e}; quadratic |nabla R| {worst_quadratic:.1e}"))
}

fn determinism() -> Outcome {
    let fx = common::Fixtures::write("acceptance-cli");
    let p = |f: &str| fx.path(f);
    let runs: Vec<Vec<String>> = vec![
        vec!["gen".into(), "--in".into(), p("psi.json")],
        vec!["gen".into(), "--in".into(), format!("{},{}", p("psi.json"), p("psi1.json"))],
        vec!["check".into(), "--in".into(), p("A1.json")],
        vec!["project".into(), "--in".into(), p("raw4.json")],
        vec!["dims".into(), "--m".into(), "4".into()],
        vec!["span-check".into(), "--m".into(), "3".into(), "--kind".into(), "covderiv".into(), "--seed".into(), "5".into()],
        vec!["op".into(), "jacobi".into(), "--in".into(), p("A.json"), "--vec".into(), "1,0.5,0".into()],
        vec!["op".into(), "szabo".into(), "--in".into(), p("A1.json"), "--vec".into(), "0,1,2".into()],
        vec!["op".into(), "skew".into(), "--in".into(), p("A.json"), "--vec".into(), "1,0,0".into(), "--vec".into(), "0,1,0".into()],
        vec!["op".into(), "curvop".into(), "--in".into(), p("A1.json"), "--vec".into(), "1,0,0".into(), "--vec".into(), "0,1,0".into(), "--vec".into(), "1,1,1".into()],
        vec!["lemma21".into(), "--mbar".into(), "3".into()],
        vec!["bounds".into(), "--m".into(), "3".into(), "--seed".into(), "2".into()],
        vec!["decompose".into(), "--in".into(), format!("{},{}", p("A.json"), p("A1.json")), "--seed".into(), "3".into()],
        vec!["realize".into(), "--in".into(), format!("{},{}", p("A.json"), p("A1.json")), "--verify".into()],
        vec!["curv-from-metric".into(), "--in".into(), p("germ.json"), "--point".into(), "0.1,0.2,-0.1".into()],
        vec!["graph-decomp".into(), "--in".into(), p("fs.json")],
        vec!["gf-example".into(), "--p".into(), "3".into()],
        vec!["eig-constancy".into(), "--family".into(), "szabo".into(), "--sampler".into(), "spacelike".into(), "--gf".into(), "2".into(), "--seed".into(), "9".into()],
    ];
    let bin = env!("CARGO_BIN_EXE_algcurv");
    let mut covered = std::collections::BTreeSet::new();
    for argv in &runs {
        let run = || {
            Command::new(bin)
                .args(argv)
                .arg("--canonical")
                .output()
                .map_err(|e| e.to_string())
        };
        let (first, second) = (run()?, run()?);
        ensure(first.status.code() == Some(0), || {
            format!("{argv:?} exited {:?}: {}", first.status.code(), String::from_utf8_lossy(&first.stderr))
        })?;
        ensure(!first.stdout.is_empty() && first.stdout == second.stdout, || {
            format!("{argv:?}: reports differ")
        })?;
        covered.insert(argv[0].clone());
    }
    ensure(covered.len() == 14, || format!("only {} subcommands covered", covered.len()))?;
    Ok(format!("{} invocations over {} subcommands byte-identical", runs.len(), covered.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("generator validity", generator_validity),
        ("generator span", span),
        ("germ round trip", round_trip),
        ("operator ranks", lemma21),
        ("decomposition upper bounds", upper_bounds),
        ("embedding identities", embedding),
        ("g_f family", gf_family),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("criterion {}: PASS  {name} ({secs:.1}s): {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({secs:.1}s): {detail}", n + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
}
