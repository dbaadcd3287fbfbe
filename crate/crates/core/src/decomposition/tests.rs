use super::*;
use crate::operators::lemma21_instance;
use crate::realization::{build_realizing_germ, Polynomial};
use crate::rng::seeded;
use crate::tensor_core::{random_covderiv, random_curv, ClassKind, Space};

fn cfg(max_terms: usize, mode: Mode, seed: u64) -> SolverConfig {
    SolverConfig {
        max_terms,
        mode,
        seed,
        ..SolverConfig::default()
    }
}

#[test]
fn span_examples() {
    for (m, kind, rank) in [(2, ClassKind::Curv, 1), (4, ClassKind::Curv, 20), (3, ClassKind::CovDeriv, 15)] {
        let r = span_check(m, kind, rank + 10, 7).unwrap();
        assert_eq!(r.rank, rank);
        assert!(r.full);
    }
    assert!(matches!(
        span_check(3, ClassKind::Curv, 15, 0),
        Err(Error::InsufficientSamples { needed: 16, got: 15 })
    ));
}

#[test]
fn two_dimensions_need_one_term() {
    for seed in 0..5 {
        let a = random_curv(2, seed).unwrap();
        let d = decompose_curv(&a, &cfg(1, Mode::Signed, seed)).unwrap();
        assert!(d.residual_curv <= 1e-8, "{}", d.residual_curv);
        assert_eq!(d.term_count, 1);
    }
}

#[test]
fn three_dimensions_need_two_signed_terms() {
    for seed in 0..5 {
        let a = random_curv(3, seed).unwrap();
        let d = decompose_curv(&a, &cfg(2, Mode::Signed, seed)).unwrap();
        assert!(d.residual_curv <= 1e-6, "seed {seed}: {}", d.residual_curv);
    }
}

#[test]
fn single_generator_recovered_up_to_sign() {
    let mut rng = seeded(3);
    let psi = SymForm2::random(3, &mut rng);
    let a = build_a_psi(&psi);
    let d = decompose_curv(&a, &cfg(1, Mode::Unsigned, 1)).unwrap();
    assert!(d.residual_curv <= 1e-10);
    assert!(d.reconstruct_curv().max_abs_diff(&a).unwrap() <= 1e-10 * a.norm_inf());
}

#[test]
fn stored_residual_matches_reconstruction() {
    let a = random_curv(4, 11).unwrap();
    let d = decompose_curv(&a, &cfg(1, Mode::Unsigned, 0)).unwrap();
    let again = relative_residual(&a, &d.reconstruct_curv());
    assert!((again - d.residual_curv).abs() <= 1e-13);
    // Ten parameters cannot reach a generic point of a 20-dimensional space.
    assert!(d.residual_curv > 1e-3);
}

#[test]
fn sign_flip_leaves_reconstruction() {
    let a = random_curv(3, 2).unwrap();
    let d = decompose_curv(&a, &cfg(2, Mode::Signed, 2)).unwrap();
    let mut flipped = d.clone();
    flipped.terms[0].psi = flipped.terms[0].psi.scaled(-1.0);
    let diff = d.reconstruct_curv().max_abs_diff(&flipped.reconstruct_curv()).unwrap();
    assert!(diff <= 1e-14 * d.reconstruct_curv().norm_inf().max(1.0));
}

#[test]
fn four_dimensions_ten_unsigned_terms() {
    let a = random_curv(4, 5).unwrap();
    let d = decompose_curv(&a, &cfg(10, Mode::Unsigned, 5)).unwrap();
    assert!(d.residual_curv <= 1e-6, "{}", d.residual_curv);
}

#[test]
fn pair_from_single_generator() {
    let mut rng = seeded(9);
    let psi = SymForm2::random(3, &mut rng);
    let psi1 = SymForm3::random(3, &mut rng);
    let a = build_a_psi(&psi);
    let a1 = build_a1(&psi, &psi1).unwrap();
    let d = decompose_pair(&a, &a1, &cfg(1, Mode::Unsigned, 0)).unwrap();
    assert!(d.residual_curv <= 1e-10 && d.residual_covderiv <= 1e-10, "{d:?}");
}

#[test]
fn pair_from_realizing_germ() {
    let space = Space::riemannian(3).unwrap();
    let a = random_curv(3, 21).unwrap();
    let a1 = random_covderiv(3, 22).unwrap();
    let germ = build_realizing_germ(&space, &a, &a1).unwrap();
    let (ga, ga1) = (germ.curvature_at_origin(), germ.covderiv_at_origin());
    let d = decompose_pair(&ga, &ga1, &cfg(6, Mode::Unsigned, 4)).unwrap();
    assert!(d.residual_curv <= 1e-6 && d.residual_covderiv <= 1e-6, "{} {}", d.residual_curv, d.residual_covderiv);
}

#[test]
fn pair_with_zero_derivative() {
    let a = random_curv(3, 4).unwrap();
    let d = decompose_pair(&a, &CovDerivTensor::zeros(3), &cfg(6, Mode::Unsigned, 0)).unwrap();
    assert!(d.reconstruct_covderiv().norm() <= 1e-8);
    assert!(d.residual_curv <= 1e-6);
}

#[test]
fn second_stage_is_linear() {
    let mut rng = seeded(1);
    let psis: Vec<SymForm2> = (0..3).map(|_| SymForm2::random(3, &mut rng)).collect();
    let u: Vec<SymForm3> = (0..3).map(|_| SymForm3::random(3, &mut rng)).collect();
    let v: Vec<SymForm3> = (0..3).map(|_| SymForm3::random(3, &mut rng)).collect();
    let map = |w: &[SymForm3]| {
        let mut out = CovDerivTensor::zeros(3);
        for (p, q) in psis.iter().zip(w) {
            out = out.add(&build_a1(p, q).unwrap()).unwrap();
        }
        out
    };
    let combo: Vec<SymForm3> = u
        .iter()
        .zip(&v)
        .map(|(a, b)| SymForm3::from_params(3, &a.to_params().iter().zip(b.to_params()).map(|(x, y)| 2.0 * x - 3.0 * y).collect::<Vec<_>>()))
        .collect();
    let lhs = map(&combo);
    let rhs = map(&u).scaled(2.0).sub(&map(&v).scaled(3.0)).unwrap();
    assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12 * rhs.norm_inf().max(1.0));
}

#[test]
fn embedding_examples() {
    let f = Polynomial::from_terms(2, [(vec![2, 0], 0.5), (vec![0, 2], 0.5)]).unwrap();
    let d = decompose_from_embedding(2, &[f]).unwrap();
    assert_eq!(d.terms[0].psi, SymForm2::identity(2));
    assert!(d.residual() <= 1e-10);
    assert!((d.reconstruct_curv().get(0, 1, 1, 0) - 1.0).abs() < 1e-15);

    let empty = decompose_from_embedding(3, &[]).unwrap();
    assert_eq!(empty.term_count, 0);
    assert_eq!(empty.residual(), 0.0);
}

#[test]
fn bounds_examples() {
    let inst = lemma21_instance(2, false);
    let space = inst.space();
    let config = SolverConfig {
        seed: 3,
        ..SolverConfig::default()
    };
    let b = certify_bounds(&space, &inst.a, &inst.a1, &config, &inst.designated_pair(), &inst.designated_triples()).unwrap();
    assert_eq!(b.lower, 2);
    assert!(b.upper.is_some_and(|u| u >= b.lower && u <= 10), "{b:?}");

    let zero = certify_bounds(&space, &CurvTensor::zeros(4), &CovDerivTensor::zeros(4), &config, &[], &[]).unwrap();
    assert_eq!((zero.lower, zero.upper, zero.lower1, zero.upper1), (0, Some(0), 0, Some(0)));

    let mut rng = seeded(0);
    let psi = SymForm2::random(3, &mut rng);
    let single = build_a_psi(&psi);
    let s3 = Space::riemannian(3).unwrap();
    let b = certify_bounds(&s3, &single, &CovDerivTensor::zeros(3), &config, &[], &[]).unwrap();
    assert!(b.lower <= 1 && b.upper == Some(1));

    assert!(certify_bounds(&Space::new(1, 2).unwrap(), &single, &CovDerivTensor::zeros(3), &config, &[], &[]).is_err());
}

#[test]
fn config_validation() {
    let a = random_curv(2, 0).unwrap();
    assert!(decompose_curv(&a, &cfg(0, Mode::Unsigned, 0)).is_err());
    let bad = SolverConfig {
        restarts: 0,
        ..SolverConfig::default()
    };
    assert!(decompose_curv(&a, &bad).is_err());
}
