#![allow(dead_code)]

use std::path::{Path, PathBuf};

use algcurv::realization::{polynomial_list_to_json, Polynomial};
use algcurv::rng::seeded;
use algcurv::tensor_core::io::{sym2_to_raw, sym3_to_raw, tensor_to_string, TensorKind};
use algcurv::tensor_core::{random_covderiv, random_curv, ClassTensor, SymForm2, SymForm3};
use rand::Rng;

/// Graph functions with vanishing value and gradient at 0: random quadratic
/// and cubic parts with coefficients in [-1, 1).
pub fn random_f_list(m: usize, kappa: usize, seed: u64) -> Vec<Polynomial> {
    let mut rng = seeded(seed);
    (0..kappa)
        .map(|_| {
            let mut terms = Vec::new();
            for e in exponents(m, 2).into_iter().chain(exponents(m, 3)) {
                terms.push((e, rng.random_range(-1.0..1.0)));
            }
            Polynomial::from_terms(m, terms).unwrap()
        })
        .collect()
}

fn exponents(m: usize, deg: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; m]];
    for _ in 0..deg {
        let mut next = Vec::new();
        for e in &out {
            for i in 0..m {
                let mut f = e.clone();
                f[i] += 1;
                next.push(f);
            }
        }
        next.sort();
        next.dedup();
        out = next;
    }
    out
}

/// Fresh per-test scratch directory under the cargo target tmpdir.
pub fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

pub struct Fixtures {
    pub dir: PathBuf,
}

impl Fixtures {
    /// Writes psi, psi1, A, A1, a raw order-4 tensor, a germ and a graph
    /// function list for dimension 3.
    pub fn write(name: &str) -> Self {
        let dir = scratch(name);
        let mut rng = seeded(11);
        let psi = SymForm2::random(3, &mut rng);
        let psi1 = SymForm3::random(3, &mut rng);
        let a = random_curv(3, 5).unwrap();
        let a1 = random_covderiv(3, 6).unwrap();
        let put = |file: &str, text: String| std::fs::write(dir.join(file), text).unwrap();
        put("psi.json", tensor_to_string(TensorKind::Sym2, &sym2_to_raw(&psi)));
        put("psi1.json", tensor_to_string(TensorKind::Sym3, &sym3_to_raw(&psi1)));
        put("A.json", tensor_to_string(TensorKind::Curv, a.raw()));
        put("A1.json", tensor_to_string(TensorKind::CovDeriv, a1.raw()));
        let mut raw = algcurv::RawTensor::random_normal(3, 4, &mut rng);
        // Round so the file is a plain decimal document.
        for v in raw.data_mut() {
            *v = (*v * 1000.0).round() / 1000.0;
        }
        put("raw4.json", tensor_to_string(TensorKind::Curv, &raw));
        let space = algcurv::Space::new(1, 2).unwrap();
        let germ = algcurv::realization::build_realizing_germ(&space, &a, &a1).unwrap();
        put("germ.json", germ.to_json().to_string());
        let fs = random_f_list(3, 2, 7);
        put("fs.json", polynomial_list_to_json(3, &fs).to_string());
        Fixtures { dir }
    }

    pub fn path(&self, file: &str) -> String {
        self.dir.join(file).to_string_lossy().into_owned()
    }
}
