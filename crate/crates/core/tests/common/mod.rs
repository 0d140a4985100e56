//! Independent reference implementations for the integration tests.
//!
//! Nothing here calls the Slater–Condon code under test: the Hamiltonian is
//! applied as a second-quantized operator to occupation-number bit strings.
#![allow(dead_code)]

use std::collections::BTreeMap;

use asci_prep::hamiltonians::{EriSymmetry, IntegralModel, SourceTag, TwoElectronIntegrals};
use asci_prep::Determinant;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Occupation bit string: mode `p` is α orbital `p`, mode `M + p` is β orbital `p`.
pub fn modes(d: &Determinant) -> u64 {
    let mut s = 0u64;
    for q in d.occupied_indices() {
        s |= 1 << q;
    }
    s
}

fn parity_below(s: u64, q: usize) -> f64 {
    if (s & ((1u64 << q) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn annihilate(q: usize, s: u64) -> Option<(u64, f64)> {
    (s >> q & 1 == 1).then(|| (s & !(1 << q), parity_below(s, q)))
}

pub fn create(q: usize, s: u64) -> Option<(u64, f64)> {
    (s >> q & 1 == 0).then(|| (s | (1 << q), parity_below(s, q)))
}

/// `H|s⟩` for `H = e_core + Σ h_pq a†_pσ a_qσ + ½ Σ (pq|rs) a†_pσ a†_rτ a_sτ a_qσ`.
pub fn apply_hamiltonian(model: &IntegralModel, s: u64) -> BTreeMap<u64, f64> {
    let m = model.norb();
    let mut out: BTreeMap<u64, f64> = BTreeMap::new();
    let mut add = |k: u64, v: f64| *out.entry(k).or_insert(0.0) += v;
    add(s, model.e_core());
    for sigma in 0..2 {
        for p in 0..m {
            for q in 0..m {
                let h = model.h(p, q);
                if h == 0.0 {
                    continue;
                }
                if let Some((s1, f1)) = annihilate(q + sigma * m, s) {
                    if let Some((s2, f2)) = create(p + sigma * m, s1) {
                        add(s2, h * f1 * f2);
                    }
                }
            }
        }
    }
    for sigma in 0..2 {
        for tau in 0..2 {
            for p in 0..m {
                for q in 0..m {
                    for r in 0..m {
                        for t in 0..m {
                            let g = model.eri(p, q, r, t);
                            if g == 0.0 {
                                continue;
                            }
                            let Some((s1, f1)) = annihilate(q + sigma * m, s) else {
                                continue;
                            };
                            let Some((s2, f2)) = annihilate(t + tau * m, s1) else {
                                continue;
                            };
                            let Some((s3, f3)) = create(r + tau * m, s2) else {
                                continue;
                            };
                            let Some((s4, f4)) = create(p + sigma * m, s3) else {
                                continue;
                            };
                            add(s4, 0.5 * g * f1 * f2 * f3 * f4);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Dense `⟨a|H|b⟩` over an explicit determinant list.
pub fn dense_hamiltonian(model: &IntegralModel, dets: &[Determinant]) -> DMatrix<f64> {
    let n = dets.len();
    let index: BTreeMap<u64, usize> = dets.iter().enumerate().map(|(i, d)| (modes(d), i)).collect();
    let mut h = DMatrix::zeros(n, n);
    for (j, d) in dets.iter().enumerate() {
        for (k, v) in apply_hamiltonian(model, modes(d)) {
            if let Some(&i) = index.get(&k) {
                h[(i, j)] += v;
            }
        }
    }
    h
}

/// Lowest eigenvalue and its eigenvector from a full dense diagonalization.
pub fn dense_ground(h: &DMatrix<f64>) -> (f64, Vec<f64>) {
    let eig = SymmetricEigen::new(h.clone());
    let k = (0..h.nrows()).min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b])).unwrap();
    (eig.eigenvalues[k], eig.eigenvectors.column(k).iter().copied().collect())
}

pub fn sorted_eigenvalues(h: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Random real-orbital model with eightfold-symmetric integrals.
pub fn random_model(seed: u64, norb: usize, n_alpha: usize, n_beta: usize) -> IntegralModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = vec![0.0; norb * norb];
    for p in 0..norb {
        for q in 0..=p {
            let v = rng.gen_range(-1.0..1.0);
            h[p * norb + q] = v;
            h[q * norb + p] = v;
        }
    }
    let mut eri = TwoElectronIntegrals::new(norb, EriSymmetry::Eightfold);
    for p in 0..norb {
        for q in 0..=p {
            for r in 0..norb {
                for s in 0..=r {
                    if p * norb + q >= r * norb + s {
                        let diag = p == q && r == s;
                        let v = if diag { rng.gen_range(0.2..1.0) } else { rng.gen_range(-0.2..0.2) };
                        eri.insert(p, q, r, s, v);
                    }
                }
            }
        }
    }
    let e_core = rng.gen_range(-1.0..1.0);
    IntegralModel::new(norb, h, eri, e_core, SourceTag::Fcidump, n_alpha, n_beta).unwrap()
}

/// Random orthogonal matrix from Gram–Schmidt on a seeded Gaussian-ish matrix.
pub fn random_orthogonal(seed: u64, n: usize) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let qr = a.qr();
    qr.q()
}
