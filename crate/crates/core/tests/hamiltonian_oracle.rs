mod common;

use asci_prep::hamiltonians::{build_hubbard_planewave, build_hubbard_spatial, sector_determinants, total_momentum};
use asci_prep::{Determinant, IntegralModel, LatticeSpec, Momentum};
use common::{apply_hamiltonian, dense_hamiltonian, modes, random_model, sorted_eigenvalues};
use proptest::prelude::*;

fn assert_matches_oracle(model: &IntegralModel, dets: &[Determinant], tol: f64) {
    let oracle = dense_hamiltonian(model, dets);
    for (i, a) in dets.iter().enumerate() {
        for (j, b) in dets.iter().enumerate() {
            let h = model.matrix_element(a, b).unwrap();
            assert!((h - oracle[(i, j)]).abs() < tol, "⟨{a}|H|{b}⟩ = {h}, oracle {}", oracle[(i, j)]);
        }
    }
}

/// `for_each_connected` must reproduce every nonzero off-diagonal of `H|d⟩`.
fn assert_connections_complete(model: &IntegralModel, d: &Determinant, tol: f64) {
    let mut expected = apply_hamiltonian(model, modes(d));
    expected.remove(&modes(d));
    expected.retain(|_, v| v.abs() > tol);
    let mut seen = std::collections::BTreeMap::new();
    model.for_each_connected(d, |e, h| {
        *seen.entry(modes(&e)).or_insert(0.0) += h;
    });
    seen.retain(|_, v: &mut f64| v.abs() > tol);
    assert_eq!(expected.keys().collect::<Vec<_>>(), seen.keys().collect::<Vec<_>>());
    for (k, v) in &expected {
        assert!((v - seen[k]).abs() < tol);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_integrals_match_second_quantization(seed in any::<u64>(), na in 0usize..=4, nb in 0usize..=4) {
        let model = random_model(seed, 4, na, nb);
        let dets = Determinant::enumerate(4, na, nb).unwrap();
        assert_matches_oracle(&model, &dets, 1e-12);
        for d in dets.iter().take(6) {
            assert_connections_complete(&model, d, 1e-12);
        }
    }

    #[test]
    fn projected_hamiltonian_is_symmetric(seed in any::<u64>()) {
        let model = random_model(seed, 5, 2, 2);
        let dets = Determinant::enumerate(5, 2, 2).unwrap();
        for a in dets.iter().step_by(7) {
            for b in &dets {
                let ab = model.matrix_element(a, b).unwrap();
                let ba = model.matrix_element(b, a).unwrap();
                prop_assert!((ab - ba).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn spatial_hubbard_fast_path_matches_oracle() {
    for (lx, ly, na, nb) in [(2, 1, 1, 1), (2, 2, 2, 1), (3, 1, 2, 2), (3, 2, 2, 2), (4, 1, 2, 1)] {
        let spec = LatticeSpec::new(lx, ly, 1.0, 3.5, na, nb);
        let model = build_hubbard_spatial(&spec).unwrap();
        let dets = Determinant::enumerate(spec.sites(), na, nb).unwrap();
        assert_matches_oracle(&model, &dets, 1e-12);
        assert_matches_oracle(&model.generic(), &dets, 1e-12);
        for d in dets.iter().take(4) {
            assert_connections_complete(&model, d, 1e-12);
        }
    }
}

#[test]
fn planewave_fast_path_matches_oracle() {
    for (lx, ly, na, nb) in [(2, 2, 2, 1), (3, 1, 2, 1), (4, 1, 2, 2), (3, 2, 2, 1)] {
        let spec = LatticeSpec::new(lx, ly, 1.0, 2.5, na, nb);
        let model = build_hubbard_planewave(&spec).unwrap();
        let dets = Determinant::enumerate(spec.sites(), na, nb).unwrap();
        assert_matches_oracle(&model, &dets, 1e-12);
        for d in dets.iter().take(4) {
            assert_connections_complete(&model, d, 1e-12);
        }
    }
}

#[test]
fn planewave_couples_only_equal_momenta() {
    let spec = LatticeSpec::new(3, 2, 1.0, 4.0, 2, 2);
    let model = build_hubbard_planewave(&spec).unwrap();
    let dets = Determinant::enumerate(spec.sites(), 2, 2).unwrap();
    for a in dets.iter().step_by(5) {
        let ka = total_momentum(a, &spec);
        model.for_each_connected(a, |b, h| {
            assert!(h == 0.0 || total_momentum(&b, &spec) == ka);
        });
    }
}

#[test]
fn spatial_and_planewave_spectra_agree() {
    // The two bases are related by a unitary orbital rotation, so the full
    // fixed-(Nα, Nβ) spectra coincide.
    for (lx, ly) in [(2, 2), (3, 1), (4, 1)] {
        let spec = LatticeSpec::new(lx, ly, 1.0, 4.0, 2, 1);
        let dets = Determinant::enumerate(spec.sites(), 2, 1).unwrap();
        let real = sorted_eigenvalues(&dense_hamiltonian(&build_hubbard_spatial(&spec).unwrap(), &dets));
        let pw = sorted_eigenvalues(&dense_hamiltonian(&build_hubbard_planewave(&spec).unwrap(), &dets));
        for (a, b) in real.iter().zip(&pw) {
            assert!((a - b).abs() < 1e-10, "{lx}x{ly}: {a} vs {b}");
        }
    }
}

#[test]
fn sector_enumeration_partitions_the_space() {
    let spec = LatticeSpec::new(3, 2, 1.0, 4.0, 2, 2);
    let all = Determinant::enumerate(spec.sites(), 2, 2).unwrap();
    let mut total = 0;
    for kx in 0..3 {
        for ky in 0..2 {
            let k = Momentum::new(kx, ky, 3, 2);
            let sector = sector_determinants(&spec, Some(k)).unwrap();
            assert!(sector.iter().all(|d| total_momentum(d, &spec) == k));
            assert!(sector.windows(2).all(|w| w[0] < w[1]));
            total += sector.len();
        }
    }
    assert_eq!(total, all.len());
}
