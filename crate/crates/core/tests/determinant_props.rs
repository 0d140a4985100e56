mod common;

use asci_prep::determinants::parse_determinant;
use asci_prep::{Determinant, Excitation, OrbitalSet, SpinOrbital};
use common::{annihilate, create, modes};
use proptest::prelude::*;

const M: usize = 6;

fn det_strategy() -> impl Strategy<Value = Determinant> {
    (0u64..1 << M, 0u64..1 << M).prop_map(|(a, b)| {
        let set = |bits: u64| OrbitalSet::from_indices((0..M).filter(|p| bits >> p & 1 == 1)).unwrap();
        Determinant::new(M, set(a), set(b)).unwrap()
    })
}

fn same_sector_pair() -> impl Strategy<Value = (Determinant, Determinant)> {
    (0..=M, 0..=M).prop_flat_map(|(na, nb)| {
        let pick = move |n| proptest::sample::subsequence((0..M).collect::<Vec<_>>(), n);
        (pick(na), pick(nb), pick(na), pick(nb)).prop_map(|(a1, b1, a2, b2)| {
            (Determinant::from_occupations(M, &a1, &b1).unwrap(), Determinant::from_occupations(M, &a2, &b2).unwrap())
        })
    })
}

/// Sign of `a†p1 a†p2 a h2 a h1 |d⟩` from the operator algebra alone.
fn oracle_phase(d: &Determinant, holes: &[usize], particles: &[usize]) -> Option<(u64, f64)> {
    let mut s = modes(d);
    let mut sign = 1.0;
    for &h in holes {
        let (t, f) = annihilate(h, s)?;
        s = t;
        sign *= f;
    }
    for &p in particles.iter().rev() {
        let (t, f) = create(p, s)?;
        s = t;
        sign *= f;
    }
    Some((s, sign))
}

fn spin_orbital(q: usize) -> SpinOrbital {
    SpinOrbital::from_index(q, M)
}

proptest! {
    #[test]
    fn excitation_phase_matches_anticommutation(
        d in det_strategy(),
        picks in proptest::collection::vec(0usize..2 * M, 4),
        degree in 1usize..=2,
    ) {
        let occ: Vec<usize> = d.occupied_indices().collect();
        let empty: Vec<usize> = (0..2 * M).filter(|q| !occ.contains(q)).collect();
        prop_assume!(occ.len() >= degree && empty.len() >= degree);
        let mut holes: Vec<usize> = picks.iter().map(|&i| occ[i % occ.len()]).collect();
        let mut particles: Vec<usize> = picks.iter().rev().map(|&i| empty[i % empty.len()]).collect();
        holes.sort_unstable();
        holes.dedup();
        particles.sort_unstable();
        particles.dedup();
        prop_assume!(holes.len() >= degree && particles.len() >= degree);
        holes.truncate(degree);
        particles.truncate(degree);

        let exc = Excitation::from_parts(
            holes.iter().map(|&q| spin_orbital(q)).collect(),
            particles.iter().map(|&q| spin_orbital(q)).collect(),
            M,
        ).unwrap();
        let (target, phase) = d.apply(&exc).unwrap();
        let (bits, sign) = oracle_phase(&d, &holes, &particles).unwrap();
        prop_assert_eq!(modes(&target), bits);
        prop_assert_eq!(f64::from(phase), sign);

        // excitation_to recovers the same excitation and sign when spin is conserved.
        let conserving = target.n_alpha() == d.n_alpha();
        let back = if conserving { d.excitation_to(&target).unwrap() } else { None };
        if let Some(back) = back {
            prop_assert_eq!(back.phase, phase);
            prop_assert_eq!(back.holes(), exc.holes());
            prop_assert_eq!(back.particles(), exc.particles());
        }
        // The inverse excitation returns with the same sign.
        let (home, inv_phase) = target.apply(&exc.inverse()).unwrap();
        prop_assert_eq!(home, d);
        prop_assert_eq!(inv_phase, phase);
    }

    #[test]
    fn degree_is_symmetric_and_half_the_hamming_distance((a, b) in same_sector_pair()) {
        let ab = a.excitation_degree(&b).unwrap();
        prop_assert_eq!(ab, b.excitation_degree(&a).unwrap());
        prop_assert_eq!(2 * ab, a.spin_orbital_hamming(&b).unwrap());
        prop_assert_eq!(ab == 0, a == b);
    }

    #[test]
    fn ordering_is_total_and_alpha_major(a in det_strategy(), b in det_strategy()) {
        let key = |d: &Determinant| (d.alpha().words()[0], d.beta().words()[0]);
        prop_assert_eq!(a.cmp(&b), key(&a).cmp(&key(&b)));
    }

    #[test]
    fn text_form_round_trips(d in det_strategy()) {
        let text = d.to_string();
        prop_assert_eq!(parse_determinant(&text, M).unwrap(), d);
    }

    #[test]
    fn connected_excitations_reach_exactly_distance_one_and_two(d in det_strategy()) {
        let all = Determinant::enumerate(M, d.n_alpha(), d.n_beta()).unwrap();
        let expected: Vec<Determinant> = all
            .into_iter()
            .filter(|e| matches!(d.excitation_degree(e).unwrap(), 1 | 2))
            .collect();
        let mut got: Vec<Determinant> = d.connected_excitations(None).map(|(e, exc)| {
            assert_eq!(d.apply(&exc).unwrap().0, e);
            e
        }).collect();
        got.sort();
        let n = got.len();
        got.dedup();
        prop_assert_eq!(got.len(), n);
        prop_assert_eq!(got, expected);
    }
}

#[test]
fn enumeration_is_sorted_and_counts_binomials() {
    let dets = Determinant::enumerate(6, 3, 2).unwrap();
    assert_eq!(dets.len(), 20 * 15);
    assert!(dets.windows(2).all(|w| w[0] < w[1]));
}
