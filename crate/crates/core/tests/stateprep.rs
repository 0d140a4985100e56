use asci_prep::solver::Wavefunction;
use asci_prep::stateprep::{
    determinant_key, fidelity, gate_counts, order_determinants, path_length, random_instance, simulate,
    simulate_sparse, synthesize, Circuit, Gate, PrepPlan, QuantumState, QubitMapping, SparseState, Statevector,
};
use asci_prep::Determinant;
use proptest::prelude::*;

/// Textbook dense simulation; `RY(θ) = [[cos θ/2, −sin θ/2], [sin θ/2, cos θ/2]]`.
fn oracle_simulate(c: &Circuit) -> Vec<f64> {
    let n = c.n_qubits();
    let mut psi = vec![0.0; 1 << n];
    psi[0] = 1.0;
    for g in &c.gates {
        let mut next = vec![0.0; 1 << n];
        for (i, &a) in psi.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match g {
                Gate::X(q) => next[i ^ (1 << q)] += a,
                Gate::Mcx { controls, target } => {
                    let fire = controls.iter().all(|&(q, want)| (i >> q & 1 == 1) == want);
                    next[if fire { i ^ (1 << target) } else { i }] += a;
                }
                Gate::Cry { angle, control, target } => {
                    if i >> control & 1 == 0 {
                        next[i] += a;
                        continue;
                    }
                    let (s, co) = (0.5 * angle).sin_cos();
                    let bit = i >> target & 1;
                    let (i0, i1) = (i & !(1 << target), i | (1 << target));
                    if bit == 0 {
                        next[i0] += co * a;
                        next[i1] += s * a;
                    } else {
                        next[i0] -= s * a;
                        next[i1] += co * a;
                    }
                }
            }
        }
        psi = next;
    }
    psi
}

fn instance(seed: u64, norb: usize, max_l: usize) -> (Vec<Determinant>, Vec<f64>, Wavefunction) {
    let (dets, amps) = random_instance(seed, norb, max_l).unwrap();
    let wf = Wavefunction::new(dets.clone(), amps.clone(), 0.0).unwrap();
    (dets, amps, wf)
}

fn dense_index(d: &Determinant) -> usize {
    d.occupied_indices().map(|q| 1 << q).sum()
}

/// Reference greedy walk written from the rule alone.
fn greedy_reference(dets: &[Determinant], coeffs: &[f64]) -> Vec<usize> {
    let dist = |a: &Determinant, b: &Determinant| {
        a.occupied_indices().filter(|q| !b.occupied_indices().any(|r| r == *q)).count()
            + b.occupied_indices().filter(|q| !a.occupied_indices().any(|r| r == *q)).count()
    };
    let mut idx: Vec<usize> = (0..dets.len()).collect();
    idx.sort_by(|&i, &j| coeffs[j].abs().total_cmp(&coeffs[i].abs()).then(dets[i].cmp(&dets[j])));
    let mut order = vec![idx[0]];
    let mut left: Vec<usize> = idx[1..].to_vec();
    while !left.is_empty() {
        let cur = dets[*order.last().unwrap()];
        let (pos, _) = left
            .iter()
            .enumerate()
            .min_by(|(_, &a), (_, &b)| dist(&cur, &dets[a]).cmp(&dist(&cur, &dets[b])).then(dets[a].cmp(&dets[b])))
            .unwrap();
        order.push(left.remove(pos));
    }
    order
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simulator_matches_textbook_gates(seed in any::<u64>(), norb in 1usize..=4, reorder in any::<bool>()) {
        let (_, _, wf) = instance(seed, norb, 12);
        let c = synthesize(&PrepPlan::from_wavefunction(&wf, reorder).unwrap());
        let oracle = oracle_simulate(&c);
        let lib = simulate(&c).unwrap();
        for (a, b) in lib.amplitudes().iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        // The prepared state equals the target, up to a global sign, with aux in |0⟩.
        let overlap: f64 = wf.iter().map(|(d, c)| c * oracle[dense_index(d)]).sum();
        let sign = overlap.signum();
        for (d, coeff) in wf.iter() {
            prop_assert!((sign * oracle[dense_index(d)] - coeff).abs() < 1e-10);
        }
    }

    #[test]
    fn every_gate_preserves_the_norm(seed in any::<u64>(), norb in 1usize..=4) {
        let (_, _, wf) = instance(seed, norb, 16);
        let c = synthesize(&PrepPlan::from_wavefunction(&wf, true).unwrap());
        let mut dense = Statevector::new(c.n_qubits()).unwrap();
        let mut sparse = SparseState::new(c.n_qubits()).unwrap();
        for g in &c.gates {
            dense.apply(g);
            sparse.apply(g);
            prop_assert!((dense.norm() - 1.0).abs() < 1e-12);
            prop_assert!((sparse.norm() - 1.0).abs() < 1e-12);
        }
        if let Some(aux) = QubitMapping::for_circuit(&c).aux {
            prop_assert!(dense.max_amplitude_with(aux) <= 1e-12);
            prop_assert!(sparse.max_amplitude_with(aux) <= 1e-12);
        }
        for (key, amp) in sparse.entries() {
            prop_assert!((dense.amplitude(&key) - amp).abs() < 1e-13);
        }
    }

    #[test]
    fn gate_counts_follow_the_construction(seed in any::<u64>(), norb in 1usize..=5, reorder in any::<bool>()) {
        let (_, _, wf) = instance(seed, norb, 32);
        let plan = PrepPlan::from_wavefunction(&wf, reorder).unwrap();
        let c = synthesize(&plan);
        let counts = gate_counts(&c);
        let l = plan.len();
        let n = plan.n_system;
        let ones = determinant_key(&plan.dets[0]);
        let first_x = (0..n).filter(|&q| ones.get(q)).count();
        prop_assert_eq!(counts.cry, l - 1);
        if l == 1 {
            prop_assert_eq!(counts.x, first_x);
            prop_assert_eq!(counts.total, first_x);
        } else {
            prop_assert_eq!(counts.x, first_x + 1);
            prop_assert_eq!(counts.mcx, l);
            prop_assert_eq!(counts.fan_out, path_length(&plan.dets) - (l - 1));
        }
        prop_assert_eq!(counts.total, c.gates.len());
        prop_assert!(counts.total <= 3 + (n + 2) * l);
        let hist: usize = counts.control_histogram.iter().map(|(_, g)| g).sum();
        prop_assert_eq!(hist, counts.mcx + counts.fan_out);
    }

    #[test]
    fn circuit_text_round_trips(seed in any::<u64>(), norb in 1usize..=5) {
        let (_, _, wf) = instance(seed, norb, 20);
        let c = synthesize(&PrepPlan::from_wavefunction(&wf, true).unwrap());
        let back = Circuit::from_text(&c.to_text()).unwrap();
        prop_assert_eq!(&back, &c);
    }

    #[test]
    fn greedy_order_matches_reference_walk(seed in any::<u64>(), norb in 2usize..=4) {
        let (dets, amps, _) = instance(seed, norb, 9);
        prop_assert_eq!(order_determinants(&dets, &amps).unwrap(), greedy_reference(&dets, &amps));
    }
}

#[test]
fn reordering_shortens_paths_on_average() {
    let (mut plain, mut greedy) = (0usize, 0usize);
    for seed in 0..200 {
        let (dets, amps) = random_instance(seed, 6, 24).unwrap();
        let order = order_determinants(&dets, &amps).unwrap();
        let ordered: Vec<Determinant> = order.iter().map(|&i| dets[i]).collect();
        plain += path_length(&dets);
        greedy += path_length(&ordered);
    }
    assert!(greedy < plain, "greedy {greedy} vs input order {plain}");
}

#[test]
fn sparse_simulation_handles_wide_registers() {
    // 40 spatial orbitals: 81 qubits, far beyond the dense limit.
    let norb = 40;
    let dets: Vec<Determinant> =
        (0..6).map(|i| Determinant::from_occupations(norb, &[i, 20 + i], &[39 - i]).unwrap()).collect();
    let amps = vec![0.6, -0.4, 0.3, 0.2, -0.5, 0.3];
    let wf = Wavefunction::new(dets, amps, 0.0).unwrap();
    let c = synthesize(&PrepPlan::from_wavefunction(&wf, true).unwrap());
    assert!(simulate(&c).is_err());
    let s = simulate_sparse(&c).unwrap();
    let f = fidelity(&s, &wf, &QubitMapping::for_circuit(&c)).unwrap();
    assert!(f >= 1.0 - 1e-12);
}

#[test]
fn tiny_tail_amplitudes_are_refused() {
    let d: Vec<Determinant> = (0..3).map(|i| Determinant::from_occupations(3, &[i], &[]).unwrap()).collect();
    let err = PrepPlan::new(d, vec![1.0, 1e-14, 1e-14]).unwrap_err();
    assert!(matches!(err, asci_prep::Error::Plan(_)));
}
