//! Compiles the leading determinants of a Hubbard ground state into a
//! preparation circuit, simulates it, and compares gate counts with and
//! without the nearest-neighbour reordering.
//!
//! ```text
//! cargo run --release --example state_preparation -- 12
//! ```

use asci_prep::hamiltonians::build_hubbard_spatial;
use asci_prep::solver::{exact_diagonalize, SectorConstraint};
use asci_prep::stateprep::{
    fidelity, gate_counts, path_length, simulate, simulate_sparse, synthesize, PrepPlan, QuantumState, QubitMapping,
    DENSE_QUBIT_LIMIT,
};
use asci_prep::LatticeSpec;

fn main() -> asci_prep::Result<()> {
    let l = std::env::args().nth(1).map_or(12, |a| a.parse().expect("L is an integer"));
    let spec = LatticeSpec::new(3, 2, 1.0, 4.0, 2, 2);
    let model = build_hubbard_spatial(&spec)?;
    let ground = exact_diagonalize(&model, &SectorConstraint::from_model(&model), 1e-10)?;
    let target = ground.truncated(l.min(ground.len()))?;

    for reorder in [false, true] {
        let plan = PrepPlan::from_wavefunction(&target, reorder)?;
        let circuit = synthesize(&plan);
        let mapping = QubitMapping::for_circuit(&circuit);
        let (f, leak) = if circuit.n_qubits() <= DENSE_QUBIT_LIMIT {
            let s = simulate(&circuit)?;
            (fidelity(&s, &target, &mapping)?, mapping.aux.map_or(0.0, |q| s.max_amplitude_with(q)))
        } else {
            let s = simulate_sparse(&circuit)?;
            (fidelity(&s, &target, &mapping)?, mapping.aux.map_or(0.0, |q| s.max_amplitude_with(q)))
        };
        println!("reorder {reorder}: path length {}, fidelity {f:.15}, aux {leak:.1e}", path_length(&plan.dets));
        print!("{}", gate_counts(&circuit).to_text());
        if reorder {
            println!("first gates:");
            for line in circuit.to_text().lines().take(8) {
                println!("  {line}");
            }
        }
    }
    Ok(())
}
