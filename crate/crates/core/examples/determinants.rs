//! Determinant bit strings, excitations, and fermionic signs.
//!
//! ```text
//! cargo run --example determinants
//! ```

use asci_prep::determinants::parse_determinant;
use asci_prep::{Determinant, Excitation, SpinOrbital};

fn main() -> asci_prep::Result<()> {
    let d = parse_determinant("α:0,1,3|β:0,2", 6)?;
    println!("determinant     {d}");
    println!("electrons       ({}, {})", d.n_alpha(), d.n_beta());
    println!("occupied qubits {:?}", d.occupied_indices().collect::<Vec<_>>());

    // α 1 → 4 together with β 0 → 5
    let exc = Excitation::from_parts(
        vec![SpinOrbital::alpha(1), SpinOrbital::beta(0)],
        vec![SpinOrbital::alpha(4), SpinOrbital::beta(5)],
        6,
    )?;
    let (target, sign) = d.apply(&exc)?;
    println!("double          {d} -> {target}, sign {sign:+}");
    let back = target.excitation_to(&d)?.expect("a double is in range");
    println!("inverse sign    {:+}", back.phase);

    let mut by_degree = [0usize; 3];
    for (_, e) in d.connected_excitations(None) {
        by_degree[e.degree()] += 1;
    }
    println!("connected       {} singles, {} doubles", by_degree[1], by_degree[2]);

    let space = Determinant::enumerate(6, 3, 2)?;
    println!("(3, 2) in 6     {} determinants, first {} last {}", space.len(), space[0], space[space.len() - 1]);
    Ok(())
}
