//! Natural orbitals of a correlated ground state and what they buy: the same
//! exact energy, but a more compact wavefunction.
//!
//! ```text
//! cargo run --release --example natural_orbitals
//! ```

use asci_prep::analysis::{natural_orbital_rotation, one_rdm, rotate_integrals};
use asci_prep::hamiltonians::build_hubbard_spatial;
use asci_prep::solver::{exact_diagonalize, SectorConstraint};
use asci_prep::LatticeSpec;

fn main() -> asci_prep::Result<()> {
    let spec = LatticeSpec::new(4, 2, 1.0, 4.0, 2, 2);
    let model = build_hubbard_spatial(&spec)?;
    let c = SectorConstraint::from_model(&model);
    let site = exact_diagonalize(&model, &c, 1e-11)?;

    let gamma = one_rdm(&site);
    let (u, occ) = natural_orbital_rotation(&gamma);
    println!("trace γ      {:.12}", gamma.trace());
    println!("occupations  {}", occ.iter().map(|o| format!("{o:.4}")).collect::<Vec<_>>().join(" "));

    let rotated = rotate_integrals(&model, &u)?;
    let natural = exact_diagonalize(&rotated, &c, 1e-11)?;
    println!("E site basis     {:.12}", site.energy());
    println!("E natural basis  {:.12}", natural.energy());
    for (label, wf) in [("site", &site), ("natural", &natural)] {
        let top: f64 = wf.coeffs().iter().take(10).map(|x| x * x).sum();
        println!("{label:>8} basis: |c_0|² = {:.4}, top-10 weight = {top:.4}", wf.coeffs()[0].powi(2));
    }
    Ok(())
}
