//! Writes a Hubbard model as FCIDUMP text, reads it back as a generic
//! integral model, and checks that both give the same exact ground state.
//!
//! ```text
//! cargo run --example fcidump_round_trip
//! ```

use asci_prep::hamiltonians::{build_hubbard_spatial, parse_fcidump, write_fcidump};
use asci_prep::solver::{exact_diagonalize, SectorConstraint};
use asci_prep::LatticeSpec;

fn main() -> asci_prep::Result<()> {
    let spec = LatticeSpec::new(3, 2, 1.0, 4.0, 3, 3);
    let lattice = build_hubbard_spatial(&spec)?;
    let text = write_fcidump(&lattice)?;
    println!("{}", text.lines().take(4).collect::<Vec<_>>().join("\n"));
    println!("... {} lines", text.lines().count());

    let generic = parse_fcidump(&text)?;
    let c = SectorConstraint::from_model(&lattice);
    let a = exact_diagonalize(&lattice, &c, 1e-10)?;
    let b = exact_diagonalize(&generic, &c, 1e-10)?;
    println!("lattice model   E = {:.12}", a.energy());
    println!("from FCIDUMP    E = {:.12}", b.energy());
    println!("difference      {:.1e}", (a.energy() - b.energy()).abs());
    Ok(())
}
