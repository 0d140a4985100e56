//! Hilbert-space dimensions of the 4x4 Hubbard lattice by filling: the full
//! fixed-(Nα, Nβ) space and its zero-momentum sector, counted without
//! enumerating determinants.
//!
//! ```text
//! cargo run --release --example sector_dimensions
//! ```

use asci_prep::hamiltonians::{build_hubbard_planewave, build_hubbard_spatial};
use asci_prep::solver::{sector_size, SectorConstraint};
use asci_prep::{LatticeSpec, Momentum};

fn main() -> asci_prep::Result<()> {
    println!("{:>7} {:>3} {:>3} {:>14} {:>16}", "filling", "Nα", "Nβ", "k = 0 sector", "full space");
    for n in 1..=8 {
        let spec = LatticeSpec::new(4, 4, 1.0, 4.0, n, n);
        let pw = build_hubbard_planewave(&spec)?;
        let real = build_hubbard_spatial(&spec)?;
        let uncapped = |m| SectorConstraint::from_model(m).with_cap(u128::MAX);
        let k0 = sector_size(&pw, &uncapped(&pw).with_momentum(Momentum::zero(4, 4)))?;
        let full = sector_size(&real, &uncapped(&real))?;
        println!("{:>7.4} {n:>3} {n:>3} {k0:>14} {full:>16}", (2 * n) as f64 / 32.0);
    }
    Ok(())
}
