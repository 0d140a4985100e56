//! Selected-CI ground state of the 4x4 plane-wave Hubbard model at quarter
//! filling (4↑, 4↓, U/t = 4) in the zero-momentum sector, with the
//! perturbative correction on the final space.
//!
//! ```text
//! cargo run --release --example asci_quarter_filling -- 10000
//! ```

use asci_prep::analysis::OverlapReport;
use asci_prep::hamiltonians::{aufbau_shell, build_hubbard_planewave};
use asci_prep::solver::{asci_run, AsciConfig};
use asci_prep::{LatticeSpec, Momentum};

fn main() -> asci_prep::Result<()> {
    let tdets = std::env::args().nth(1).map_or(10_000, |a| a.parse().expect("tdets is an integer"));
    let spec = LatticeSpec::new(4, 4, 1.0, 4.0, 4, 4);
    let model = build_hubbard_planewave(&spec)?;
    let k0 = Momentum::zero(4, 4);

    // Every zero-momentum filling of the open shell, so no single choice is favoured.
    let start = aufbau_shell(&model, Some(k0))?;
    println!("{} starting determinants", start.len());

    let mut cfg = AsciConfig::new(tdets);
    cfg.sector = Some(k0);
    let r = asci_run(&model, &start, &cfg)?;
    print!("{}", r.log_text());
    println!("E_var   {:.10}", r.e_var);
    println!("E_PT2   {:.10}", r.e_pt2);
    println!("E_total {:.10}", r.e_var + r.e_pt2);

    let report = OverlapReport::new(&r.wavefunction, 8)?;
    for line in report.to_text().lines().take(9) {
        println!("{line}");
    }
    Ok(())
}
