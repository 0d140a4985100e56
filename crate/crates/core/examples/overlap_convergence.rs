//! How fast the leading-determinant weight and the variational energy
//! approach their exact values as the selected space grows, on the 4x4
//! plane-wave Hubbard model at quarter filling (U/t = 4, zero momentum).
//!
//! The weight typically settles well before the energy does. The last column
//! extrapolates the weight against the perturbative correction.
//!
//! ```text
//! cargo run --release --example overlap_convergence
//! ```

use asci_prep::analysis::{extrapolate_overlap, overlap_squared};
use asci_prep::hamiltonians::{aufbau_shell, build_hubbard_planewave};
use asci_prep::solver::{asci_run, exact_diagonalize, AsciConfig, SectorConstraint};
use asci_prep::{LatticeSpec, Momentum};

fn main() -> asci_prep::Result<()> {
    let spec = LatticeSpec::new(4, 4, 1.0, 4.0, 4, 4);
    let model = build_hubbard_planewave(&spec)?;
    let k0 = Momentum::zero(4, 4);

    let exact = exact_diagonalize(&model, &SectorConstraint::from_model(&model).with_momentum(k0), 1e-10)?;
    let reference = exact.dets()[0];
    let w_exact = exact.coeffs()[0].powi(2);
    let e_corr = exact.energy() - model.diagonal(&reference);
    println!("exact: E = {:.8}, |c_0|² = {w_exact:.6} on {reference}", exact.energy());

    let start = aufbau_shell(&model, Some(k0))?;
    let mut points = Vec::new();
    println!("{:>6} {:>10} {:>12} {:>14} {:>12}", "tdets", "|c_0|²", "weight err", "E err / E_c", "E_PT2");
    for tdets in [500, 1000, 2000, 5000, 10000, 20000] {
        let mut cfg = AsciConfig::new(tdets);
        cfg.sector = Some(k0);
        let r = asci_run(&model, &start, &cfg)?;
        let w = overlap_squared(&r.wavefunction, reference)?;
        points.push((r.e_pt2, w));
        println!(
            "{tdets:>6} {w:>10.6} {:>11.2}% {:>13.2}% {:>12.6}",
            100.0 * (w - w_exact) / w_exact,
            100.0 * (r.e_var - exact.energy()) / e_corr.abs(),
            r.e_pt2
        );
    }
    let (intercept, slope, rms) = extrapolate_overlap(&points[2..])?;
    println!("linear fit in E_PT2: |c_0|² → {intercept:.6} (slope {slope:.3}, rms {rms:.1e})");
    Ok(())
}
