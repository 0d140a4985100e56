//! Exact diagonalization within a particle-number (and momentum) sector.

use super::{DavidsonOptions, ProjectedHamiltonian, Wavefunction};
use crate::determinants::{combinations, Determinant};
use crate::error::{domain, Error, Result};
use crate::hamiltonians::{sector_determinants, IntegralModel, Momentum, SourceTag};

/// Largest space `exact_diagonalize` builds unless told otherwise.
pub const DEFAULT_ED_CAP: u128 = 20_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorConstraint {
    pub n_alpha: usize,
    pub n_beta: usize,
    /// Total lattice momentum; only meaningful for plane-wave models.
    pub momentum: Option<Momentum>,
    pub cap: u128,
}

impl SectorConstraint {
    /// The model's electron counts, no momentum restriction, default cap.
    pub fn from_model(model: &IntegralModel) -> Self {
        SectorConstraint { n_alpha: model.n_alpha(), n_beta: model.n_beta(), momentum: None, cap: DEFAULT_ED_CAP }
    }

    pub fn with_momentum(mut self, k: Momentum) -> Self {
        self.momentum = Some(k);
        self
    }

    pub fn with_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

/// `counts[k]` = number of `n`-subsets of orbitals whose momenta sum to `k`
/// (flattened `kx * ly + ky`).
fn string_counts(lx: usize, ly: usize, n: usize) -> Vec<u128> {
    let nk = lx * ly;
    // dp[j][k]: subsets of the orbitals seen so far with j members and momentum k
    let mut dp = vec![vec![0u128; nk]; n + 1];
    dp[0][0] = 1;
    for p in 0..nk {
        let (px, py) = (p / ly, p % ly);
        for j in (1..=n).rev() {
            for k in 0..nk {
                let prev = dp[j - 1][k];
                if prev != 0 {
                    let (kx, ky) = (k / ly, k % ly);
                    let q = ((kx + px) % lx) * ly + (ky + py) % ly;
                    dp[j][q] += prev;
                }
            }
        }
    }
    dp.swap_remove(n)
}

fn check_momentum(model: &IntegralModel, c: &SectorConstraint) -> Result<Option<(usize, usize, Momentum)>> {
    let Some(k) = c.momentum else { return Ok(None) };
    match (model.source(), model.lattice()) {
        (SourceTag::HubbardPlaneWave, Some(spec)) => {
            if k.kx >= spec.lx || k.ky >= spec.ly {
                return domain(format!("momentum ({}, {}) outside the lattice", k.kx, k.ky));
            }
            Ok(Some((spec.lx, spec.ly, Momentum::new(k.kx as i64, k.ky as i64, spec.lx, spec.ly))))
        }
        _ => domain("a momentum constraint needs a plane-wave lattice model"),
    }
}

/// Exact number of determinants in the sector, computed without enumerating.
pub fn sector_size(model: &IntegralModel, c: &SectorConstraint) -> Result<u128> {
    let m = model.norb();
    if c.n_alpha > m || c.n_beta > m {
        return domain(format!("({}, {}) electrons do not fit in {m} orbitals", c.n_alpha, c.n_beta));
    }
    match check_momentum(model, c)? {
        None => Ok(binomial(m, c.n_alpha) * binomial(m, c.n_beta)),
        Some((lx, ly, k)) => {
            let a = string_counts(lx, ly, c.n_alpha);
            let b = string_counts(lx, ly, c.n_beta);
            let mut total = 0u128;
            for (ka, &na) in a.iter().enumerate() {
                let ma = Momentum::new((ka / ly) as i64, (ka % ly) as i64, lx, ly);
                total += na * b[k.add(&ma.neg()).orbital()];
            }
            Ok(total)
        }
    }
}

/// Ground state of the full sector. Refuses spaces larger than `c.cap`
/// before allocating anything.
pub fn exact_diagonalize(model: &IntegralModel, c: &SectorConstraint, tol: f64) -> Result<Wavefunction> {
    let size = sector_size(model, c)?;
    if size > c.cap {
        return Err(Error::SizeGuard { what: "exact diagonalization sector", required: size, limit: c.cap });
    }
    if size == 0 {
        return domain("the requested sector is empty");
    }
    let dets = match (check_momentum(model, c)?, model.lattice()) {
        (Some((_, _, k)), Some(spec)) => {
            let mut spec = spec.clone();
            spec.n_alpha = c.n_alpha;
            spec.n_beta = c.n_beta;
            sector_determinants(&spec, Some(k))?
        }
        _ => {
            let m = model.norb();
            let alphas = combinations(m, c.n_alpha)?;
            let betas = combinations(m, c.n_beta)?;
            let mut out = Vec::with_capacity(size as usize);
            for a in &alphas {
                for b in &betas {
                    out.push(Determinant::new(m, *a, *b)?);
                }
            }
            out
        }
    };
    debug_assert_eq!(dets.len() as u128, size);
    let model = if (c.n_alpha, c.n_beta) == (model.n_alpha(), model.n_beta()) {
        std::borrow::Cow::Borrowed(model)
    } else {
        std::borrow::Cow::Owned(model.clone().with_electrons(c.n_alpha, c.n_beta)?)
    };
    let opts = DavidsonOptions { tol, max_iter: 5000, ..Default::default() };
    ProjectedHamiltonian::new(&model, dets)?.ground_state(None, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{build_hubbard_planewave, build_hubbard_spatial, LatticeSpec};

    #[test]
    fn sector_sizes_on_four_by_four() {
        for (n, expect) in [(2, 912u128), (3, 19600), (4, 207184)] {
            let m = build_hubbard_planewave(&LatticeSpec::new(4, 4, 1.0, 4.0, n, n)).unwrap();
            let c = SectorConstraint::from_model(&m).with_momentum(Momentum::zero(4, 4));
            assert_eq!(sector_size(&m, &c).unwrap(), expect);
        }
        let m = build_hubbard_planewave(&LatticeSpec::new(4, 4, 1.0, 4.0, 2, 2)).unwrap();
        assert_eq!(sector_size(&m, &SectorConstraint::from_model(&m)).unwrap(), 14400);
    }

    #[test]
    fn size_guard_fires_before_allocation() {
        let m = build_hubbard_spatial(&LatticeSpec::new(4, 4, 1.0, 4.0, 8, 8)).unwrap();
        let c = SectorConstraint::from_model(&m);
        match exact_diagonalize(&m, &c, 1e-8) {
            Err(Error::SizeGuard { required, limit, .. }) => {
                assert_eq!(required, 12870u128 * 12870);
                assert_eq!(limit, DEFAULT_ED_CAP);
            }
            other => panic!("expected size guard, got {other:?}"),
        }
    }

    #[test]
    fn momentum_needs_plane_waves() {
        let m = build_hubbard_spatial(&LatticeSpec::new(2, 2, 1.0, 4.0, 1, 1)).unwrap();
        let c = SectorConstraint::from_model(&m).with_momentum(Momentum::zero(2, 2));
        assert!(exact_diagonalize(&m, &c, 1e-8).is_err());
    }

    #[test]
    fn bases_agree_on_ground_energy() {
        let spec = LatticeSpec::new(2, 2, 1.0, 4.0, 2, 1);
        let site = build_hubbard_spatial(&spec).unwrap();
        let pw = build_hubbard_planewave(&spec).unwrap();
        let e1 = exact_diagonalize(&site, &SectorConstraint::from_model(&site), 1e-10).unwrap().energy();
        let e2 = exact_diagonalize(&pw, &SectorConstraint::from_model(&pw), 1e-10).unwrap().energy();
        assert!((e1 - e2).abs() < 1e-8, "{e1} {e2}");
    }
}
