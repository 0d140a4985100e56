//! Square-lattice Hubbard models in site and plane-wave bases.
//!
//! Orbital `p` labels site `(x, y)` or momentum `(m_x, m_y)` with
//! `p = x * ly + y`. Momentum `m` stands for `2π m / L` in each direction.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rustc_hash::FxHashMap;

use super::{EriSymmetry, IntegralModel, LatticeRules, SourceTag, TwoElectronIntegrals};
use crate::determinants::{combinations, parse_determinant, Determinant, OrbitalSet};
use crate::error::{domain, Result};

/// Lattice dimensions, couplings, and electron counts.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    pub lx: usize,
    pub ly: usize,
    pub t: f64,
    pub u: f64,
    pub periodic: bool,
    pub n_alpha: usize,
    pub n_beta: usize,
}

impl LatticeSpec {
    /// Periodic lattice.
    pub fn new(lx: usize, ly: usize, t: f64, u: f64, n_alpha: usize, n_beta: usize) -> Self {
        LatticeSpec { lx, ly, t, u, periodic: true, n_alpha, n_beta }
    }

    pub fn sites(&self) -> usize {
        self.lx * self.ly
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        x * self.ly + y
    }

    pub fn coords(&self, p: usize) -> (usize, usize) {
        (p / self.ly, p % self.ly)
    }

    fn validate(&self) -> Result<()> {
        if self.lx == 0 || self.ly == 0 {
            return domain(format!("lattice dimensions must be positive, got {}x{}", self.lx, self.ly));
        }
        let m = self.sites();
        if m > crate::determinants::MAX_ORBITALS {
            return domain(format!("{m} sites exceed the orbital capacity"));
        }
        if self.n_alpha > m || self.n_beta > m {
            return domain(format!("({}, {}) electrons do not fit on {m} sites", self.n_alpha, self.n_beta));
        }
        if !self.t.is_finite() || !self.u.is_finite() {
            return domain("t and U must be finite");
        }
        Ok(())
    }

    /// Distinct nearest-neighbor bonds `(p, q)` with `p < q`. A direction of
    /// length 2 contributes one bond per pair, not two.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut set = BTreeSet::new();
        for x in 0..self.lx {
            for y in 0..self.ly {
                let p = self.index(x, y);
                let mut push = |q: usize| {
                    if q != p {
                        set.insert((p.min(q), p.max(q)));
                    }
                };
                if x + 1 < self.lx || (self.periodic && self.lx > 1) {
                    push(self.index((x + 1) % self.lx, y));
                }
                if y + 1 < self.ly || (self.periodic && self.ly > 1) {
                    push(self.index(x, (y + 1) % self.ly));
                }
            }
        }
        set.into_iter().collect()
    }

    /// Momentum label of orbital `p` in the plane-wave basis.
    pub fn momentum(&self, p: usize) -> Momentum {
        let (x, y) = self.coords(p);
        Momentum { kx: x, ky: y, lx: self.lx, ly: self.ly }
    }

    /// Band energy of momentum orbital `p`.
    pub fn dispersion(&self, p: usize) -> f64 {
        let (mx, my) = self.coords(p);
        self.t * (axis_band(mx, self.lx, self.periodic) + axis_band(my, self.ly, self.periodic))
    }
}

/// Band energy along one axis in units of `t`. Three or more sites give
/// `-2 cos k`; two sites share a single bond and give `-cos k`.
fn axis_band(m: usize, len: usize, periodic: bool) -> f64 {
    match len {
        1 => 0.0,
        2 => -cos_turns(m, 2),
        _ if periodic => -2.0 * cos_turns(m, len),
        _ => panic!("open boundaries have no plane-wave basis"),
    }
}

/// `cos(2π m / n)`, exact at multiples of a quarter turn.
fn cos_turns(m: usize, n: usize) -> f64 {
    let m = m % n;
    if (4 * m) % n == 0 {
        return match 4 * m / n {
            0 => 1.0,
            1 | 3 => 0.0,
            _ => -1.0,
        };
    }
    (2.0 * PI * m as f64 / n as f64).cos()
}

/// Lattice momentum `(k_x, k_y)` modulo the lattice size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Momentum {
    pub kx: usize,
    pub ky: usize,
    lx: usize,
    ly: usize,
}

impl Momentum {
    pub fn new(kx: i64, ky: i64, lx: usize, ly: usize) -> Self {
        Momentum { kx: kx.rem_euclid(lx as i64) as usize, ky: ky.rem_euclid(ly as i64) as usize, lx, ly }
    }

    pub fn zero(lx: usize, ly: usize) -> Self {
        Momentum { kx: 0, ky: 0, lx, ly }
    }

    #[inline]
    pub fn add(&self, other: &Momentum) -> Momentum {
        Momentum { kx: (self.kx + other.kx) % self.lx, ky: (self.ky + other.ky) % self.ly, ..*self }
    }

    #[inline]
    pub fn neg(&self) -> Momentum {
        Momentum { kx: (self.lx - self.kx) % self.lx, ky: (self.ly - self.ky) % self.ly, ..*self }
    }

    /// Orbital index carrying this momentum.
    pub fn orbital(&self) -> usize {
        self.kx * self.ly + self.ky
    }
}

/// Spatial-basis Hubbard model: `-t` on each distinct bond, `U` on-site.
pub fn build_hubbard_spatial(spec: &LatticeSpec) -> Result<IntegralModel> {
    spec.validate()?;
    let m = spec.sites();
    let mut h = vec![0.0; m * m];
    let mut neighbors = vec![Vec::new(); m];
    for (p, q) in spec.bonds() {
        h[p * m + q] = -spec.t;
        h[q * m + p] = -spec.t;
        neighbors[p].push(q);
        neighbors[q].push(p);
    }
    for n in &mut neighbors {
        n.sort_unstable();
    }
    let mut eri = TwoElectronIntegrals::new(m, EriSymmetry::Eightfold);
    for i in 0..m {
        eri.insert(i, i, i, i, spec.u);
    }
    let mut model = IntegralModel::new(m, h, eri, 0.0, SourceTag::HubbardSpatial, spec.n_alpha, spec.n_beta)?;
    model.lattice = Some(spec.clone());
    model.rules = Some(LatticeRules::Spatial { t: spec.t, u: spec.u, neighbors });
    Ok(model)
}

/// Plane-wave Hubbard model: diagonal band energies and a momentum-conserving
/// contact interaction of strength `U/N`.
pub fn build_hubbard_planewave(spec: &LatticeSpec) -> Result<IntegralModel> {
    spec.validate()?;
    if !spec.periodic {
        return domain("the plane-wave basis needs periodic boundaries");
    }
    let m = spec.sites();
    let mut h = vec![0.0; m * m];
    for p in 0..m {
        h[p * m + p] = spec.dispersion(p);
    }
    let momenta: Vec<Momentum> = (0..m).map(|p| spec.momentum(p)).collect();
    let sum: Vec<Vec<usize>> =
        (0..m).map(|a| (0..m).map(|b| momenta[a].add(&momenta[b]).orbital()).collect()).collect();
    let diff: Vec<Vec<usize>> =
        (0..m).map(|a| (0..m).map(|b| momenta[a].add(&momenta[b].neg()).orbital()).collect()).collect();
    let u_over_n = spec.u / m as f64;
    // (ab|cd) nonzero when k_a - k_b + k_c - k_d = 0
    let mut eri = TwoElectronIntegrals::new(m, EriSymmetry::Fourfold);
    if u_over_n != 0.0 {
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let d = sum[diff[a][b]][c];
                    eri.insert(a, b, c, d, u_over_n);
                }
            }
        }
    }
    let mut model = IntegralModel::new(m, h, eri, 0.0, SourceTag::HubbardPlaneWave, spec.n_alpha, spec.n_beta)?;
    model.lattice = Some(spec.clone());
    model.rules = Some(LatticeRules::PlaneWave { u_over_n, momenta, sum, diff });
    Ok(model)
}

/// Sum of the momentum labels of all occupied spin-orbitals.
pub fn total_momentum(d: &Determinant, spec: &LatticeSpec) -> Momentum {
    let mut k = Momentum::zero(spec.lx, spec.ly);
    for p in d.alpha().iter().chain(d.beta().iter()) {
        k = k.add(&spec.momentum(p));
    }
    k
}

/// All determinants with the lattice's electron counts, optionally restricted to
/// one total momentum, in ascending determinant order.
pub fn sector_determinants(spec: &LatticeSpec, sector: Option<Momentum>) -> Result<Vec<Determinant>> {
    spec.validate()?;
    let m = spec.sites();
    let alphas = combinations(m, spec.n_alpha)?;
    let betas = combinations(m, spec.n_beta)?;
    let Some(target) = sector else {
        return Determinant::enumerate(m, spec.n_alpha, spec.n_beta);
    };
    let string_momentum = |s: &OrbitalSet| {
        let mut k = Momentum::zero(spec.lx, spec.ly);
        for p in s.iter() {
            k = k.add(&spec.momentum(p));
        }
        k
    };
    let mut by_momentum: FxHashMap<Momentum, Vec<OrbitalSet>> = FxHashMap::default();
    for b in &betas {
        by_momentum.entry(string_momentum(b)).or_default().push(*b);
    }
    let mut out = Vec::new();
    for a in &alphas {
        let need = target.add(&string_momentum(a).neg());
        if let Some(bs) = by_momentum.get(&need) {
            for b in bs {
                out.push(Determinant::new(m, *a, *b)?);
            }
        }
    }
    Ok(out)
}

/// Initial-determinant patterns.
#[derive(Clone, Debug, PartialEq)]
pub enum Pattern {
    /// Lowest diagonal one-electron energies; ties by orbital index.
    Aufbau,
    /// Alpha on the even sublattice, beta on the odd one.
    Antiferromagnetic,
    /// Alternating single-column stripes: even columns alpha, odd columns beta.
    SpinDensityWave,
    /// Explicit occupations in `α:..|β:..` form.
    Explicit(String),
}

/// Energies within this of each other count as degenerate.
const DEGENERATE: f64 = 1e-10;

/// Orbitals by ascending `h_pp`; a run of energies within [`DEGENERATE`] of
/// its first member is ordered by index.
fn orbitals_by_energy(model: &IntegralModel) -> Vec<usize> {
    let mut order: Vec<usize> = (0..model.norb()).collect();
    order.sort_by(|&p, &q| model.h(p, p).total_cmp(&model.h(q, q)).then(p.cmp(&q)));
    let mut start = 0;
    while start < order.len() {
        let e0 = model.h(order[start], order[start]);
        let mut end = start + 1;
        while end < order.len() && model.h(order[end], order[end]) - e0 <= DEGENERATE {
            end += 1;
        }
        order[start..end].sort_unstable();
        start = end;
    }
    order
}

/// Largest number of determinants [`aufbau_shell`] will produce.
pub const SHELL_LIMIT: usize = 100_000;

/// Every determinant that fills the lowest one-electron energies and differs
/// from the aufbau determinant only inside the partially filled degenerate
/// shell of each spin, optionally restricted to one total momentum. Sorted.
pub fn aufbau_shell(model: &IntegralModel, sector: Option<Momentum>) -> Result<Vec<Determinant>> {
    let m = model.norb();
    let order = orbitals_by_energy(model);
    let e = |p: usize| model.h(p, p);
    let strings = |n: usize| -> Result<Vec<OrbitalSet>> {
        if n == 0 {
            return Ok(vec![OrbitalSet::EMPTY]);
        }
        let top = e(order[n - 1]);
        let closed: Vec<usize> = order.iter().copied().filter(|&p| e(p) < top - DEGENERATE).collect();
        let shell: Vec<usize> = order.iter().copied().filter(|&p| (e(p) - top).abs() <= DEGENERATE).collect();
        let mut out = Vec::new();
        for pick in combinations(shell.len(), n - closed.len())? {
            let mut s = OrbitalSet::from_indices(closed.iter().copied())?;
            for i in pick.iter() {
                s.insert(shell[i]);
            }
            out.push(s);
        }
        Ok(out)
    };
    let alphas = strings(model.n_alpha())?;
    let betas = strings(model.n_beta())?;
    if alphas.len().saturating_mul(betas.len()) > SHELL_LIMIT {
        return domain(format!("open shell spans {} x {} determinants", alphas.len(), betas.len()));
    }
    let spec = match sector {
        None => None,
        Some(k) => match (model.source(), model.lattice()) {
            (SourceTag::HubbardPlaneWave, Some(spec)) => {
                Some((Momentum::new(k.kx as i64, k.ky as i64, spec.lx, spec.ly), spec))
            }
            _ => return domain("momentum sectors need a plane-wave lattice model"),
        },
    };
    let mut out = Vec::new();
    for a in &alphas {
        for b in &betas {
            let d = Determinant::new(m, *a, *b)?;
            if spec.map_or(true, |(k, spec)| total_momentum(&d, spec) == k) {
                out.push(d);
            }
        }
    }
    out.sort();
    if out.is_empty() {
        return domain("no open-shell determinant carries the requested momentum");
    }
    Ok(out)
}

/// Builds an initial determinant for `model` following `kind`.
pub fn pattern_determinant(kind: &Pattern, model: &IntegralModel) -> Result<Determinant> {
    let m = model.norb();
    let (na, nb) = (model.n_alpha(), model.n_beta());
    match kind {
        Pattern::Aufbau => {
            let order = orbitals_by_energy(model);
            let alpha = OrbitalSet::from_indices(order[..na].iter().copied())?;
            let beta = OrbitalSet::from_indices(order[..nb].iter().copied())?;
            Determinant::new(m, alpha, beta)
        }
        Pattern::Antiferromagnetic | Pattern::SpinDensityWave => {
            let spec = match (model.source(), model.lattice()) {
                (SourceTag::HubbardSpatial, Some(spec)) => spec,
                _ => return domain("afm and sdw patterns need a spatial-basis lattice model"),
            };
            let up = |x: usize, y: usize| match kind {
                Pattern::Antiferromagnetic => (x + y) % 2 == 0,
                _ => x % 2 == 0,
            };
            let bipartite = |l: usize| l == 1 || l % 2 == 0;
            if matches!(kind, Pattern::Antiferromagnetic) && !(bipartite(spec.lx) && bipartite(spec.ly)) {
                return domain(format!("{}x{} periodic lattice is not bipartite", spec.lx, spec.ly));
            }
            if matches!(kind, Pattern::SpinDensityWave) && spec.lx % 2 != 0 {
                return domain("stripe pattern needs an even number of columns");
            }
            let mut alpha = OrbitalSet::EMPTY;
            let mut beta = OrbitalSet::EMPTY;
            for x in 0..spec.lx {
                for y in 0..spec.ly {
                    if up(x, y) {
                        alpha.insert(spec.index(x, y));
                    } else {
                        beta.insert(spec.index(x, y));
                    }
                }
            }
            if alpha.count() != na || beta.count() != nb {
                return domain(format!(
                    "pattern places ({}, {}) electrons but the model has ({na}, {nb})",
                    alpha.count(),
                    beta.count()
                ));
            }
            Determinant::new(m, alpha, beta)
        }
        Pattern::Explicit(text) => {
            let d = parse_determinant(text, m)?;
            if d.n_alpha() != na || d.n_beta() != nb {
                return domain(format!("determinant {d} does not hold ({na}, {nb}) electrons"));
            }
            Ok(d)
        }
    }
}
