//! Hamiltonian matrix elements between determinants.
//!
//! An [`IntegralModel`] always carries explicit one- and two-electron
//! integrals. Lattice models additionally keep enough structure (neighbor
//! lists, momentum tables) to evaluate elements and enumerate connections by
//! direct rules; [`IntegralModel::generic`] strips that structure so the plain
//! Slater–Condon path can be checked against it.

mod fcidump;
mod lattice;

pub use fcidump::{parse_fcidump, read_fcidump, write_fcidump};
pub use lattice::{
    aufbau_shell, build_hubbard_planewave, build_hubbard_spatial, pattern_determinant, sector_determinants,
    total_momentum, LatticeSpec, Momentum, Pattern,
};

use rustc_hash::FxHashMap;

use crate::determinants::{Determinant, Excitation, Spin};
use crate::error::{domain, Result};

/// Where a model's integrals came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceTag {
    Fcidump,
    HubbardSpatial,
    HubbardPlaneWave,
}

/// Permutational symmetry of the stored two-electron integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EriSymmetry {
    /// Real orbitals: all eight index permutations of `(pq|rs)` are equal.
    Eightfold,
    /// Complex orbitals with real integrals: `(pq|rs) = (rs|pq) = (qp|sr) = (sr|qp)`.
    Fourfold,
}

/// Two-electron integrals `(pq|rs)` in chemists' notation, stored once per
/// symmetry class.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoElectronIntegrals {
    norb: usize,
    symmetry: EriSymmetry,
    values: FxHashMap<[u16; 4], f64>,
    dense: Option<Vec<f64>>,
}

/// Orbital counts up to this use a dense lookup table alongside the map.
const DENSE_ERI_LIMIT: usize = 32;

impl TwoElectronIntegrals {
    pub fn new(norb: usize, symmetry: EriSymmetry) -> Self {
        TwoElectronIntegrals { norb, symmetry, values: FxHashMap::default(), dense: None }
    }

    pub fn symmetry(&self) -> EriSymmetry {
        self.symmetry
    }

    /// Canonical representative of the symmetry class of `(pq|rs)`.
    pub fn canonical(&self, p: usize, q: usize, r: usize, s: usize) -> [u16; 4] {
        let k = |a: usize, b: usize, c: usize, d: usize| [a as u16, b as u16, c as u16, d as u16];
        match self.symmetry {
            EriSymmetry::Eightfold => {
                let (p, q) = if p >= q { (p, q) } else { (q, p) };
                let (r, s) = if r >= s { (r, s) } else { (s, r) };
                if (p, q) >= (r, s) {
                    k(p, q, r, s)
                } else {
                    k(r, s, p, q)
                }
            }
            EriSymmetry::Fourfold => {
                let cands = [k(p, q, r, s), k(r, s, p, q), k(q, p, s, r), k(s, r, q, p)];
                *cands.iter().max().unwrap()
            }
        }
    }

    /// Records a value; returns the previously stored value for the class, if any.
    pub fn insert(&mut self, p: usize, q: usize, r: usize, s: usize, value: f64) -> Option<f64> {
        self.dense = None;
        let key = self.canonical(p, q, r, s);
        self.values.insert(key, value)
    }

    #[inline]
    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        if let Some(dense) = &self.dense {
            let m = self.norb;
            return dense[((p * m + q) * m + r) * m + s];
        }
        self.values.get(&self.canonical(p, q, r, s)).copied().unwrap_or(0.0)
    }

    /// Stored classes in ascending canonical key order.
    pub fn entries(&self) -> Vec<([u16; 4], f64)> {
        let mut v: Vec<_> = self.values.iter().map(|(k, v)| (*k, *v)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn drop_zeros(&mut self) {
        self.values.retain(|_, v| *v != 0.0);
    }

    fn build_dense(&mut self) {
        let m = self.norb;
        if m > DENSE_ERI_LIMIT {
            self.dense = None;
            return;
        }
        let mut dense = vec![0.0; m * m * m * m];
        for p in 0..m {
            for q in 0..m {
                for r in 0..m {
                    for s in 0..m {
                        let key = self.canonical(p, q, r, s);
                        if let Some(v) = self.values.get(&key) {
                            dense[((p * m + q) * m + r) * m + s] = *v;
                        }
                    }
                }
            }
        }
        self.dense = Some(dense);
    }
}

/// Lattice structure retained for direct-rule evaluation.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum LatticeRules {
    Spatial {
        t: f64,
        u: f64,
        /// Deduplicated neighbor lists per site, ascending.
        neighbors: Vec<Vec<usize>>,
    },
    PlaneWave {
        u_over_n: f64,
        /// Momentum label of each orbital.
        momenta: Vec<Momentum>,
        /// `sum[a][b]` is the orbital whose momentum is `k_a + k_b`.
        sum: Vec<Vec<usize>>,
        /// `diff[a][b]` is the orbital whose momentum is `k_a - k_b`.
        diff: Vec<Vec<usize>>,
    },
}

/// One- and two-electron integrals plus a constant energy.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralModel {
    norb: usize,
    h: Vec<f64>,
    eri: TwoElectronIntegrals,
    e_core: f64,
    source: SourceTag,
    n_alpha: usize,
    n_beta: usize,
    pub(crate) lattice: Option<LatticeSpec>,
    pub(crate) rules: Option<LatticeRules>,
}

impl IntegralModel {
    /// Builds a model from a dense row-major `h` and sparse two-electron values.
    /// `h` is symmetrized; off-symmetric input beyond 1e-12 is rejected.
    pub fn new(
        norb: usize,
        h: Vec<f64>,
        eri: TwoElectronIntegrals,
        e_core: f64,
        source: SourceTag,
        n_alpha: usize,
        n_beta: usize,
    ) -> Result<Self> {
        if norb == 0 || norb > crate::determinants::MAX_ORBITALS {
            return domain(format!("orbital count {norb} unsupported"));
        }
        if h.len() != norb * norb || eri.norb != norb {
            return domain("integral dimensions do not match the orbital count");
        }
        if n_alpha > norb || n_beta > norb {
            return domain(format!("({n_alpha}, {n_beta}) electrons do not fit in {norb} orbitals"));
        }
        let mut h = h;
        for p in 0..norb {
            for q in 0..p {
                let (a, b) = (h[p * norb + q], h[q * norb + p]);
                if (a - b).abs() > 1e-12 {
                    return domain(format!("one-electron integrals not symmetric at ({p}, {q})"));
                }
                h[q * norb + p] = a;
            }
        }
        let mut eri = eri;
        eri.drop_zeros();
        eri.build_dense();
        Ok(IntegralModel { norb, h, eri, e_core, source, n_alpha, n_beta, lattice: None, rules: None })
    }

    /// Model with identical integrals and no lattice fast paths.
    pub fn generic(&self) -> IntegralModel {
        IntegralModel { rules: None, ..self.clone() }
    }

    #[inline]
    pub fn norb(&self) -> usize {
        self.norb
    }

    pub fn n_alpha(&self) -> usize {
        self.n_alpha
    }

    pub fn n_beta(&self) -> usize {
        self.n_beta
    }

    pub fn with_electrons(mut self, n_alpha: usize, n_beta: usize) -> Result<Self> {
        if n_alpha > self.norb || n_beta > self.norb {
            return domain(format!("({n_alpha}, {n_beta}) electrons do not fit in {} orbitals", self.norb));
        }
        self.n_alpha = n_alpha;
        self.n_beta = n_beta;
        if let Some(l) = &mut self.lattice {
            l.n_alpha = n_alpha;
            l.n_beta = n_beta;
        }
        Ok(self)
    }

    pub fn source(&self) -> SourceTag {
        self.source
    }

    pub fn e_core(&self) -> f64 {
        self.e_core
    }

    pub fn lattice(&self) -> Option<&LatticeSpec> {
        self.lattice.as_ref()
    }

    #[inline]
    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h[p * self.norb + q]
    }

    /// Row-major one-electron matrix.
    pub fn h_matrix(&self) -> &[f64] {
        &self.h
    }

    #[inline]
    pub fn eri(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.eri.get(p, q, r, s)
    }

    pub fn two_electron(&self) -> &TwoElectronIntegrals {
        &self.eri
    }

    /// A determinant with this model's orbital count and electron numbers.
    pub fn check_determinant(&self, d: &Determinant) -> Result<()> {
        if d.norb() != self.norb {
            return domain(format!("determinant has {} orbitals, model has {}", d.norb(), self.norb));
        }
        Ok(())
    }

    /// `<a|H|b>` including fermionic sign and the core energy on the diagonal.
    pub fn matrix_element(&self, a: &Determinant, b: &Determinant) -> Result<f64> {
        self.check_determinant(a)?;
        self.check_determinant(b)?;
        if a.n_alpha() != b.n_alpha() || a.n_beta() != b.n_beta() {
            return domain("determinants have different particle numbers");
        }
        Ok(self.element(a, b))
    }

    /// Unchecked `<a|H|b>`; evaluated in a fixed orientation so the result is
    /// exactly symmetric.
    #[inline]
    pub(crate) fn element(&self, a: &Determinant, b: &Determinant) -> f64 {
        let (bra, ket) = if a <= b { (a, b) } else { (b, a) };
        match &self.rules {
            Some(rules) => self.lattice_element(rules, bra, ket),
            None => self.slater_condon(bra, ket),
        }
    }

    /// Diagonal element `<d|H|d>`.
    #[inline]
    pub fn diagonal(&self, d: &Determinant) -> f64 {
        match &self.rules {
            Some(LatticeRules::Spatial { u, .. }) => self.e_core + u * d.alpha().and(d.beta()).count() as f64,
            Some(LatticeRules::PlaneWave { u_over_n, .. }) => {
                let kinetic: f64 = d.alpha().iter().chain(d.beta().iter()).map(|p| self.h(p, p)).sum();
                self.e_core + kinetic + u_over_n * (d.n_alpha() * d.n_beta()) as f64
            }
            None => self.slater_condon_diagonal(d),
        }
    }

    fn lattice_element(&self, rules: &LatticeRules, bra: &Determinant, ket: &Determinant) -> f64 {
        let da = bra.alpha().xor(ket.alpha());
        let db = bra.beta().xor(ket.beta());
        let moved = da.count() + db.count();
        if moved == 0 {
            return self.diagonal(ket);
        }
        match rules {
            LatticeRules::Spatial { t, neighbors, .. } => {
                if moved != 2 {
                    return 0.0;
                }
                let (spin, diff) = if da.count() == 2 { (Spin::Alpha, da) } else { (Spin::Beta, db) };
                let set = ket.spin_set(spin);
                let mut it = diff.iter();
                let (x, y) = (it.next().unwrap(), it.next().unwrap());
                if set.contains(x) == set.contains(y) {
                    return 0.0;
                }
                if !neighbors[x].contains(&y) {
                    return 0.0;
                }
                let sign = if set.count_between(x, y) % 2 == 0 { 1.0 } else { -1.0 };
                -t * sign
            }
            LatticeRules::PlaneWave { u_over_n, momenta, .. } => {
                if da.count() != 2 || db.count() != 2 {
                    return 0.0;
                }
                let (ah, ap) = split_move(ket.alpha(), &da);
                let (bh, bp) = split_move(ket.beta(), &db);
                // created: ap, bp; annihilated: ah, bh
                let lhs = momenta[ap].add(&momenta[bp]);
                let rhs = momenta[ah].add(&momenta[bh]);
                if lhs != rhs {
                    return 0.0;
                }
                let sa = ket.alpha().count_between(ah, ap) % 2;
                let sb = ket.beta().count_between(bh, bp) % 2;
                if (sa + sb) % 2 == 0 {
                    *u_over_n
                } else {
                    -u_over_n
                }
            }
        }
    }

    fn slater_condon_diagonal(&self, d: &Determinant) -> f64 {
        let occ_a: Vec<usize> = d.alpha().iter().collect();
        let occ_b: Vec<usize> = d.beta().iter().collect();
        let mut e = 0.0;
        for &i in occ_a.iter().chain(&occ_b) {
            e += self.h(i, i);
        }
        let mut two = 0.0;
        for (occ, other) in [(&occ_a, &occ_b), (&occ_b, &occ_a)] {
            for (n, &i) in occ.iter().enumerate() {
                for &j in &occ[n + 1..] {
                    two += self.eri(i, i, j, j) - self.eri(i, j, j, i);
                }
                for &j in other.iter() {
                    two += 0.5 * self.eri(i, i, j, j);
                }
            }
        }
        self.e_core + e + two
    }

    /// Generic Slater–Condon rules, `<bra|H|ket>`.
    fn slater_condon(&self, bra: &Determinant, ket: &Determinant) -> f64 {
        let degree = bra.degree_unchecked(ket);
        match degree {
            0 => self.slater_condon_diagonal(ket),
            1 => {
                let spin = if bra.alpha() != ket.alpha() { Spin::Alpha } else { Spin::Beta };
                let diff = bra.spin_set(spin).xor(ket.spin_set(spin));
                let (hole, particle) = split_move(ket.spin_set(spin), &diff);
                let (_, sign) = ket.single_move(spin, hole, particle);
                sign * self.single_value(ket, spin, hole, particle)
            }
            2 => {
                let exc = match ket.excitation_to(bra) {
                    Ok(Some(e)) => e,
                    _ => return 0.0,
                };
                f64::from(exc.phase) * self.double_value(&exc)
            }
            _ => 0.0,
        }
    }

    /// Unsigned value of a single excitation `hole -> particle` from `ket`.
    fn single_value(&self, ket: &Determinant, spin: Spin, hole: usize, particle: usize) -> f64 {
        let mut v = self.h(particle, hole);
        for s in [Spin::Alpha, Spin::Beta] {
            for j in ket.spin_set(s).iter() {
                if s == spin && j == hole {
                    continue;
                }
                v += self.eri(particle, hole, j, j);
                if s == spin {
                    v -= self.eri(particle, j, j, hole);
                }
            }
        }
        v
    }

    /// Unsigned value of a double excitation, `<p1 p2||h1 h2>`.
    fn double_value(&self, exc: &Excitation) -> f64 {
        let (h, p) = (exc.holes(), exc.particles());
        let mut v = 0.0;
        if p[0].spin == h[0].spin && p[1].spin == h[1].spin {
            v += self.eri(p[0].orbital, h[0].orbital, p[1].orbital, h[1].orbital);
        }
        if p[0].spin == h[1].spin && p[1].spin == h[0].spin {
            v -= self.eri(p[0].orbital, h[1].orbital, p[1].orbital, h[0].orbital);
        }
        v
    }

    /// Calls `f(det, <det|H|d>)` for every determinant other than `d` whose
    /// element with `d` is not identically zero. Order is deterministic.
    pub fn for_each_connected<F: FnMut(Determinant, f64)>(&self, d: &Determinant, mut f: F) {
        match &self.rules {
            Some(LatticeRules::Spatial { t, neighbors, .. }) => {
                for spin in [Spin::Alpha, Spin::Beta] {
                    let set = d.spin_set(spin);
                    for i in set.iter() {
                        for &j in &neighbors[i] {
                            if set.contains(j) {
                                continue;
                            }
                            let (det, sign) = d.single_move(spin, i, j);
                            f(det, -t * sign);
                        }
                    }
                }
            }
            Some(LatticeRules::PlaneWave { u_over_n, sum, diff, .. }) => {
                let m = self.norb;
                for b in d.alpha().iter() {
                    for dd in d.beta().iter() {
                        for q in 1..m {
                            // k_a = k_b + q, k_c = k_d - q
                            let a = sum[b][q];
                            if d.alpha().contains(a) {
                                continue;
                            }
                            let c = diff[dd][q];
                            if d.beta().contains(c) {
                                continue;
                            }
                            let (mid, sa) = d.single_move(Spin::Alpha, b, a);
                            let (det, sb) = mid.single_move(Spin::Beta, dd, c);
                            f(det, u_over_n * sa * sb);
                        }
                    }
                }
            }
            None => self.for_each_connected_generic(d, f),
        }
    }

    fn for_each_connected_generic<F: FnMut(Determinant, f64)>(&self, d: &Determinant, mut f: F) {
        let m = self.norb;
        for spin in [Spin::Alpha, Spin::Beta] {
            let set = *d.spin_set(spin);
            for i in set.iter() {
                for a in set.iter_empty(m) {
                    let (det, sign) = d.single_move(spin, i, a);
                    let v = self.single_value(d, spin, i, a);
                    if v != 0.0 {
                        f(det, sign * v);
                    }
                }
            }
        }
        // same-spin doubles
        for spin in [Spin::Alpha, Spin::Beta] {
            let set = *d.spin_set(spin);
            let occ: Vec<usize> = set.iter().collect();
            let virt: Vec<usize> = set.iter_empty(m).collect();
            for (n, &i) in occ.iter().enumerate() {
                for &j in &occ[n + 1..] {
                    for (k, &a) in virt.iter().enumerate() {
                        for &b in &virt[k + 1..] {
                            let v = self.eri(a, i, b, j) - self.eri(a, j, b, i);
                            if v == 0.0 {
                                continue;
                            }
                            let (mid, s1) = d.single_move(spin, i, a);
                            let (det, s2) = mid.single_move(spin, j, b);
                            f(det, s1 * s2 * v);
                        }
                    }
                }
            }
        }
        // opposite-spin doubles
        let occ_a: Vec<usize> = d.alpha().iter().collect();
        let occ_b: Vec<usize> = d.beta().iter().collect();
        let virt_a: Vec<usize> = d.alpha().iter_empty(m).collect();
        let virt_b: Vec<usize> = d.beta().iter_empty(m).collect();
        for &i in &occ_a {
            for &j in &occ_b {
                for &a in &virt_a {
                    for &b in &virt_b {
                        let v = self.eri(a, i, b, j);
                        if v == 0.0 {
                            continue;
                        }
                        let (mid, s1) = d.single_move(Spin::Alpha, i, a);
                        let (det, s2) = mid.single_move(Spin::Beta, j, b);
                        f(det, s1 * s2 * v);
                    }
                }
            }
        }
    }
}

/// For a two-bit difference `diff` within one spin string `ket`, returns
/// `(hole, particle)`: the bit occupied in `ket` and the bit empty in it.
#[inline]
fn split_move(ket: &crate::determinants::OrbitalSet, diff: &crate::determinants::OrbitalSet) -> (usize, usize) {
    let mut it = diff.iter();
    let x = it.next().unwrap();
    let y = it.next().unwrap();
    if ket.contains(x) {
        (x, y)
    } else {
        (y, x)
    }
}
