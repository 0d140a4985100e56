//! Slater determinants as pairs of occupation bit-strings.
//!
//! Spin-orbitals are ordered with the whole alpha block first (`0..M`) and
//! the beta block after it (`M..2M`). Every fermionic sign in the crate is
//! computed in that ordering.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};

/// Largest supported number of spatial orbitals.
pub const MAX_ORBITALS: usize = 256;
const WORDS: usize = MAX_ORBITALS / 64;

/// Fixed-capacity bit-set over spatial orbitals.
///
/// The ordering is that of the set read as a 256-bit unsigned integer.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct OrbitalSet([u64; WORDS]);

impl OrbitalSet {
    pub const EMPTY: OrbitalSet = OrbitalSet([0; WORDS]);

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Result<Self> {
        let mut set = Self::EMPTY;
        for p in indices {
            if p >= MAX_ORBITALS {
                return domain(format!("orbital index {p} exceeds capacity {MAX_ORBITALS}"));
            }
            set.insert(p);
        }
        Ok(set)
    }

    /// All orbitals `0..n` occupied.
    pub fn lowest(n: usize) -> Self {
        let mut set = Self::EMPTY;
        for p in 0..n {
            set.insert(p);
        }
        set
    }

    #[inline]
    pub fn contains(&self, p: usize) -> bool {
        self.0[p >> 6] >> (p & 63) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, p: usize) {
        self.0[p >> 6] |= 1 << (p & 63);
    }

    #[inline]
    pub fn remove(&mut self, p: usize) {
        self.0[p >> 6] &= !(1 << (p & 63));
    }

    #[inline]
    pub fn flip(&mut self, p: usize) {
        self.0[p >> 6] ^= 1 << (p & 63);
    }

    #[inline]
    pub fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    /// Number of set bits with index strictly below `p`.
    #[inline]
    pub fn count_below(&self, p: usize) -> usize {
        let word = p >> 6;
        let mut n = 0;
        for w in &self.0[..word] {
            n += w.count_ones() as usize;
        }
        let bit = p & 63;
        if bit > 0 {
            n += (self.0[word] & ((1u64 << bit) - 1)).count_ones() as usize;
        }
        n
    }

    /// Number of set bits strictly between `p` and `q` (either order).
    #[inline]
    pub fn count_between(&self, p: usize, q: usize) -> usize {
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        if hi == lo {
            return 0;
        }
        self.count_below(hi) - self.count_below(lo + 1)
    }

    #[inline]
    pub fn xor(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a ^= b;
        }
        out
    }

    #[inline]
    pub fn and(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a &= b;
        }
        out
    }

    #[inline]
    pub fn and_not(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.0.iter_mut().zip(other.0.iter()) {
            *a &= !b;
        }
        out
    }

    /// Highest set bit, if any.
    pub fn max_index(&self) -> Option<usize> {
        for (i, w) in self.0.iter().enumerate().rev() {
            if *w != 0 {
                return Some(i * 64 + 63 - w.leading_zeros() as usize);
            }
        }
        None
    }

    /// Set bits in ascending order.
    pub fn iter(&self) -> Ones {
        Ones { words: self.0, word: 0 }
    }

    /// Unset bits in `0..n`, ascending.
    pub fn iter_empty(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        (0..n).filter(move |&p| !self.contains(p))
    }

    pub fn words(&self) -> &[u64; WORDS] {
        &self.0
    }
}

impl Ord for OrbitalSet {
    fn cmp(&self, other: &Self) -> Ordering {
        for i in (0..WORDS).rev() {
            match self.0[i].cmp(&other.0[i]) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for OrbitalSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for OrbitalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Iterator over set bits of an [`OrbitalSet`].
pub struct Ones {
    words: [u64; WORDS],
    word: usize,
}

impl Iterator for Ones {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        while self.word < WORDS {
            let w = self.words[self.word];
            if w != 0 {
                let bit = w.trailing_zeros() as usize;
                self.words[self.word] &= w - 1;
                return Some(self.word * 64 + bit);
            }
            self.word += 1;
        }
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Alpha,
    Beta,
}

/// A spatial orbital with a spin label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpinOrbital {
    pub spin: Spin,
    pub orbital: usize,
}

impl SpinOrbital {
    pub fn alpha(orbital: usize) -> Self {
        SpinOrbital { spin: Spin::Alpha, orbital }
    }

    pub fn beta(orbital: usize) -> Self {
        SpinOrbital { spin: Spin::Beta, orbital }
    }

    /// Position in the alpha-then-beta ordering for `norb` spatial orbitals.
    #[inline]
    pub fn index(&self, norb: usize) -> usize {
        match self.spin {
            Spin::Alpha => self.orbital,
            Spin::Beta => norb + self.orbital,
        }
    }

    pub fn from_index(index: usize, norb: usize) -> Self {
        if index < norb {
            SpinOrbital::alpha(index)
        } else {
            SpinOrbital::beta(index - norb)
        }
    }
}

/// A Slater determinant over `norb` spatial orbitals.
///
/// Equality and hashing look only at the two occupation strings and the
/// orbital count; no phase is attached to a determinant.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Determinant {
    alpha: OrbitalSet,
    beta: OrbitalSet,
    norb: u16,
}

impl Determinant {
    pub fn new(norb: usize, alpha: OrbitalSet, beta: OrbitalSet) -> Result<Self> {
        if norb == 0 || norb > MAX_ORBITALS {
            return domain(format!("orbital count {norb} outside 1..={MAX_ORBITALS}"));
        }
        for (name, set) in [("alpha", &alpha), ("beta", &beta)] {
            if let Some(top) = set.max_index() {
                if top >= norb {
                    return domain(format!("{name} orbital {top} outside [0, {norb})"));
                }
            }
        }
        Ok(Determinant { alpha, beta, norb: norb as u16 })
    }

    pub fn from_occupations(norb: usize, alpha: &[usize], beta: &[usize]) -> Result<Self> {
        Self::new(
            norb,
            OrbitalSet::from_indices(alpha.iter().copied())?,
            OrbitalSet::from_indices(beta.iter().copied())?,
        )
    }

    /// Lowest `n_alpha` / `n_beta` orbitals filled.
    pub fn lowest(norb: usize, n_alpha: usize, n_beta: usize) -> Result<Self> {
        if n_alpha > norb || n_beta > norb {
            return domain(format!("cannot place ({n_alpha}, {n_beta}) electrons in {norb} orbitals"));
        }
        Self::new(norb, OrbitalSet::lowest(n_alpha), OrbitalSet::lowest(n_beta))
    }

    #[inline]
    pub fn norb(&self) -> usize {
        self.norb as usize
    }

    #[inline]
    pub fn alpha(&self) -> &OrbitalSet {
        &self.alpha
    }

    #[inline]
    pub fn beta(&self) -> &OrbitalSet {
        &self.beta
    }

    #[inline]
    pub fn spin_set(&self, spin: Spin) -> &OrbitalSet {
        match spin {
            Spin::Alpha => &self.alpha,
            Spin::Beta => &self.beta,
        }
    }

    #[inline]
    fn spin_set_mut(&mut self, spin: Spin) -> &mut OrbitalSet {
        match spin {
            Spin::Alpha => &mut self.alpha,
            Spin::Beta => &mut self.beta,
        }
    }

    #[inline]
    pub fn n_alpha(&self) -> usize {
        self.alpha.count()
    }

    #[inline]
    pub fn n_beta(&self) -> usize {
        self.beta.count()
    }

    #[inline]
    pub fn is_occupied(&self, so: SpinOrbital) -> bool {
        self.spin_set(so.spin).contains(so.orbital)
    }

    /// Occupied spin-orbital indices in the alpha-then-beta ordering.
    pub fn occupied_indices(&self) -> impl Iterator<Item = usize> + '_ {
        let m = self.norb();
        self.alpha.iter().chain(self.beta.iter().map(move |p| p + m))
    }

    /// Whether spin-orbital index `q` (alpha-then-beta ordering) is occupied.
    #[inline]
    pub fn bit(&self, q: usize) -> bool {
        let m = self.norb();
        if q < m {
            self.alpha.contains(q)
        } else {
            self.beta.contains(q - m)
        }
    }

    /// Number of occupied spin-orbitals strictly below `so` in the global ordering.
    #[inline]
    pub fn count_below(&self, so: SpinOrbital) -> usize {
        match so.spin {
            Spin::Alpha => self.alpha.count_below(so.orbital),
            Spin::Beta => self.alpha.count() + self.beta.count_below(so.orbital),
        }
    }

    /// Same determinant with a spin-orbital occupation toggled. No sign.
    #[inline]
    pub fn toggled(&self, so: SpinOrbital) -> Self {
        let mut out = *self;
        out.spin_set_mut(so.spin).flip(so.orbital);
        out
    }

    /// Applies a single move `hole -> particle` within one spin block, returning
    /// the new determinant and its fermionic sign. No occupancy checks.
    #[inline]
    pub fn single_move(&self, spin: Spin, hole: usize, particle: usize) -> (Self, f64) {
        let set = self.spin_set(spin);
        let sign = if set.count_between(hole, particle) % 2 == 0 { 1.0 } else { -1.0 };
        let mut out = *self;
        let s = out.spin_set_mut(spin);
        s.remove(hole);
        s.insert(particle);
        (out, sign)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.norb != other.norb {
            return domain(format!("determinants over different orbital counts ({} vs {})", self.norb, other.norb));
        }
        Ok(())
    }

    /// Number of electrons that must move to turn `self` into `other`.
    pub fn excitation_degree(&self, other: &Self) -> Result<usize> {
        self.check_compatible(other)?;
        if self.n_alpha() != other.n_alpha() || self.n_beta() != other.n_beta() {
            return domain("determinants have different particle numbers");
        }
        Ok(self.degree_unchecked(other))
    }

    #[inline]
    pub(crate) fn degree_unchecked(&self, other: &Self) -> usize {
        (self.alpha.xor(&other.alpha).count() + self.beta.xor(&other.beta).count()) / 2
    }

    /// Hamming distance over the concatenated alpha and beta strings.
    pub fn spin_orbital_hamming(&self, other: &Self) -> Result<usize> {
        self.check_compatible(other)?;
        Ok(self.hamming_unchecked(other))
    }

    #[inline]
    pub(crate) fn hamming_unchecked(&self, other: &Self) -> usize {
        self.alpha.xor(&other.alpha).count() + self.beta.xor(&other.beta).count()
    }

    /// The excitation taking `self` to `other`, if its degree is at most two.
    pub fn excitation_to(&self, other: &Self) -> Result<Option<Excitation>> {
        let degree = self.excitation_degree(other)?;
        if degree > 2 {
            return Ok(None);
        }
        let m = self.norb();
        let mut holes = Vec::with_capacity(degree);
        let mut particles = Vec::with_capacity(degree);
        for spin in [Spin::Alpha, Spin::Beta] {
            let a = self.spin_set(spin);
            let b = other.spin_set(spin);
            holes.extend(a.and_not(b).iter().map(|p| SpinOrbital { spin, orbital: p }));
            particles.extend(b.and_not(a).iter().map(|p| SpinOrbital { spin, orbital: p }));
        }
        let mut exc = Excitation::from_parts(holes, particles, m)?;
        exc.phase = self.excitation_phase(&exc)?;
        Ok(Some(exc))
    }

    /// Fermionic sign of applying `exc` to `self`.
    ///
    /// The excitation acts as `a†(p1) a†(p2) a(h2) a(h1)` with holes and
    /// particles each sorted ascending; the sign is that of the result relative
    /// to the canonical (phase-free) target determinant.
    pub fn excitation_phase(&self, exc: &Excitation) -> Result<i8> {
        self.apply(exc).map(|(_, phase)| phase)
    }

    /// Applies `exc`, returning the target determinant and the sign.
    pub fn apply(&self, exc: &Excitation) -> Result<(Determinant, i8)> {
        let mut det = *self;
        let mut negative = false;
        for h in exc.holes() {
            if h.orbital >= self.norb() || !det.is_occupied(*h) {
                return domain(format!("cannot annihilate empty spin-orbital {h:?}"));
            }
            negative ^= det.count_below(*h) % 2 == 1;
            det = det.toggled(*h);
        }
        for p in exc.particles().iter().rev() {
            if p.orbital >= self.norb() || det.is_occupied(*p) {
                return domain(format!("cannot create in occupied spin-orbital {p:?}"));
            }
            negative ^= det.count_below(*p) % 2 == 1;
            det = det.toggled(*p);
        }
        Ok((det, if negative { -1 } else { 1 }))
    }

    /// Every determinant one or two spin-orbital moves away, with its excitation.
    ///
    /// Ordered by degree, then hole indices, then particle indices (global
    /// spin-orbital ordering). `allowed` restricts which empty spin-orbitals
    /// may receive an electron.
    pub fn connected_excitations(
        &self,
        allowed: Option<&ParticleFilter>,
    ) -> std::vec::IntoIter<(Determinant, Excitation)> {
        let m = self.norb();
        let occ: Vec<SpinOrbital> = self.occupied_indices().map(|i| SpinOrbital::from_index(i, m)).collect();
        let virt: Vec<SpinOrbital> = (0..2 * m)
            .map(|i| SpinOrbital::from_index(i, m))
            .filter(|so| !self.is_occupied(*so))
            .filter(|so| allowed.map_or(true, |f| f.allows(*so)))
            .collect();
        let mut out = Vec::new();
        for h in &occ {
            for p in virt.iter().filter(|p| p.spin == h.spin) {
                out.push(Excitation::raw(1, [*h, *h], [*p, *p]));
            }
        }
        for (i, h1) in occ.iter().enumerate() {
            for h2 in &occ[i + 1..] {
                for (j, p1) in virt.iter().enumerate() {
                    for p2 in &virt[j + 1..] {
                        let same =
                            (h1.spin == p1.spin && h2.spin == p2.spin) || (h1.spin == p2.spin && h2.spin == p1.spin);
                        if same {
                            out.push(Excitation::raw(2, [*h1, *h2], [*p1, *p2]));
                        }
                    }
                }
            }
        }
        out.into_iter()
            .map(|mut exc| {
                let (det, phase) = self.apply(&exc).expect("generated excitation is applicable");
                exc.phase = phase;
                (det, exc)
            })
            .collect::<Vec<_>>()
            .into_iter()
    }

    /// Determinants with the given particle numbers, in ascending total order.
    pub fn enumerate(norb: usize, n_alpha: usize, n_beta: usize) -> Result<Vec<Determinant>> {
        let alphas = combinations(norb, n_alpha)?;
        let betas = combinations(norb, n_beta)?;
        let mut out = Vec::with_capacity(alphas.len() * betas.len());
        for a in &alphas {
            for b in &betas {
                out.push(Determinant { alpha: *a, beta: *b, norb: norb as u16 });
            }
        }
        Ok(out)
    }
}

/// All `k`-subsets of `0..n` as orbital sets, ascending in set order.
pub fn combinations(n: usize, k: usize) -> Result<Vec<OrbitalSet>> {
    if n > MAX_ORBITALS || k > n {
        return domain(format!("cannot choose {k} of {n} orbitals"));
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(OrbitalSet::from_indices(idx.iter().copied())?);
        // next combination in colex order (ascending integer value)
        let mut i = 0;
        while i < k {
            let limit = if i + 1 < k { idx[i + 1] } else { n };
            if idx[i] + 1 < limit {
                idx[i] += 1;
                for (j, v) in idx.iter_mut().enumerate().take(i) {
                    *v = j;
                }
                break;
            }
            i += 1;
        }
        if i == k {
            break;
        }
    }
    Ok(out)
}

impl Ord for Determinant {
    fn cmp(&self, other: &Self) -> Ordering {
        self.alpha.cmp(&other.alpha).then_with(|| self.beta.cmp(&other.beta)).then_with(|| self.norb.cmp(&other.norb))
    }
}

impl PartialOrd for Determinant {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, set: &OrbitalSet) -> fmt::Result {
    for (i, p) in set.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{p}")?;
    }
    Ok(())
}

/// Renders as `α:0,3|β:1`.
impl fmt::Display for Determinant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("α:")?;
        write_list(f, &self.alpha)?;
        f.write_str("|β:")?;
        write_list(f, &self.beta)
    }
}

impl fmt::Debug for Determinant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Determinant({self}; M={})", self.norb)
    }
}

/// Parses the `α:0,3|β:1` rendering over `norb` spatial orbitals. The ASCII
/// prefixes `a:` and `b:` are accepted as well.
pub fn parse_determinant(text: &str, norb: usize) -> Result<Determinant> {
    let bad = |msg: &str| Error::Parse { line: 1, msg: format!("{msg} in determinant '{text}'") };
    let (a, b) = text.trim().split_once('|').ok_or_else(|| bad("missing '|'"))?;
    let a = a.strip_prefix("α:").or_else(|| a.strip_prefix("a:")).ok_or_else(|| bad("missing 'α:'"))?;
    let b = b.strip_prefix("β:").or_else(|| b.strip_prefix("b:")).ok_or_else(|| bad("missing 'β:'"))?;
    let list = |s: &str| -> Result<Vec<usize>> {
        if s.is_empty() {
            return Ok(Vec::new());
        }
        let mut v = Vec::new();
        for tok in s.split(',') {
            let p: usize = tok.parse().map_err(|_| bad("bad orbital index"))?;
            if v.last().is_some_and(|&last| last >= p) {
                return Err(bad("indices must be strictly ascending"));
            }
            v.push(p);
        }
        Ok(v)
    };
    Determinant::from_occupations(norb, &list(a)?, &list(b)?)
}

/// Electron moves between two determinants.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Excitation {
    degree: u8,
    holes: [SpinOrbital; 2],
    particles: [SpinOrbital; 2],
    pub phase: i8,
}

impl Excitation {
    fn raw(degree: u8, holes: [SpinOrbital; 2], particles: [SpinOrbital; 2]) -> Self {
        Excitation { degree, holes, particles, phase: 1 }
    }

    pub fn identity() -> Self {
        let z = SpinOrbital::alpha(0);
        Excitation::raw(0, [z, z], [z, z])
    }

    /// Builds an excitation from hole and particle lists (any order). The
    /// phase is left at +1 until applied to a determinant.
    pub fn from_parts(mut holes: Vec<SpinOrbital>, mut particles: Vec<SpinOrbital>, norb: usize) -> Result<Self> {
        if holes.len() != particles.len() || holes.len() > 2 {
            return domain("an excitation needs equal hole and particle counts, at most two");
        }
        holes.sort_by_key(|s| s.index(norb));
        particles.sort_by_key(|s| s.index(norb));
        let degree = holes.len() as u8;
        let pad = |v: &[SpinOrbital]| match v.len() {
            0 => [SpinOrbital::alpha(0); 2],
            1 => [v[0], v[0]],
            _ => [v[0], v[1]],
        };
        Ok(Excitation::raw(degree, pad(&holes), pad(&particles)))
    }

    pub fn single(hole: SpinOrbital, particle: SpinOrbital) -> Self {
        Excitation::raw(1, [hole, hole], [particle, particle])
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    #[inline]
    pub fn holes(&self) -> &[SpinOrbital] {
        &self.holes[..self.degree as usize]
    }

    #[inline]
    pub fn particles(&self) -> &[SpinOrbital] {
        &self.particles[..self.degree as usize]
    }

    /// The reverse move (particles become holes).
    pub fn inverse(&self) -> Self {
        Excitation::raw(self.degree, self.particles, self.holes)
    }
}

/// Spin-orbitals allowed to receive an electron during enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParticleFilter {
    pub alpha: OrbitalSet,
    pub beta: OrbitalSet,
}

impl ParticleFilter {
    #[inline]
    pub fn allows(&self, so: SpinOrbital) -> bool {
        match so.spin {
            Spin::Alpha => self.alpha.contains(so.orbital),
            Spin::Beta => self.beta.contains(so.orbital),
        }
    }
}

impl FromStr for Spin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "alpha" | "α" | "up" => Ok(Spin::Alpha),
            "beta" | "β" | "down" => Ok(Spin::Beta),
            _ => Err(Error::Domain(format!("unknown spin '{s}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(m: usize, a: &[usize], b: &[usize]) -> Determinant {
        Determinant::from_occupations(m, a, b).unwrap()
    }

    #[test]
    fn degree_identity_and_single_move() {
        let d = det(4, &[0, 2], &[1]);
        assert_eq!(d.excitation_degree(&d).unwrap(), 0);
        let a = det(2, &[0], &[]);
        let b = det(2, &[1], &[]);
        assert_eq!(a.excitation_degree(&b).unwrap(), 1);
        assert_eq!(a.spin_orbital_hamming(&b).unwrap(), 2);
    }

    #[test]
    fn mismatched_spaces_are_domain_errors() {
        let a = det(4, &[0], &[1]);
        let b = det(5, &[0], &[1]);
        assert!(matches!(a.excitation_degree(&b), Err(Error::Domain(_))));
        assert!(matches!(a.spin_orbital_hamming(&b), Err(Error::Domain(_))));
        let c = det(4, &[0, 1], &[1]);
        assert!(matches!(a.excitation_degree(&c), Err(Error::Domain(_))));
    }

    #[test]
    fn out_of_range_orbital_rejected() {
        assert!(Determinant::from_occupations(3, &[3], &[]).is_err());
        assert!(Determinant::from_occupations(0, &[], &[]).is_err());
    }

    #[test]
    fn phase_counts_occupied_between() {
        let d = det(4, &[0, 1], &[]);
        let exc = Excitation::single(SpinOrbital::alpha(0), SpinOrbital::alpha(2));
        assert_eq!(d.excitation_phase(&exc).unwrap(), -1);
        assert_eq!(d.excitation_phase(&Excitation::identity()).unwrap(), 1);
    }

    #[test]
    fn phase_rejects_inapplicable() {
        let d = det(4, &[0, 1], &[]);
        let bad_hole = Excitation::single(SpinOrbital::alpha(3), SpinOrbital::alpha(2));
        let bad_particle = Excitation::single(SpinOrbital::alpha(0), SpinOrbital::alpha(1));
        assert!(d.excitation_phase(&bad_hole).is_err());
        assert!(d.excitation_phase(&bad_particle).is_err());
    }

    #[test]
    fn only_empty_orbital_is_reachable() {
        let d = det(2, &[0], &[]);
        let all: Vec<_> = d.connected_excitations(None).collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].0, det(2, &[1], &[]));
        assert_eq!(all[0].1.degree(), 1);
    }

    #[test]
    fn half_filled_two_site_reaches_rest_of_sector() {
        let d = det(2, &[0], &[1]);
        let got: Vec<_> = d.connected_excitations(None).map(|(x, _)| x).collect();
        let mut expected: Vec<_> = Determinant::enumerate(2, 1, 1).unwrap().into_iter().filter(|x| *x != d).collect();
        let mut sorted = got.clone();
        sorted.sort();
        expected.sort();
        assert_eq!(sorted, expected);
        let degrees: Vec<_> = d.connected_excitations(None).map(|(_, e)| e.degree()).collect();
        assert_eq!(degrees, vec![1, 1, 2]);
    }

    #[test]
    fn filter_restricts_particles() {
        let d = det(4, &[0], &[0]);
        let filter = ParticleFilter { alpha: OrbitalSet::from_indices([1]).unwrap(), beta: OrbitalSet::EMPTY };
        let got: Vec<_> = d.connected_excitations(Some(&filter)).map(|(x, _)| x).collect();
        assert_eq!(got, vec![det(4, &[1], &[0])]);
    }

    #[test]
    fn render_and_parse() {
        let d = det(6, &[0, 3], &[1]);
        assert_eq!(d.to_string(), "α:0,3|β:1");
        assert_eq!(parse_determinant("α:0,3|β:1", 6).unwrap(), d);
        let e = det(3, &[], &[]);
        assert_eq!(e.to_string(), "α:|β:");
        assert_eq!(parse_determinant("α:|β:", 3).unwrap(), e);
        assert!(parse_determinant("α:3,0|β:", 6).is_err());
        assert_eq!(parse_determinant("a:0|b:1", 6).unwrap(), parse_determinant("α:0|β:1", 6).unwrap());
    }

    #[test]
    fn total_order_is_numeric_on_alpha_then_beta() {
        let a = det(70, &[65], &[]);
        let b = det(70, &[0, 1, 2], &[]);
        assert!(b < a);
        let c = det(4, &[0], &[2]);
        let d = det(4, &[0], &[3]);
        assert!(c < d);
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(16, 2).unwrap().len(), 120);
        assert_eq!(combinations(5, 0).unwrap().len(), 1);
        let c = combinations(5, 3).unwrap();
        assert!(c.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn count_between_is_exclusive() {
        let s = OrbitalSet::from_indices([0, 1, 2, 70, 130]).unwrap();
        assert_eq!(s.count_between(0, 2), 1);
        assert_eq!(s.count_between(2, 0), 1);
        assert_eq!(s.count_between(1, 131), 3);
        assert_eq!(s.count_below(131), 5);
    }
}
