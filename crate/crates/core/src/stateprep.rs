//! Auxiliary-qubit state preparation for sparse real wavefunctions.
//!
//! Qubit `q` holds the occupation of spin-orbital `q` (α block, then β). For
//! `L > 1` determinants one auxiliary qubit, index `n`, flags the branch still
//! being split. Step `ℓ` rotates the pivot qubit of `D_ℓ` under the flag,
//! erases the flag on the `D_ℓ` branch with a pattern-matched MCX, then flips
//! the other qubits where `D_ℓ` and `D_{ℓ+1}` differ under the flag.

use std::fmt::{self, Write as _};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::determinants::{combinations, Determinant};
use crate::error::{domain, Error, Result};
use crate::solver::Wavefunction;

/// Largest register the dense simulator accepts, auxiliary qubit included.
pub const DENSE_QUBIT_LIMIT: usize = 24;

const KEY_WORDS: usize = 9;

/// Computational basis state of up to `64 * KEY_WORDS` qubits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisKey([u64; KEY_WORDS]);

impl BasisKey {
    #[inline]
    pub fn get(&self, q: usize) -> bool {
        (self.0[q / 64] >> (q % 64)) & 1 == 1
    }

    #[inline]
    pub fn flip(&mut self, q: usize) {
        self.0[q / 64] ^= 1 << (q % 64);
    }

    /// The dense index, if every set qubit is below 64.
    fn as_index(&self) -> Option<u64> {
        self.0[1..].iter().all(|w| *w == 0).then_some(self.0[0])
    }
}

/// Occupation pattern of `d` as a basis state.
pub fn determinant_key(d: &Determinant) -> BasisKey {
    let mut k = BasisKey::default();
    for q in d.occupied_indices() {
        k.flip(q);
    }
    k
}

/// Spin-orbital `q` ↦ qubit `q`; the auxiliary qubit, if any, comes last and
/// must read 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QubitMapping {
    pub n_system: usize,
    pub aux: Option<usize>,
}

impl QubitMapping {
    pub fn for_circuit(c: &Circuit) -> Self {
        QubitMapping { n_system: c.n_system, aux: c.uses_aux.then_some(c.n_system) }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_system + usize::from(self.aux.is_some())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    X(usize),
    /// NOT on `target` when every control reads its polarity (`true` = 1).
    Mcx {
        controls: Vec<(usize, bool)>,
        target: usize,
    },
    /// `RY(angle)` on `target` when `control` reads 1.
    Cry {
        angle: f64,
        control: usize,
        target: usize,
    },
}

impl Gate {
    fn max_qubit(&self) -> usize {
        match self {
            Gate::X(q) => *q,
            Gate::Mcx { controls, target } => controls.iter().map(|c| c.0).chain([*target]).max().unwrap_or(0),
            Gate::Cry { control, target, .. } => (*control).max(*target),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gate::X(q) => write!(f, "X {q}"),
            Gate::Mcx { controls, target } => {
                write!(f, "MCX")?;
                for (c, pol) in controls {
                    write!(f, " {c}:{}", if *pol { '+' } else { '-' })?;
                }
                write!(f, " -> {target}")
            }
            Gate::Cry { angle, control, target } => write!(f, "CRY {angle:.16e} {control} -> {target}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n_system: usize,
    pub gates: Vec<Gate>,
    pub uses_aux: bool,
}

impl Circuit {
    pub fn n_qubits(&self) -> usize {
        self.n_system + usize::from(self.uses_aux)
    }

    /// Header `qubits N, aux A` (or `aux none`), then one gate per line.
    pub fn to_text(&self) -> String {
        let mut out = if self.uses_aux {
            format!("qubits {}, aux {}\n", self.n_system + 1, self.n_system)
        } else {
            format!("qubits {}, aux none\n", self.n_system)
        };
        for g in &self.gates {
            let _ = writeln!(out, "{g}");
        }
        out
    }

    /// Parses [`Circuit::to_text`]. Blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Circuit> {
        let err = |line: usize, msg: String| Error::Parse { line, msg };
        let mut header: Option<(usize, bool)> = None;
        let mut gates = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let uint = |s: &str| s.parse::<usize>().map_err(|_| err(n, format!("bad qubit index '{s}'")));
            let Some((n_system, uses_aux)) = header else {
                let (q, a) = line
                    .strip_prefix("qubits ")
                    .and_then(|r| r.split_once(", aux "))
                    .ok_or_else(|| err(n, "expected header 'qubits N, aux A'".into()))?;
                let total = uint(q)?;
                header = Some(if a == "none" {
                    (total, false)
                } else {
                    let aux = uint(a)?;
                    if total == 0 || aux != total - 1 {
                        return Err(err(n, "auxiliary qubit must be the last one".into()));
                    }
                    (aux, true)
                });
                continue;
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let gate = match toks.as_slice() {
                ["X", q] => Gate::X(uint(q)?),
                ["MCX", rest @ .., "->", t] => {
                    let mut controls = Vec::with_capacity(rest.len());
                    for c in rest {
                        let (q, pol) = c.split_once(':').ok_or_else(|| err(n, format!("bad control '{c}'")))?;
                        let pol = match pol {
                            "+" => true,
                            "-" => false,
                            _ => return Err(err(n, format!("bad polarity in '{c}'"))),
                        };
                        controls.push((uint(q)?, pol));
                    }
                    Gate::Mcx { controls, target: uint(t)? }
                }
                ["CRY", a, c, "->", t] => Gate::Cry {
                    angle: a.parse().map_err(|_| err(n, format!("bad angle '{a}'")))?,
                    control: uint(c)?,
                    target: uint(t)?,
                },
                _ => return Err(err(n, format!("unrecognized gate '{line}'"))),
            };
            if gate.max_qubit() >= n_system + usize::from(uses_aux) {
                return Err(err(n, "qubit index outside the register".into()));
            }
            gates.push(gate);
        }
        let (n_system, uses_aux) = header.ok_or_else(|| err(1, "missing header".into()))?;
        Ok(Circuit { n_system, gates, uses_aux })
    }
}

/// Greedy nearest-neighbour path: start at the largest `|coeff|`, then always
/// step to the unvisited determinant at the smallest spin-orbital Hamming
/// distance. Ties go to the smaller determinant. Returns input indices.
pub fn order_determinants(dets: &[Determinant], coeffs: &[f64]) -> Result<Vec<usize>> {
    if dets.is_empty() || dets.len() != coeffs.len() {
        return domain("ordering needs one coefficient per determinant and at least one determinant");
    }
    let mut seen = FxHashSet::default();
    for d in dets {
        if d.norb() != dets[0].norb() {
            return domain("determinants live in different orbital spaces");
        }
        if !seen.insert(*d) {
            return domain(format!("duplicate determinant {d}"));
        }
    }
    let n = dets.len();
    let mut start = 0;
    for i in 1..n {
        let (a, b) = (coeffs[i].abs(), coeffs[start].abs());
        if a > b || (a == b && dets[i] < dets[start]) {
            start = i;
        }
    }
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut cur = start;
    visited[cur] = true;
    order.push(cur);
    for _ in 1..n {
        let mut best: Option<(usize, usize)> = None;
        for j in (0..n).filter(|&j| !visited[j]) {
            let dist = dets[cur].hamming_unchecked(&dets[j]);
            best = match best {
                Some((bd, bj)) if bd < dist || (bd == dist && dets[bj] < dets[j]) => Some((bd, bj)),
                _ => Some((dist, j)),
            };
        }
        let (_, j) = best.expect("an unvisited determinant remains");
        visited[j] = true;
        order.push(j);
        cur = j;
    }
    Ok(order)
}

/// Sum of neighbour Hamming distances along `dets`.
pub fn path_length(dets: &[Determinant]) -> usize {
    dets.windows(2).map(|w| w[0].hamming_unchecked(&w[1])).sum()
}

/// Ordered determinants, normalized signed amplitudes, and per-step pivots and angles.
#[derive(Clone, Debug, PartialEq)]
pub struct PrepPlan {
    pub n_system: usize,
    pub dets: Vec<Determinant>,
    pub amplitudes: Vec<f64>,
    /// `pivots[ℓ]`: lowest qubit where `dets[ℓ]` and `dets[ℓ + 1]` differ.
    pub pivots: Vec<usize>,
    pub angles: Vec<f64>,
}

/// Smallest remaining branch amplitude that may still be split.
const TAIL_FLOOR: f64 = 1e-12;

impl PrepPlan {
    /// Plan for the determinants in the given order. Amplitudes are normalized.
    pub fn new(dets: Vec<Determinant>, amplitudes: Vec<f64>) -> Result<PrepPlan> {
        if dets.is_empty() || dets.len() != amplitudes.len() {
            return domain("a plan needs one amplitude per determinant and at least one determinant");
        }
        let norb = dets[0].norb();
        let mut seen = FxHashSet::default();
        for d in &dets {
            if d.norb() != norb {
                return domain("determinants live in different orbital spaces");
            }
            if !seen.insert(*d) {
                return domain(format!("duplicate determinant {d}"));
            }
        }
        let norm = amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return domain("amplitudes have zero or non-finite norm");
        }
        let amplitudes: Vec<f64> = amplitudes.iter().map(|a| a / norm).collect();
        let n_system = 2 * norb;
        if n_system + 1 > 64 * KEY_WORDS {
            return domain("register too wide");
        }
        let l = dets.len();
        // tail[ℓ] = Σ_{ℓ' ≥ ℓ} α²
        let mut tail = vec![0.0; l + 1];
        for i in (0..l).rev() {
            tail[i] = tail[i + 1] + amplitudes[i] * amplitudes[i];
        }
        let mut pivots = Vec::with_capacity(l.saturating_sub(1));
        let mut angles = Vec::with_capacity(l.saturating_sub(1));
        for i in 0..l.saturating_sub(1) {
            let (a, b) = (determinant_key(&dets[i]), determinant_key(&dets[i + 1]));
            let k = (0..n_system).find(|&q| a.get(q) != b.get(q)).expect("distinct determinants differ somewhere");
            let next = if i + 2 == l {
                amplitudes[l - 1]
            } else {
                let beta = tail[i + 1].sqrt();
                if beta < TAIL_FLOOR {
                    return Err(Error::Plan(format!(
                        "remaining amplitude {beta:.3e} after determinant {} cannot be split further",
                        i + 1
                    )));
                }
                beta
            };
            let toward = if a.get(k) { -next } else { next };
            pivots.push(k);
            angles.push(2.0 * toward.atan2(amplitudes[i]));
        }
        Ok(PrepPlan { n_system, dets, amplitudes, pivots, angles })
    }

    /// Plan for a wavefunction, optionally reordered by [`order_determinants`].
    pub fn from_wavefunction(wf: &Wavefunction, reorder: bool) -> Result<PrepPlan> {
        let (dets, coeffs) = (wf.dets(), wf.coeffs());
        let order: Vec<usize> = if reorder { order_determinants(dets, coeffs)? } else { (0..dets.len()).collect() };
        PrepPlan::new(order.iter().map(|&i| dets[i]).collect(), order.iter().map(|&i| coeffs[i]).collect())
    }

    pub fn len(&self) -> usize {
        self.dets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dets.is_empty()
    }
}

/// Emits the preparation circuit for `plan`.
pub fn synthesize(plan: &PrepPlan) -> Circuit {
    let n = plan.n_system;
    let l = plan.len();
    let keys: Vec<BasisKey> = plan.dets.iter().map(determinant_key).collect();
    let mut gates: Vec<Gate> = (0..n).filter(|&q| keys[0].get(q)).map(Gate::X).collect();
    if l == 1 {
        return Circuit { n_system: n, gates, uses_aux: false };
    }
    let aux = n;
    let pattern = |k: &BasisKey| -> Vec<(usize, bool)> { (0..n).map(|q| (q, k.get(q))).collect() };
    gates.push(Gate::X(aux));
    for i in 0..l - 1 {
        let k = plan.pivots[i];
        gates.push(Gate::Cry { angle: plan.angles[i], control: aux, target: k });
        gates.push(Gate::Mcx { controls: pattern(&keys[i]), target: aux });
        for q in (0..n).filter(|&q| q != k && keys[i].get(q) != keys[i + 1].get(q)) {
            gates.push(Gate::Mcx { controls: vec![(aux, true)], target: q });
        }
    }
    gates.push(Gate::Mcx { controls: pattern(&keys[l - 1]), target: aux });
    Circuit { n_system: n, gates, uses_aux: true }
}

/// Gate tallies. MCX gates onto the auxiliary qubit (erasures) and MCX gates
/// from it onto system qubits (fan-out) are counted separately.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub x: usize,
    pub fan_out: usize,
    pub mcx: usize,
    pub cry: usize,
    pub total: usize,
    /// `(control count, gates)` over all MCX gates, ascending.
    pub control_histogram: Vec<(usize, usize)>,
}

impl GateCounts {
    pub fn x_type(&self) -> usize {
        self.x + self.fan_out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "x {}\nfan_out {}\nmcx {}\ncry {}\ntotal {}\n",
            self.x, self.fan_out, self.mcx, self.cry, self.total
        );
        for (c, k) in &self.control_histogram {
            let _ = writeln!(out, "controls {c} {k}");
        }
        out
    }
}

pub fn gate_counts(c: &Circuit) -> GateCounts {
    let mut counts = GateCounts::default();
    let mut hist: std::collections::BTreeMap<usize, usize> = Default::default();
    let aux = c.uses_aux.then_some(c.n_system);
    for g in &c.gates {
        match g {
            Gate::X(_) => counts.x += 1,
            Gate::Mcx { controls, target } => {
                *hist.entry(controls.len()).or_default() += 1;
                if Some(*target) != aux && controls.len() == 1 && Some(controls[0].0) == aux {
                    counts.fan_out += 1;
                } else {
                    counts.mcx += 1;
                }
            }
            Gate::Cry { .. } => counts.cry += 1,
        }
    }
    counts.total = c.gates.len();
    counts.control_histogram = hist.into_iter().collect();
    counts
}

/// Read access to simulated amplitudes.
pub trait QuantumState {
    fn n_qubits(&self) -> usize;
    fn amplitude(&self, key: &BasisKey) -> f64;
    fn norm(&self) -> f64;
    /// Largest `|amplitude|` over basis states with qubit `q` set.
    fn max_amplitude_with(&self, q: usize) -> f64;
}

/// Dense real statevector; basis index bit `q` is qubit `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<f64>,
}

fn ry(angle: f64) -> (f64, f64) {
    ((angle / 2.0).cos(), (angle / 2.0).sin())
}

impl Statevector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn new(n_qubits: usize) -> Result<Statevector> {
        if n_qubits > DENSE_QUBIT_LIMIT {
            return Err(Error::SizeGuard {
                what: "dense statevector bytes",
                required: 8u128 << n_qubits,
                limit: 8u128 << DENSE_QUBIT_LIMIT,
            });
        }
        let mut amps = vec![0.0; 1 << n_qubits];
        amps[0] = 1.0;
        Ok(Statevector { n_qubits, amps })
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amps
    }

    pub fn apply(&mut self, g: &Gate) {
        match g {
            Gate::X(t) => {
                let m = 1usize << t;
                for i in (0..self.amps.len()).filter(|i| i & m == 0) {
                    self.amps.swap(i, i | m);
                }
            }
            Gate::Mcx { controls, target } => {
                let m = 1usize << target;
                let (mut mask, mut want) = (0usize, 0usize);
                for (c, pol) in controls {
                    mask |= 1 << c;
                    if *pol {
                        want |= 1 << c;
                    }
                }
                for i in (0..self.amps.len()).filter(|i| i & m == 0 && i & mask == want) {
                    self.amps.swap(i, i | m);
                }
            }
            Gate::Cry { angle, control, target } => {
                let (c, s) = ry(*angle);
                let (m, cm) = (1usize << target, 1usize << control);
                for i in (0..self.amps.len()).filter(|i| i & m == 0 && i & cm != 0) {
                    let (a0, a1) = (self.amps[i], self.amps[i | m]);
                    self.amps[i] = c * a0 - s * a1;
                    self.amps[i | m] = s * a0 + c * a1;
                }
            }
        }
    }
}

impl QuantumState for Statevector {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn amplitude(&self, key: &BasisKey) -> f64 {
        key.as_index().and_then(|i| self.amps.get(i as usize).copied()).unwrap_or(0.0)
    }

    fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    fn max_amplitude_with(&self, q: usize) -> f64 {
        let m = 1usize << q;
        self.amps.iter().enumerate().filter(|(i, _)| i & m != 0).fold(0.0, |acc, (_, a)| acc.max(a.abs()))
    }
}

/// Exact simulation that stores only nonzero amplitudes, for registers too
/// wide for [`Statevector`].
#[derive(Clone, Debug)]
pub struct SparseState {
    n_qubits: usize,
    amps: FxHashMap<BasisKey, f64>,
}

impl SparseState {
    pub fn new(n_qubits: usize) -> Result<SparseState> {
        if n_qubits > 64 * KEY_WORDS {
            return domain("register too wide");
        }
        let mut amps = FxHashMap::default();
        amps.insert(BasisKey::default(), 1.0);
        Ok(SparseState { n_qubits, amps })
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn apply(&mut self, g: &Gate) {
        let old = std::mem::take(&mut self.amps);
        let mut next: FxHashMap<BasisKey, f64> = FxHashMap::default();
        next.reserve(old.len() * if matches!(g, Gate::Cry { .. }) { 2 } else { 1 });
        for (mut k, a) in old {
            match g {
                Gate::X(t) => {
                    k.flip(*t);
                    next.insert(k, a);
                }
                Gate::Mcx { controls, target } => {
                    if controls.iter().all(|(c, pol)| k.get(*c) == *pol) {
                        k.flip(*target);
                    }
                    next.insert(k, a);
                }
                Gate::Cry { angle, control, target } => {
                    if !k.get(*control) {
                        *next.entry(k).or_insert(0.0) += a;
                        continue;
                    }
                    let (c, s) = ry(*angle);
                    let one = k.get(*target);
                    let mut other = k;
                    other.flip(*target);
                    // |0⟩ → c|0⟩ + s|1⟩, |1⟩ → −s|0⟩ + c|1⟩
                    *next.entry(k).or_insert(0.0) += c * a;
                    *next.entry(other).or_insert(0.0) += if one { -s * a } else { s * a };
                }
            }
        }
        next.retain(|_, a| *a != 0.0);
        self.amps = next;
    }

    /// Nonzero amplitudes in basis-key order.
    pub fn entries(&self) -> Vec<(BasisKey, f64)> {
        let mut v: Vec<(BasisKey, f64)> = self.amps.iter().map(|(k, a)| (*k, *a)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }
}

impl QuantumState for SparseState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn amplitude(&self, key: &BasisKey) -> f64 {
        self.amps.get(key).copied().unwrap_or(0.0)
    }

    fn norm(&self) -> f64 {
        // sorted summation keeps the result independent of hash order
        self.entries().iter().map(|(_, a)| a * a).sum::<f64>().sqrt()
    }

    fn max_amplitude_with(&self, q: usize) -> f64 {
        self.amps.iter().filter(|(k, _)| k.get(q)).fold(0.0, |acc, (_, a)| acc.max(a.abs()))
    }
}

/// Dense simulation from `|0…0⟩`.
pub fn simulate(c: &Circuit) -> Result<Statevector> {
    let mut s = Statevector::new(c.n_qubits())?;
    for g in &c.gates {
        s.apply(g);
    }
    Ok(s)
}

pub fn simulate_sparse(c: &Circuit) -> Result<SparseState> {
    let mut s = SparseState::new(c.n_qubits())?;
    for g in &c.gates {
        s.apply(g);
    }
    Ok(s)
}

/// `|⟨target ⊗ 0_aux|state⟩|²`.
pub fn fidelity(state: &impl QuantumState, target: &Wavefunction, mapping: &QubitMapping) -> Result<f64> {
    if state.n_qubits() != mapping.n_qubits() {
        return domain(format!("state has {} qubits, mapping expects {}", state.n_qubits(), mapping.n_qubits()));
    }
    if 2 * target.dets()[0].norb() != mapping.n_system {
        return domain(format!(
            "target has {} spin-orbitals, register has {} system qubits",
            2 * target.dets()[0].norb(),
            mapping.n_system
        ));
    }
    let s: f64 = target.iter().map(|(d, c)| c * state.amplitude(&determinant_key(d))).sum();
    Ok((s * s).min(1.0))
}

/// Seeded random target: `norb` spatial orbitals (`2 * norb` qubits), random
/// electron counts, up to `max_l` distinct determinants, and signed amplitudes
/// with magnitudes in `[0.05, 1]` before normalization.
pub fn random_instance(seed: u64, norb: usize, max_l: usize) -> Result<(Vec<Determinant>, Vec<f64>)> {
    if norb == 0 || max_l == 0 {
        return domain("random instances need at least one orbital and one determinant");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let na = rng.gen_range(0..=norb);
    let nb = rng.gen_range(0..=norb);
    let alphas = combinations(norb, na)?;
    let betas = combinations(norb, nb)?;
    let mut all = Vec::with_capacity(alphas.len() * betas.len());
    for a in &alphas {
        for b in &betas {
            all.push(Determinant::new(norb, *a, *b)?);
        }
    }
    let l = rng.gen_range(1..=max_l.min(all.len()));
    let dets: Vec<Determinant> = all.choose_multiple(&mut rng, l).copied().collect();
    let amps: Vec<f64> = (0..l)
        .map(|_| {
            let mag = rng.gen_range(0.05..=1.0);
            if rng.gen_bool(0.5) {
                mag
            } else {
                -mag
            }
        })
        .collect();
    let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
    Ok((dets, amps.iter().map(|a| a / norm).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(norb: usize, a: &[usize], b: &[usize]) -> Determinant {
        Determinant::from_occupations(norb, a, b).unwrap()
    }

    #[test]
    fn single_determinant_is_x_only() {
        let d = det(3, &[0, 2], &[1]);
        let plan = PrepPlan::new(vec![d], vec![-1.0]).unwrap();
        let c = synthesize(&plan);
        assert!(!c.uses_aux);
        assert_eq!(c.gates, vec![Gate::X(0), Gate::X(2), Gate::X(4)]);
        let s = simulate(&c).unwrap();
        let wf = Wavefunction::single(d, 0.0);
        assert_eq!(fidelity(&s, &wf, &QubitMapping::for_circuit(&c)).unwrap(), 1.0);
        assert_eq!(c.to_text().lines().next().unwrap(), "qubits 6, aux none");
    }

    #[test]
    fn two_branch_bell_like_state() {
        // norb=1: qubit 0 = α, qubit 1 = β; D = {α}, {β}
        let (a, b) = (det(1, &[0], &[]), det(1, &[], &[0]));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plan = PrepPlan::new(vec![a, b], vec![h, h]).unwrap();
        let c = synthesize(&plan);
        let s = simulate(&c).unwrap();
        let amps = s.amplitudes();
        assert_eq!(amps.len(), 8);
        assert!((amps[0b001] - h).abs() < 1e-15 && (amps[0b010] - h).abs() < 1e-15);
        assert!(s.max_amplitude_with(2) < 1e-15);
    }

    #[test]
    fn dense_and_sparse_agree() {
        let dets = vec![det(2, &[0], &[0]), det(2, &[1], &[0]), det(2, &[0], &[1]), det(2, &[1], &[1])];
        let plan = PrepPlan::new(dets, vec![0.7, -0.3, 0.5, -0.4]).unwrap();
        let c = synthesize(&plan);
        let dense = simulate(&c).unwrap();
        let sparse = simulate_sparse(&c).unwrap();
        for (k, a) in sparse.entries() {
            assert!((dense.amplitude(&k) - a).abs() < 1e-15);
        }
        let wf = Wavefunction::new(plan.dets.clone(), plan.amplitudes.clone(), 0.0).unwrap();
        let f = fidelity(&sparse, &wf, &QubitMapping::for_circuit(&c)).unwrap();
        assert!(1.0 - f < 1e-12);
    }

    #[test]
    fn counts_follow_the_law() {
        let dets = vec![det(2, &[0], &[0]), det(2, &[1], &[1]), det(2, &[0], &[1])];
        let plan = PrepPlan::new(dets, vec![0.6, 0.6, 0.52]).unwrap();
        let c = synthesize(&plan);
        let k = gate_counts(&c);
        assert_eq!(k.cry, 2);
        assert_eq!(k.mcx, 3);
        assert_eq!(k.x, 3);
        // step 1 differs in 4 qubits (3 fan-outs), step 2 in 2 (1 fan-out)
        assert_eq!(k.fan_out, 4);
        assert_eq!(k.total, c.gates.len());
        assert_eq!(k.control_histogram, vec![(1, 4), (4, 3)]);
    }

    #[test]
    fn greedy_order_small_case() {
        // qubit strings 000, 011, 001 on α orbitals
        let dets = vec![det(3, &[], &[]), det(3, &[0, 1], &[]), det(3, &[0], &[])];
        let order = order_determinants(&dets, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(order, vec![0, 2, 1]);
        let d = dets[0];
        assert!(order_determinants(&[d, d], &[1.0, 1.0]).is_err());
        assert_eq!(order_determinants(&[d], &[1.0]).unwrap(), vec![0]);
    }

    #[test]
    fn text_round_trip_is_exact() {
        let dets = vec![det(2, &[0], &[1]), det(2, &[1], &[0]), det(2, &[0], &[0])];
        let plan = PrepPlan::new(dets, vec![0.1, -0.7, 1.0 / 3.0]).unwrap();
        let c = synthesize(&plan);
        let text = c.to_text();
        let back = Circuit::from_text(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_text(), text);
        assert!(matches!(Circuit::from_text("qubits 3, aux 2\nX 3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Circuit::from_text("qubits 3, aux 2\nFOO 1\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn simulator_trivia() {
        let s = simulate(&Circuit { n_system: 2, gates: vec![], uses_aux: false }).unwrap();
        assert_eq!(s.amplitudes(), &[1.0, 0.0, 0.0, 0.0]);
        let s = simulate(&Circuit { n_system: 2, gates: vec![Gate::X(0)], uses_aux: false }).unwrap();
        assert_eq!(s.amplitudes()[1], 1.0);
        let g = Gate::Cry { angle: 1.0, control: 1, target: 0 };
        let s = simulate(&Circuit { n_system: 2, gates: vec![g], uses_aux: false }).unwrap();
        assert_eq!(s.amplitudes()[0], 1.0);
        assert!(matches!(Statevector::new(25), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn tail_underflow_is_a_plan_error() {
        let dets = vec![det(2, &[0], &[0]), det(2, &[1], &[1]), det(2, &[0], &[1])];
        assert!(matches!(PrepPlan::new(dets, vec![1.0, 0.0, 0.0]), Err(Error::Plan(_))));
    }
}
