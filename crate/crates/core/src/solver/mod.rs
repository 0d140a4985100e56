//! Ground-state solvers over determinant spaces.

mod asci;
mod davidson;
mod exact;

pub use asci::{
    asci_run, pt2_correction, rank_candidates, AsciConfig, AsciResult, CandidateScore, IterationRecord, Pt2Mode,
};
pub(crate) use davidson::fix_sign;
pub use davidson::{davidson, CsrMatrix, DavidsonOptions, Eigenpair, LinearOperator};
pub use exact::{exact_diagonalize, sector_size, SectorConstraint, DEFAULT_ED_CAP};

use std::fmt::Write as _;

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::determinants::{parse_determinant, Determinant};
use crate::error::{domain, Error, Result};
use crate::hamiltonians::IntegralModel;

/// Normalized CI expansion, sorted by descending `|c|` with ties broken by
/// the determinant order.
#[derive(Clone, Debug, PartialEq)]
pub struct Wavefunction {
    dets: Vec<Determinant>,
    coeffs: Vec<f64>,
    energy: f64,
}

impl Wavefunction {
    /// Normalizes and sorts. Fails on duplicates, empty input, or a zero vector.
    pub fn new(dets: Vec<Determinant>, coeffs: Vec<f64>, energy: f64) -> Result<Self> {
        if dets.is_empty() || dets.len() != coeffs.len() {
            return domain("a wavefunction needs one coefficient per determinant and at least one term");
        }
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return domain("wavefunction coefficients have zero or non-finite norm");
        }
        let mut terms: Vec<(Determinant, f64)> = dets.into_iter().zip(coeffs.into_iter().map(|c| c / norm)).collect();
        sort_terms(&mut terms);
        let mut seen = FxHashSet::default();
        for (d, _) in &terms {
            if !seen.insert(*d) {
                return domain(format!("duplicate determinant {d}"));
            }
        }
        let (dets, coeffs) = terms.into_iter().unzip();
        Ok(Wavefunction { dets, coeffs, energy })
    }

    pub fn single(det: Determinant, energy: f64) -> Self {
        Wavefunction { dets: vec![det], coeffs: vec![1.0], energy }
    }

    pub fn len(&self) -> usize {
        self.dets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dets.is_empty()
    }

    pub fn dets(&self) -> &[Determinant] {
        &self.dets
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Determinant, f64)> {
        self.dets.iter().zip(self.coeffs.iter().copied())
    }

    /// Squared weight of the leading determinant.
    pub fn top_weight(&self) -> f64 {
        self.coeffs[0] * self.coeffs[0]
    }

    /// Leading `n` terms, renormalized. The energy is carried over unchanged.
    pub fn truncated(&self, n: usize) -> Result<Wavefunction> {
        if n == 0 {
            return domain("cannot keep zero determinants");
        }
        let n = n.min(self.len());
        Wavefunction::new(self.dets[..n].to_vec(), self.coeffs[..n].to_vec(), self.energy)
    }

    pub fn coefficient_map(&self) -> FxHashMap<Determinant, f64> {
        self.iter().map(|(d, c)| (*d, c)).collect()
    }

    /// Line-oriented text: a header with the orbital count and energy, then one
    /// `coefficient determinant` line per term.
    pub fn to_text(&self) -> String {
        self.to_text_top(self.len())
    }

    /// Like [`Wavefunction::to_text`] but keeps only the leading `k` terms,
    /// with their coefficients unchanged.
    pub fn to_text_top(&self, k: usize) -> String {
        let k = k.clamp(1, self.len());
        let mut out = String::new();
        let d0 = &self.dets[0];
        let _ = writeln!(
            out,
            "# wavefunction norb={} nalpha={} nbeta={} ndets={} energy={:.16e}",
            d0.norb(),
            d0.n_alpha(),
            d0.n_beta(),
            k,
            self.energy
        );
        for (d, c) in self.iter().take(k) {
            let _ = writeln!(out, "{c:+.16e} {d}");
        }
        out
    }

    /// Parses [`Wavefunction::to_text`] output. Lines starting with `#` other
    /// than the header are ignored.
    pub fn from_text(text: &str) -> Result<Wavefunction> {
        let mut norb = None;
        let mut energy = f64::NAN;
        let mut dets = Vec::new();
        let mut coeffs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# wavefunction") {
                for kv in rest.split_whitespace() {
                    match kv.split_once('=') {
                        Some(("norb", v)) => {
                            norb =
                                Some(v.parse::<usize>().map_err(|_| Error::Parse { line: n, msg: "bad norb".into() })?)
                        }
                        Some(("energy", v)) => {
                            energy = v.parse().map_err(|_| Error::Parse { line: n, msg: "bad energy".into() })?
                        }
                        _ => {}
                    }
                }
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let m = norb.ok_or(Error::Parse { line: n, msg: "missing '# wavefunction' header".into() })?;
            let (c, d) = line
                .split_once(' ')
                .ok_or(Error::Parse { line: n, msg: "expected 'coefficient determinant'".into() })?;
            coeffs.push(c.parse::<f64>().map_err(|_| Error::Parse { line: n, msg: format!("bad coefficient '{c}'") })?);
            dets.push(parse_determinant(d, m).map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { line: n, msg },
                other => other,
            })?);
        }
        Wavefunction::new(dets, coeffs, energy)
    }
}

/// Descending `|c|`, ties by ascending determinant.
pub(crate) fn sort_terms(terms: &mut [(Determinant, f64)]) {
    terms.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then_with(|| a.0.cmp(&b.0)));
}

/// Hamiltonian projected onto an explicit determinant list.
pub struct ProjectedHamiltonian {
    pub dets: Vec<Determinant>,
    pub matrix: CsrMatrix,
}

const BUILD_BLOCK: usize = 4096;

impl ProjectedHamiltonian {
    /// Builds the sparse projection. Rows are generated in parallel but each
    /// row's content depends only on its determinant.
    pub fn new(model: &IntegralModel, dets: Vec<Determinant>) -> Result<Self> {
        if dets.len() >= u32::MAX as usize {
            return domain("determinant space too large for 32-bit indices");
        }
        let mut index: FxHashMap<Determinant, u32> = FxHashMap::default();
        index.reserve(dets.len());
        for (i, d) in dets.iter().enumerate() {
            model.check_determinant(d)?;
            if index.insert(*d, i as u32).is_some() {
                return domain(format!("duplicate determinant {d} in space"));
            }
        }
        let diag: Vec<f64> = dets.par_iter().map(|d| model.diagonal(d)).collect();
        let mut matrix = CsrMatrix::with_diagonal(diag);
        for block in dets.chunks(BUILD_BLOCK) {
            let rows: Vec<Vec<(u32, f64)>> = block
                .par_iter()
                .map(|d| {
                    let mut row = Vec::new();
                    model.for_each_connected(d, |x, h| {
                        if let Some(&j) = index.get(&x) {
                            row.push((j, h));
                        }
                    });
                    row
                })
                .collect();
            for row in rows {
                matrix.push_row(row);
            }
        }
        Ok(ProjectedHamiltonian { dets, matrix })
    }

    /// Lowest eigenpair as a [`Wavefunction`].
    pub fn ground_state(&self, guess: Option<&[f64]>, opts: &DavidsonOptions) -> Result<Wavefunction> {
        let pair = davidson(&self.matrix, guess, opts)?;
        Wavefunction::new(self.dets.clone(), pair.vector, pair.value)
    }
}

/// Lowest eigenpair of `model` projected onto `space`.
///
/// Returns the energy and the coefficients aligned with `space`. The global
/// sign makes the largest-magnitude coefficient positive.
pub fn davidson_ground_state(model: &IntegralModel, space: &[Determinant], tol: f64) -> Result<(f64, Vec<f64>)> {
    if space.is_empty() {
        return domain("empty determinant space");
    }
    let (na, nb) = (space[0].n_alpha(), space[0].n_beta());
    if space.iter().any(|d| d.n_alpha() != na || d.n_beta() != nb) {
        return domain("determinant space mixes particle numbers");
    }
    let h = ProjectedHamiltonian::new(model, space.to_vec())?;
    let opts = DavidsonOptions { tol, ..Default::default() };
    let pair = davidson(&h.matrix, None, &opts)?;
    Ok((pair.value, pair.vector))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{build_hubbard_spatial, LatticeSpec};

    #[test]
    fn single_determinant_space() {
        let m = build_hubbard_spatial(&LatticeSpec::new(2, 1, 1.0, 4.0, 1, 1)).unwrap();
        let d = Determinant::from_occupations(2, &[0], &[0]).unwrap();
        let (e, c) = davidson_ground_state(&m, &[d], 1e-8).unwrap();
        assert_eq!(e, 4.0);
        assert_eq!(c, vec![1.0]);
    }

    #[test]
    fn two_site_ground_energy() {
        let m = build_hubbard_spatial(&LatticeSpec::new(2, 1, 1.0, 4.0, 1, 1)).unwrap();
        let space = Determinant::enumerate(2, 1, 1).unwrap();
        let (e, c) = davidson_ground_state(&m, &space, 1e-8).unwrap();
        assert!((e - -0.8284271247461903).abs() < 1e-8);
        let norm: f64 = c.iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wavefunction_sorting_and_text() {
        let d = |a: &[usize], b: &[usize]| Determinant::from_occupations(3, a, b).unwrap();
        let wf =
            Wavefunction::new(vec![d(&[0], &[1]), d(&[1], &[0]), d(&[2], &[2])], vec![0.5, -2.0, 0.5], -1.25).unwrap();
        assert_eq!(wf.dets()[0], d(&[1], &[0]));
        assert!(wf.dets()[1] < wf.dets()[2]);
        let sum: f64 = wf.coeffs().iter().map(|c| c * c).sum();
        assert!((sum - 1.0).abs() < 1e-12);
        let back = Wavefunction::from_text(&wf.to_text()).unwrap();
        assert_eq!(back, wf);
    }

    #[test]
    fn wavefunction_rejects_duplicates() {
        let a = Determinant::from_occupations(3, &[0], &[1]).unwrap();
        let b = Determinant::from_occupations(3, &[1], &[1]).unwrap();
        assert!(Wavefunction::new(vec![a, b, a], vec![0.1, 0.9, 0.2], 0.0).is_err());
        assert!(Wavefunction::new(vec![], vec![], 0.0).is_err());
        assert!(Wavefunction::new(vec![a], vec![0.0], 0.0).is_err());
    }
}
