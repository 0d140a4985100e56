//! Adaptive selected CI: diagonalize, rank the exterior, keep the best.
//!
//! Each candidate determinant `i` outside the current space is scored by the
//! magnitude of `Σ_j H_ij C_j / (E − H_ii)` over the core determinants `j`,
//! an estimate of the coefficient it would have in the ground state. The next
//! space is the top `tdets` of the current determinants (scored by `|C|`)
//! and the candidates together.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::hash::BuildHasher;

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use super::{sort_terms, DavidsonOptions, ProjectedHamiltonian, Wavefunction};
use crate::determinants::Determinant;
use crate::error::{domain, Error, Result};
use crate::hamiltonians::{total_momentum, IntegralModel, Momentum, SourceTag};

/// Smallest magnitude allowed for `E − H_ii`.
pub(crate) const DENOMINATOR_FLOOR: f64 = 1e-8;

#[inline]
pub(crate) fn regularized(denominator: f64) -> f64 {
    if denominator.abs() < DENOMINATOR_FLOOR {
        if denominator > 0.0 {
            DENOMINATOR_FLOOR
        } else {
            -DENOMINATOR_FLOOR
        }
    } else {
        denominator
    }
}

/// When the perturbative correction is evaluated during a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pt2Mode {
    Never,
    Final,
    EveryIteration,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsciConfig {
    /// Target number of determinants in the variational space.
    pub tdets: usize,
    /// Number of leading determinants whose connections are searched. `None`
    /// selects `min(tdets, max(1000, tdets / 10))`.
    pub cdets: Option<usize>,
    pub energy_tol: f64,
    pub max_iter: usize,
    pub davidson_tol: f64,
    /// Restrict the search to one total lattice momentum.
    pub sector: Option<Momentum>,
    pub pt2: Pt2Mode,
}

impl AsciConfig {
    pub fn new(tdets: usize) -> Self {
        AsciConfig {
            tdets,
            cdets: None,
            energy_tol: 1e-6,
            max_iter: 20,
            davidson_tol: 1e-8,
            sector: None,
            pt2: Pt2Mode::Final,
        }
    }

    pub fn core_size(&self) -> usize {
        self.cdets.unwrap_or_else(|| self.tdets.min(1000.max(self.tdets / 10)))
    }

    fn validate(&self) -> Result<()> {
        if self.tdets == 0 {
            return domain("tdets must be positive");
        }
        let c = self.core_size();
        if c == 0 || c > self.tdets {
            return domain(format!("cdets must lie in [1, tdets], got {c}"));
        }
        if !(self.energy_tol > 0.0 && self.davidson_tol > 0.0) {
            return domain("tolerances must be positive");
        }
        if self.max_iter == 0 {
            return domain("max_iter must be positive");
        }
        Ok(())
    }
}

/// One accepted iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub space_size: usize,
    pub e_var: f64,
    /// `None` when the correction was not evaluated at this iteration.
    pub e_pt2: Option<f64>,
    pub top_weight: f64,
}

#[derive(Clone, Debug)]
pub struct AsciResult {
    pub wavefunction: Wavefunction,
    pub e_var: f64,
    /// Zero when the run exhausted the reachable space or skipped the correction.
    pub e_pt2: f64,
    pub iterations: Vec<IterationRecord>,
    /// Whether the energy criterion (or an exhausted space) stopped the run.
    pub converged: bool,
}

impl AsciResult {
    /// Whitespace-separated log with a fixed header:
    /// `iter space_size e_var e_pt2 top_weight`.
    pub fn log_text(&self) -> String {
        let mut out = String::from("iter space_size e_var e_pt2 top_weight\n");
        for r in &self.iterations {
            let pt2 = r.e_pt2.map_or_else(|| "nan".to_string(), |v| format!("{v:.16e}"));
            let _ = writeln!(out, "{} {} {:.16e} {} {:.16e}", r.iter, r.space_size, r.e_var, pt2, r.top_weight);
        }
        out
    }
}

/// A determinant outside the space with its first-order coefficient estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CandidateScore {
    pub det: Determinant,
    /// `Σ_j H_ij C_j` over the core.
    pub numerator: f64,
    /// `H_ii`.
    pub diagonal: f64,
    /// `|numerator / (E − H_ii)|` with the regularized denominator.
    pub score: f64,
}

const CORE_CHUNK: usize = 64;
const CHUNKS_PER_WAVE: usize = 256;

/// `Σ_j H_ij C_j` for every determinant `i` connected to the core and kept by
/// `keep`, sorted by determinant.
///
/// The core is split into fixed-size chunks; each chunk accumulates in core
/// order and chunk sums are merged in chunk order, so the floating-point
/// result does not depend on the number of threads.
fn exterior_numerators<F>(model: &IntegralModel, core: &[(Determinant, f64)], keep: F) -> Vec<(Determinant, f64)>
where
    F: Fn(&Determinant) -> bool + Sync,
{
    let mut total: FxHashMap<Determinant, f64> = FxHashMap::default();
    for wave in core.chunks(CORE_CHUNK * CHUNKS_PER_WAVE) {
        let partials: Vec<FxHashMap<Determinant, f64>> = wave
            .par_chunks(CORE_CHUNK)
            .map(|chunk| {
                let mut acc: FxHashMap<Determinant, f64> = FxHashMap::default();
                for (d, c) in chunk {
                    model.for_each_connected(d, |x, h| {
                        if keep(&x) {
                            *acc.entry(x).or_insert(0.0) += h * c;
                        }
                    });
                }
                acc
            })
            .collect();
        for part in partials {
            if total.is_empty() {
                total = part;
                continue;
            }
            for (d, v) in part {
                *total.entry(d).or_insert(0.0) += v;
            }
        }
    }
    let mut out: Vec<(Determinant, f64)> = total.into_iter().collect();
    out.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Scores every determinant connected to `core` that is not in `space`.
///
/// The result is sorted by descending score, ties by determinant order.
pub fn rank_candidates<S: BuildHasher + Sync>(
    model: &IntegralModel,
    core: &[(Determinant, f64)],
    energy: f64,
    space: &HashSet<Determinant, S>,
) -> Vec<CandidateScore> {
    rank_filtered(model, core, energy, |d| !space.contains(d))
}

fn rank_filtered<F>(model: &IntegralModel, core: &[(Determinant, f64)], energy: f64, keep: F) -> Vec<CandidateScore>
where
    F: Fn(&Determinant) -> bool + Sync,
{
    let numerators = exterior_numerators(model, core, keep);
    let mut scored: Vec<CandidateScore> = numerators
        .par_iter()
        .map(|&(det, numerator)| {
            let diagonal = model.diagonal(&det);
            let score = (numerator / regularized(energy - diagonal)).abs();
            CandidateScore { det, numerator, diagonal, score }
        })
        .collect();
    scored.par_sort_unstable_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.det.cmp(&b.det)));
    scored
}

/// Epstein–Nesbet second-order energy of the exterior of `wf` at energy `energy`.
pub fn pt2_correction(model: &IntegralModel, wf: &Wavefunction, energy: f64) -> f64 {
    let inside: FxHashSet<Determinant> = wf.dets().iter().copied().collect();
    let core: Vec<(Determinant, f64)> = wf.iter().map(|(d, c)| (*d, c)).collect();
    pt2_filtered(model, &core, energy, |d| !inside.contains(d))
}

fn pt2_filtered<F>(model: &IntegralModel, core: &[(Determinant, f64)], energy: f64, keep: F) -> f64
where
    F: Fn(&Determinant) -> bool + Sync,
{
    let numerators = exterior_numerators(model, core, keep);
    let terms: Vec<f64> =
        numerators.par_iter().map(|&(det, v)| v * v / regularized(energy - model.diagonal(&det))).collect();
    // an empty sum is -0.0; report +0.0
    terms.iter().sum::<f64>() + 0.0
}

fn sector_filter(model: &IntegralModel, sector: Option<Momentum>) -> Result<Option<(Momentum, crate::LatticeSpec)>> {
    let Some(k) = sector else { return Ok(None) };
    match (model.source(), model.lattice()) {
        (SourceTag::HubbardPlaneWave, Some(spec)) => {
            if k.kx >= spec.lx || k.ky >= spec.ly {
                return domain(format!("momentum sector ({}, {}) outside the lattice", k.kx, k.ky));
            }
            Ok(Some((Momentum::new(k.kx as i64, k.ky as i64, spec.lx, spec.ly), spec.clone())))
        }
        _ => domain("momentum sectors need a plane-wave lattice model"),
    }
}

/// Runs the adaptive selected-CI iteration from `initial`.
pub fn asci_run(model: &IntegralModel, initial: &[Determinant], cfg: &AsciConfig) -> Result<AsciResult> {
    cfg.validate()?;
    if initial.is_empty() {
        return domain("no initial determinants");
    }
    let sector = sector_filter(model, cfg.sector)?;
    let mut start: Vec<Determinant> = Vec::with_capacity(initial.len());
    for d in initial {
        model.check_determinant(d)?;
        if d.n_alpha() != model.n_alpha() || d.n_beta() != model.n_beta() {
            return domain(format!(
                "initial determinant {d} does not hold ({}, {}) electrons",
                model.n_alpha(),
                model.n_beta()
            ));
        }
        if let Some((k, spec)) = &sector {
            if total_momentum(d, spec) != *k {
                return domain(format!("initial determinant {d} lies outside momentum sector ({}, {})", k.kx, k.ky));
            }
        }
        start.push(*d);
    }
    start.sort();
    start.dedup();
    start.truncate(cfg.tdets);

    let in_sector = |d: &Determinant| sector.as_ref().map_or(true, |(k, spec)| total_momentum(d, spec) == *k);
    let opts = DavidsonOptions { tol: cfg.davidson_tol, ..Default::default() };
    let diagonalize = |space: Vec<Determinant>, guess: Option<&[f64]>| -> Result<Wavefunction> {
        let size = space.len();
        ProjectedHamiltonian::new(model, space)?.ground_state(guess, &opts).map_err(|e| match e {
            Error::NotConverged { iterations, residual, best_energy, best_vector, .. } => {
                Error::NotConverged { solver: "davidson (asci space)", iterations, residual, best_energy, best_vector }
            }
            other => Error::Domain(format!("diagonalization of a {size}-determinant space failed: {other}")),
        })
    };

    let mut wf = diagonalize(start, None)?;
    let mut log = Vec::new();
    let pt2_now = |wf: &Wavefunction| -> f64 {
        let inside: FxHashSet<Determinant> = wf.dets().iter().copied().collect();
        let core: Vec<(Determinant, f64)> = wf.iter().map(|(d, c)| (*d, c)).collect();
        pt2_filtered(model, &core, wf.energy(), |d| !inside.contains(d) && in_sector(d))
    };
    log.push(IterationRecord {
        iter: 0,
        space_size: wf.len(),
        e_var: wf.energy(),
        e_pt2: (cfg.pt2 == Pt2Mode::EveryIteration).then(|| pt2_now(&wf)),
        top_weight: wf.top_weight(),
    });

    let mut converged = false;
    for iter in 1..=cfg.max_iter {
        let inside: FxHashSet<Determinant> = wf.dets().iter().copied().collect();
        let ncore = cfg.core_size().min(wf.len());
        let core: Vec<(Determinant, f64)> = wf.iter().take(ncore).map(|(d, c)| (*d, c)).collect();
        let candidates = rank_filtered(model, &core, wf.energy(), |d| !inside.contains(d) && in_sector(d));
        if candidates.is_empty() {
            converged = true;
            break;
        }

        let mut pool: Vec<(Determinant, f64)> = wf.iter().map(|(d, c)| (*d, c.abs())).collect();
        pool.extend(candidates.iter().map(|c| (c.det, c.score)));
        sort_terms(&mut pool);
        pool.truncate(cfg.tdets);
        let changed = pool.iter().any(|(d, _)| !inside.contains(d)) || pool.len() != wf.len();
        if !changed {
            converged = true;
            break;
        }

        let old = wf.coefficient_map();
        let space: Vec<Determinant> = pool.iter().map(|(d, _)| *d).collect();
        let guess: Vec<f64> = space.iter().map(|d| old.get(d).copied().unwrap_or(0.0)).collect();
        let next = diagonalize(space, Some(&guess))?;

        // a pruned space may lose variational energy; keep the better one
        if next.energy() > wf.energy() + cfg.davidson_tol {
            converged = true;
            break;
        }
        let delta = (next.energy() - wf.energy()).abs();
        wf = next;
        log.push(IterationRecord {
            iter,
            space_size: wf.len(),
            e_var: wf.energy(),
            e_pt2: (cfg.pt2 == Pt2Mode::EveryIteration).then(|| pt2_now(&wf)),
            top_weight: wf.top_weight(),
        });
        if delta < cfg.energy_tol {
            converged = true;
            break;
        }
    }

    let e_pt2 = match cfg.pt2 {
        Pt2Mode::Never => 0.0,
        Pt2Mode::EveryIteration => log.last().and_then(|r| r.e_pt2).unwrap_or(0.0),
        Pt2Mode::Final => {
            let v = pt2_now(&wf);
            if let Some(last) = log.last_mut() {
                last.e_pt2 = Some(v);
            }
            v
        }
    };
    Ok(AsciResult { e_var: wf.energy(), e_pt2, wavefunction: wf, iterations: log, converged })
}
