//! Overlaps, weight curves, the one-particle density matrix, natural orbitals,
//! and overlap extrapolation.

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::determinants::{Determinant, Spin};
use crate::error::{domain, Error, Result};
use crate::hamiltonians::{EriSymmetry, IntegralModel, SourceTag, TwoElectronIntegrals};
use crate::solver::{fix_sign, Wavefunction};

/// What a wavefunction is compared against.
#[derive(Clone, Copy, Debug)]
pub enum Reference<'a> {
    Determinant(Determinant),
    Wavefunction(&'a Wavefunction),
}

impl From<Determinant> for Reference<'_> {
    fn from(d: Determinant) -> Self {
        Reference::Determinant(d)
    }
}

impl<'a> From<&'a Wavefunction> for Reference<'a> {
    fn from(w: &'a Wavefunction) -> Self {
        Reference::Wavefunction(w)
    }
}

impl Reference<'_> {
    fn terms(&self) -> Vec<(Determinant, f64)> {
        match self {
            Reference::Determinant(d) => vec![(*d, 1.0)],
            Reference::Wavefunction(w) => w.iter().map(|(d, c)| (*d, c)).collect(),
        }
    }
}

fn same_space(a: &Determinant, b: &Determinant) -> Result<()> {
    if a.norb() != b.norb() || a.n_alpha() != b.n_alpha() || a.n_beta() != b.n_beta() {
        return domain(format!(
            "orbital spaces differ: {} orbitals ({}, {}) vs {} orbitals ({}, {})",
            a.norb(),
            a.n_alpha(),
            a.n_beta(),
            b.norb(),
            b.n_alpha(),
            b.n_beta()
        ));
    }
    Ok(())
}

/// `|⟨reference|wf⟩|²`.
pub fn overlap_squared<'a>(wf: &Wavefunction, reference: impl Into<Reference<'a>>) -> Result<f64> {
    let terms = reference.into().terms();
    same_space(&wf.dets()[0], &terms[0].0)?;
    let map = wf.coefficient_map();
    let mut s = 0.0;
    for (d, c) in &terms {
        if let Some(x) = map.get(d) {
            s += c * x;
        }
    }
    Ok((s * s).min(1.0))
}

/// `(N, Σ_{n≤N} c_n²)` for `N = 1..=min(n_max, len)` in the wavefunction's order.
pub fn cumulative_weights(wf: &Wavefunction, n_max: usize) -> Vec<(usize, f64)> {
    let mut acc = 0.0;
    wf.coeffs()
        .iter()
        .take(n_max)
        .enumerate()
        .map(|(i, c)| {
            acc += c * c;
            (i + 1, acc)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OverlapReport {
    pub single_det_sq: f64,
    pub cumulative: Vec<(usize, f64)>,
    pub reference: Vec<Determinant>,
}

impl OverlapReport {
    /// Overlap with the leading determinant and the weight curve up to `n_max`.
    pub fn new(wf: &Wavefunction, n_max: usize) -> Result<Self> {
        let top = wf.dets()[0];
        Ok(OverlapReport {
            single_det_sq: overlap_squared(wf, top)?,
            cumulative: cumulative_weights(wf, n_max),
            reference: vec![top],
        })
    }

    /// `# overlap single_det_sq=... reference=...` then one `N weight` line per point.
    pub fn to_text(&self) -> String {
        let refs: Vec<String> = self.reference.iter().map(|d| d.to_string()).collect();
        let mut out = format!("# overlap single_det_sq={:.16e} reference={}\n", self.single_det_sq, refs.join(";"));
        for (n, w) in &self.cumulative {
            let _ = writeln!(out, "{n} {w:.16e}");
        }
        out
    }
}

/// Spin-summed one-particle density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct OneRdm {
    pub matrix: DMatrix<f64>,
}

impl OneRdm {
    pub fn norb(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// Eigenvalues in ascending order.
    pub fn occupations(&self) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

/// `γ_pq = Σ_σ ⟨ψ|a†_pσ a_qσ|ψ⟩`.
pub fn one_rdm(wf: &Wavefunction) -> OneRdm {
    let m = wf.dets()[0].norb();
    let index: FxHashMap<Determinant, usize> = wf.dets().iter().enumerate().map(|(i, d)| (*d, i)).collect();
    let coeffs = wf.coeffs();
    let partial: Vec<Vec<f64>> = wf
        .dets()
        .par_chunks(256)
        .enumerate()
        .map(|(chunk, dets)| {
            let mut g = vec![0.0; m * m];
            for (off, d) in dets.iter().enumerate() {
                let cj = coeffs[chunk * 256 + off];
                for spin in [Spin::Alpha, Spin::Beta] {
                    let occ = d.spin_set(spin);
                    for q in occ.iter() {
                        g[q * m + q] += cj * cj;
                        for p in occ.iter_empty(m) {
                            let (target, sign) = d.single_move(spin, q, p);
                            if let Some(&i) = index.get(&target) {
                                g[p * m + q] += coeffs[i] * cj * sign;
                            }
                        }
                    }
                }
            }
            g
        })
        .collect();
    let mut g = vec![0.0; m * m];
    for part in partial {
        for (a, b) in g.iter_mut().zip(part) {
            *a += b;
        }
    }
    let mut matrix = DMatrix::from_row_slice(m, m, &g);
    for p in 0..m {
        for q in 0..p {
            let v = 0.5 * (matrix[(p, q)] + matrix[(q, p)]);
            matrix[(p, q)] = v;
            matrix[(q, p)] = v;
        }
    }
    OneRdm { matrix }
}

const DEGENERATE: f64 = 1e-10;

/// Diagonalizes `γ`. Row `k` of the returned unitary is natural orbital `k`
/// expressed in the old orbitals, so `u γ uᵀ` is diagonal with descending
/// occupations. Each row's largest-magnitude entry is positive; degenerate
/// occupations are ordered by the index of the row's first nonzero entry.
pub fn natural_orbital_rotation(gamma: &OneRdm) -> (DMatrix<f64>, Vec<f64>) {
    let m = gamma.norb();
    let eig = SymmetricEigen::new(gamma.matrix.clone());
    let mut vecs: Vec<(f64, Vec<f64>)> = (0..m)
        .map(|k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            fix_sign(&mut v);
            (eig.eigenvalues[k], v)
        })
        .collect();
    let first_nonzero = |v: &[f64]| v.iter().position(|x| x.abs() > DEGENERATE).unwrap_or(v.len());
    vecs.sort_by(|a, b| b.0.total_cmp(&a.0));
    // occupations stay descending; only vectors move within a degenerate run
    let occ: Vec<f64> = vecs.iter().map(|(o, _)| *o).collect();
    // runs of occupations within DEGENERATE of the run's first member form one group
    let mut start = 0;
    while start < vecs.len() {
        let mut end = start + 1;
        while end < vecs.len() && vecs[start].0 - vecs[end].0 <= DEGENERATE {
            end += 1;
        }
        vecs[start..end].sort_by_key(|(_, v)| first_nonzero(v));
        start = end;
    }
    let mut u = DMatrix::zeros(m, m);
    for (k, (_, v)) in vecs.iter().enumerate() {
        for p in 0..m {
            u[(k, p)] = v[p];
        }
    }
    (u, occ)
}

/// Expresses `model` in the orbitals given by the rows of `u`:
/// `h' = u h uᵀ` and `(ab|cd)' = Σ u_ap u_bq u_cr u_ds (pq|rs)`.
pub fn rotate_integrals(model: &IntegralModel, u: &DMatrix<f64>) -> Result<IntegralModel> {
    let m = model.norb();
    if model.two_electron().symmetry() != EriSymmetry::Eightfold {
        return domain("orbital rotation needs real-orbital integrals");
    }
    if u.nrows() != m || u.ncols() != m {
        return domain(format!("rotation is {}x{}, model has {m} orbitals", u.nrows(), u.ncols()));
    }
    let dev = (u * u.transpose() - DMatrix::<f64>::identity(m, m)).abs().max();
    if !(dev <= 1e-10) {
        return domain(format!("rotation is not orthogonal (max deviation {dev:.3e})"));
    }

    let h = DMatrix::from_row_slice(m, m, model.h_matrix());
    let hr = u * h * u.transpose();
    let mut h_new = vec![0.0; m * m];
    for p in 0..m {
        for q in 0..m {
            h_new[p * m + q] = if p >= q { hr[(p, q)] } else { hr[(q, p)] };
        }
    }

    // dense (pq|rs) at index ((p m + q) m + r) m + s
    let m2 = m * m;
    let m3 = m2 * m;
    let mut g = vec![0.0; m2 * m2];
    for (k, v) in model.two_electron().entries() {
        let [p, q, r, s] = k.map(usize::from);
        for (a, b, c, d) in [(p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r)] {
            g[a * m3 + b * m2 + c * m + d] = v;
            g[c * m3 + d * m2 + a * m + b] = v;
        }
    }
    // each pass contracts the last index and cycles it to the front
    for _ in 0..4 {
        let mut next = vec![0.0; m2 * m2];
        next.par_chunks_mut(m3).enumerate().for_each(|(a, out)| {
            for (rest, slot) in out.iter_mut().enumerate() {
                let src = &g[rest * m..rest * m + m];
                let mut acc = 0.0;
                for s in 0..m {
                    acc += u[(a, s)] * src[s];
                }
                *slot = acc;
            }
        });
        g = next;
    }

    let mut eri = TwoElectronIntegrals::new(m, EriSymmetry::Eightfold);
    for p in 0..m {
        for q in 0..=p {
            for r in 0..m {
                for s in 0..=r {
                    if p * m + q < r * m + s {
                        continue;
                    }
                    let v = g[p * m3 + q * m2 + r * m + s];
                    if v != 0.0 {
                        eri.insert(p, q, r, s, v);
                    }
                }
            }
        }
    }
    IntegralModel::new(m, h_new, eri, model.e_core(), SourceTag::Fcidump, model.n_alpha(), model.n_beta())
}

/// Least-squares line through `(e_pt2, overlap²)` points. Returns the value
/// at `e_pt2 = 0`, the slope, and the RMS residual.
pub fn extrapolate_overlap(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 2 {
        return domain("extrapolation needs at least two points");
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return domain("extrapolation needs at least two distinct PT2 values");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok((intercept, slope, (rss / n).sqrt()))
}

/// `# matrix rows=R cols=C` followed by `i j value` lines (0-based) for every
/// nonzero entry, row-major.
pub fn matrix_to_text(a: &DMatrix<f64>) -> String {
    let mut out = format!("# matrix rows={} cols={}\n", a.nrows(), a.ncols());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            let v = a[(i, j)];
            if v != 0.0 {
                let _ = writeln!(out, "{i} {j} {v:.16e}");
            }
        }
    }
    out
}

pub fn matrix_from_text(text: &str) -> Result<DMatrix<f64>> {
    let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
    let mut a: Option<DMatrix<f64>> = None;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# matrix") {
            let mut rows = None;
            let mut cols = None;
            for kv in rest.split_whitespace() {
                match kv.split_once('=') {
                    Some(("rows", v)) => rows = v.parse::<usize>().ok(),
                    Some(("cols", v)) => cols = v.parse::<usize>().ok(),
                    _ => {}
                }
            }
            let (r, c) = rows.zip(cols).ok_or_else(|| err(n, "header needs rows= and cols="))?;
            a = Some(DMatrix::zeros(r, c));
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let a = a.as_mut().ok_or_else(|| err(n, "missing '# matrix' header"))?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(err(n, "expected 'i j value'"));
        }
        let i: usize = f[0].parse().map_err(|_| err(n, "bad row index"))?;
        let j: usize = f[1].parse().map_err(|_| err(n, "bad column index"))?;
        let v: f64 = f[2].parse().map_err(|_| err(n, "bad value"))?;
        if i >= a.nrows() || j >= a.ncols() {
            return Err(err(n, "index outside the declared shape"));
        }
        a[(i, j)] = v;
    }
    a.ok_or_else(|| err(1, "missing '# matrix' header"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{build_hubbard_spatial, LatticeSpec};

    fn det(a: &[usize], b: &[usize]) -> Determinant {
        Determinant::from_occupations(4, a, b).unwrap()
    }

    #[test]
    fn overlap_trivial_cases() {
        let d = det(&[0], &[1]);
        let wf = Wavefunction::single(d, 0.0);
        assert_eq!(overlap_squared(&wf, d).unwrap(), 1.0);
        assert_eq!(overlap_squared(&wf, det(&[1], &[1])).unwrap(), 0.0);
        let other = Determinant::from_occupations(5, &[0], &[1]).unwrap();
        assert!(overlap_squared(&wf, other).is_err());
        let two = Wavefunction::new(vec![d, det(&[2], &[2])], vec![1.0, 1.0], 0.0).unwrap();
        assert!((overlap_squared(&two, &wf).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn uniform_weights() {
        let dets = vec![det(&[0], &[0]), det(&[1], &[1]), det(&[2], &[2]), det(&[3], &[3])];
        let wf = Wavefunction::new(dets, vec![0.5; 4], 0.0).unwrap();
        let w: Vec<f64> = cumulative_weights(&wf, 10).iter().map(|x| x.1).collect();
        assert_eq!(w, vec![0.25, 0.5, 0.75, 1.0]);
        let text = OverlapReport::new(&wf, 4).unwrap().to_text();
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn single_determinant_rdm() {
        let wf = Wavefunction::single(det(&[0, 2], &[0]), 0.0);
        let g = one_rdm(&wf);
        let d: Vec<f64> = g.matrix.diagonal().iter().copied().collect();
        assert_eq!(d, vec![2.0, 0.0, 1.0, 0.0]);
        let (u, occ) = natural_orbital_rotation(&g);
        assert_eq!(occ, vec![2.0, 1.0, 0.0, 0.0]);
        // degenerate empty orbitals keep index order
        assert_eq!(u[(2, 1)], 1.0);
        assert_eq!(u[(3, 3)], 1.0);
    }

    #[test]
    fn rotation_by_angle_matches_hand_expansion() {
        // two orbitals, only (11|11)=a and h = diag(e1, e2)
        let (a, e1, e2) = (0.7, -1.0, 0.5);
        let mut eri = TwoElectronIntegrals::new(2, EriSymmetry::Eightfold);
        eri.insert(0, 0, 0, 0, a);
        let m = IntegralModel::new(2, vec![e1, 0.0, 0.0, e2], eri, 0.25, SourceTag::Fcidump, 1, 1).unwrap();
        let th = 0.3f64;
        let (c, s) = (th.cos(), th.sin());
        let u = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
        let r = rotate_integrals(&m, &u).unwrap();
        assert!((r.h(0, 0) - (c * c * e1 + s * s * e2)).abs() < 1e-14);
        assert!((r.h(0, 1) - (-c * s * e1 + s * c * e2)).abs() < 1e-14);
        assert!((r.eri(0, 0, 0, 0) - c.powi(4) * a).abs() < 1e-14);
        assert!((r.eri(0, 0, 1, 1) - c * c * s * s * a).abs() < 1e-14);
        assert!((r.eri(0, 1, 1, 1) - c * s.powi(3) * -a).abs() < 1e-14);
        assert_eq!(r.e_core(), 0.25);
    }

    #[test]
    fn identity_rotation_is_exact() {
        let m = build_hubbard_spatial(&LatticeSpec::new(2, 2, 1.0, 4.0, 2, 2)).unwrap();
        let r = rotate_integrals(&m, &DMatrix::identity(4, 4)).unwrap();
        assert_eq!(r.h_matrix(), m.h_matrix());
        assert_eq!(r.two_electron().entries(), m.two_electron().entries());
        assert!(rotate_integrals(&m, &(DMatrix::identity(4, 4) * 1.1)).is_err());
    }

    #[test]
    fn extrapolation_hand_line() {
        let (b, s, r) = extrapolate_overlap(&[(-0.2, 0.8), (-0.1, 0.9)]).unwrap();
        assert!((b - 1.0).abs() < 1e-14 && (s - 1.0).abs() < 1e-14 && r < 1e-14);
        assert!(extrapolate_overlap(&[(0.1, 0.2)]).is_err());
        assert!(extrapolate_overlap(&[(0.1, 0.2), (0.1, 0.3)]).is_err());
    }

    #[test]
    fn matrix_text_round_trip() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, -1.0 / 3.0, 0.0, 2.5e-17, 0.0]);
        assert_eq!(matrix_from_text(&matrix_to_text(&a)).unwrap(), a);
        assert!(matrix_from_text("0 0 1.0\n").is_err());
    }
}
