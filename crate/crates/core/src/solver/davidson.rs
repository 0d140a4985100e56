//! Lowest eigenpair of a real symmetric operator by Davidson iteration.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};

/// A real symmetric operator known through its diagonal and its action.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn diagonal(&self) -> &[f64];
    /// `y = A x`. Must be deterministic for a given `x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Compressed sparse rows; the diagonal is stored separately and rows hold
/// only off-diagonal entries.
#[derive(Clone, Debug, Default)]
pub struct CsrMatrix {
    pub diag: Vec<f64>,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn with_diagonal(diag: Vec<f64>) -> Self {
        CsrMatrix { diag, row_ptr: vec![0], cols: Vec::new(), vals: Vec::new() }
    }

    /// Appends the off-diagonal entries of the next row.
    pub fn push_row<I: IntoIterator<Item = (u32, f64)>>(&mut self, entries: I) {
        for (c, v) in entries {
            self.cols.push(c);
            self.vals.push(v);
        }
        self.row_ptr.push(self.cols.len());
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Dense copy including the diagonal.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.diag.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.cols[k] as usize)] += self.vals[k];
            }
        }
        m
    }
}

const ROW_BLOCK: usize = 1024;

impl LinearOperator for CsrMatrix {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.par_chunks_mut(ROW_BLOCK).enumerate().for_each(|(b, block)| {
            let start = b * ROW_BLOCK;
            for (off, yi) in block.iter_mut().enumerate() {
                let i = start + off;
                let mut acc = self.diag[i] * x[i];
                for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                    acc += self.vals[k] * x[self.cols[k] as usize];
                }
                *yi = acc;
            }
        });
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DavidsonOptions {
    /// Convergence threshold on `‖A x − θ x‖`.
    pub tol: f64,
    /// Basis size that triggers a restart from the current Ritz vector.
    pub max_subspace: usize,
    pub max_iter: usize,
}

impl Default for DavidsonOptions {
    fn default() -> Self {
        DavidsonOptions { tol: 1e-8, max_subspace: 25, max_iter: 2000 }
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub value: f64,
    /// Normalized; the largest-magnitude entry is positive.
    pub vector: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Orthogonalizes `v` against `basis` (two passes) and normalizes it.
/// Returns false when nothing independent is left.
fn orthonormalize(v: &mut [f64], basis: &[Vec<f64>]) -> bool {
    let before = norm(v);
    if before == 0.0 {
        return false;
    }
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, v);
            axpy(-c, b, v);
        }
    }
    let after = norm(v);
    if after <= 1e-10 * before || after < 1e-300 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= after);
    true
}

/// Flips the sign so the largest-magnitude entry (first on ties) is positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Lowest eigenpair of `op`.
///
/// Starts from `guess` when given (it need not be normalized), otherwise from
/// the unit vectors on the few smallest diagonal entries. Uses the diagonal
/// (Jacobi) preconditioner and collapses to the current Ritz vector whenever
/// the basis reaches `max_subspace` vectors.
pub fn davidson<A: LinearOperator + ?Sized>(
    op: &A,
    guess: Option<&[f64]>,
    opts: &DavidsonOptions,
) -> Result<Eigenpair> {
    let n = op.dim();
    if n == 0 {
        return domain("cannot diagonalize an empty space");
    }
    let diag = op.diagonal();
    let max_sub = opts.max_subspace.max(2).min(n);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_sub);
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(max_sub);

    let add = |v: Vec<f64>, basis: &mut Vec<Vec<f64>>, images: &mut Vec<Vec<f64>>| {
        let mut av = vec![0.0; n];
        op.apply(&v, &mut av);
        basis.push(v);
        images.push(av);
    };

    let mut seeds: Vec<Vec<f64>> = Vec::new();
    if let Some(g) = guess.filter(|g| g.len() == n && norm(g) > 0.0) {
        seeds.push(g.to_vec());
    } else {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]).then(a.cmp(&b)));
        for &i in order.iter().take(4.min(n)) {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            seeds.push(e);
        }
    }
    for mut s in seeds {
        if orthonormalize(&mut s, &basis) {
            add(s, &mut basis, &mut images);
        }
    }

    let mut best = (f64::INFINITY, vec![0.0; n], f64::INFINITY);
    for iter in 1..=opts.max_iter {
        let k = basis.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            for j in 0..=i {
                let v = 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i]));
                t[(i, j)] = v;
                t[(j, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(t);
        let low = (0..k).min_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b])).unwrap();
        let theta = eig.eigenvalues[low];
        let s = eig.eigenvectors.column(low);

        let mut x = vec![0.0; n];
        let mut ax = vec![0.0; n];
        for j in 0..k {
            axpy(s[j], &basis[j], &mut x);
            axpy(s[j], &images[j], &mut ax);
        }
        let mut r = ax.clone();
        axpy(-theta, &x, &mut r);
        let rnorm = norm(&r);
        if rnorm < best.2 {
            best = (theta, x.clone(), rnorm);
        }
        if rnorm <= opts.tol || k == n {
            let scale = norm(&x);
            x.iter_mut().for_each(|v| *v /= scale);
            fix_sign(&mut x);
            return Ok(Eigenpair { value: theta, vector: x, residual: rnorm, iterations: iter });
        }

        let mut corr: Vec<f64> = r
            .iter()
            .zip(diag)
            .map(|(ri, di)| {
                let mut d = theta - di;
                if d.abs() < 1e-8 {
                    d = if d < 0.0 { -1e-8 } else { 1e-8 };
                }
                ri / d
            })
            .collect();

        if k >= max_sub {
            let scale = norm(&x);
            x.iter_mut().for_each(|v| *v /= scale);
            ax.iter_mut().for_each(|v| *v /= scale);
            basis.clear();
            images.clear();
            basis.push(x);
            images.push(ax);
        }
        if !orthonormalize(&mut corr, &basis) {
            // preconditioned residual is dependent; fall back to the raw residual
            corr = r;
            if !orthonormalize(&mut corr, &basis) {
                break;
            }
        }
        add(corr, &mut basis, &mut images);
    }
    let (value, mut vector, residual) = best;
    let scale = norm(&vector);
    if scale > 0.0 {
        vector.iter_mut().for_each(|v| *v /= scale);
    }
    Err(Error::NotConverged {
        solver: "davidson",
        iterations: opts.max_iter,
        residual,
        best_energy: value,
        best_vector: vector,
    })
}
