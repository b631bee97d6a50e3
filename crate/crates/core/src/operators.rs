//! Sparse symmetric storage and the operator layer.
//!
//! Both triangles of a symmetric matrix are stored in CSR form so the
//! product is a single row-major pass. A [`LinearOperator`] is either an
//! explicit matrix or the inverse of a mass matrix applied through an
//! inner conjugate-gradient solve.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::{Error, Result};
use crate::vecops::{axpy, dot, norm};

/// Default relative residual of the inner mass solve.
pub const DEFAULT_INNER_TOL: f64 = 1e-12;

/// Symmetric sparse matrix in CSR form holding both triangles.
#[derive(Clone, PartialEq)]
pub struct SparseSymMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl fmt::Debug for SparseSymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SparseSymMatrix")
            .field("dim", &self.dim)
            .field("nnz", &self.nnz())
            .finish()
    }
}

impl SparseSymMatrix {
    /// Builds a matrix from entries covering both triangles.
    ///
    /// Every off-diagonal `(i, j, v)` must be matched by `(j, i, v)` with a
    /// bitwise-equal value; duplicates are rejected.
    pub fn from_triplets(dim: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMatrix("dimension must be positive".into()));
        }
        for &(i, j, v) in entries {
            if i >= dim || j >= dim {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({i}, {j}) out of range for dimension {dim}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidMatrix(format!("entry ({i}, {j}) is not finite")));
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = entries.to_vec();
        sorted.sort_by_key(|e| (e.0, e.1));
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::InvalidMatrix(format!(
                    "duplicate entry ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }

        let mut row_ptr = vec![0usize; dim + 1];
        for &(i, _, _) in &sorted {
            row_ptr[i + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = sorted.iter().map(|e| e.1).collect();
        let values = sorted.iter().map(|e| e.2).collect();
        let m = SparseSymMatrix {
            dim,
            row_ptr,
            col_idx,
            values,
        };

        for (i, j, v) in m.iter() {
            match m.get(j, i) {
                Some(w) if w.to_bits() == v.to_bits() => {}
                _ => {
                    return Err(Error::InvalidMatrix(format!(
                        "entry ({i}, {j}) has no symmetric counterpart"
                    )))
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix from one triangle; off-diagonal entries are mirrored.
    /// Entries may be given in either triangle, but each unordered pair once.
    pub fn from_lower_triplets(dim: usize, entries: &[(usize, usize, f64)]) -> Result<Self> {
        let mut full = Vec::with_capacity(2 * entries.len());
        for &(i, j, v) in entries {
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        Self::from_triplets(dim, &full)
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![1.0; dim]).expect("identity is valid")
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        let entries: Vec<_> = diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(diag.len(), &entries)
    }

    /// Converts a dense symmetric row-major matrix, dropping exact zeros.
    pub fn from_dense(dim: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: dense.len(),
            });
        }
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                let v = dense[i * dim + j];
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self::from_triplets(dim, &entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `a·self + b·other` on the union of both sparsity patterns.
    pub fn linear_combination(&self, a: f64, other: &SparseSymMatrix, b: f64) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        let mut entries = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.dim {
            let (c1, v1) = self.row(i);
            let (c2, v2) = other.row(i);
            let (mut p, mut q) = (0, 0);
            while p < c1.len() || q < c2.len() {
                let j1 = c1.get(p).copied().unwrap_or(usize::MAX);
                let j2 = c2.get(q).copied().unwrap_or(usize::MAX);
                if j1 == j2 {
                    entries.push((i, j1, a * v1[p] + b * v2[q]));
                    p += 1;
                    q += 1;
                } else if j1 < j2 {
                    entries.push((i, j1, a * v1[p]));
                    p += 1;
                } else {
                    entries.push((i, j2, b * v2[q]));
                    q += 1;
                }
            }
        }
        Self::from_triplets(self.dim, &entries)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored entry at `(i, j)`, if any.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|k| vals[k])
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    /// All stored entries `(row, col, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    /// Entries with `row >= col`.
    pub fn lower_triplets(&self) -> Vec<(usize, usize, f64)> {
        self.iter().filter(|&(i, j, _)| i >= j).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).unwrap_or(0.0)).collect()
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim * self.dim];
        for (i, j, v) in self.iter() {
            d[i * self.dim + j] = v;
        }
        d
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        self.check_lengths(x, y)?;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row_dot(i, x);
        }
        Ok(())
    }

    /// Row-parallel product. Each row is reduced sequentially, so the result
    /// is bitwise identical to [`SparseSymMatrix::matvec_into`].
    pub fn par_matvec_into(&self, x: &[f64], y: &mut [f64], pool: &ThreadPool) -> Result<()> {
        self.check_lengths(x, y)?;
        pool.install(|| {
            y.par_iter_mut()
                .with_min_len(256)
                .enumerate()
                .for_each(|(i, yi)| *yi = self.row_dot(i, x));
        });
        Ok(())
    }

    #[inline]
    fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (cols, vals) = self.row(i);
        cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum()
    }

    fn check_lengths(&self, x: &[f64], y: &[f64]) -> Result<()> {
        for len in [x.len(), y.len()] {
            if len != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    actual: len,
                });
            }
        }
        Ok(())
    }
}

/// Result of a conjugate-gradient solve.
#[derive(Debug, Clone)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final true relative residual `|Ax - b| / |b|`.
    pub relative_residual: f64,
}

/// Solves `A x = b` for symmetric positive definite `A`.
pub fn cg_solve(a: &SparseSymMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<CgSolution> {
    cg_solve_with(a, b, tol, max_iter, None)
}

fn cg_solve_with(
    a: &SparseSymMatrix,
    b: &[f64],
    tol: f64,
    max_iter: usize,
    pool: Option<&ThreadPool>,
) -> Result<CgSolution> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    let mv = |x: &[f64], y: &mut [f64]| match pool {
        Some(p) => a.par_matvec_into(x, y, p),
        None => a.matvec_into(x, y),
    };

    let b_norm = norm(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(CgSolution {
            x,
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let target = tol * b_norm;
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let mut iterations = 0;

    while iterations < max_iter {
        mv(&p, &mut ap)?;
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return Err(Error::NotSpd {
                context: "conjugate gradient curvature",
            });
        }
        let step = rr / pap;
        axpy(step, &p, &mut x);
        axpy(-step, &ap, &mut r);
        iterations += 1;
        let rr_new = dot(&r, &r);

        if rr_new.sqrt() <= target {
            // The recursive residual drifts; confirm against the true one.
            mv(&x, &mut ap)?;
            for ((ri, bi), axi) in r.iter_mut().zip(b).zip(&ap) {
                *ri = bi - axi;
            }
            let true_rr = dot(&r, &r);
            if true_rr.sqrt() <= target {
                return Ok(CgSolution {
                    x,
                    iterations,
                    relative_residual: true_rr.sqrt() / b_norm,
                });
            }
            p.copy_from_slice(&r);
            rr = true_rr;
            continue;
        }
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
    }
    Err(Error::MaxIterations {
        context: "conjugate gradient",
        iterations,
    })
}

#[derive(Debug, Clone)]
pub enum OperatorKind {
    Explicit(SparseSymMatrix),
    /// `M^{-1}` applied by an inner CG solve.
    InverseMass {
        mass: SparseSymMatrix,
        inner_tol: f64,
        inner_max_iter: usize,
    },
}

/// A symmetric linear operator: an explicit matrix or an inverse mass matrix.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    kind: OperatorKind,
    pool: Option<Arc<ThreadPool>>,
}

impl LinearOperator {
    pub fn explicit(matrix: SparseSymMatrix) -> Self {
        LinearOperator {
            kind: OperatorKind::Explicit(matrix),
            pool: None,
        }
    }

    /// `M^{-1}` with the default inner tolerance and `10 N` inner iterations.
    pub fn inverse_mass(mass: SparseSymMatrix) -> Self {
        let max_iter = 10 * mass.dim();
        Self::inverse_mass_with(mass, DEFAULT_INNER_TOL, max_iter)
    }

    pub fn inverse_mass_with(mass: SparseSymMatrix, inner_tol: f64, inner_max_iter: usize) -> Self {
        LinearOperator {
            kind: OperatorKind::InverseMass {
                mass,
                inner_tol,
                inner_max_iter,
            },
            pool: None,
        }
    }

    /// Runs matrix products on `threads` workers. `threads <= 1` keeps the
    /// operator single-threaded.
    pub fn with_threads(mut self, threads: usize) -> Result<Self> {
        self.pool = if threads > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Some(Arc::new(pool))
        } else {
            None
        };
        Ok(self)
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            OperatorKind::Explicit(m) => m.dim(),
            OperatorKind::InverseMass { mass, .. } => mass.dim(),
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        match &self.kind {
            OperatorKind::Explicit(m) => {
                let mut y = vec![0.0; m.dim()];
                match &self.pool {
                    Some(p) => m.par_matvec_into(x, &mut y, p)?,
                    None => m.matvec_into(x, &mut y)?,
                }
                Ok(y)
            }
            OperatorKind::InverseMass {
                mass,
                inner_tol,
                inner_max_iter,
            } => cg_solve_with(mass, x, *inner_tol, *inner_max_iter, self.pool.as_deref()).map(|s| s.x),
        }
    }
}
