//! Small dense symmetric kernels: Cholesky, triangular solves, and two
//! symmetric eigensolvers (cyclic Jacobi for the projected problem,
//! Householder tridiagonalization with implicit QL for the dense reference).

use crate::error::{Error, Result};

/// Dense symmetric matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymMatrix {
    order: usize,
    values: Vec<f64>,
}

impl DenseSymMatrix {
    pub fn zeros(order: usize) -> Self {
        DenseSymMatrix {
            order,
            values: vec![0.0; order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.values[i * order + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.values[i * diag.len() + i] = d;
        }
        m
    }

    /// Symmetric tridiagonal matrix; `off[k]` couples rows `k` and `k + 1`.
    pub fn from_tridiagonal(diag: &[f64], off: &[f64]) -> Result<Self> {
        let n = diag.len();
        if off.len() + 1 != n.max(1) {
            return Err(Error::DimensionMismatch {
                expected: n.saturating_sub(1),
                actual: off.len(),
            });
        }
        let mut m = Self::from_diagonal(diag);
        for (k, &b) in off.iter().enumerate() {
            m.values[k * n + k + 1] = b;
            m.values[(k + 1) * n + k] = b;
        }
        Ok(m)
    }

    /// Accepts a row-major square matrix that is symmetric to working
    /// precision and stores its exact symmetrization.
    pub fn from_row_major(order: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != order * order {
            return Err(Error::DimensionMismatch {
                expected: order * order,
                actual: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite dense entry".into()));
        }
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut m = DenseSymMatrix { order, values };
        for i in 0..order {
            for j in 0..i {
                let (a, b) = (m.get(i, j), m.get(j, i));
                if (a - b).abs() > 1e-12 * scale {
                    return Err(Error::InvalidMatrix(format!(
                        "dense matrix not symmetric at ({i}, {j})"
                    )));
                }
                let avg = 0.5 * (a + b);
                m.values[i * order + j] = avg;
                m.values[j * order + i] = avg;
            }
        }
        Ok(m)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.order + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.order;
        (0..n)
            .map(|i| crate::vecops::dot(&self.values[i * n..(i + 1) * n], x))
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        crate::vecops::norm(&self.values)
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|i| self.get(i, i)).sum()
    }
}

/// Lower-triangular Cholesky factor `L` with `S = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    order: usize,
    lower: Vec<f64>,
}

impl CholeskyFactor {
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.order + j]
    }

    /// Row-major copy of `L` including the zero upper triangle.
    pub fn to_row_major(&self) -> Vec<f64> {
        self.lower.clone()
    }

    /// `L x` for a lower-triangular product.
    pub fn mul_lower(&self, x: &[f64]) -> Vec<f64> {
        let n = self.order;
        (0..n)
            .map(|i| crate::vecops::dot(&self.lower[i * n..i * n + i + 1], &x[..=i]))
            .collect()
    }

    /// Solves `S x = b` with both triangular solves.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let y = solve_lower_triangular(self, b)?;
        solve_upper_triangular(self, &y)
    }

    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.order).map(|i| self.get(i, i).ln()).sum::<f64>()
    }
}

pub fn cholesky(s: &DenseSymMatrix) -> Result<CholeskyFactor> {
    let n = s.order();
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let row_j = j * n;
        let sum: f64 = l[row_j..row_j + j].iter().map(|v| v * v).sum();
        let pivot = s.get(j, j) - sum;
        if pivot <= 0.0 || !pivot.is_finite() {
            return Err(Error::NotSpd {
                context: "dense Cholesky pivot",
            });
        }
        let d = pivot.sqrt();
        l[row_j + j] = d;
        for i in j + 1..n {
            let row_i = i * n;
            let dot = crate::vecops::dot(&l[row_i..row_i + j], &l[row_j..row_j + j]);
            l[row_i + j] = (s.get(i, j) - dot) / d;
        }
    }
    Ok(CholeskyFactor { order: n, lower: l })
}

/// Forward substitution `L x = b`.
pub fn solve_lower_triangular(l: &CholeskyFactor, b: &[f64]) -> Result<Vec<f64>> {
    let n = l.order();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    let mut x = vec![0.0; n];
    for i in 0..n {
        let d = l.get(i, i);
        if d == 0.0 {
            return Err(Error::SingularFactor { row: i });
        }
        let acc = crate::vecops::dot(&l.lower[i * n..i * n + i], &x[..i]);
        x[i] = (b[i] - acc) / d;
    }
    Ok(x)
}

/// Back substitution `Lᵀ x = b`.
pub fn solve_upper_triangular(l: &CholeskyFactor, b: &[f64]) -> Result<Vec<f64>> {
    let n = l.order();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: b.len(),
        });
    }
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let d = l.get(i, i);
        if d == 0.0 {
            return Err(Error::SingularFactor { row: i });
        }
        x[i] /= d;
        let xi = x[i];
        // column i of Lᵀ above the diagonal is row i of L
        let (head, _) = x.split_at_mut(i);
        for (xk, lk) in head.iter_mut().zip(&l.lower[i * n..i * n + i]) {
            *xk -= lk * xi;
        }
    }
    Ok(x)
}

/// Eigen-decomposition with ascending eigenvalues. Eigenvectors are stored
/// one per row of `vectors`.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    vectors: Vec<f64>,
}

impl SymEigen {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        let n = self.order();
        &self.vectors[k * n..(k + 1) * n]
    }

    fn sorted(values: Vec<f64>, vectors: Vec<f64>) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let mut sv = Vec::with_capacity(n);
        let mut vecs = Vec::with_capacity(vectors.len());
        for &k in &order {
            sv.push(values[k]);
            vecs.extend_from_slice(&vectors[k * n..(k + 1) * n]);
        }
        SymEigen {
            values: sv,
            vectors: vecs,
        }
    }
}

const JACOBI_MAX_SWEEPS: usize = 30;
const JACOBI_THRESHOLD: f64 = 1e-14;

/// Cyclic Jacobi eigensolver.
pub fn jacobi_eigh(s: &DenseSymMatrix) -> Result<SymEigen> {
    let n = s.order();
    let mut a = s.as_slice().to_vec();
    // rows of `q` are the accumulated eigenvectors
    let mut q = DenseSymMatrix::identity(n).values;
    let total = s.frobenius_norm();

    let off_norm = |a: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    acc += a[i * n + j] * a[i * n + j];
                }
            }
        }
        acc.sqrt()
    };

    let mut sweep = 0;
    loop {
        let off = off_norm(&a);
        if off <= JACOBI_THRESHOLD * total || off == 0.0 {
            break;
        }
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::MaxIterations {
                context: "Jacobi eigensolver",
                iterations: sweep,
            });
        }
        sweep += 1;
        let skip = JACOBI_THRESHOLD * off / n as f64;
        for p in 0..n {
            for r in p + 1..n {
                let apq = a[p * n + r];
                if apq.abs() <= skip {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[r * n + r];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;

                // A <- Jᵀ A J on rows then columns p, r
                for k in 0..n {
                    let akp = a[p * n + k];
                    let akq = a[r * n + k];
                    a[p * n + k] = c * akp - sn * akq;
                    a[r * n + k] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + r];
                    a[k * n + p] = c * akp - sn * akq;
                    a[k * n + r] = sn * akp + c * akq;
                }
                a[p * n + r] = 0.0;
                a[r * n + p] = 0.0;

                for k in 0..n {
                    let qp = q[p * n + k];
                    let qr = q[r * n + k];
                    q[p * n + k] = c * qp - sn * qr;
                    q[r * n + k] = sn * qp + c * qr;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i * n + i]).collect();
    Ok(SymEigen::sorted(values, q))
}

/// Householder tridiagonalization followed by implicit QL.
pub fn householder_eigh(s: &DenseSymMatrix) -> Result<SymEigen> {
    let (values, vectors) = householder_ql(s, true)?;
    Ok(SymEigen::sorted(values, vectors))
}

/// Eigenvalues only, ascending. Skips all vector accumulation.
pub fn householder_eigvals(s: &DenseSymMatrix) -> Result<Vec<f64>> {
    let (mut values, _) = householder_ql(s, false)?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

// EISPACK tred2/tql2 ordering. `w` holds the transpose of the classical
// column-oriented work array so every inner loop runs over contiguous
// memory: w[j * n + k] plays the role of V[k][j].
fn householder_ql(s: &DenseSymMatrix, want_vectors: bool) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = s.order();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut w = s.as_slice().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];

    for j in 0..n {
        d[j] = w[j * n + n - 1];
    }
    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|v| v.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = w[j * n + i - 1];
                w[j * n + i] = 0.0;
                w[i * n + j] = 0.0;
            }
        } else {
            for dk in d[..i].iter_mut() {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].iter_mut().for_each(|v| *v = 0.0);

            for j in 0..i {
                f = d[j];
                w[i * n + j] = f;
                let col = &w[j * n..j * n + i];
                let mut g = e[j] + col[j] * f;
                for k in j + 1..i {
                    g += col[k] * d[k];
                    e[k] += col[k] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let (f, g) = (d[j], e[j]);
                let col = &mut w[j * n..j * n + i];
                for k in j..i {
                    col[k] -= f * e[k] + g * d[k];
                }
                d[j] = w[j * n + i - 1];
                w[j * n + i] = 0.0;
            }
        }
        d[i] = h;
    }

    if want_vectors {
        for i in 0..n - 1 {
            w[i * n + n - 1] = w[i * n + i];
            w[i * n + i] = 1.0;
            let h = d[i + 1];
            if h != 0.0 {
                let (head, tail) = w.split_at_mut((i + 1) * n);
                let v = &tail[..=i];
                for k in 0..=i {
                    d[k] = v[k] / h;
                }
                for j in 0..=i {
                    let col = &mut head[j * n..j * n + i + 1];
                    let g = crate::vecops::dot(v, col);
                    for k in 0..=i {
                        col[k] -= g * d[k];
                    }
                }
            }
            for k in 0..=i {
                w[(i + 1) * n + k] = 0.0;
            }
        }
        for j in 0..n {
            d[j] = w[j * n + n - 1];
            w[j * n + n - 1] = 0.0;
        }
        w[(n - 1) * n + n - 1] = 1.0;
    } else {
        for j in 0..n {
            d[j] = w[j * n + j];
        }
    }
    e[0] = 0.0;

    // implicit QL on the tridiagonal (d, e)
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    let max_iter = 30 * n.max(10);
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > max_iter {
                    return Err(Error::MaxIterations {
                        context: "implicit QL",
                        iterations: iter,
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d[l + 2..].iter_mut() {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut sn = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = sn;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = sn * r;
                    sn = e[i] / r;
                    c = p / r;
                    p = c * d[i] - sn * g;
                    d[i + 1] = h + sn * (c * g + sn * d[i]);
                    if want_vectors {
                        let (lo, hi) = w.split_at_mut((i + 1) * n);
                        let vi = &mut lo[i * n..];
                        let vi1 = &mut hi[..n];
                        for k in 0..n {
                            let h = vi1[k];
                            vi1[k] = sn * vi[k] + c * h;
                            vi[k] = c * vi[k] - sn * h;
                        }
                    }
                }
                p = -sn * s2 * c3 * el1 * e[l] / dl1;
                e[l] = sn * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok((d, w))
}
