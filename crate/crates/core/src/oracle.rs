//! Dense reference spectrum and the random sparse SPD problem generator.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::operators::SparseSymMatrix;
use crate::rng::SplitMix64;
use crate::smalldense::{cholesky, householder_eigh, householder_eigvals, DenseSymMatrix};
use crate::vecops::dot;

/// Largest dimension the dense reference accepts.
pub const DENSE_LIMIT: usize = 4000;
/// Diagonal margin above the Gershgorin bound in generated matrices.
pub const GERSHGORIN_MARGIN: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct DenseSpectrum {
    /// All `N` positive frequencies, ascending.
    pub omegas: Vec<f64>,
    /// `(ξ_k, η_k)` with `(ξ_k·η_k) = 1`, when requested.
    pub modes: Option<Vec<(Vec<f64>, Vec<f64>)>>,
}

/// Full spectrum of `Kξ = ωη`, `Tη = ωξ` through `T = G Gᵀ` and the
/// symmetric matrix `Gᵀ K G`, whose eigenvalues are `ω²`.
pub fn dense_spectrum(k: &SparseSymMatrix, t: &SparseSymMatrix, with_modes: bool) -> Result<DenseSpectrum> {
    let n = k.dim();
    if t.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: t.dim(),
        });
    }
    if n > DENSE_LIMIT {
        return Err(Error::SizeGuard {
            dim: n,
            limit: DENSE_LIMIT,
        });
    }
    let t_dense = DenseSymMatrix::from_row_major(n, t.to_dense())?;
    let g = cholesky(&t_dense)?;

    // M = K G, using the sparsity of K and the lower-triangular shape of G
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        let (cols, vals) = k.row(i);
        let row = &mut m[i * n..(i + 1) * n];
        for (&c, &v) in cols.iter().zip(vals) {
            for (j, slot) in row[..=c].iter_mut().enumerate() {
                *slot += v * g.get(c, j);
            }
        }
    }
    // lower triangle of C = Gᵀ M; row k of G contributes G[k][i] M[k, :]
    let mut c = vec![0.0; n * n];
    for kk in 0..n {
        let mrow = &m[kk * n..(kk + 1) * n];
        for i in 0..=kk {
            let gki = g.get(kk, i);
            if gki == 0.0 {
                continue;
            }
            let crow = &mut c[i * n..i * n + i + 1];
            for (slot, mv) in crow.iter_mut().zip(&mrow[..=i]) {
                *slot += gki * mv;
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            c[j * n + i] = c[i * n + j];
        }
    }
    let c = DenseSymMatrix::from_row_major(n, c)?;

    let to_omega = |lambda: f64| -> Result<f64> {
        if lambda > 0.0 {
            Ok(lambda.sqrt())
        } else {
            Err(Error::NotSpd {
                context: "dense frequency squared",
            })
        }
    };

    if !with_modes {
        let omegas = householder_eigvals(&c)?
            .into_iter()
            .map(to_omega)
            .collect::<Result<_>>()?;
        return Ok(DenseSpectrum { omegas, modes: None });
    }

    let eig = householder_eigh(&c)?;
    let mut omegas = Vec::with_capacity(n);
    let mut modes = Vec::with_capacity(n);
    for (idx, &lambda) in eig.values.iter().enumerate() {
        let omega = to_omega(lambda)?;
        let mut xi = g.mul_lower(eig.vector(idx));
        let s = 1.0 / omega.sqrt();
        xi.iter_mut().for_each(|v| *v *= s);
        let mut eta = k.matvec(&xi)?;
        eta.iter_mut().for_each(|v| *v /= omega);
        let p = dot(&xi, &eta);
        let r = 1.0 / p.sqrt();
        xi.iter_mut().for_each(|v| *v *= r);
        eta.iter_mut().for_each(|v| *v *= r);
        omegas.push(omega);
        modes.push((xi, eta));
    }
    Ok(DenseSpectrum {
        omegas,
        modes: Some(modes),
    })
}

/// Random sparse SPD matrix with about `avg_nnz_row` off-diagonal entries
/// per row at uniformly random positions, values uniform in `[−1, 1]`, and
/// each diagonal set to the row's absolute off-diagonal sum plus
/// [`GERSHGORIN_MARGIN`].
pub fn gen_random_spd(n: usize, avg_nnz_row: usize, seed: u64) -> Result<SparseSymMatrix> {
    gen_random_spd_from(n, avg_nnz_row, &mut SplitMix64::new(seed))
}

/// Generates `K` and then `T` from one seeded stream.
pub fn gen_problem(n: usize, avg_nnz_row: usize, seed: u64) -> Result<(SparseSymMatrix, SparseSymMatrix)> {
    let mut rng = SplitMix64::new(seed);
    let k = gen_random_spd_from(n, avg_nnz_row, &mut rng)?;
    let t = gen_random_spd_from(n, avg_nnz_row, &mut rng)?;
    Ok((k, t))
}

fn gen_random_spd_from(n: usize, avg_nnz_row: usize, rng: &mut SplitMix64) -> Result<SparseSymMatrix> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if avg_nnz_row >= n && avg_nnz_row > 0 {
        return Err(Error::InvalidParameter(format!(
            "average of {avg_nnz_row} off-diagonal entries per row needs dimension above {avg_nnz_row}, got {n}"
        )));
    }
    // each unordered pair fills two entries
    let target = n * avg_nnz_row / 2;
    let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(target);
    let mut pairs: Vec<(usize, usize, f64)> = Vec::with_capacity(target);
    while pairs.len() < target {
        let i = rng.below(n);
        let j = rng.below(n);
        if i == j {
            continue;
        }
        let key = (i.min(j) as u32, i.max(j) as u32);
        if seen.insert(key) {
            pairs.push((key.1 as usize, key.0 as usize, rng.uniform(-1.0, 1.0)));
        }
    }
    let mut diag = vec![GERSHGORIN_MARGIN; n];
    for &(i, j, v) in &pairs {
        diag[i] += v.abs();
        diag[j] += v.abs();
    }
    let mut entries = pairs;
    entries.extend(diag.iter().enumerate().map(|(i, &d)| (i, i, d)));
    SparseSymMatrix::from_lower_triplets(n, &entries)
}
