//! Exact solution of the projected paired problem
//! `T̃ v = ω̃ u`, `K̃ u = ω̃ v` through a symmetric reduction, plus Ritz
//! pair assembly and residual measurement in the full space.

use crate::error::{Error, Result};
use crate::operators::LinearOperator;
use crate::recursion::BiorthBasis;
use crate::smalldense::{cholesky, jacobi_eigh, CholeskyFactor, DenseSymMatrix};
use crate::vecops::{axpy, dot, norm, sub};

/// The tridiagonal pair `(K̃, T̃)` of one projected order.
#[derive(Debug, Clone)]
pub struct ProjectedPencil {
    pub k_tilde: DenseSymMatrix,
    pub t_tilde: DenseSymMatrix,
}

impl ProjectedPencil {
    pub fn new(k_tilde: DenseSymMatrix, t_tilde: DenseSymMatrix) -> Result<Self> {
        if k_tilde.order() != t_tilde.order() {
            return Err(Error::DimensionMismatch {
                expected: k_tilde.order(),
                actual: t_tilde.order(),
            });
        }
        Ok(ProjectedPencil { k_tilde, t_tilde })
    }

    pub fn from_basis(basis: &BiorthBasis) -> Result<Self> {
        let (k, t) = crate::recursion::tridiagonal_matrices(basis)?;
        Self::new(k, t)
    }

    pub fn order(&self) -> usize {
        self.k_tilde.order()
    }

    /// Residual of the `−ω̃` companion `(u, −v)` relative to
    /// `(‖K̃‖ + ‖T̃‖)·max(‖u‖, ‖v‖)`.
    pub fn companion_residual(&self, sol: &ProjectedSolution) -> f64 {
        let neg_v: Vec<f64> = sol.v.iter().map(|x| -x).collect();
        let neg_omega = -sol.omega;
        // T̃(−v) = (−ω̃) u
        let mut r1 = self.t_tilde.matvec(&neg_v);
        axpy(-neg_omega, &sol.u, &mut r1);
        // K̃ u = (−ω̃)(−v)
        let mut r2 = self.k_tilde.matvec(&sol.u);
        axpy(-neg_omega, &neg_v, &mut r2);
        let scale = (self.k_tilde.frobenius_norm() + self.t_tilde.frobenius_norm()) * norm(&sol.u).max(norm(&sol.v));
        norm(&r1).max(norm(&r2)) / scale
    }

    /// Residual of `(ω̃, u, v)` itself, same scaling as
    /// [`ProjectedPencil::companion_residual`].
    pub fn solution_residual(&self, sol: &ProjectedSolution) -> f64 {
        let r1 = sub(&self.t_tilde.matvec(&sol.v), &crate::vecops::scaled(sol.omega, &sol.u));
        let r2 = sub(&self.k_tilde.matvec(&sol.u), &crate::vecops::scaled(sol.omega, &sol.v));
        let scale = (self.k_tilde.frobenius_norm() + self.t_tilde.frobenius_norm()) * norm(&sol.u).max(norm(&sol.v));
        norm(&r1).max(norm(&r2)) / scale
    }
}

/// Positive-branch solution of the projected problem, `(u·v) = 1`.
#[derive(Debug, Clone)]
pub struct ProjectedSolution {
    pub omega: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

/// Approximate eigensolution in the full space.
#[derive(Debug, Clone)]
pub struct RitzPair {
    pub omega: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    /// Relative residuals; infinite until [`measure`] fills them in.
    pub rho_k: f64,
    pub rho_t: f64,
}

/// Solves the projected problem. Returns all `n` positive frequencies in
/// ascending order; the `−ω̃` branch is implied.
pub fn solve_projected(pencil: &ProjectedPencil) -> Result<Vec<ProjectedSolution>> {
    match cholesky(&pencil.t_tilde) {
        Ok(l) => reduce(&l, &pencil.k_tilde, false),
        Err(Error::NotSpd { .. }) => {
            // the problem is symmetric under K <-> T, u <-> v
            let l = cholesky(&pencil.k_tilde).map_err(|_| Error::NotSpd {
                context: "projected pencil",
            })?;
            reduce(&l, &pencil.t_tilde, true)
        }
        Err(e) => Err(e),
    }
}

// With `factored = L Lᵀ` and `other` the second matrix, solves
// (Lᵀ·other·L) z = ω² z, first = L z, second = other·first / ω.
fn reduce(l: &CholeskyFactor, other: &DenseSymMatrix, swapped: bool) -> Result<Vec<ProjectedSolution>> {
    let n = l.order();
    // M = other · L
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let o = other.get(i, k);
            if o == 0.0 {
                continue;
            }
            for j in 0..=k {
                m[i * n + j] += o * l.get(k, j);
            }
        }
    }
    // C = Lᵀ M, then exact symmetrization
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            c[i * n + j] = (i..n).map(|k| l.get(k, i) * m[k * n + j]).sum();
        }
    }
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (c[i * n + j] + c[j * n + i]);
            c[i * n + j] = avg;
            c[j * n + i] = avg;
        }
    }
    let c = DenseSymMatrix::from_row_major(n, c)?;
    let eig = jacobi_eigh(&c)?;

    let mut out = Vec::with_capacity(n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        if lambda.is_nan() || lambda <= 0.0 {
            return Err(Error::NotSpd {
                context: "projected frequency squared",
            });
        }
        let omega = lambda.sqrt();
        let first = l.mul_lower(eig.vector(k));
        let second: Vec<f64> = other.matvec(&first).iter().map(|x| x / omega).collect();
        let p = dot(&first, &second);
        if p.is_nan() || p <= 0.0 {
            return Err(Error::NotSpd {
                context: "projected eigenvector normalization",
            });
        }
        let s = 1.0 / p.sqrt();
        let first: Vec<f64> = first.iter().map(|x| x * s).collect();
        let second: Vec<f64> = second.iter().map(|x| x * s).collect();
        let (u, v) = if swapped { (second, first) } else { (first, second) };
        out.push(ProjectedSolution { omega, u, v });
    }
    Ok(out)
}

/// `ξ = Σ u_i ξ_i`, `η = Σ v_i η_i`.
pub fn assemble_ritz(basis: &BiorthBasis, sol: &ProjectedSolution) -> Result<RitzPair> {
    let m = sol.u.len();
    if sol.v.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: sol.v.len(),
        });
    }
    if m > basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            actual: m,
        });
    }
    let dim = basis.dim();
    let mut xi = vec![0.0; dim];
    let mut eta = vec![0.0; dim];
    for i in 0..m {
        axpy(sol.u[i], basis.xi(i), &mut xi);
        axpy(sol.v[i], basis.eta(i), &mut eta);
    }
    Ok(RitzPair {
        omega: sol.omega,
        u: sol.u.clone(),
        v: sol.v.clone(),
        xi,
        eta,
        rho_k: f64::INFINITY,
        rho_t: f64::INFINITY,
    })
}

/// Operator products gathered while measuring residuals.
#[derive(Debug, Clone)]
pub struct Residuals {
    pub rho_k: f64,
    pub rho_t: f64,
    pub k_xi: Vec<f64>,
    pub t_eta: Vec<f64>,
}

/// `ρ_K = ‖Kξ − ωη‖ / (‖Kξ‖ + ω‖η‖)` and `ρ_T = ‖Tη − ωξ‖ / (‖Tη‖ + ω‖ξ‖)`.
pub fn residual_norms(
    k_op: &LinearOperator,
    t_op: &LinearOperator,
    omega: f64,
    xi: &[f64],
    eta: &[f64],
) -> Result<Residuals> {
    let k_xi = k_op.apply(xi)?;
    let t_eta = t_op.apply(eta)?;
    let rel = |applied: &[f64], other: &[f64]| {
        let mut r = applied.to_vec();
        axpy(-omega, other, &mut r);
        let denom = norm(applied) + omega.abs() * norm(other);
        if denom == 0.0 {
            0.0
        } else {
            norm(&r) / denom
        }
    };
    Ok(Residuals {
        rho_k: rel(&k_xi, eta),
        rho_t: rel(&t_eta, xi),
        k_xi,
        t_eta,
    })
}

/// Fills in the residuals of `pair` and returns the operator products.
pub fn measure(k_op: &LinearOperator, t_op: &LinearOperator, pair: &mut RitzPair) -> Result<Residuals> {
    let res = residual_norms(k_op, t_op, pair.omega, &pair.xi, &pair.eta)?;
    pair.rho_k = res.rho_k;
    pair.rho_t = res.rho_t;
    Ok(res)
}
