//! Minimum-principle diagnostics.
//!
//! The lowest frequency is the minimum over phase-space pairs of
//!
//! ```text
//! F(ξ, η) = [(ξ·Kξ) + (η·Tη)] / (2 |ξ·η|)
//! ```
//!
//! and every solution of `Kξ = ωη`, `Tη = ωξ` is a stationary point of `F`
//! with value `ω`. Nothing here shares code with the solver path: the
//! stationarity check is a plain central difference of `F`.

use crate::error::{Error, Result};
use crate::operators::{LinearOperator, SparseSymMatrix};
use crate::vecops::{dot, norm};

const OVERLAP_FLOOR: f64 = 1e-300;

pub fn energy_functional(k_op: &LinearOperator, t_op: &LinearOperator, xi: &[f64], eta: &[f64]) -> Result<f64> {
    for (op, v) in [(k_op, xi), (t_op, eta)] {
        if op.dim() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: op.dim(),
                actual: v.len(),
            });
        }
    }
    let overlap = dot(xi, eta);
    if overlap.abs() <= OVERLAP_FLOOR {
        return Err(Error::DegeneratePair { overlap });
    }
    let k_xi = k_op.apply(xi)?;
    let t_eta = t_op.apply(eta)?;
    Ok(functional_from_products(xi, eta, &k_xi, &t_eta))
}

/// `F(ξ, η)` from already computed `Kξ` and `Tη`.
pub fn functional_from_products(xi: &[f64], eta: &[f64], k_xi: &[f64], t_eta: &[f64]) -> f64 {
    (dot(xi, k_xi) + dot(eta, t_eta)) / (2.0 * dot(xi, eta).abs())
}

/// Largest central-difference directional derivative of `F` over all `2N`
/// coordinate directions. Steps are `h‖ξ‖` for ξ-coordinates and `h‖η‖`
/// for η-coordinates.
pub fn stationarity_residual(
    k_op: &LinearOperator,
    t_op: &LinearOperator,
    xi: &[f64],
    eta: &[f64],
    h: f64,
) -> Result<f64> {
    if h.is_nan() || h <= 0.0 {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    energy_functional(k_op, t_op, xi, eta)?;
    let mut worst = 0.0_f64;
    let mut x = xi.to_vec();
    let step = h * norm(xi);
    for j in 0..xi.len() {
        let orig = x[j];
        x[j] = orig + step;
        let plus = energy_functional(k_op, t_op, &x, eta)?;
        x[j] = orig - step;
        let minus = energy_functional(k_op, t_op, &x, eta)?;
        x[j] = orig;
        worst = worst.max(((plus - minus) / (2.0 * step)).abs());
    }
    let mut e = eta.to_vec();
    let step = h * norm(eta);
    for j in 0..eta.len() {
        let orig = e[j];
        e[j] = orig + step;
        let plus = energy_functional(k_op, t_op, xi, &e)?;
        e[j] = orig - step;
        let minus = energy_functional(k_op, t_op, xi, &e)?;
        e[j] = orig;
        worst = worst.max(((plus - minus) / (2.0 * step)).abs());
    }
    Ok(worst)
}

/// The problem in random-phase-approximation variables:
/// `A = (K+T)/2`, `B = (K−T)/2`, `x = (ξ+η)/2`, `y = (ξ−η)/2`.
#[derive(Debug, Clone)]
pub struct RpaForm {
    pub a: SparseSymMatrix,
    pub b: SparseSymMatrix,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl RpaForm {
    /// `2(x·Ax) + 2(y·Ay) + 4(x·By)`, equal to `(ξ·Kξ) + (η·Tη)`.
    pub fn quadratic_form(&self) -> Result<f64> {
        let ax = self.a.matvec(&self.x)?;
        let ay = self.a.matvec(&self.y)?;
        let by = self.b.matvec(&self.y)?;
        Ok(2.0 * dot(&self.x, &ax) + 2.0 * dot(&self.y, &ay) + 4.0 * dot(&self.x, &by))
    }

    /// `(x·x) − (y·y)`, equal to `(ξ·η)`.
    pub fn overlap(&self) -> f64 {
        dot(&self.x, &self.x) - dot(&self.y, &self.y)
    }
}

pub fn to_thouless(k: &SparseSymMatrix, t: &SparseSymMatrix, xi: &[f64], eta: &[f64]) -> Result<RpaForm> {
    let n = k.dim();
    for len in [t.dim(), xi.len(), eta.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    Ok(RpaForm {
        a: k.linear_combination(0.5, t, 0.5)?,
        b: k.linear_combination(0.5, t, -0.5)?,
        x: xi.iter().zip(eta).map(|(p, q)| 0.5 * (p + q)).collect(),
        y: xi.iter().zip(eta).map(|(p, q)| 0.5 * (p - q)).collect(),
    })
}

/// Inverse of [`to_thouless`]: `K = A + B`, `T = A − B`, `ξ = x + y`, `η = x − y`.
pub fn from_thouless(form: &RpaForm) -> Result<(SparseSymMatrix, SparseSymMatrix, Vec<f64>, Vec<f64>)> {
    let n = form.a.dim();
    for len in [form.b.dim(), form.x.len(), form.y.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: len,
            });
        }
    }
    let k = form.a.linear_combination(1.0, &form.b, 1.0)?;
    let t = form.a.linear_combination(1.0, &form.b, -1.0)?;
    let xi = form.x.iter().zip(&form.y).map(|(p, q)| p + q).collect();
    let eta = form.x.iter().zip(&form.y).map(|(p, q)| p - q).collect();
    Ok((k, t, xi, eta))
}
