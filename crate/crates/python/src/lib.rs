//! Python bindings. Vectors cross the boundary as lists of floats.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use oscmodes::{Error, LinearOperator, SolverConfig};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyIOError::new_err(io.to_string()),
        Error::NotSpd { .. }
        | Error::MaxIterations { .. }
        | Error::RestartsExhausted { .. }
        | Error::DegeneratePair { .. }
        | Error::SingularFactor { .. } => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Sparse symmetric matrix.
#[pyclass(name = "SparseMatrix", module = "pyoscmodes", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PySparseMatrix {
    inner: oscmodes::SparseSymMatrix,
}

#[pymethods]
impl PySparseMatrix {
    /// Builds from lower-triangle entries `(row, col, value)` with `row >= col`.
    #[staticmethod]
    fn from_lower(dim: usize, entries: Vec<(usize, usize, f64)>) -> PyResult<Self> {
        let inner = oscmodes::SparseSymMatrix::from_lower_triplets(dim, &entries).map_err(to_py)?;
        Ok(PySparseMatrix { inner })
    }

    #[staticmethod]
    fn from_diagonal(diag: Vec<f64>) -> PyResult<Self> {
        let inner = oscmodes::SparseSymMatrix::from_diagonal(&diag).map_err(to_py)?;
        Ok(PySparseMatrix { inner })
    }

    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        let inner = oscmodes::read_matrix_market(path).map_err(to_py)?;
        Ok(PySparseMatrix { inner })
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        oscmodes::write_matrix_market(&self.inner, path).map_err(to_py)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    fn matvec(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.matvec(&x).map_err(to_py)
    }

    /// Row-major nested lists.
    fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.inner.dim();
        self.inner.to_dense().chunks(n.max(1)).map(<[f64]>::to_vec).collect()
    }

    fn __repr__(&self) -> String {
        format!("SparseMatrix(dim={}, nnz={})", self.inner.dim(), self.inner.nnz())
    }
}

#[pyclass(name = "Mode", module = "pyoscmodes", frozen, get_all)]
pub struct PyMode {
    omega: f64,
    xi: Vec<f64>,
    eta: Vec<f64>,
    rho_k: f64,
    rho_t: f64,
    functional: f64,
}

#[pymethods]
impl PyMode {
    fn __repr__(&self) -> String {
        format!(
            "Mode(omega={:.16e}, rho_k={:.3e}, rho_t={:.3e})",
            self.omega, self.rho_k, self.rho_t
        )
    }
}

#[pyclass(name = "Solution", module = "pyoscmodes", frozen, get_all)]
pub struct PySolution {
    modes: Vec<Py<PyMode>>,
    restarts: usize,
    op_applies: usize,
    /// `(step, basis_n, op_applies, omega_min, rho_k, rho_t, biorth_err)` rows.
    history: Vec<(usize, usize, usize, f64, f64, f64, f64)>,
}

#[pymethods]
impl PySolution {
    #[getter]
    fn omegas(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.get().omega).collect()
    }
}

/// Lowest `n_eigs` frequencies. With `mass=True`, `t` is a mass matrix `M`
/// and `T = M⁻¹` is applied by an inner CG solve.
#[pyfunction]
#[pyo3(signature = (k, t, n_eigs=1, tol=1e-8, max_basis=80, max_restarts=200, seed=0, mass=false))]
#[allow(clippy::too_many_arguments)]
fn solve_lowest(
    py: Python<'_>,
    k: &PySparseMatrix,
    t: &PySparseMatrix,
    n_eigs: usize,
    tol: f64,
    max_basis: usize,
    max_restarts: usize,
    seed: u64,
    mass: bool,
) -> PyResult<PySolution> {
    let k_op = LinearOperator::explicit(k.inner.clone());
    let t_op = if mass {
        LinearOperator::inverse_mass(t.inner.clone())
    } else {
        LinearOperator::explicit(t.inner.clone())
    };
    let config = SolverConfig {
        n_eigs,
        tol,
        max_basis,
        max_restarts,
        seed,
        ..Default::default()
    };
    let set = py
        .detach(|| oscmodes::solve_lowest(&k_op, &t_op, &config))
        .map_err(to_py)?;
    let modes = set
        .modes
        .into_iter()
        .map(|m| {
            Py::new(
                py,
                PyMode {
                    omega: m.omega,
                    xi: m.xi,
                    eta: m.eta,
                    rho_k: m.rho_k,
                    rho_t: m.rho_t,
                    functional: m.functional,
                },
            )
        })
        .collect::<PyResult<Vec<_>>>()?;
    let history = set
        .history
        .entries
        .iter()
        .map(|e| {
            (
                e.step,
                e.basis_n,
                e.op_applies,
                e.omega_min,
                e.rho_k,
                e.rho_t,
                e.biorth_err,
            )
        })
        .collect();
    Ok(PySolution {
        modes,
        restarts: set.restarts,
        op_applies: set.op_applies,
        history,
    })
}

/// All frequencies ascending, by dense factorization. Small problems only.
#[pyfunction]
fn dense_spectrum(py: Python<'_>, k: &PySparseMatrix, t: &PySparseMatrix) -> PyResult<Vec<f64>> {
    py.detach(|| oscmodes::dense_spectrum(&k.inner, &t.inner, false))
        .map(|s| s.omegas)
        .map_err(to_py)
}

#[pyfunction]
fn energy_functional(k: &PySparseMatrix, t: &PySparseMatrix, xi: Vec<f64>, eta: Vec<f64>) -> PyResult<f64> {
    let k_op = LinearOperator::explicit(k.inner.clone());
    let t_op = LinearOperator::explicit(t.inner.clone());
    oscmodes::energy_functional(&k_op, &t_op, &xi, &eta).map_err(to_py)
}

/// Random `(K, T)` pair, both sparse SPD.
#[pyfunction]
#[pyo3(signature = (n, nnz_per_row=40, seed=0))]
fn gen_problem(n: usize, nnz_per_row: usize, seed: u64) -> PyResult<(PySparseMatrix, PySparseMatrix)> {
    let (k, t) = oscmodes::gen_problem(n, nnz_per_row, seed).map_err(to_py)?;
    Ok((PySparseMatrix { inner: k }, PySparseMatrix { inner: t }))
}

#[pymodule]
fn pyoscmodes(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySparseMatrix>()?;
    m.add_class::<PyMode>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(solve_lowest, m)?)?;
    m.add_function(wrap_pyfunction!(dense_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(energy_functional, m)?)?;
    m.add_function(wrap_pyfunction!(gen_problem, m)?)?;
    Ok(())
}
