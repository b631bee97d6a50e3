//! Lowest normal-mode frequencies of the paired problem
//!
//! ```text
//! K ξ = ω η,    T η = ω ξ,    K, T symmetric positive definite
//! ```
//!
//! by a two-sided Lanczos recursion that only ever applies `K` and `T` to
//! vectors, followed by a small projected eigenproblem whose solutions are
//! stationary points of the energy functional restricted to the basis.

pub mod cli;
pub mod driver;
pub mod error;
pub mod mmio;
pub mod operators;
pub mod oracle;
pub mod projected;
pub mod recursion;
pub mod rng;
pub mod smalldense;
pub mod variational;
pub mod vecops;

pub use driver::{solve_lowest, ConvergenceRecord, HistoryEntry, Mode, ModeSet, SolverConfig, StartPolicy};
pub use error::{Error, Result};
pub use mmio::{read_matrix_market, write_history_csv, write_matrix_market};
pub use operators::{LinearOperator, SparseSymMatrix};
pub use oracle::{dense_spectrum, gen_problem, gen_random_spd, DenseSpectrum};
pub use projected::{solve_projected, ProjectedPencil, ProjectedSolution, RitzPair};
pub use recursion::{step, tridiagonal_matrices, BiorthBasis, StepStatus};
pub use variational::{energy_functional, stationarity_residual};
