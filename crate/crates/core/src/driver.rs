//! Outer iteration: grow the biorthogonal basis, solve the projected
//! problem, lock converged modes one at a time, deflate, and restart.

use crate::error::{Error, Result};
use crate::operators::LinearOperator;
use crate::projected::{assemble_ritz, measure, solve_projected, ProjectedPencil, RitzPair};
use crate::recursion::{project_out, step, BiorthBasis, DeflationSet, StepStatus};
use crate::rng::SplitMix64;
use crate::variational::functional_from_products;
use crate::vecops::{dot, norm, scale};

/// How the first pair of a fresh basis is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartPolicy {
    /// `ξ₁` and `η₁` drawn independently.
    Independent,
    /// `η₁ = ξ₁`; only sensible when the caller knows `K = T`.
    Identical,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub n_eigs: usize,
    pub tol: f64,
    pub max_basis: usize,
    pub max_restarts: usize,
    pub full_rebiorth: bool,
    pub seed: u64,
    pub record_history: bool,
    pub start: StartPolicy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            n_eigs: 1,
            tol: 1e-8,
            max_basis: 80,
            max_restarts: 200,
            full_rebiorth: true,
            seed: 0,
            record_history: true,
            start: StartPolicy::Independent,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.n_eigs == 0 || self.n_eigs > dim {
            return Err(Error::InvalidParameter(format!(
                "n_eigs must lie in 1..={dim}, got {}",
                self.n_eigs
            )));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tol must lie in (0, 1), got {}",
                self.tol
            )));
        }
        if self.max_basis < 3 {
            return Err(Error::InvalidParameter(format!(
                "max_basis must be at least 3, got {}",
                self.max_basis
            )));
        }
        Ok(())
    }
}

/// One row of the convergence history.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryEntry {
    pub step: usize,
    /// Projected order after this step.
    pub basis_n: usize,
    /// Cumulative `K` and `T` applications.
    pub op_applies: usize,
    pub omega_min: f64,
    pub rho_k: f64,
    pub rho_t: f64,
    pub biorth_err: f64,
    /// Worst `−ω̃` companion residual over the projected solutions.
    pub pairing_residual: f64,
    /// Modes locked before this step.
    pub locked: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceRecord {
    pub entries: Vec<HistoryEntry>,
}

impl ConvergenceRecord {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Splits the history into growth phases: maximal runs over which the
    /// basis grows and no mode is locked.
    pub fn phases(&self) -> Vec<&[HistoryEntry]> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..self.entries.len() {
            let (prev, cur) = (&self.entries[i - 1], &self.entries[i]);
            if cur.basis_n <= prev.basis_n || cur.locked != prev.locked {
                out.push(&self.entries[start..i]);
                start = i;
            }
        }
        if start < self.entries.len() {
            out.push(&self.entries[start..]);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct Mode {
    pub omega: f64,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub rho_k: f64,
    pub rho_t: f64,
    /// Energy functional at `(ξ, η)`.
    pub functional: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ModeSet {
    /// Ascending in `omega`.
    pub modes: Vec<Mode>,
    pub history: ConvergenceRecord,
    pub restarts: usize,
    pub op_applies: usize,
}

impl ModeSet {
    pub fn omegas(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.omega).collect()
    }

    fn deflation_set(&self) -> DeflationSet {
        self.modes.iter().map(|m| (m.xi.clone(), m.eta.clone())).collect()
    }

    /// Largest `|(ξ_i·η_j)|` over distinct converged modes.
    pub fn cross_biorth_error(&self) -> f64 {
        let mut worst = 0.0_f64;
        for (i, a) in self.modes.iter().enumerate() {
            for (j, b) in self.modes.iter().enumerate() {
                if i != j {
                    worst = worst.max(dot(&a.xi, &b.eta).abs());
                }
            }
        }
        worst
    }
}

const DEFLATE_VANISH: f64 = 1e-12;
const RESAMPLE_ATTEMPTS: usize = 3;
const SERIOUS_PERTURBATION: f64 = 1e-8;

/// Projects converged components out:
/// `ξ' = ξ − Σ (η_c·ξ) ξ_c`, `η' = η − Σ (ξ_c·η) η_c`.
pub fn deflate(xi: &[f64], eta: &[f64], converged: &ModeSet) -> Result<(Vec<f64>, Vec<f64>)> {
    deflate_against(xi, eta, &converged.deflation_set())
}

fn deflate_against(xi: &[f64], eta: &[f64], set: &DeflationSet) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut x = xi.to_vec();
    let mut e = eta.to_vec();
    project_out(set, &mut x, &mut e);
    project_out(set, &mut x, &mut e);
    let (nx, ne) = (norm(&x), norm(&e));
    if nx <= DEFLATE_VANISH * norm(xi) || ne <= DEFLATE_VANISH * norm(eta) {
        return Err(Error::DegeneratePair { overlap: dot(&x, &e) });
    }
    Ok((x, e))
}

/// Fresh size-one basis from `best`, deflated against `converged`. Falls back
/// to seeded random pairs if the deflated pair is degenerate.
pub fn restart_basis(
    best: &RitzPair,
    converged: &ModeSet,
    rng: &mut SplitMix64,
    start: StartPolicy,
) -> Result<BiorthBasis> {
    let set = converged.deflation_set();
    let first =
        deflate_against(&best.xi, &best.eta, &set).and_then(|(x, e)| BiorthBasis::with_deflation(x, e, set.clone()));
    match first {
        Ok(b) => Ok(b),
        Err(Error::DegeneratePair { .. }) => random_basis(best.xi.len(), &set, rng, start),
        Err(e) => Err(e),
    }
}

fn random_basis(dim: usize, set: &DeflationSet, rng: &mut SplitMix64, start: StartPolicy) -> Result<BiorthBasis> {
    let mut last = Error::DegeneratePair { overlap: 0.0 };
    for _ in 0..RESAMPLE_ATTEMPTS {
        let xi = rng.uniform_vec(dim);
        let eta = match start {
            StartPolicy::Independent => rng.uniform_vec(dim),
            StartPolicy::Identical => xi.clone(),
        };
        match deflate_against(&xi, &eta, set).and_then(|(x, e)| BiorthBasis::with_deflation(x, e, set.clone())) {
            Ok(b) => return Ok(b),
            Err(e @ Error::DegeneratePair { .. }) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

fn perturbed(v: &[f64], rng: &mut SplitMix64) -> Vec<f64> {
    let s = SERIOUS_PERTURBATION * norm(v) / (v.len() as f64).sqrt();
    v.iter().map(|x| x + s * rng.uniform(-1.0, 1.0)).collect()
}

/// Per-step Ritz information kept between iterations.
struct RitzState {
    solutions: Vec<crate::projected::ProjectedSolution>,
    best: RitzPair,
    pairing: f64,
    k_xi: Vec<f64>,
    t_eta: Vec<f64>,
}

/// Computes the `config.n_eigs` lowest frequencies of `Kξ = ωη`, `Tη = ωξ`.
pub fn solve_lowest(k_op: &LinearOperator, t_op: &LinearOperator, config: &SolverConfig) -> Result<ModeSet> {
    let dim = k_op.dim();
    if t_op.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: t_op.dim(),
        });
    }
    config.validate(dim)?;

    let mut rng = SplitMix64::new(config.seed);
    let mut found = ModeSet::default();
    let mut basis = random_basis(dim, &Vec::new(), &mut rng, config.start)?;
    let mut last_best: Option<RitzPair> = None;
    let mut step_count = 0usize;

    loop {
        let outcome = step(k_op, t_op, &mut basis, config.full_rebiorth)?;
        found.op_applies += 2;
        step_count += 1;
        let order = basis.projected_order();
        let breakdown = outcome.status != StepStatus::Extended;

        let ritz = ritz_state(k_op, t_op, &basis, &mut found.op_applies);
        let ritz = match ritz {
            Ok(r) => r,
            Err(Error::NotSpd { .. }) => {
                // corrupted projection: start over from the last good pair
                bump_restarts(&mut found, config)?;
                basis = match &last_best {
                    Some(p) => restart_basis(p, &found, &mut rng, config.start)?,
                    None => random_basis(dim, &found.deflation_set(), &mut rng, config.start)?,
                };
                continue;
            }
            Err(e) => return Err(e),
        };

        if config.record_history {
            found.history.entries.push(HistoryEntry {
                step: step_count,
                basis_n: order,
                op_applies: found.op_applies,
                omega_min: ritz.best.omega,
                rho_k: ritz.best.rho_k,
                rho_t: ritz.best.rho_t,
                biorth_err: basis.biorth_error(),
                pairing_residual: ritz.pairing,
                locked: found.modes.len(),
            });
        }

        let remaining = dim - found.modes.len();
        let may_check = order >= 3.min(remaining) || breakdown;
        let converged = may_check && ritz.best.rho_k.max(ritz.best.rho_t) <= config.tol;

        if converged {
            let functional = functional_from_products(&ritz.best.xi, &ritz.best.eta, &ritz.k_xi, &ritz.t_eta);
            if (functional - ritz.best.omega).abs() <= 10.0 * config.tol * ritz.best.omega {
                lock(&mut found, &ritz.best, functional);
                if found.modes.len() == config.n_eigs {
                    found.modes.sort_by(|a, b| a.omega.total_cmp(&b.omega));
                    return Ok(found);
                }
                basis = match (&outcome.status, ritz.solutions.len() > 1) {
                    (StepStatus::Extended, true) => {
                        let next = assemble_ritz(&basis, &ritz.solutions[1])?;
                        restart_basis(&next, &found, &mut rng, config.start)?
                    }
                    _ => random_basis(dim, &found.deflation_set(), &mut rng, config.start)?,
                };
                last_best = None;
                continue;
            }
        }

        match outcome.status {
            StepStatus::Extended if order < config.max_basis => {
                last_best = Some(ritz.best);
            }
            StepStatus::Extended => {
                bump_restarts(&mut found, config)?;
                basis = restart_basis(&ritz.best, &found, &mut rng, config.start)?;
                last_best = Some(ritz.best);
            }
            StepStatus::LuckyBreakdown => {
                bump_restarts(&mut found, config)?;
                basis = random_basis(dim, &found.deflation_set(), &mut rng, config.start)?;
                last_best = None;
            }
            StepStatus::SeriousBreakdown { .. } => {
                bump_restarts(&mut found, config)?;
                let mut noisy = ritz.best.clone();
                noisy.xi = perturbed(&noisy.xi, &mut rng);
                noisy.eta = perturbed(&noisy.eta, &mut rng);
                basis = restart_basis(&noisy, &found, &mut rng, config.start)?;
                last_best = Some(ritz.best);
            }
        }
    }
}

fn ritz_state(
    k_op: &LinearOperator,
    t_op: &LinearOperator,
    basis: &BiorthBasis,
    applies: &mut usize,
) -> Result<RitzState> {
    let pencil = ProjectedPencil::from_basis(basis)?;
    let solutions = solve_projected(&pencil)?;
    let pairing = solutions
        .iter()
        .map(|s| pencil.companion_residual(s))
        .fold(0.0_f64, f64::max);
    let mut best = assemble_ritz(basis, &solutions[0])?;
    let res = measure(k_op, t_op, &mut best)?;
    *applies += 2;
    Ok(RitzState {
        solutions,
        best,
        pairing,
        k_xi: res.k_xi,
        t_eta: res.t_eta,
    })
}

fn lock(found: &mut ModeSet, pair: &RitzPair, functional: f64) {
    let mut xi = pair.xi.clone();
    let mut eta = pair.eta.clone();
    let s = 1.0 / dot(&xi, &eta).sqrt();
    scale(s, &mut xi);
    scale(s, &mut eta);
    found.modes.push(Mode {
        omega: pair.omega,
        xi,
        eta,
        rho_k: pair.rho_k,
        rho_t: pair.rho_t,
        functional,
    });
}

fn bump_restarts(found: &mut ModeSet, config: &SolverConfig) -> Result<()> {
    found.restarts += 1;
    if found.restarts > config.max_restarts {
        let mut partial = std::mem::take(found);
        partial.modes.sort_by(|a, b| a.omega.total_cmp(&b.omega));
        return Err(Error::RestartsExhausted {
            restarts: config.max_restarts,
            found: partial.modes.len(),
            requested: config.n_eigs,
            partial: Box::new(partial),
        });
    }
    Ok(())
}
