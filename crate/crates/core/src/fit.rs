//! Solver output and restart bookkeeping shared by all estimators.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::matrix::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitFlag {
    /// Iteration budget exhausted before the stopping rule fired.
    NonConvergence,
    /// `det(H H^T + delta I)` fell below 1e-300.
    SingularGram,
    /// Simplex expansion stopped with negativity above tolerance.
    ExpansionStall,
}

#[derive(Clone, Debug)]
pub struct FitResult<F> {
    pub factorization: F,
    /// Data minus reconstruction.
    pub residual: Matrix,
    /// Objective value after every iteration of the winning restart.
    pub objective_trace: Vec<f64>,
    pub best_restart: usize,
    pub seed_used: u64,
    pub iterations: usize,
    pub flags: Vec<FitFlag>,
    /// Final objective of every restart, in restart order.
    pub restart_objectives: Vec<f64>,
}

impl<F> FitResult<F> {
    pub fn objective(&self) -> f64 {
        self.objective_trace.last().copied().unwrap_or(f64::NAN)
    }

    pub fn converged(&self) -> bool {
        !self.flags.contains(&FitFlag::NonConvergence)
    }

    pub fn map<G>(self, f: impl FnOnce(F) -> G) -> FitResult<G> {
        FitResult {
            factorization: f(self.factorization),
            residual: self.residual,
            objective_trace: self.objective_trace,
            best_restart: self.best_restart,
            seed_used: self.seed_used,
            iterations: self.iterations,
            flags: self.flags,
            restart_objectives: self.restart_objectives,
        }
    }
}

/// One finished restart before merging.
pub(crate) struct Run<F> {
    pub factorization: F,
    pub trace: Vec<f64>,
    pub flags: Vec<FitFlag>,
    /// Value used to rank restarts (lower is better).
    pub score: f64,
}

pub(crate) fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(restart as u64))
}

/// Runs `restarts` independent fits in parallel and keeps the best by
/// `(score, restart index)`, so the result does not depend on scheduling.
pub(crate) fn best_of<F, R>(
    restarts: usize,
    seed: u64,
    data: &Matrix,
    reconstruct: impl Fn(&F) -> Matrix,
    run: R,
) -> Result<FitResult<F>>
where
    F: Send,
    R: Fn(usize, &mut ChaCha8Rng) -> Result<Run<F>> + Sync,
{
    let restarts = restarts.max(1);
    let runs: Vec<Result<Run<F>>> = (0..restarts)
        .into_par_iter()
        .map(|r| run(r, &mut restart_rng(seed, r)))
        .collect();
    let mut runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let scores: Vec<f64> = runs.iter().map(|r| r.score).collect();
    let best = scores
        .iter()
        .enumerate()
        .fold(0, |b, (i, &s)| if s.total_cmp(&scores[b]).is_lt() { i } else { b });
    let run = runs.swap_remove(best);
    let residual = data.sub(&reconstruct(&run.factorization));
    let iterations = run.trace.len().saturating_sub(1);
    Ok(FitResult {
        factorization: run.factorization,
        residual,
        objective_trace: run.trace,
        best_restart: best,
        seed_used: seed.wrapping_add(best as u64),
        iterations,
        flags: run.flags,
        restart_objectives: scores,
    })
}

/// Relative decrease test used by every iterative solver.
pub(crate) fn converged(prev: f64, cur: f64, tol: f64) -> bool {
    (prev - cur).abs() <= tol * prev.abs().max(cur.abs()).max(1e-300)
}
