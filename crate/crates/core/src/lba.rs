//! Latent budget analysis: maximum likelihood by EM, constrained weighted
//! least squares, and identification by inner/outer extreme solutions.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::{best_of, converged, restart_rng, FitFlag, FitResult, Run};
use crate::linalg::inverse;
use crate::matrix::{CompositionMatrix, Matrix};
use crate::models::{transform_budget, BudgetFactorization, TransformKind, TransformMatrix};
use crate::simplex::{project_to_simplex, simplex_ls};

/// Parameters below this are set to zero after every EM update.
pub const EM_ZERO: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Estimator {
    Em,
    Cwls,
}

#[derive(Clone, Debug)]
pub struct LbaConfig {
    pub k: usize,
    pub estimator: Estimator,
    /// Per-cell CWLS weights, `I x J`. `None` means all ones.
    pub weights: Option<Matrix>,
    pub max_iter: usize,
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl LbaConfig {
    pub fn em(k: usize) -> Self {
        Self {
            k,
            estimator: Estimator::Em,
            weights: None,
            max_iter: 5000,
            tol: 1e-10,
            restarts: 20,
            seed: 0,
        }
    }

    pub fn cwls(k: usize) -> Self {
        Self {
            estimator: Estimator::Cwls,
            ..Self::em(k)
        }
    }

    fn validate(&self, rows: usize, cols: usize) -> Result<()> {
        if self.k == 0 || self.k > rows.min(cols).max(1) {
            return Err(Error::RankOutOfRange {
                k: self.k,
                max: rows.min(cols),
            });
        }
        if self.max_iter == 0 || !(self.tol >= 0.0) {
            return Err(Error::InvalidConfig("need tol >= 0 and max_iter >= 1".into()));
        }
        if let Some(v) = &self.weights {
            if v.shape() != (rows, cols) {
                return Err(Error::DimensionMismatch(format!(
                    "weights are {}x{}, data {rows}x{cols}",
                    v.rows(),
                    v.cols()
                )));
            }
            if v.as_slice().iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
                return Err(Error::InvalidConfig("weights must be finite and nonnegative".into()));
            }
            if self.estimator == Estimator::Em {
                return Err(Error::InvalidConfig("weights apply to the cwls estimator only".into()));
            }
        }
        Ok(())
    }

    fn weight_matrix(&self, rows: usize, cols: usize) -> Matrix {
        self.weights
            .clone()
            .unwrap_or_else(|| Matrix::from_fn(rows, cols, |_, _| 1.0))
    }
}

fn random_stochastic(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut m = Matrix::from_fn(rows, cols, |_, _| rng.random::<f64>());
    for i in 0..rows {
        let s: f64 = m.row(i).iter().sum();
        m.row_mut(i).iter_mut().for_each(|v| *v /= s);
    }
    m
}

/// Random starting pair, drawn in the order `W` then `G`. Shared with the
/// tempered EM so equal seeds give equal starts.
pub(crate) fn init_budget(i: usize, j: usize, k: usize, rng: &mut ChaCha8Rng) -> (Matrix, Matrix) {
    let w = random_stochastic(i, k, rng);
    let g = random_stochastic(k, j, rng);
    (w, g)
}

fn zero_and_renormalize(m: &mut Matrix) {
    for i in 0..m.rows() {
        let row = m.row_mut(i);
        row.iter_mut().for_each(|v| {
            if *v < EM_ZERO {
                *v = 0.0
            }
        });
        let s: f64 = row.iter().sum();
        if s > 0.0 {
            row.iter_mut().for_each(|v| *v /= s);
        }
    }
}

/// One EM update of `(W, G)` on a count table. Posterior weights are raised
/// to `beta` before normalization (`beta = 1` is plain EM). Cells whose
/// components are all zero get uniform posteriors.
pub(crate) fn em_step(counts: &Matrix, w: &Matrix, g: &Matrix, beta: f64) -> (Matrix, Matrix) {
    let (i_n, j_n) = counts.shape();
    let k = g.rows();
    let mut wa = Matrix::zeros(i_n, k);
    let mut gb = Matrix::zeros(k, j_n);
    let mut r = vec![0.0; k];
    for i in 0..i_n {
        for j in 0..j_n {
            let n = counts[(i, j)];
            if n == 0.0 {
                continue;
            }
            let mut total = 0.0;
            for c in 0..k {
                let v = w[(i, c)] * g[(c, j)];
                r[c] = if beta == 1.0 { v } else { v.powf(beta) };
                total += r[c];
            }
            for c in 0..k {
                let post = if total > 0.0 { r[c] / total } else { 1.0 / k as f64 };
                wa[(i, c)] += n * post;
                gb[(c, j)] += n * post;
            }
        }
    }
    let row_totals = counts.row_sums();
    for i in 0..i_n {
        wa.row_mut(i).iter_mut().for_each(|v| *v /= row_totals[i]);
    }
    for c in 0..k {
        let s: f64 = gb.row(c).iter().sum();
        if s > 0.0 {
            gb.row_mut(c).iter_mut().for_each(|v| *v /= s);
        } else {
            // Class lost all mass; keep its old profile.
            gb.row_mut(c).copy_from_slice(g.row(c));
        }
    }
    zero_and_renormalize(&mut wa);
    zero_and_renormalize(&mut gb);
    (wa, gb)
}

/// Product-multinomial log-likelihood `sum n_ij ln pi_ij` (constants dropped).
pub fn log_likelihood(counts: &Matrix, pi: &Matrix) -> f64 {
    counts
        .as_slice()
        .iter()
        .zip(pi.as_slice())
        .filter(|(n, _)| **n > 0.0)
        .map(|(n, p)| n * p.ln())
        .sum()
}

pub(crate) fn check_counts(counts: &Matrix) -> Result<()> {
    counts.ensure_nonnegative()?;
    if let Some(v) = counts.as_slice().iter().find(|v| v.fract() != 0.0) {
        return Err(Error::InvalidConfig(format!(
            "maximum likelihood needs integer counts, found {v}"
        )));
    }
    for (row, s) in counts.row_sums().into_iter().enumerate() {
        if s <= 0.0 {
            return Err(Error::ZeroRow { row });
        }
    }
    Ok(())
}

/// Maximum likelihood LBA by EM. The objective trace holds the
/// log-likelihood, which never decreases; restarts are ranked by it.
///
/// Parameters that reach zero stay there, so restarts matter.
pub fn fit_lba_em(counts: &Matrix, cfg: &LbaConfig) -> Result<FitResult<BudgetFactorization>> {
    check_counts(counts)?;
    cfg.validate(counts.rows(), counts.cols())?;
    let (i_n, j_n) = counts.shape();
    let p = crate::matrix::row_normalize(counts)?.0.into_matrix();
    let fit = best_of(
        cfg.restarts,
        cfg.seed,
        &p,
        |b: &BudgetFactorization| b.product(),
        |_, rng| {
            let (mut w, mut g) = init_budget(i_n, j_n, cfg.k, rng);
            let mut trace = vec![log_likelihood(counts, &w.matmul(&g))];
            let mut flags = vec![FitFlag::NonConvergence];
            for _ in 0..cfg.max_iter {
                let (wn, gn) = em_step(counts, &w, &g, 1.0);
                w = wn;
                g = gn;
                let ll = log_likelihood(counts, &w.matmul(&g));
                let prev = *trace.last().unwrap();
                trace.push(ll);
                if converged(prev, ll, cfg.tol) {
                    flags.clear();
                    break;
                }
            }
            let ll = *trace.last().unwrap();
            Ok(Run {
                factorization: BudgetFactorization::renormalized(w, g)?,
                trace,
                flags,
                score: -ll,
            })
        },
    )?;
    Ok(fit)
}

fn weighted_sq(p: &Matrix, v: &Matrix, w: &Matrix, g: &Matrix) -> f64 {
    let pi = w.matmul(g);
    p.as_slice()
        .iter()
        .zip(pi.as_slice())
        .zip(v.as_slice())
        .map(|((a, b), c)| c * (a - b) * (a - b))
        .sum()
}

/// Exact simplex-constrained update of every coefficient row.
fn update_w(p: &Matrix, v: &Matrix, w: &mut Matrix, g: &Matrix) {
    for i in 0..p.rows() {
        let Ok(c) = simplex_ls(p.row(i), g, v.row(i)) else {
            continue;
        };
        let row_obj = |c: &[f64]| -> f64 {
            (0..p.cols())
                .map(|j| {
                    let f: f64 = c.iter().enumerate().map(|(k, x)| x * g[(k, j)]).sum();
                    v[(i, j)] * (p[(i, j)] - f) * (p[(i, j)] - f)
                })
                .sum()
        };
        if row_obj(&c) <= row_obj(w.row(i)) {
            w.row_mut(i).copy_from_slice(&c);
        }
    }
}

/// Chi-square regularizer on the basis, with its weight and column masses.
struct ChiTerm<'a> {
    mu: f64,
    column_mass: &'a [f64],
}

/// Projected gradient steps on `G` with Armijo backtracking. `step` carries
/// the accepted step length between calls.
fn update_g(
    p: &Matrix,
    v: &Matrix,
    w: &Matrix,
    g: &mut Matrix,
    chi: Option<&ChiTerm>,
    step: &mut f64,
    steps: usize,
) {
    let objective = |g: &Matrix| -> f64 {
        let mut f = weighted_sq(p, v, w, g);
        if let Some(c) = chi {
            f += c.mu * chi_square_spread(g, c.column_mass);
        }
        f
    };
    let mut f = objective(g);
    for _ in 0..steps {
        let r = w.matmul(g).sub(p);
        let vr = Matrix::from_fn(r.rows(), r.cols(), |i, j| 2.0 * v[(i, j)] * r[(i, j)]);
        let mut grad = w.t_matmul(&vr);
        if let Some(c) = chi {
            grad = grad.add(&chi_gradient(g, c.column_mass).scale(c.mu));
        }
        *step *= 2.0;
        let mut accepted = false;
        for _ in 0..60 {
            let mut cand = g.clone();
            for k in 0..g.rows() {
                let moved: Vec<f64> = g
                    .row(k)
                    .iter()
                    .zip(grad.row(k))
                    .map(|(x, d)| x - *step * d)
                    .collect();
                cand.row_mut(k).copy_from_slice(&project_to_simplex(&moved));
            }
            let fc = objective(&cand);
            let decrease: f64 = grad
                .as_slice()
                .iter()
                .zip(g.as_slice().iter().zip(cand.as_slice()))
                .map(|(d, (a, b))| d * (a - b))
                .sum();
            if fc <= f - 1e-4 * decrease && fc <= f {
                *g = cand;
                f = fc;
                accepted = true;
                break;
            }
            *step *= 0.5;
        }
        if !accepted {
            *step = step.max(1e-12);
            break;
        }
    }
}

/// Gradient of [`chi_square_spread`] with respect to the rows of `g`.
fn chi_gradient(g: &Matrix, column_mass: &[f64]) -> Matrix {
    let (k, j) = g.shape();
    let mut out = Matrix::zeros(k, j);
    for a in 0..k {
        for b in a + 1..k {
            let d: Vec<f64> = (0..j)
                .map(|c| (g[(a, c)] - g[(b, c)]) / column_mass[c])
                .collect();
            let n: f64 = (0..j)
                .map(|c| (g[(a, c)] - g[(b, c)]).powi(2) / column_mass[c])
                .sum::<f64>()
                .sqrt();
            if n > 0.0 {
                for c in 0..j {
                    out[(a, c)] += d[c] / n;
                    out[(b, c)] -= d[c] / n;
                }
            }
        }
    }
    out
}

const G_STEPS: usize = 10;

fn cwls_k1(p: &Matrix, v: &Matrix) -> Result<BudgetFactorization> {
    let j = p.cols();
    let mass = v.col_sums();
    let mean: Vec<f64> = (0..j)
        .map(|c| {
            if mass[c] > 0.0 {
                (0..p.rows()).map(|i| v[(i, c)] * p[(i, c)]).sum::<f64>() / mass[c]
            } else {
                0.0
            }
        })
        .collect();
    let g = simplex_ls(&mean, &Matrix::identity(j), &mass)?;
    BudgetFactorization::renormalized(
        Matrix::from_fn(p.rows(), 1, |_, _| 1.0),
        Matrix::new(1, j, g)?,
    )
}

/// LBA by constrained weighted least squares,
/// `min sum v_ij (p_ij - (W G)_ij)^2` over row-stochastic `W`, `G`.
///
/// Each sweep solves every row of `W` exactly and then takes projected
/// gradient steps on `G`; the trace records the objective after each sweep.
pub fn fit_lba_cwls(p: &CompositionMatrix, cfg: &LbaConfig) -> Result<FitResult<BudgetFactorization>> {
    let (i_n, j_n) = p.shape();
    cfg.validate(i_n, j_n)?;
    let v = cfg.weight_matrix(i_n, j_n);
    let p = p.matrix();
    if cfg.k == 1 {
        let b = cwls_k1(p, &v)?;
        let obj = weighted_sq(p, &v, b.w(), b.g());
        return Ok(FitResult {
            residual: p.sub(&b.product()),
            factorization: b,
            objective_trace: vec![obj],
            best_restart: 0,
            seed_used: cfg.seed,
            iterations: 0,
            flags: vec![],
            restart_objectives: vec![obj],
        });
    }
    best_of(
        cfg.restarts,
        cfg.seed,
        p,
        |b: &BudgetFactorization| b.product(),
        |_, rng| {
            let (mut w, mut g) = init_budget(i_n, j_n, cfg.k, rng);
            let mut step = 1.0;
            let mut trace = vec![weighted_sq(p, &v, &w, &g)];
            let mut flags = vec![FitFlag::NonConvergence];
            for _ in 0..cfg.max_iter {
                update_w(p, &v, &mut w, &g);
                update_g(p, &v, &w, &mut g, None, &mut step, G_STEPS);
                let f = weighted_sq(p, &v, &w, &g);
                let prev = *trace.last().unwrap();
                trace.push(f);
                if converged(prev, f, cfg.tol) {
                    flags.clear();
                    break;
                }
            }
            let score = *trace.last().unwrap();
            Ok(Run {
                factorization: BudgetFactorization::renormalized(w, g)?,
                trace,
                flags,
                score,
            })
        },
    )
}

/// Default chi-square weight for [`refine_chi_regularized`]: one percent of
/// the fit's residual per unit of spread.
pub fn default_chi_weight(residual_sq: f64, spread: f64) -> f64 {
    if spread > 0.0 {
        0.01 * residual_sq / spread
    } else {
        0.0
    }
}

/// Re-fits `b` under `||P - W G||_V^2 + mu * spread(G)`, pulling the basis
/// rows together before an inner extreme search. Returns the refined pair
/// and its trace of the penalized objective.
pub fn refine_chi_regularized(
    p: &CompositionMatrix,
    b: &BudgetFactorization,
    weights: Option<&Matrix>,
    column_mass: &[f64],
    mu: f64,
    max_iter: usize,
) -> Result<(BudgetFactorization, Vec<f64>)> {
    let (i_n, j_n) = p.shape();
    if column_mass.len() != j_n || column_mass.iter().any(|m| !(*m > 0.0)) {
        return Err(Error::InvalidConfig("column masses must be positive, one per column".into()));
    }
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::InvalidConfig("chi-square weight must be finite and >= 0".into()));
    }
    let v = weights
        .cloned()
        .unwrap_or_else(|| Matrix::from_fn(i_n, j_n, |_, _| 1.0));
    let p = p.matrix();
    let chi = ChiTerm { mu, column_mass };
    let obj = |w: &Matrix, g: &Matrix| weighted_sq(p, &v, w, g) + mu * chi_square_spread(g, column_mass);
    let mut w = b.w().matrix().clone();
    let mut g = b.g().matrix().clone();
    let mut step = 1.0;
    let mut trace = vec![obj(&w, &g)];
    for _ in 0..max_iter {
        update_w(p, &v, &mut w, &g);
        update_g(p, &v, &w, &mut g, Some(&chi), &mut step, 5);
        let f = obj(&w, &g);
        let prev = *trace.last().unwrap();
        trace.push(f);
        if (prev - f).abs() < 1e-13 {
            break;
        }
    }
    Ok((BudgetFactorization::renormalized(w, g)?, trace))
}

/// Sum over basis-row pairs of the chi-square distance
/// `sqrt(sum_j (g_kj - g_lj)^2 / m_j)`, with `m_j` the column masses.
pub fn chi_square_spread(g: &Matrix, column_mass: &[f64]) -> f64 {
    let k = g.rows();
    let mut total = 0.0;
    for a in 0..k {
        for b in a + 1..k {
            let d: f64 = g
                .row(a)
                .iter()
                .zip(g.row(b))
                .zip(column_mass)
                .map(|((x, y), m)| (x - y) * (x - y) / m)
                .sum();
            total += d.sqrt();
        }
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Basis rows as similar as possible.
    Inner,
    /// Basis rows as different as possible.
    Outer,
}

#[derive(Clone, Debug)]
pub struct ExtremeSearchConfig {
    pub direction: Direction,
    pub steps: usize,
    pub proposal_scale: f64,
    /// Starting temperature as a fraction of the starting spread.
    pub temperature: f64,
    pub seed: u64,
    /// `sum_i phi_ij` for each column.
    pub column_mass: Vec<f64>,
    /// Independent chains; chain `c` is seeded with `seed + c`.
    pub chains: usize,
}

impl ExtremeSearchConfig {
    pub fn new(direction: Direction, column_mass: Vec<f64>) -> Self {
        Self {
            direction,
            steps: 200_000,
            proposal_scale: 0.05,
            temperature: 0.01,
            seed: 0,
            column_mass,
            chains: 4,
        }
    }

    fn validate(&self, j: usize) -> Result<()> {
        if self.column_mass.len() != j || self.column_mass.iter().any(|m| !(*m > 0.0)) {
            return Err(Error::InvalidConfig("column masses must be positive, one per column".into()));
        }
        if self.steps == 0 || self.chains == 0 {
            return Err(Error::InvalidConfig("need steps >= 1 and chains >= 1".into()));
        }
        if !(self.proposal_scale > 0.0) || !(self.temperature >= 0.0) {
            return Err(Error::InvalidConfig("proposal scale must be > 0, temperature >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ExtremeSolution {
    pub factorization: BudgetFactorization,
    pub transform: TransformMatrix,
    /// Spread of the returned basis.
    pub objective: f64,
    /// Spread of the input basis.
    pub initial_objective: f64,
}

/// Search state: `T`, and the energy (spread, negated for outer) when
/// `(W T^-1, T G)` is feasible.
struct Searcher<'a> {
    w: &'a Matrix,
    g: &'a Matrix,
    mass: &'a [f64],
    sign: f64,
}

impl Searcher<'_> {
    fn energy(&self, t: &Matrix) -> Option<f64> {
        let tg = t.matmul(self.g);
        if tg.min() < -1e-13 {
            return None;
        }
        let inv = inverse(t).ok()?;
        let wt = self.w.matmul(&inv);
        if wt.min() < -1e-13 || wt.as_slice().iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some(self.sign * chi_square_spread(&tg, self.mass))
    }

    fn chain(&self, cfg: &ExtremeSearchConfig, rng: &mut ChaCha8Rng) -> (Matrix, f64) {
        let k = self.g.rows();
        let mut t = Matrix::identity(k);
        let mut e = self.energy(&t).unwrap_or(f64::INFINITY);
        let mut best = (t.clone(), e);
        let mut temp = cfg.temperature * e.abs().max(1e-12);
        let normal = Normal::new(0.0, cfg.proposal_scale).expect("positive scale");
        if k > 1 {
            for _ in 0..cfg.steps {
                let a = rng.random_range(0..k);
                let mut b = rng.random_range(0..k - 1);
                if b >= a {
                    b += 1;
                }
                let eps = normal.sample(rng);
                let mut cand = t.clone();
                cand[(a, b)] += eps;
                cand[(a, a)] -= eps;
                if let Some(ec) = self.energy(&cand) {
                    let accept = ec <= e || (temp > 0.0 && rng.random::<f64>() < (-(ec - e) / temp).exp());
                    if accept {
                        t = cand;
                        e = ec;
                        if e < best.1 {
                            best = (t.clone(), e);
                        }
                    }
                }
                temp *= 0.999;
            }
        }
        self.polish(best.0, best.1, cfg.proposal_scale)
    }

    /// Compass search over single and paired off-diagonal moves.
    fn polish(&self, mut t: Matrix, mut e: f64, scale: f64) -> (Matrix, f64) {
        let k = t.rows();
        let coords: Vec<(usize, usize)> = (0..k)
            .flat_map(|a| (0..k).filter(move |&b| b != a).map(move |b| (a, b)))
            .collect();
        let mut dirs: Vec<Vec<(usize, usize, f64)>> = Vec::new();
        for (n, &(a, b)) in coords.iter().enumerate() {
            for s in [1.0, -1.0] {
                dirs.push(vec![(a, b, s)]);
            }
            for &(c, d) in &coords[n + 1..] {
                for s1 in [1.0, -1.0] {
                    for s2 in [1.0, -1.0] {
                        dirs.push(vec![(a, b, s1), (c, d, s2)]);
                    }
                }
            }
        }
        let mut h = scale;
        while h > 1e-13 {
            let mut improved = false;
            for dir in &dirs {
                let mut cand = t.clone();
                for &(a, b, s) in dir {
                    cand[(a, b)] += s * h;
                    cand[(a, a)] -= s * h;
                }
                if let Some(ec) = self.energy(&cand) {
                    if ec < e - 1e-15 {
                        t = cand;
                        e = ec;
                        improved = true;
                    }
                }
            }
            if !improved {
                h *= 0.5;
            }
        }
        (t, e)
    }
}

/// Metropolis search over row-stochastic `T` for the feasible
/// `(W T^-1, T G)` whose basis spread is smallest (inner) or largest
/// (outer), followed by a compass-search polish. The product `W G` is
/// unchanged; the input is returned when nothing better is feasible.
pub fn extreme_solution(b: &BudgetFactorization, cfg: &ExtremeSearchConfig) -> Result<ExtremeSolution> {
    cfg.validate(b.g().cols())?;
    let sign = match cfg.direction {
        Direction::Inner => 1.0,
        Direction::Outer => -1.0,
    };
    let s = Searcher {
        w: b.w().matrix(),
        g: b.g().matrix(),
        mass: &cfg.column_mass,
        sign,
    };
    let initial = chi_square_spread(b.g(), &cfg.column_mass);
    let chains: Vec<(Matrix, f64)> = (0..cfg.chains)
        .into_par_iter()
        .map(|c| s.chain(cfg, &mut restart_rng(cfg.seed, c)))
        .collect();
    let (t, e) = chains
        .into_iter()
        .reduce(|a, c| if c.1 < a.1 { c } else { a })
        .expect("at least one chain");
    if !(e < sign * initial) {
        return Ok(ExtremeSolution {
            factorization: b.clone(),
            transform: TransformMatrix::identity(b.k()),
            objective: initial,
            initial_objective: initial,
        });
    }
    let mut t = t;
    // Remove drift in the row sums before validating.
    for a in 0..t.rows() {
        let off: f64 = (0..t.cols()).filter(|&c| c != a).map(|c| t[(a, c)]).sum();
        t[(a, a)] = 1.0 - off;
    }
    let transform = TransformMatrix::new(t, TransformKind::RowStochastic)?;
    let factorization = transform_budget(b, &transform)?;
    let objective = chi_square_spread(factorization.g(), &cfg.column_mass);
    Ok(ExtremeSolution {
        factorization,
        transform,
        objective,
        initial_objective: initial,
    })
}

/// Inner extreme of a CWLS fit: a short chi-square regularized re-fit with
/// [`default_chi_weight`] followed by [`extreme_solution`]. Returns the
/// extreme and the weight used.
pub fn refined_inner_extreme(
    p: &CompositionMatrix,
    b: &BudgetFactorization,
    weights: Option<&Matrix>,
    seed: u64,
) -> Result<(ExtremeSolution, f64)> {
    let mass = p.col_sums();
    let residual = p.sub(&b.product()).frobenius_sq();
    let mu = default_chi_weight(residual, chi_square_spread(b.g(), &mass));
    let (refined, _) = refine_chi_regularized(p, b, weights, &mass, mu, 4000)?;
    let mut cfg = ExtremeSearchConfig::new(Direction::Inner, mass);
    cfg.seed = seed;
    Ok((extreme_solution(&refined, &cfg)?, mu))
}
