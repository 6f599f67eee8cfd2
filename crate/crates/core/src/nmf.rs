//! NMF estimators: Frobenius NMF (multiplicative updates, HALS), minimum
//! volume NMF with a logdet penalty, and separable NMF by successive
//! projection.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fit::{best_of, converged, FitFlag, FitResult, Run};
use crate::linalg::{inverse, logdet_spd};
use crate::matrix::{dot, Matrix};
use crate::models::NmfFactorization;
use crate::simplex::{nnls_normal, simplex_qp};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Frobenius,
    MinVol,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrobeniusAlgorithm {
    Multiplicative,
    Hals,
}

#[derive(Clone, Debug)]
pub struct NmfConfig {
    pub k: usize,
    pub objective: Objective,
    pub algorithm: FrobeniusAlgorithm,
    /// Volume weight. `None` picks the default balancing rule, see
    /// [`fit_minvol`]. Must be zero (or `None`) for the Frobenius objective.
    pub lambda: Option<f64>,
    pub delta: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
    pub row_stochastic_coeff: bool,
}

impl NmfConfig {
    pub fn frobenius(k: usize) -> Self {
        Self {
            k,
            objective: Objective::Frobenius,
            algorithm: FrobeniusAlgorithm::Hals,
            lambda: None,
            delta: 1e-8,
            max_iter: 2000,
            tol: 1e-9,
            restarts: 20,
            seed: 0,
            row_stochastic_coeff: false,
        }
    }

    pub fn minvol(k: usize) -> Self {
        Self {
            objective: Objective::MinVol,
            row_stochastic_coeff: true,
            ..Self::frobenius(k)
        }
    }

    fn validate(&self, x: &Matrix) -> Result<()> {
        let max = x.rows().min(x.cols());
        if self.k == 0 || self.k > max {
            return Err(Error::RankOutOfRange { k: self.k, max });
        }
        if !(self.delta > 0.0) {
            return Err(Error::InvalidConfig("delta must be positive".into()));
        }
        if !(self.tol >= 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidConfig("need tol >= 0 and max_iter >= 1".into()));
        }
        if let Some(l) = self.lambda {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::InvalidConfig("lambda must be a finite value >= 0".into()));
            }
            if self.objective == Objective::Frobenius && l != 0.0 {
                return Err(Error::InvalidConfig(
                    "lambda applies to the minimum volume objective only".into(),
                ));
            }
        }
        x.ensure_nonnegative()
    }
}

/// Minimum-volume fit plus the volume weight that was used.
#[derive(Clone, Debug)]
pub struct MinVolFit {
    pub fit: FitResult<NmfFactorization>,
    /// Weight on `logdet`, in units of the scaled data (see [`fit_minvol`]).
    pub lambda: f64,
    /// Data were divided by this before fitting.
    pub scale: f64,
}

#[derive(Clone, Debug)]
pub struct SeparableFit {
    pub fit: FitResult<NmfFactorization>,
    /// Rows of the data used as basis, in selection order.
    pub selected: Vec<usize>,
}

fn uniform(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random::<f64>())
}

fn normalize_rows(m: &mut Matrix) {
    for i in 0..m.rows() {
        let s: f64 = m.row(i).iter().sum();
        if s > 0.0 {
            m.row_mut(i).iter_mut().for_each(|v| *v /= s);
        }
    }
}

fn fit_sq(x: &Matrix, m: &Matrix, h: &Matrix) -> f64 {
    x.sub(&m.matmul(h)).frobenius_sq()
}

/// Plain `||X - M H||_F^2` NMF.
pub fn fit_frobenius(x: &Matrix, cfg: &NmfConfig) -> Result<FitResult<NmfFactorization>> {
    cfg.validate(x)?;
    let (i, j, k) = (x.rows(), x.cols(), cfg.k);
    let total = x.sum();
    best_of(cfg.restarts, cfg.seed, x, |f: &NmfFactorization| f.product(), |_, rng| {
        let mut m = uniform(i, k, rng);
        let mut h = uniform(k, j, rng);
        if cfg.row_stochastic_coeff {
            normalize_rows(&mut m);
            let s = total / m.matmul(&h).sum().max(1e-300);
            h = h.scale(s);
        } else {
            let s = (total / m.matmul(&h).sum().max(1e-300)).sqrt();
            m = m.scale(s);
            h = h.scale(s);
        }
        let mut trace = vec![fit_sq(x, &m, &h)];
        let mut flags = vec![FitFlag::NonConvergence];
        for _ in 0..cfg.max_iter {
            match cfg.algorithm {
                FrobeniusAlgorithm::Hals => hals_h(x, &m, &mut h),
                FrobeniusAlgorithm::Multiplicative => mu_h(x, &m, &mut h),
            }
            if cfg.row_stochastic_coeff {
                simplex_rows(x, &mut m, &h)?;
            } else {
                match cfg.algorithm {
                    FrobeniusAlgorithm::Hals => hals_m(x, &mut m, &h),
                    FrobeniusAlgorithm::Multiplicative => mu_m(x, &mut m, &h),
                }
            }
            let f = fit_sq(x, &m, &h);
            let prev = *trace.last().unwrap();
            trace.push(f);
            if converged(prev, f, cfg.tol) {
                flags.clear();
                break;
            }
        }
        let score = *trace.last().unwrap();
        Ok(Run {
            factorization: NmfFactorization::new(m, h)?,
            trace,
            flags,
            score,
        })
    })
}

/// One HALS sweep over the rows of `H`.
pub(crate) fn hals_h(x: &Matrix, m: &Matrix, h: &mut Matrix) {
    let a = m.t_matmul(m);
    let b = m.t_matmul(x);
    let k = h.rows();
    for r in 0..k {
        let d = a[(r, r)];
        if d <= 0.0 {
            continue;
        }
        for c in 0..h.cols() {
            let mut s = b[(r, c)];
            for q in 0..k {
                s -= a[(r, q)] * h[(q, c)];
            }
            h[(r, c)] = (h[(r, c)] + s / d).max(0.0);
        }
    }
}

fn hals_m(x: &Matrix, m: &mut Matrix, h: &Matrix) {
    let c = h.matmul_t(h);
    let d = x.matmul_t(h);
    let k = h.rows();
    for r in 0..k {
        let den = c[(r, r)];
        if den <= 0.0 {
            continue;
        }
        for i in 0..m.rows() {
            let mut s = d[(i, r)];
            for q in 0..k {
                s -= m[(i, q)] * c[(q, r)];
            }
            m[(i, r)] = (m[(i, r)] + s / den).max(0.0);
        }
    }
}

fn mu_h(x: &Matrix, m: &Matrix, h: &mut Matrix) {
    let num = m.t_matmul(x);
    let den = m.t_matmul(m).matmul(h);
    for r in 0..h.rows() {
        for c in 0..h.cols() {
            let d = den[(r, c)];
            h[(r, c)] = if d > 0.0 { h[(r, c)] * num[(r, c)] / d } else { 0.0 };
        }
    }
}

fn mu_m(x: &Matrix, m: &mut Matrix, h: &Matrix) {
    let num = x.matmul_t(h);
    let den = m.matmul(&h.matmul_t(h));
    for i in 0..m.rows() {
        for r in 0..m.cols() {
            let d = den[(i, r)];
            m[(i, r)] = if d > 0.0 { m[(i, r)] * num[(i, r)] / d } else { 0.0 };
        }
    }
}

/// Exact per-row update of `M` over the simplex; keeps the old row if the
/// new one is not better (guards against rounding).
pub(crate) fn simplex_rows(x: &Matrix, m: &mut Matrix, h: &Matrix) -> Result<()> {
    let q = h.matmul_t(h);
    for i in 0..x.rows() {
        let lin = h.mul_vec(x.row(i));
        let c = simplex_qp(&q, &lin)?;
        let old = row_value(&q, &lin, m.row(i));
        if row_value(&q, &lin, &c) <= old {
            m.row_mut(i).copy_from_slice(&c);
        }
    }
    Ok(())
}

fn row_value(q: &Matrix, lin: &[f64], c: &[f64]) -> f64 {
    0.5 * dot(c, &q.mul_vec(c)) - dot(lin, c)
}

fn gram_delta(h: &Matrix, delta: f64) -> Matrix {
    let mut g = h.matmul_t(h);
    for r in 0..g.rows() {
        g[(r, r)] += delta;
    }
    g
}

/// `log det(H H^T + delta I)`, or `None` when numerically singular.
fn logdet_term(h: &Matrix, delta: f64) -> Option<f64> {
    logdet_spd(&gram_delta(h, delta))
}

fn minvol_objective(x: &Matrix, m: &Matrix, h: &Matrix, lambda: f64, delta: f64) -> f64 {
    let ld = if lambda == 0.0 {
        0.0
    } else {
        logdet_term(h, delta).unwrap_or(f64::NEG_INFINITY)
    };
    fit_sq(x, m, h) + lambda * ld
}

/// Projected gradient steps on `H` with Armijo backtracking. `step` carries
/// the accepted step length between calls.
fn minvol_h_steps(
    x: &Matrix,
    m: &Matrix,
    h: &mut Matrix,
    lambda: f64,
    delta: f64,
    step: &mut f64,
    inner: usize,
) -> Result<()> {
    let mtm = m.t_matmul(m);
    let mtx = m.t_matmul(x);
    let mut f = minvol_objective(x, m, h, lambda, delta);
    for _ in 0..inner {
        let mut grad = mtm.matmul(h).sub(&mtx).scale(2.0);
        if lambda > 0.0 {
            let inv = inverse(&gram_delta(h, delta))?;
            grad = grad.add(&inv.matmul(h).scale(2.0 * lambda));
        }
        *step *= 2.0;
        let mut accepted = false;
        for _ in 0..=30 {
            let trial = h.sub(&grad.scale(*step)).map(|v| v.max(0.0));
            let ft = minvol_objective(x, m, &trial, lambda, delta);
            let decrease: f64 = grad
                .as_slice()
                .iter()
                .zip(h.as_slice().iter().zip(trial.as_slice()))
                .map(|(g, (a, b))| g * (a - b))
                .sum();
            if ft <= f - 1e-4 * decrease && ft.is_finite() {
                *h = trial;
                f = ft;
                accepted = true;
                break;
            }
            *step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    Ok(())
}

const SINGULAR_LOGDET: f64 = -690.7755278982137; // ln(1e-300)

/// Minimum-volume NMF: `||X - M H||^2 + lambda logdet(H H^T + delta I)`
/// with `M 1 = 1`.
///
/// The data are divided by their mean row sum before fitting and `H` is
/// scaled back afterwards; `lambda` and the objective trace refer to the
/// scaled problem. When `cfg.lambda` is `None`, the weight is
/// `0.01 * ||X - M0 H0||^2 / |logdet(H0 H0^T + delta I)|` where `(M0, H0)`
/// is a Frobenius warm start (restart 0). If that warm start already fits
/// the data exactly, the fit instead runs through the weights 1e-3 down to
/// 1e-7, each stage starting from the previous one. A default weight below
/// 1e-7 is reached through the same stages. The trace and the reported
/// `lambda` are those of the last stage.
pub fn fit_minvol(x: &Matrix, cfg: &NmfConfig) -> Result<MinVolFit> {
    cfg.validate(x)?;
    if !cfg.row_stochastic_coeff {
        return Err(Error::InvalidConfig(
            "minimum volume NMF needs row-stochastic coefficients".into(),
        ));
    }
    let scale = x.row_sums().iter().sum::<f64>() / x.rows() as f64;
    if scale <= 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let xs = x.scale(1.0 / scale);
    let (i, j, k) = (x.rows(), x.cols(), cfg.k);

    let start = |rng: &mut ChaCha8Rng| -> Result<(Matrix, Matrix)> {
        let mut m = uniform(i, k, rng);
        normalize_rows(&mut m);
        let mut h = uniform(k, j, rng);
        normalize_rows(&mut h);
        warm_start(&xs, &mut m, &mut h)?;
        Ok((m, h))
    };

    // `None` means the data are fitted exactly by the warm start, so the
    // residual-balancing rule would give no volume weight at all.
    let lambda = match cfg.lambda {
        Some(l) => Some(l),
        None => {
            let (m0, h0) = start(&mut crate::fit::restart_rng(cfg.seed, 0))?;
            let res = fit_sq(&xs, &m0, &h0);
            let ld = logdet_term(&h0, cfg.delta).unwrap_or(SINGULAR_LOGDET).abs();
            if res <= EXACT_FIT * xs.frobenius_sq() {
                None
            } else if ld > 0.0 {
                Some(0.01 * res / ld)
            } else {
                Some(0.0)
            }
        }
    };
    let schedule: Vec<f64> = match lambda {
        Some(l) if cfg.lambda.is_some() || l >= CONTINUATION[CONTINUATION.len() - 1] => vec![l],
        Some(l) => CONTINUATION.iter().copied().chain([l]).collect(),
        None => CONTINUATION.to_vec(),
    };

    let fit = best_of(cfg.restarts, cfg.seed, &xs, |f: &NmfFactorization| f.product(), |_, rng| {
        let (mut m, mut h) = start(rng)?;
        let mut trace = Vec::new();
        let mut flags = Vec::new();
        let mut f = 0.0;
        for &lam in &schedule {
            let stage = minvol_stage(&xs, &mut m, &mut h, lam, cfg)?;
            (trace, flags, f) = stage;
        }
        if logdet_term(&h, cfg.delta).map_or(true, |v| v < SINGULAR_LOGDET) {
            flags.push(FitFlag::SingularGram);
        }
        Ok(Run {
            factorization: NmfFactorization::new(m, h)?,
            trace,
            flags,
            score: f,
        })
    })?;
    let lambda = *schedule.last().expect("non-empty schedule");

    // Back to data units: rows of M stay stochastic, H absorbs the scale.
    let fit = FitResult {
        residual: fit.residual.scale(scale),
        ..fit.map(|f| {
            let (m, h) = f.into_parts();
            NmfFactorization::new(m, h.scale(scale)).expect("scaling keeps signs")
        })
    };
    Ok(MinVolFit { fit, lambda, scale })
}

/// Relative warm-start residual below which the data count as exactly
/// factorizable.
const EXACT_FIT: f64 = 1e-10;

/// Decreasing volume weights run before a default weight below the last
/// entry, and on their own for exactly factorizable data.
const CONTINUATION: [f64; 5] = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7];

/// Alternating updates at a fixed weight until the objective settles.
fn minvol_stage(
    xs: &Matrix,
    m: &mut Matrix,
    h: &mut Matrix,
    lambda: f64,
    cfg: &NmfConfig,
) -> Result<(Vec<f64>, Vec<FitFlag>, f64)> {
    let mut f = minvol_objective(xs, m, h, lambda, cfg.delta);
    let mut trace = vec![f];
    let mut flags = vec![FitFlag::NonConvergence];
    let mut step = 1.0;
    for _ in 0..cfg.max_iter {
        let saved = m.clone();
        simplex_rows(xs, m, h)?;
        if minvol_objective(xs, m, h, lambda, cfg.delta) > f {
            *m = saved;
        }
        minvol_h_steps(xs, m, h, lambda, cfg.delta, &mut step, 5)?;
        let cur = minvol_objective(xs, m, h, lambda, cfg.delta);
        trace.push(cur);
        let scale_f = f.abs().max(cur.abs()).max(fit_sq(xs, m, h));
        let done = (f - cur).abs() <= cfg.tol * scale_f.max(1e-300);
        f = cur;
        if done {
            flags.clear();
            break;
        }
    }
    Ok((trace, flags, f))
}

// Alternating Frobenius sweeps with `M 1 = 1`, used to seed min-vol fits.
fn warm_start(x: &Matrix, m: &mut Matrix, h: &mut Matrix) -> Result<()> {
    let mut prev = fit_sq(x, m, h);
    for _ in 0..300 {
        hals_h(x, m, h);
        simplex_rows(x, m, h)?;
        let f = fit_sq(x, m, h);
        if converged(prev, f, 1e-7) {
            break;
        }
        prev = f;
    }
    Ok(())
}

/// Separable NMF by successive projection: rows of the row-normalized data
/// with the largest residual norm are taken as basis, the chosen direction
/// is projected out, and `M` is estimated by nonnegative least squares.
pub fn fit_separable(x: &Matrix, k: usize) -> Result<SeparableFit> {
    x.ensure_nonnegative()?;
    let max = x.rows().min(x.cols());
    if k == 0 || k > max {
        return Err(Error::RankOutOfRange { k, max });
    }
    let sums = x.row_sums();
    if let Some(row) = sums.iter().position(|&s| s <= 0.0) {
        return Err(Error::ZeroRow { row });
    }
    let inv: Vec<f64> = sums.iter().map(|s| 1.0 / s).collect();
    let mut r = x.scale_rows(&inv);
    let first_norm = (0..r.rows())
        .map(|i| dot(r.row(i), r.row(i)))
        .fold(0.0_f64, f64::max);
    let mut selected = Vec::with_capacity(k);
    for _ in 0..k {
        let (p, norm) = (0..r.rows())
            .map(|i| (i, dot(r.row(i), r.row(i))))
            .fold((0, -1.0), |a, c| if c.1 > a.1 { c } else { a });
        if norm <= 1e-24 * first_norm {
            return Err(Error::RankDeficientSelection {
                picked: selected.len(),
                k,
            });
        }
        selected.push(p);
        let nrm = norm.sqrt();
        let u: Vec<f64> = r.row(p).iter().map(|v| v / nrm).collect();
        for i in 0..r.rows() {
            let c = dot(r.row(i), &u);
            for (v, uj) in r.row_mut(i).iter_mut().zip(&u) {
                *v -= c * uj;
            }
        }
    }
    let h = x.select_rows(&selected);
    let hht = h.matmul_t(&h);
    let mut m = Matrix::zeros(x.rows(), k);
    for i in 0..x.rows() {
        let coef = nnls_normal(&hht, &h.mul_vec(x.row(i)))?;
        m.row_mut(i).copy_from_slice(&coef);
    }
    let f = NmfFactorization::new(m, h)?;
    let residual = x.sub(&f.product());
    let obj = residual.frobenius_sq();
    Ok(SeparableFit {
        fit: FitResult {
            factorization: f,
            residual,
            objective_trace: vec![obj],
            best_restart: 0,
            seed_used: 0,
            iterations: 0,
            flags: vec![],
            restart_objectives: vec![obj],
        },
        selected,
    })
}
