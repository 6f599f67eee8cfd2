//! End-member analysis by EMMA: a rank-K signal estimate, fuzzy c-means
//! starting end members, and simplex expansion until the mixing
//! coefficients are (nearly) nonnegative.

use crate::error::{Error, Result};
use crate::fcm::fuzzy_cmeans;
use crate::fit::{best_of, FitFlag, FitResult, Run};
use crate::linalg::svd_truncate;
use crate::matrix::{CompositionMatrix, Matrix};
use crate::models::BudgetFactorization;
use crate::simplex::{affine_ls, project_rows_to_simplex, simplex_ls};

#[derive(Clone, Debug)]
pub struct EmmaConfig {
    pub k: usize,
    /// Expansion stops once the total negative coefficient mass is at most
    /// `neg_tolerance * I`.
    pub neg_tolerance: f64,
    pub expand_step: f64,
    pub max_expand: usize,
    pub fcm_seed: u64,
    pub fuzzifier: f64,
    /// Independent runs with FCM seeds `fcm_seed + r`; the lowest residual wins.
    pub restarts: usize,
    /// After expansion, pull end members inward while the negativity stays
    /// within tolerance. Off by default; plain expansion can stop at an
    /// enclosing simplex larger than the data hull.
    pub tighten: bool,
}

impl EmmaConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            neg_tolerance: 1e-3,
            expand_step: 0.01,
            max_expand: 20_000,
            fcm_seed: 0,
            fuzzifier: 2.0,
            restarts: 20,
            tighten: false,
        }
    }

    fn validate(&self, p: &Matrix) -> Result<()> {
        let max = p.rows().min(p.cols());
        if self.k == 0 || self.k > max {
            return Err(Error::RankOutOfRange { k: self.k, max });
        }
        if !(self.neg_tolerance >= 0.0) {
            return Err(Error::InvalidConfig("negativity tolerance must be >= 0".into()));
        }
        if !(self.expand_step > 0.0 && self.expand_step <= 0.5) {
            return Err(Error::InvalidConfig("expansion step must lie in (0, 0.5]".into()));
        }
        if !(self.fuzzifier > 1.0) {
            return Err(Error::InvalidConfig("fuzzifier must exceed 1".into()));
        }
        Ok(())
    }
}

/// Sum of the magnitudes of the negative entries.
pub fn negativity(w: &Matrix) -> f64 {
    w.as_slice().iter().filter(|v| **v < 0.0).map(|v| -v).sum()
}

/// Rank-`k` SVD reconstruction of `p`, with each row projected onto the
/// simplex (the least-squares correction to a composition).
pub fn emma_stage1(p: &CompositionMatrix, k: usize) -> Result<CompositionMatrix> {
    let (a, b) = svd_truncate(p, k)?;
    let mut pi = a.matmul(&b);
    project_rows_to_simplex(&mut pi);
    CompositionMatrix::with_tolerance(pi, 1e-10)
}

#[derive(Clone, Debug)]
pub struct Expansion {
    pub w: Matrix,
    pub g: Matrix,
    /// False when no end member could be moved outward profitably.
    pub improved: bool,
}

/// One pass over the end members. Each row of `g` is pushed away from the
/// centroid of the others by `1 + step`, clipped at zero and renormalized;
/// the coefficients are refit to `pi` by affine least squares and the move
/// is kept only if the negative coefficient mass drops.
pub fn expand_simplex_once(pi: &Matrix, w: &Matrix, g: &Matrix, step: f64) -> Result<Expansion> {
    let k = g.rows();
    let mut w = w.clone();
    let mut g = g.clone();
    let mut neg = negativity(&w);
    let mut improved = false;
    if neg == 0.0 || k < 2 {
        return Ok(Expansion { w, g, improved });
    }
    for row in 0..k {
        let mut centroid = vec![0.0; g.cols()];
        for other in (0..k).filter(|&o| o != row) {
            for (c, v) in centroid.iter_mut().zip(g.row(other)) {
                *c += v / (k - 1) as f64;
            }
        }
        let mut moved: Vec<f64> = g
            .row(row)
            .iter()
            .zip(&centroid)
            .map(|(x, c)| (c + (1.0 + step) * (x - c)).max(0.0))
            .collect();
        let s: f64 = moved.iter().sum();
        if !(s > 0.0) {
            continue;
        }
        moved.iter_mut().for_each(|v| *v /= s);
        let mut cand = g.clone();
        cand.row_mut(row).copy_from_slice(&moved);
        let Ok(wc) = affine_ls(pi, &cand) else {
            continue;
        };
        let nc = negativity(&wc);
        if nc < neg {
            w = wc;
            g = cand;
            neg = nc;
            improved = true;
        }
    }
    Ok(Expansion { w, g, improved })
}

fn edge_length(g: &Matrix) -> f64 {
    let k = g.rows();
    let mut total = 0.0;
    for a in 0..k {
        for b in a + 1..k {
            let d: f64 = g.row(a).iter().zip(g.row(b)).map(|(x, y)| (x - y) * (x - y)).sum();
            total += d.sqrt();
        }
    }
    total
}

/// Compass search on the total edge length of the end-member simplex. Each
/// end member moves along single edge directions, signed pairs of them, and
/// towards each row of `pi` (which pulls members clipped off the data's
/// affine hull back onto it); a move is kept when
/// the length drops, the row stays nonnegative and the negative coefficient
/// mass stays at most `limit`. The step halves when nothing is accepted.
pub fn tighten_simplex(pi: &Matrix, w: &Matrix, g: &Matrix, limit: f64, step: f64) -> Result<(Matrix, Matrix)> {
    let k = g.rows();
    let mut w = w.clone();
    let mut g = g.clone();
    let mut len = edge_length(&g);
    let mut h = step;
    let mut moves: Vec<Vec<(usize, f64)>> = Vec::new();
    for b in 0..k {
        for s in [1.0, -1.0] {
            moves.push(vec![(b, s)]);
        }
        for c in b + 1..k {
            for (s1, s2) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                moves.push(vec![(b, s1), (c, s2)]);
            }
        }
    }
    while h > 1e-10 {
        let mut improved = false;
        for a in 0..k {
            for mv in &moves {
                if mv.iter().any(|&(b, _)| b == a) {
                    continue;
                }
                let mut cand = g.clone();
                for &(b, s) in mv {
                    for j in 0..g.cols() {
                        cand[(a, j)] += s * h * (g[(b, j)] - g[(a, j)]);
                    }
                }
                if cand.row(a).iter().any(|v| *v < 0.0) {
                    continue;
                }
                let lc = edge_length(&cand);
                if lc >= len {
                    continue;
                }
                let Ok(wc) = affine_ls(pi, &cand) else {
                    continue;
                };
                if negativity(&wc) <= limit {
                    w = wc;
                    g = cand;
                    len = lc;
                    improved = true;
                }
            }
            for i in 0..pi.rows() {
                let mut cand = g.clone();
                for j in 0..g.cols() {
                    cand[(a, j)] += h * (pi[(i, j)] - g[(a, j)]);
                }
                let lc = edge_length(&cand);
                if lc >= len {
                    continue;
                }
                let Ok(wc) = affine_ls(pi, &cand) else {
                    continue;
                };
                if negativity(&wc) <= limit {
                    w = wc;
                    g = cand;
                    len = lc;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Ok((w, g))
}

/// Frobenius residual and per-column coefficient of determination.
#[derive(Clone, Debug)]
pub struct Goodness {
    pub frobenius: f64,
    pub column_r2: Vec<f64>,
}

pub fn goodness(p: &Matrix, fitted: &Matrix) -> Goodness {
    let r = p.sub(fitted);
    let (n, j) = p.shape();
    let column_r2 = (0..j)
        .map(|c| {
            let mean = (0..n).map(|i| p[(i, c)]).sum::<f64>() / n as f64;
            let ss_tot: f64 = (0..n).map(|i| (p[(i, c)] - mean).powi(2)).sum();
            let ss_res: f64 = (0..n).map(|i| r[(i, c)].powi(2)).sum();
            if ss_tot > 0.0 {
                1.0 - ss_res / ss_tot
            } else if ss_res == 0.0 {
                1.0
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    Goodness {
        frobenius: r.frobenius(),
        column_r2,
    }
}

fn mean_profile(p: &Matrix) -> Result<BudgetFactorization> {
    let n = p.rows() as f64;
    let g: Vec<f64> = p.col_sums().into_iter().map(|s| s / n).collect();
    BudgetFactorization::renormalized(
        Matrix::from_fn(p.rows(), 1, |_, _| 1.0),
        Matrix::new(1, p.cols(), g)?,
    )
}

/// EMMA fit. The objective trace holds the negative coefficient mass
/// after each expansion pass (non-increasing); restarts are ranked by the
/// squared residual against `p`. `W` is finally re-solved row by row
/// over the simplex against the stage-one signal.
pub fn emma_fit(p: &CompositionMatrix, cfg: &EmmaConfig) -> Result<FitResult<BudgetFactorization>> {
    cfg.validate(p)?;
    if cfg.k == 1 {
        let b = mean_profile(p)?;
        let residual = p.sub(&b.product());
        let obj = residual.frobenius_sq();
        return Ok(FitResult {
            factorization: b,
            residual,
            objective_trace: vec![0.0],
            best_restart: 0,
            seed_used: cfg.fcm_seed,
            iterations: 0,
            flags: vec![],
            restart_objectives: vec![obj],
        });
    }
    let pi = emma_stage1(p, cfg.k)?.into_matrix();
    let ones = vec![1.0; p.cols()];
    let limit = cfg.neg_tolerance * p.rows() as f64;
    best_of(
        cfg.restarts,
        cfg.fcm_seed,
        p,
        |b: &BudgetFactorization| b.product(),
        |r, _| {
            let mut g = fuzzy_cmeans(&pi, cfg.k, cfg.fuzzifier, cfg.fcm_seed.wrapping_add(r as u64))?;
            project_rows_to_simplex(&mut g);
            let mut w = affine_ls(&pi, &g)?;
            let mut trace = vec![negativity(&w)];
            let mut step = cfg.expand_step;
            let mut passes = 0;
            while trace.last().unwrap() > &limit && passes < cfg.max_expand && step > 1e-10 {
                passes += 1;
                let e = expand_simplex_once(&pi, &w, &g, step)?;
                if !e.improved {
                    step *= 0.5;
                }
                w = e.w;
                g = e.g;
                trace.push(negativity(&w));
            }
            let flags = if *trace.last().unwrap() > limit {
                vec![FitFlag::ExpansionStall]
            } else {
                vec![]
            };
            if cfg.tighten {
                let slack = limit.max(1e-12 * pi.rows() as f64).max(*trace.last().unwrap());
                g = tighten_simplex(&pi, &w, &g, slack, cfg.expand_step.max(0.05))?.1;
            }
            let mut wf = Matrix::zeros(pi.rows(), cfg.k);
            for i in 0..pi.rows() {
                wf.row_mut(i).copy_from_slice(&simplex_ls(pi.row(i), &g, &ones)?);
            }
            let b = BudgetFactorization::renormalized(wf, g)?;
            let score = p.sub(&b.product()).frobenius_sq();
            Ok(Run {
                factorization: b,
                trace,
                flags,
                score,
            })
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_separable() -> (Matrix, Matrix) {
        let g = Matrix::from_rows(&[
            [0.6, 0.2, 0.1, 0.1],
            [0.1, 0.6, 0.2, 0.1],
            [0.1, 0.1, 0.2, 0.6],
        ])
        .unwrap();
        let w = Matrix::from_rows(&[
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.3, 0.3, 0.4],
            [0.5, 0.4, 0.1],
            [0.2, 0.1, 0.7],
            [0.1, 0.6, 0.3],
        ])
        .unwrap();
        (w.matmul(&g), g)
    }

    #[test]
    fn stage1_full_rank_is_identity() {
        let (p, _) = exact_separable();
        let p = CompositionMatrix::new(p).unwrap();
        let pi = emma_stage1(&p, 3).unwrap();
        assert!(pi.max_abs_diff(&p) < 1e-10);
    }

    #[test]
    fn expansion_noop_when_nonnegative() {
        let (p, g) = exact_separable();
        let w = affine_ls(&p, &g).unwrap();
        let e = expand_simplex_once(&p, &w.map(|v| v.max(0.0)), &g, 0.1).unwrap();
        assert!(!e.improved);
    }

    #[test]
    fn recovers_separable_end_members() {
        let (p, g) = exact_separable();
        let p = CompositionMatrix::new(p).unwrap();
        let mut cfg = EmmaConfig::new(3);
        cfg.neg_tolerance = 0.0;
        cfg.restarts = 3;
        cfg.tighten = true;
        let fit = emma_fit(&p, &cfg).unwrap();
        let perm = crate::align::match_rows_by_cosine(&g, fit.factorization.g());
        let got = fit.factorization.g().select_rows(&perm);
        assert!(got.max_abs_diff(&g) < 1e-6, "{}", got.max_abs_diff(&g));
        for v in fit.objective_trace.windows(2) {
            assert!(v[1] <= v[0]);
        }
    }

    #[test]
    fn k1_is_column_mean() {
        let p = CompositionMatrix::new(Matrix::from_rows(&[[0.2, 0.8], [0.6, 0.4]]).unwrap()).unwrap();
        let fit = emma_fit(&p, &EmmaConfig::new(1)).unwrap();
        assert!((fit.factorization.g()[(0, 0)] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn r2_perfect_fit() {
        let p = Matrix::from_rows(&[[0.2, 0.8], [0.6, 0.4]]).unwrap();
        let gd = goodness(&p, &p);
        assert_eq!(gd.frobenius, 0.0);
        assert!(gd.column_r2.iter().all(|r| *r == 1.0));
    }
}
