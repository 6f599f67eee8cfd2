//! Probabilistic latent semantic analysis by tempered EM, in the
//! asymmetric (budget) and symmetric (latent class) parametrizations.

use crate::error::{Error, Result};
use crate::fit::{best_of, converged, FitFlag, FitResult, Run};
use crate::lba::{em_step, init_budget, log_likelihood, EM_ZERO};
use crate::matrix::{Matrix, RowMassVector};
use crate::models::{lba_to_lca, BudgetFactorization, Factorization, LcaFactorization};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlsaForm {
    Asymmetric,
    Symmetric,
}

#[derive(Clone, Debug)]
pub struct PlsaConfig {
    pub k: usize,
    /// Posterior exponent in `(0, 1]`; 1 is plain EM.
    pub beta: f64,
    pub form: PlsaForm,
    pub max_iter: usize,
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl PlsaConfig {
    pub fn new(k: usize, form: PlsaForm) -> Self {
        Self {
            k,
            beta: 1.0,
            form,
            max_iter: 5000,
            tol: 1e-10,
            restarts: 20,
            seed: 0,
        }
    }

    fn validate(&self, counts: &Matrix) -> Result<()> {
        let max = counts.rows().min(counts.cols());
        if self.k == 0 || self.k > max {
            return Err(Error::RankOutOfRange { k: self.k, max });
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InvalidConfig(format!("beta must lie in (0, 1], got {}", self.beta)));
        }
        if self.max_iter == 0 || !(self.tol >= 0.0) {
            return Err(Error::InvalidConfig("need tol >= 0 and max_iter >= 1".into()));
        }
        Ok(())
    }
}

/// Posterior class weights for every cell, stored `(i, j, k)` row-major.
#[derive(Clone, Debug)]
pub struct Responsibilities {
    rows: usize,
    cols: usize,
    k: usize,
    data: Vec<f64>,
}

impl Responsibilities {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.cols + j) * self.k + k]
    }

    pub fn cell(&self, i: usize, j: usize) -> &[f64] {
        let start = (i * self.cols + j) * self.k;
        &self.data[start..start + self.k]
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.rows, self.cols, self.k)
    }
}

/// `r_ijk` proportional to `(theta_k a_ik b_kj)^beta`, normalized over `k`.
/// A cell where every class has zero weight gets `1/K` for each class.
pub fn tempered_estep(params: &LcaFactorization, counts: &Matrix, beta: f64) -> Result<Responsibilities> {
    let (i_n, j_n) = counts.shape();
    let a = params.a();
    let b = params.b();
    let theta = params.theta();
    let k = params.k();
    if a.rows() != i_n || b.cols() != j_n {
        return Err(Error::DimensionMismatch(format!(
            "parameters are {}x{}, counts {i_n}x{j_n}",
            a.rows(),
            b.cols()
        )));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidConfig(format!("beta must lie in (0, 1], got {beta}")));
    }
    let mut data = vec![0.0; i_n * j_n * k];
    for i in 0..i_n {
        for j in 0..j_n {
            let cell = &mut data[(i * j_n + j) * k..(i * j_n + j + 1) * k];
            let mut total = 0.0;
            for (c, r) in cell.iter_mut().enumerate() {
                let v = theta[c] * a[(i, c)] * b[(c, j)];
                *r = if beta == 1.0 { v } else { v.powf(beta) };
                total += *r;
            }
            if total > 0.0 {
                cell.iter_mut().for_each(|r| *r /= total);
            } else {
                cell.iter_mut().for_each(|r| *r = 1.0 / k as f64);
            }
        }
    }
    Ok(Responsibilities {
        rows: i_n,
        cols: j_n,
        k,
        data,
    })
}

fn clamp_normalize(v: &mut [f64]) {
    v.iter_mut().for_each(|x| {
        if *x < EM_ZERO {
            *x = 0.0
        }
    });
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    }
}

/// One tempered EM update of the latent class parameters.
fn lca_step(counts: &Matrix, params: &LcaFactorization, beta: f64) -> Result<LcaFactorization> {
    let (i_n, j_n) = counts.shape();
    let k = params.k();
    let r = tempered_estep(params, counts, beta)?;
    let mut a = Matrix::zeros(i_n, k);
    let mut b = Matrix::zeros(k, j_n);
    for i in 0..i_n {
        for j in 0..j_n {
            let n = counts[(i, j)];
            if n == 0.0 {
                continue;
            }
            for (c, post) in r.cell(i, j).iter().enumerate() {
                a[(i, c)] += n * post;
                b[(c, j)] += n * post;
            }
        }
    }
    let mut theta = a.col_sums();
    clamp_normalize(&mut theta);
    let mut at = a.transpose();
    for c in 0..k {
        if at.row(c).iter().sum::<f64>() > 0.0 {
            clamp_normalize(at.row_mut(c));
        } else {
            let old: Vec<f64> = (0..i_n).map(|i| params.a()[(i, c)]).collect();
            at.row_mut(c).copy_from_slice(&old);
        }
        if b.row(c).iter().sum::<f64>() > 0.0 {
            clamp_normalize(b.row_mut(c));
        } else {
            b.row_mut(c).copy_from_slice(params.b().row(c));
        }
    }
    LcaFactorization::new(
        at.transpose(),
        theta,
        crate::matrix::CompositionMatrix::renormalized(b)?,
    )
}

/// Tempered EM. The objective trace is the log-likelihood
/// (`sum n_ij ln pi_ij`, conditional on rows for the asymmetric form, joint
/// for the symmetric form); it never decreases at `beta = 1`.
///
/// Both forms start from the same random budget pair as
/// [`crate::lba::fit_lba_em`] with the same seed; the symmetric form maps it
/// through the observed row shares.
pub fn fit_plsa(counts: &Matrix, cfg: &PlsaConfig) -> Result<FitResult<Factorization>> {
    counts.ensure_nonnegative()?;
    cfg.validate(counts)?;
    let total = counts.sum();
    if !(total > 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let (i_n, j_n) = counts.shape();
    match cfg.form {
        PlsaForm::Asymmetric => {
            for (row, s) in counts.row_sums().into_iter().enumerate() {
                if s <= 0.0 {
                    return Err(Error::ZeroRow { row });
                }
            }
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
                        (w, g) = em_step(counts, &w, &g, cfg.beta);
                        let ll = log_likelihood(counts, &w.matmul(&g));
                        let prev = *trace.last().unwrap();
                        trace.push(ll);
                        if converged(prev, ll, cfg.tol) {
                            flags.clear();
                            break;
                        }
                    }
                    let score = -*trace.last().unwrap();
                    Ok(Run {
                        factorization: BudgetFactorization::renormalized(w, g)?,
                        trace,
                        flags,
                        score,
                    })
                },
            )?;
            Ok(fit.map(Factorization::Budget))
        }
        PlsaForm::Symmetric => {
            let joint = counts.scale(1.0 / total);
            let shares = RowMassVector::new(joint.row_sums())?;
            // The joint log-likelihood exceeds the row-conditional one by
            // this constant; stopping on the conditional part makes both
            // forms stop at the same iteration.
            let offset: f64 = counts
                .row_sums()
                .iter()
                .filter(|n| **n > 0.0)
                .map(|n| n * (n / total).ln())
                .sum();
            let fit = best_of(
                cfg.restarts,
                cfg.seed,
                &joint,
                |l: &LcaFactorization| l.product(),
                |_, rng| {
                    let (w, g) = init_budget(i_n, j_n, cfg.k, rng);
                    let start = BudgetFactorization::renormalized(w, g)?;
                    let mut l = lba_to_lca(&start, &shares)?;
                    let mut trace = vec![log_likelihood(counts, &l.product())];
                    let mut flags = vec![FitFlag::NonConvergence];
                    for _ in 0..cfg.max_iter {
                        l = lca_step(counts, &l, cfg.beta)?;
                        let ll = log_likelihood(counts, &l.product());
                        let prev = *trace.last().unwrap();
                        trace.push(ll);
                        if converged(prev - offset, ll - offset, cfg.tol) {
                            flags.clear();
                            break;
                        }
                    }
                    let score = -*trace.last().unwrap();
                    Ok(Run {
                        factorization: l,
                        trace,
                        flags,
                        score,
                    })
                },
            )?;
            Ok(fit.map(Factorization::Lca))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::CompositionMatrix;

    fn two_class() -> LcaFactorization {
        let a = Matrix::from_rows(&[[0.5, 0.5], [0.5, 0.5]]).unwrap();
        let b = CompositionMatrix::new(Matrix::from_rows(&[[0.8, 0.2], [0.2, 0.8]]).unwrap()).unwrap();
        LcaFactorization::new(a, vec![0.5, 0.5], b).unwrap()
    }

    #[test]
    fn tempered_posterior_hand_value() {
        let counts = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let r = tempered_estep(&two_class(), &counts, 0.5).unwrap();
        let expect = 0.8f64.sqrt() / (0.8f64.sqrt() + 0.2f64.sqrt());
        assert!((r.get(0, 0, 0) - expect).abs() < 1e-12);
        assert!((expect - 2.0 / 3.0).abs() < 1e-12);
        let r1 = tempered_estep(&two_class(), &counts, 1.0).unwrap();
        assert!((r1.get(0, 0, 0) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn identical_classes_give_uniform_weights() {
        let a = Matrix::from_rows(&[[0.3, 0.3], [0.7, 0.7]]).unwrap();
        let b = CompositionMatrix::new(Matrix::from_rows(&[[0.4, 0.6], [0.4, 0.6]]).unwrap()).unwrap();
        let l = LcaFactorization::new(a, vec![0.5, 0.5], b).unwrap();
        let counts = Matrix::from_rows(&[[2.0, 1.0], [1.0, 3.0]]).unwrap();
        for beta in [0.1, 0.5, 1.0] {
            let r = tempered_estep(&l, &counts, beta).unwrap();
            assert!((r.get(1, 0, 0) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_weight_stays_zero() {
        let a = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]).unwrap();
        let b = CompositionMatrix::new(Matrix::from_rows(&[[0.5, 0.5], [0.5, 0.5]]).unwrap()).unwrap();
        let l = LcaFactorization::new(a, vec![0.5, 0.5], b).unwrap();
        let counts = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        for beta in [0.2, 1.0] {
            assert_eq!(tempered_estep(&l, &counts, beta).unwrap().get(0, 0, 1), 0.0);
        }
    }

    #[test]
    fn rejects_beta_out_of_range() {
        let counts = Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        let mut cfg = PlsaConfig::new(1, PlsaForm::Asymmetric);
        cfg.beta = 0.0;
        assert!(fit_plsa(&counts, &cfg).is_err());
        cfg.beta = 1.5;
        assert!(fit_plsa(&counts, &cfg).is_err());
    }
}
