use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use simplexfactor::ema::{emma_fit, goodness, EmmaConfig};
use simplexfactor::io::bundled;
use simplexfactor::lba::{fit_lba_cwls, fit_lba_em, log_likelihood, LbaConfig};
use simplexfactor::matrix::row_normalize;
use simplexfactor::nmf::{fit_frobenius, fit_minvol, fit_separable, NmfConfig};
use simplexfactor::plsa::{fit_plsa, PlsaConfig, PlsaForm};
use simplexfactor::{Error, Factorization, FitFlag, Matrix};

fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(0.1..1.0))
}

fn stochastic(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let m = random_matrix(rows, cols, rng);
    let inv: Vec<f64> = m.row_sums().iter().map(|s| 1.0 / s).collect();
    m.scale_rows(&inv)
}

fn non_decreasing(trace: &[f64]) -> bool {
    trace.windows(2).all(|w| w[1] >= w[0] - 1e-9 * w[0].abs().max(1.0))
}

fn non_increasing(trace: &[f64]) -> bool {
    trace.windows(2).all(|w| w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0))
}

#[test]
fn frobenius_nmf_fits_exact_low_rank_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = random_matrix(8, 2, &mut rng).matmul(&random_matrix(2, 6, &mut rng));
    let mut cfg = NmfConfig::frobenius(2);
    cfg.restarts = 5;
    let fit = fit_frobenius(&x, &cfg).unwrap();
    assert!(fit.residual.frobenius() < 1e-4 * x.frobenius(), "{}", fit.residual.frobenius());
    assert!(non_increasing(&fit.objective_trace));
    assert_eq!(fit.restart_objectives.len(), 5);
}

#[test]
fn fixed_seed_gives_identical_fits() {
    let x = bundled("education-readership").unwrap().counts;
    let mut cfg = NmfConfig::frobenius(2);
    cfg.seed = 42;
    cfg.restarts = 3;
    let a = fit_frobenius(&x, &cfg).unwrap();
    let b = fit_frobenius(&x, &cfg).unwrap();
    assert_eq!(a.factorization, b.factorization);
    assert_eq!(a.objective_trace, b.objective_trace);
}

#[test]
fn separable_nmf_picks_the_pure_rows() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h = random_matrix(3, 7, &mut rng);
    let mut m = stochastic(9, 3, &mut rng);
    for k in 0..3 {
        let row = m.row_mut(2 * k + 1);
        row.fill(0.0);
        row[k] = 1.0;
    }
    let x = m.matmul(&h);
    let fit = fit_separable(&x, 3).unwrap();
    let mut sel = fit.selected.clone();
    sel.sort_unstable();
    assert_eq!(sel, vec![1, 3, 5]);
    assert!(fit.fit.residual.frobenius() < 1e-9);
}

#[test]
fn minvol_keeps_coefficients_stochastic() {
    let x = bundled("time-budget").unwrap().counts;
    let mut cfg = NmfConfig::minvol(3);
    cfg.restarts = 2;
    let fit = fit_minvol(&x, &cfg).unwrap();
    for s in fit.fit.factorization.m().row_sums() {
        assert!((s - 1.0).abs() < 1e-9);
    }
    assert!(fit.lambda > 0.0);
    assert!(fit.fit.factorization.product().max_abs_diff(&x.sub(&fit.fit.residual)) < 1e-6);
}

#[test]
fn single_component_budget_is_the_column_margin() {
    let x = bundled("health-gender").unwrap().counts;
    let margin: Vec<f64> = x.col_sums().iter().map(|c| c / x.sum()).collect();
    let em = fit_lba_em(&x, &LbaConfig::em(1)).unwrap();
    for (g, m) in em.factorization.g().row(0).iter().zip(&margin) {
        assert!((g - m).abs() < 1e-9);
    }
    let (p, _) = row_normalize(&x).unwrap();
    let cwls = fit_lba_cwls(&p, &LbaConfig::cwls(1)).unwrap();
    let mean: Vec<f64> = p.col_sums().iter().map(|c| c / p.rows() as f64).collect();
    for (g, m) in cwls.factorization.g().row(0).iter().zip(&mean) {
        assert!((g - m).abs() < 1e-9);
    }
}

#[test]
fn lba_em_likelihood_increases() {
    let x = bundled("time-budget").unwrap().counts;
    let mut cfg = LbaConfig::em(3);
    cfg.restarts = 2;
    let fit = fit_lba_em(&x, &cfg).unwrap();
    assert!(non_decreasing(&fit.objective_trace));
    let ll = log_likelihood(&x, &fit.factorization.product());
    assert!((ll - fit.objective()).abs() < 1e-6 * ll.abs());
}

#[test]
fn cwls_residual_decreases() {
    let x = bundled("education-readership").unwrap().counts;
    let (p, _) = row_normalize(&x).unwrap();
    let mut cfg = LbaConfig::cwls(2);
    cfg.restarts = 3;
    let fit = fit_lba_cwls(&p, &cfg).unwrap();
    assert!(non_increasing(&fit.objective_trace));
    assert!(fit.residual.frobenius_sq() <= fit.objective_trace[0]);
}

#[test]
fn asymmetric_plsa_matches_lba_em() {
    let x = bundled("education-readership").unwrap().counts;
    let mut lba = LbaConfig::em(2);
    lba.restarts = 5;
    let mut plsa = PlsaConfig::new(2, PlsaForm::Asymmetric);
    plsa.restarts = 5;
    let a = fit_lba_em(&x, &lba).unwrap();
    let b = fit_plsa(&x, &plsa).unwrap();
    assert!((a.objective() - b.objective()).abs() < 1e-6 * a.objective().abs());
    assert!(matches!(b.factorization, Factorization::Budget(_)));
}

#[test]
fn symmetric_plsa_returns_a_joint_model() {
    let x = bundled("education-readership").unwrap().counts;
    let mut cfg = PlsaConfig::new(2, PlsaForm::Symmetric);
    cfg.restarts = 3;
    let fit = fit_plsa(&x, &cfg).unwrap();
    let Factorization::Lca(l) = &fit.factorization else {
        panic!("expected an LCA factorization");
    };
    assert!((l.product().sum() - 1.0).abs() < 1e-9);
    assert!(non_decreasing(&fit.objective_trace));
}

#[test]
fn tempered_plsa_runs_below_one() {
    let x = bundled("health-gender").unwrap().counts;
    let mut cfg = PlsaConfig::new(2, PlsaForm::Asymmetric);
    cfg.beta = 0.8;
    cfg.restarts = 2;
    let fit = fit_plsa(&x, &cfg).unwrap();
    assert!(fit.objective().is_finite());
    cfg.beta = 1.5;
    assert!(matches!(fit_plsa(&x, &cfg), Err(Error::InvalidConfig(_))));
}

#[test]
fn emma_encloses_the_data() {
    let x = bundled("time-budget").unwrap().counts;
    let (p, _) = row_normalize(&x).unwrap();
    let mut cfg = EmmaConfig::new(3);
    cfg.restarts = 3;
    let fit = emma_fit(&p, &cfg).unwrap();
    let b = &fit.factorization;
    assert!(b.w().min() >= 0.0 && b.g().min() >= 0.0);
    let good = goodness(p.matrix(), &b.product());
    let mut ls = LbaConfig::cwls(3);
    ls.restarts = 5;
    let best = fit_lba_cwls(&p, &ls).unwrap().residual.frobenius();
    assert!(good.frobenius >= best - 1e-6, "{} < {best}", good.frobenius);
    assert!(good.column_r2.iter().all(|r| *r <= 1.0));
    assert!(!fit.flags.contains(&FitFlag::ExpansionStall));
}

#[test]
fn rank_and_zero_checks() {
    let x = bundled("health-gender").unwrap().counts;
    assert!(matches!(
        fit_lba_em(&x, &LbaConfig::em(3)),
        Err(Error::RankOutOfRange { k: 3, max: 2 })
    ));
    assert!(matches!(
        fit_frobenius(&x, &NmfConfig::frobenius(0)),
        Err(Error::RankOutOfRange { .. })
    ));
    let mut bad = x.clone();
    bad.row_mut(0)[0] = -1.0;
    assert!(fit_frobenius(&bad, &NmfConfig::frobenius(1)).is_err());
    assert!(row_normalize(&Matrix::zeros(2, 2)).is_err());
}
