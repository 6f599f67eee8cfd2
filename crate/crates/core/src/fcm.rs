//! Fuzzy c-means clustering.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

#[derive(Clone, Debug)]
pub struct FcmConfig {
    pub fuzzifier: f64,
    pub max_iter: usize,
    /// Stop once no center moves by more than this (max-abs).
    pub tol: f64,
    pub seed: u64,
}

impl Default for FcmConfig {
    fn default() -> Self {
        Self {
            fuzzifier: 2.0,
            max_iter: 500,
            tol: 1e-9,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FcmResult {
    pub centers: Matrix,
    /// `rows x k`, each row sums to one.
    pub memberships: Matrix,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    /// Number of times an empty cluster was re-seeded.
    pub reseeds: usize,
}

/// Centers of a fuzzy c-means clustering of the rows of `data`.
pub fn fuzzy_cmeans(data: &Matrix, k: usize, fuzzifier: f64, seed: u64) -> Result<Matrix> {
    let cfg = FcmConfig {
        fuzzifier,
        seed,
        ..FcmConfig::default()
    };
    Ok(fuzzy_cmeans_with(data, k, &cfg)?.centers)
}

pub fn fuzzy_cmeans_with(data: &Matrix, k: usize, cfg: &FcmConfig) -> Result<FcmResult> {
    let n = data.rows();
    if k == 0 || k > n {
        return Err(Error::RankOutOfRange { k, max: n });
    }
    if !(cfg.fuzzifier > 1.0) || !cfg.fuzzifier.is_finite() {
        return Err(Error::InvalidConfig("fuzzifier must exceed 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut centers = seed_centers(data, k, &mut rng);
    let mut u = memberships(data, &centers, cfg.fuzzifier);
    let mut trace = vec![objective(data, &centers, &u, cfg.fuzzifier)];
    let mut reseeds = 0;
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        iterations += 1;
        let mut next = Matrix::zeros(k, data.cols());
        for c in 0..k {
            let mut mass = 0.0;
            for i in 0..n {
                let w = u[(i, c)].powf(cfg.fuzzifier);
                mass += w;
                for (acc, x) in next.row_mut(c).iter_mut().zip(data.row(i)) {
                    *acc += w * x;
                }
            }
            if mass > 1e-300 {
                next.row_mut(c).iter_mut().for_each(|v| *v /= mass);
            } else {
                // Empty cluster: restart it at the worst-represented row.
                let worst = worst_row(data, &centers);
                next.row_mut(c).copy_from_slice(data.row(worst));
                reseeds += 1;
            }
        }
        let moved = next.max_abs_diff(&centers);
        centers = next;
        u = memberships(data, &centers, cfg.fuzzifier);
        trace.push(objective(data, &centers, &u, cfg.fuzzifier));
        if moved < cfg.tol {
            break;
        }
    }
    Ok(FcmResult {
        centers,
        memberships: u,
        objective_trace: trace,
        iterations,
        reseeds,
    })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

// k-means++ style seeding so duplicated rows do not collapse two centers.
fn seed_centers(data: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let n = data.rows();
    let mut picked = vec![rng.random_range(0..n)];
    while picked.len() < k {
        let d: Vec<f64> = (0..n)
            .map(|i| {
                picked
                    .iter()
                    .map(|&p| sq_dist(data.row(i), data.row(p)))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = d.iter().sum();
        let next = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut choice = n - 1;
            for (i, di) in d.iter().enumerate() {
                if *di > 0.0 && r < *di {
                    choice = i;
                    break;
                }
                r -= di;
            }
            if d[choice] == 0.0 {
                d.iter()
                    .enumerate()
                    .fold((0, -1.0), |a, (i, &v)| if v > a.1 { (i, v) } else { a })
                    .0
            } else {
                choice
            }
        } else {
            let free: Vec<usize> = (0..n).filter(|i| !picked.contains(i)).collect();
            free[rng.random_range(0..free.len())]
        };
        picked.push(next);
    }
    data.select_rows(&picked)
}

fn memberships(data: &Matrix, centers: &Matrix, m: f64) -> Matrix {
    let (n, k) = (data.rows(), centers.rows());
    let expo = 1.0 / (m - 1.0);
    let mut u = Matrix::zeros(n, k);
    for i in 0..n {
        let d: Vec<f64> = (0..k).map(|c| sq_dist(data.row(i), centers.row(c))).collect();
        let zeros = d.iter().filter(|&&v| v == 0.0).count();
        if zeros > 0 {
            for c in 0..k {
                u[(i, c)] = if d[c] == 0.0 { 1.0 / zeros as f64 } else { 0.0 };
            }
            continue;
        }
        for c in 0..k {
            let s: f64 = d.iter().map(|dl| (d[c] / dl).powf(expo)).sum();
            u[(i, c)] = 1.0 / s;
        }
    }
    u
}

fn objective(data: &Matrix, centers: &Matrix, u: &Matrix, m: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..data.rows() {
        for c in 0..centers.rows() {
            total += u[(i, c)].powf(m) * sq_dist(data.row(i), centers.row(c));
        }
    }
    total
}

fn worst_row(data: &Matrix, centers: &Matrix) -> usize {
    (0..data.rows())
        .map(|i| {
            let d = (0..centers.rows())
                .map(|c| sq_dist(data.row(i), centers.row(c)))
                .fold(f64::INFINITY, f64::min);
            (i, d)
        })
        .fold((0, -1.0), |a, x| if x.1 > a.1 { x } else { a })
        .0
}
