//! Component matching between factorizations.

use crate::matrix::{dot, Matrix};

/// Minimum-cost assignment (Hungarian method). Returns `perm` with row `i`
/// assigned to column `perm[i]`. `cost` must be square.
pub fn hungarian(cost: &Matrix) -> Vec<usize> {
    let n = cost.rows();
    assert_eq!(n, cost.cols(), "assignment needs a square cost matrix");
    // Potentials formulation, 1-based with a sentinel column 0.
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1, j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0; n];
    for j in 1..=n {
        if p[j] > 0 {
            perm[p[j] - 1] = j - 1;
        }
    }
    perm
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot(a, b) / (na * nb)
}

/// Permutation `perm` maximizing `sum_k cos(reference_k, candidate_perm[k])`
/// over the rows of two `K x J` matrices.
pub fn match_rows_by_cosine(reference: &Matrix, candidate: &Matrix) -> Vec<usize> {
    let k = reference.rows();
    let cost = Matrix::from_fn(k, k, |a, b| 1.0 - cosine(reference.row(a), candidate.row(b)));
    hungarian(&cost)
}

/// Rows of `m` reordered so that row `k` of the result is row `perm[k]`.
pub fn permute_rows(m: &Matrix, perm: &[usize]) -> Matrix {
    m.select_rows(perm)
}

/// Columns of `m` reordered so that column `k` of the result is column `perm[k]`.
pub fn permute_cols(m: &Matrix, perm: &[usize]) -> Matrix {
    m.select_cols(perm)
}
