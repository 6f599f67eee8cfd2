//! Small dense linear algebra: one-sided Jacobi SVD, LU solves and
//! determinants. Everything here is deterministic and dependency free.

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};

/// Off-diagonal tolerance for the Jacobi sweeps.
const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Thin SVD `A = U diag(s) V^T` with `s` sorted descending.
///
/// `u` is `rows x r`, `v` is `cols x r` with `r = min(rows, cols)`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

pub fn svd(a: &Matrix) -> Svd {
    if a.rows() >= a.cols() {
        jacobi_tall(a)
    } else {
        let t = jacobi_tall(&a.transpose());
        Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        }
    }
}

/// Hestenes one-sided Jacobi for `rows >= cols`.
fn jacobi_tall(a: &Matrix) -> Svd {
    let (m, n) = a.shape();
    // Work on columns stored contiguously.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.col(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= JACOBI_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (lo, hi) = cols.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s);
                let (lo, hi) = v.split_at_mut(q);
                rotate(&mut lo[p], &mut hi[0], c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<(usize, f64)> = cols
        .iter()
        .enumerate()
        .map(|(j, c)| (j, dot(c, c).sqrt()))
        .collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut u = Matrix::zeros(m, n);
    let mut vm = Matrix::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (dst, &(j, norm)) in order.iter().enumerate() {
        s.push(norm);
        for i in 0..m {
            u[(i, dst)] = if norm > 0.0 { cols[j][i] / norm } else { 0.0 };
        }
        for i in 0..n {
            vm[(i, dst)] = v[j][i];
        }
    }
    Svd { u, s, v: vm }
}

fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (xa, yb) = (*a, *b);
        *a = c * xa - s * yb;
        *b = s * xa + c * yb;
    }
}

/// Best rank-`k` Frobenius factorization `x ~ left * right` with
/// `left = U_k S_k` (`rows x k`) and `right = V_k^T` (`k x cols`).
pub fn svd_truncate(x: &Matrix, k: usize) -> Result<(Matrix, Matrix)> {
    let max = x.rows().min(x.cols());
    if k == 0 || k > max {
        return Err(Error::RankOutOfRange { k, max });
    }
    let d = svd(x);
    let left = Matrix::from_fn(x.rows(), k, |i, j| d.u[(i, j)] * d.s[j]);
    let right = Matrix::from_fn(k, x.cols(), |i, j| d.v[(j, i)]);
    Ok((left, right))
}

/// Number of singular values above `rel_tol * s_max`.
pub fn numerical_rank(a: &Matrix, rel_tol: f64) -> usize {
    let s = svd(a).s;
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel_tol * top).count()
}

/// LU decomposition with partial pivoting of a square matrix.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
}

impl Lu {
    pub fn new(a: &Matrix) -> Self {
        let n = a.rows();
        assert_eq!(n, a.cols(), "LU of a non-square matrix");
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let scale = a.as_slice().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let mut singular = scale == 0.0;
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pv <= 1e-300 || pv <= f64::EPSILON * 1e-3 * scale {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        let t = lu[(k, j)];
                        lu[(i, j)] -= f * t;
                    }
                }
            }
        }
        Self {
            lu,
            perm,
            sign,
            singular,
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> f64 {
        if self.singular {
            return 0.0;
        }
        (0..self.lu.rows()).fold(self.sign, |d, i| d * self.lu[(i, i)])
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if self.singular {
            return Err(Error::Singular);
        }
        let n = self.lu.rows();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.lu.rows();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e)?;
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }
}

pub fn det(a: &Matrix) -> f64 {
    Lu::new(a).det()
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    Lu::new(a).inverse()
}

pub fn solve(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    Lu::new(a).solve(b)
}

/// Cholesky factor `L` of a symmetric positive definite matrix, or `None`
/// when a pivot is not positive.
pub fn cholesky(a: &Matrix) -> Option<Matrix> {
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Some(l)
}

/// `log det(A)` for symmetric positive definite `A`.
pub fn logdet_spd(a: &Matrix) -> Option<f64> {
    cholesky(a).map(|l| (0..l.rows()).map(|i| 2.0 * l[(i, i)].ln()).sum())
}

/// Moore-Penrose pseudo-inverse through the SVD.
pub fn pinv(a: &Matrix, rel_tol: f64) -> Matrix {
    let d = svd(a);
    let top = d.s.first().copied().unwrap_or(0.0);
    let r = d.s.len();
    Matrix::from_fn(a.cols(), a.rows(), |i, j| {
        (0..r)
            .filter(|&k| d.s[k] > rel_tol * top)
            .map(|k| d.v[(i, k)] * d.u[(j, k)] / d.s[k])
            .sum()
    })
}
