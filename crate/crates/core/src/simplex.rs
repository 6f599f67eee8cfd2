//! Least squares over the unit simplex and the nonnegative orthant.

use crate::error::{Error, Result};
use crate::linalg::Lu;
use crate::matrix::{dot, Matrix};

/// Euclidean projection of `v` onto `{x >= 0, sum(x) = 1}`.
///
/// Sort-based threshold search (Held-Wolfe-Crowder, as refined by Condat).
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumsum += ui;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

/// Projects each row of `m` onto the simplex in place.
pub fn project_rows_to_simplex(m: &mut Matrix) {
    for i in 0..m.rows() {
        let p = project_to_simplex(m.row(i));
        m.row_mut(i).copy_from_slice(&p);
    }
}

/// Minimizes `sum_j w_j (target_j - (c . basis)_j)^2` over the unit simplex.
///
/// `basis` is `k x J`; the result has length `k`.
pub fn simplex_ls(target: &[f64], basis: &Matrix, weights: &[f64]) -> Result<Vec<f64>> {
    let (k, j) = basis.shape();
    if target.len() != j || weights.len() != j {
        return Err(Error::DimensionMismatch(format!(
            "target {} / weights {} against basis with {j} columns",
            target.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
        return Err(Error::InvalidConfig("weights must be nonnegative".into()));
    }
    let (q_mat, lin) = normal_equations(target, basis, weights);
    let c = simplex_qp(&q_mat, &lin)?;
    debug_assert_eq!(c.len(), k);
    Ok(c)
}

/// `Q = B W B^T` and `q = B W t` for the weighted simplex least squares.
pub fn normal_equations(target: &[f64], basis: &Matrix, weights: &[f64]) -> (Matrix, Vec<f64>) {
    let k = basis.rows();
    let mut q_mat = Matrix::zeros(k, k);
    let mut lin = vec![0.0; k];
    for a in 0..k {
        let ra = basis.row(a);
        lin[a] = ra
            .iter()
            .zip(target)
            .zip(weights)
            .map(|((b, t), w)| b * t * w)
            .sum();
        for b in a..k {
            let rb = basis.row(b);
            let v: f64 = ra.iter().zip(rb).zip(weights).map(|((x, y), w)| x * y * w).sum();
            q_mat[(a, b)] = v;
            q_mat[(b, a)] = v;
        }
    }
    (q_mat, lin)
}

/// Primal active-set solve of `min 1/2 x^T Q x - lin^T x` over the unit
/// simplex. `Q` must be symmetric positive semidefinite.
pub fn simplex_qp(q_mat: &Matrix, lin: &[f64]) -> Result<Vec<f64>> {
    let k = lin.len();
    if k == 1 {
        return Ok(vec![1.0]);
    }
    let scale = q_mat
        .as_slice()
        .iter()
        .chain(lin)
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    let mu_tol = 1e-13 * scale;

    // Start from the best vertex.
    let start = (0..k)
        .map(|i| (i, 0.5 * q_mat[(i, i)] - lin[i]))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc })
        .0;
    let mut x = vec![0.0; k];
    x[start] = 1.0;
    let mut free = vec![false; k];
    free[start] = true;

    let max_pivots = 10 * k.max(3);
    for _ in 0..max_pivots {
        let idx: Vec<usize> = (0..k).filter(|&i| free[i]).collect();
        let (target, nu) = equality_qp(q_mat, lin, &idx, scale)?;
        let step: Vec<f64> = idx.iter().zip(&target).map(|(&i, t)| t - x[i]).collect();
        let step_norm = step.iter().fold(0.0_f64, |m, v| m.max(v.abs()));

        if step_norm <= 1e-15 {
            // Stationary on the free face: check multipliers of fixed zeros.
            let grad = gradient(q_mat, lin, &x);
            let nu = if idx.is_empty() { nu } else { -idx.iter().map(|&i| grad[i]).sum::<f64>() / idx.len() as f64 };
            let entering = (0..k)
                .filter(|&i| !free[i])
                .map(|i| (i, grad[i] + nu))
                .fold(None::<(usize, f64)>, |acc, cur| match acc {
                    Some(a) if a.1 <= cur.1 => Some(a),
                    _ => Some(cur),
                });
            match entering {
                Some((i, mu)) if mu < -mu_tol => free[i] = true,
                _ => return Ok(finish(x)),
            }
            continue;
        }

        let mut alpha = 1.0;
        let mut blocking = None;
        for (p, &i) in idx.iter().enumerate() {
            if step[p] < 0.0 {
                let ratio = -x[i] / step[p];
                if ratio < alpha {
                    alpha = ratio;
                    blocking = Some(i);
                }
            }
        }
        for (p, &i) in idx.iter().enumerate() {
            x[i] += alpha * step[p];
        }
        if let Some(b) = blocking {
            x[b] = 0.0;
            free[b] = false;
        }
    }
    // Pivot budget exhausted: the iterate is feasible, accept it if KKT holds
    // approximately.
    let x = finish(x);
    if qp_kkt_residual(q_mat, lin, &x) > 1e-6 * scale {
        return Err(Error::DegenerateBasis(
            "active set did not reach a KKT point".into(),
        ));
    }
    Ok(x)
}

fn finish(mut x: Vec<f64>) -> Vec<f64> {
    for v in &mut x {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    x
}

fn gradient(q_mat: &Matrix, lin: &[f64], x: &[f64]) -> Vec<f64> {
    (0..lin.len())
        .map(|i| dot(q_mat.row(i), x) - lin[i])
        .collect()
}

/// Solves the equality-constrained subproblem on the index set `idx`.
/// Returns the minimizer restricted to `idx` and the multiplier of the
/// sum constraint.
fn equality_qp(q_mat: &Matrix, lin: &[f64], idx: &[usize], scale: f64) -> Result<(Vec<f64>, f64)> {
    let n = idx.len();
    let mut ridge = 0.0;
    for attempt in 0..6 {
        let mut a = Matrix::zeros(n + 1, n + 1);
        let mut rhs = vec![0.0; n + 1];
        for (p, &i) in idx.iter().enumerate() {
            for (r, &j) in idx.iter().enumerate() {
                a[(p, r)] = q_mat[(i, j)];
            }
            a[(p, p)] += ridge;
            a[(p, n)] = 1.0;
            a[(n, p)] = 1.0;
            rhs[p] = lin[i];
        }
        rhs[n] = 1.0;
        if let Ok(sol) = Lu::new(&a).solve(&rhs) {
            // Huge coordinates mean the face is numerically degenerate.
            if sol.iter().all(|v| v.is_finite()) && sol[..n].iter().all(|v| v.abs() < 1e8) {
                return Ok((sol[..n].to_vec(), sol[n]));
            }
        }
        ridge = scale * 1e-14 * 100f64.powi(attempt);
    }
    Err(Error::DegenerateBasis(
        "reduced Hessian is singular on the free face".into(),
    ))
}

/// Largest KKT violation of `c` for `min 1/2 x^T Q x - lin^T x` on the simplex.
pub fn qp_kkt_residual(q_mat: &Matrix, lin: &[f64], c: &[f64]) -> f64 {
    let grad = gradient(q_mat, lin, c);
    let support: Vec<usize> = (0..c.len()).filter(|&i| c[i] > 0.0).collect();
    if support.is_empty() {
        return f64::INFINITY;
    }
    let nu = -support.iter().map(|&i| grad[i]).sum::<f64>() / support.len() as f64;
    let mut worst = (c.iter().sum::<f64>() - 1.0).abs();
    for i in 0..c.len() {
        let mu = grad[i] + nu;
        let v = if c[i] > 0.0 { mu.abs() } else { (-mu).max(0.0) };
        worst = worst.max(v).max((-c[i]).max(0.0));
    }
    worst
}

/// KKT residual of a candidate solution of [`simplex_ls`] (gradient scale,
/// i.e. the objective's half-gradient).
pub fn simplex_ls_kkt_residual(target: &[f64], basis: &Matrix, weights: &[f64], c: &[f64]) -> f64 {
    let (q_mat, lin) = normal_equations(target, basis, weights);
    qp_kkt_residual(&q_mat, &lin, c)
}

/// Least-squares coefficients of each row of `targets` on the rows of
/// `basis` under the single constraint that coefficients sum to one.
/// Coefficients may be negative.
pub fn affine_ls(targets: &Matrix, basis: &Matrix) -> Result<Matrix> {
    let k = basis.rows();
    if targets.cols() != basis.cols() {
        return Err(Error::DimensionMismatch(format!(
            "targets have {} columns, basis {}",
            targets.cols(),
            basis.cols()
        )));
    }
    let gram = basis.matmul_t(basis);
    let mut kkt = Matrix::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in 0..k {
            kkt[(a, b)] = gram[(a, b)];
        }
        kkt[(a, k)] = 1.0;
        kkt[(k, a)] = 1.0;
    }
    let lu = Lu::new(&kkt);
    if lu.is_singular() {
        return Err(Error::DegenerateBasis("basis rows are affinely dependent".into()));
    }
    let cross = targets.matmul_t(basis);
    let mut out = Matrix::zeros(targets.rows(), k);
    let mut rhs = vec![0.0; k + 1];
    for i in 0..targets.rows() {
        rhs[..k].copy_from_slice(cross.row(i));
        rhs[k] = 1.0;
        let sol = lu.solve(&rhs)?;
        out.row_mut(i).copy_from_slice(&sol[..k]);
    }
    Ok(out)
}

/// Nonnegative least squares `min ||A x - b||` subject to `x >= 0`
/// (Lawson-Hanson active set on the normal equations).
pub fn nnls(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "rhs of length {} for a {m}x{n} system",
            b.len()
        )));
    }
    let ata = a.t_matmul(a);
    let atb: Vec<f64> = (0..n).map(|j| (0..m).map(|i| a[(i, j)] * b[i]).sum()).collect();
    nnls_normal(&ata, &atb)
}

/// NNLS given `A^T A` and `A^T b` directly.
pub fn nnls_normal(ata: &Matrix, atb: &[f64]) -> Result<Vec<f64>> {
    let n = atb.len();
    let scale = ata
        .as_slice()
        .iter()
        .chain(atb)
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    let tol = 1e-13 * scale;
    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    let gradient = |x: &[f64]| -> Vec<f64> {
        (0..n).map(|i| atb[i] - dot(ata.row(i), x)).collect()
    };
    let mut w = gradient(&x);
    let mut outer = 0;
    while outer < 3 * n + 3 {
        outer += 1;
        let entering = (0..n)
            .filter(|&j| !passive[j])
            .fold(None::<(usize, f64)>, |acc, j| match acc {
                Some(a) if a.1 >= w[j] => Some(a),
                _ => Some((j, w[j])),
            });
        match entering {
            Some((j, wj)) if wj > tol => passive[j] = true,
            _ => break,
        }
        loop {
            let idx: Vec<usize> = (0..n).filter(|&i| passive[i]).collect();
            let s = solve_sub(ata, atb, &idx, scale)?;
            if s.iter().all(|&v| v > 0.0) {
                for (p, &i) in idx.iter().enumerate() {
                    x[i] = s[p];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (p, &i) in idx.iter().enumerate() {
                if s[p] <= 0.0 {
                    let denom = x[i] - s[p];
                    let r = if denom > 0.0 { x[i] / denom } else { 0.0 };
                    alpha = alpha.min(r);
                }
            }
            for (p, &i) in idx.iter().enumerate() {
                x[i] += alpha * (s[p] - x[i]);
                if x[i] <= tol.max(1e-300) {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
        w = gradient(&x);
    }
    Ok(x)
}

fn solve_sub(ata: &Matrix, atb: &[f64], idx: &[usize], scale: f64) -> Result<Vec<f64>> {
    let n = idx.len();
    let mut ridge = 0.0;
    for attempt in 0..6 {
        let a = Matrix::from_fn(n, n, |p, r| {
            ata[(idx[p], idx[r])] + if p == r { ridge } else { 0.0 }
        });
        let rhs: Vec<f64> = idx.iter().map(|&i| atb[i]).collect();
        if let Ok(s) = Lu::new(&a).solve(&rhs) {
            if s.iter().all(|v| v.is_finite()) {
                return Ok(s);
            }
        }
        ridge = scale * 1e-14 * 100f64.powi(attempt);
    }
    Err(Error::Singular)
}
