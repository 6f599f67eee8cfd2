//! Cones, simplices and ternary coordinates for compositional data.

use crate::error::{Error, Result};
use crate::linalg::det;
use crate::matrix::{CompositionMatrix, Matrix};
use crate::simplex::{nnls, simplex_ls};

pub const MEMBERSHIP_TOL: f64 = 1e-8;

fn max_abs_residual(u: &Matrix, r: &[f64], point: &[f64]) -> f64 {
    u.mul_vec(r)
        .iter()
        .zip(point)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Nonnegative weights `r` with `U r = point` (to `tol` in max-norm), if
/// `point` lies in the cone generated by the columns of `u`.
pub fn cone_membership(u: &Matrix, point: &[f64], tol: f64) -> Option<Vec<f64>> {
    if point.len() != u.rows() {
        return None;
    }
    let r = nnls(u, point).ok()?;
    (max_abs_residual(u, &r, point) <= tol).then_some(r)
}

/// Convex weights `r` (nonnegative, summing to one) with `U r = point`, if
/// `point` lies in the convex hull of the columns of `u`.
pub fn hull_membership(u: &Matrix, point: &[f64], tol: f64) -> Option<Vec<f64>> {
    if point.len() != u.rows() {
        return None;
    }
    let ones = vec![1.0; u.rows()];
    let r = simplex_ls(point, &u.transpose(), &ones).ok()?;
    (max_abs_residual(u, &r, point) <= tol).then_some(r)
}

/// `det(G G^T)`. The volume of the simplex spanned by the origin and the
/// rows of `g` is `sqrt` of this over `K!`.
pub fn simplex_volume_sq(g: &Matrix) -> f64 {
    det(&g.matmul_t(g))
}

/// Column means of `w`: the average weight of each latent component.
pub fn average_contribution(w: &CompositionMatrix) -> Vec<f64> {
    let n = w.rows() as f64;
    w.col_sums().into_iter().map(|s| s / n).collect()
}

/// `(D_z G) diag(1^T D_z G)^{-1}`: each column of the basis reweighted by
/// the average contributions and normalized to sum to one.
pub fn rescaled_basis(g: &Matrix, z: &[f64]) -> Result<Matrix> {
    if z.len() != g.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} basis rows",
            z.len(),
            g.rows()
        )));
    }
    let scaled = g.scale_rows(z);
    let sums = scaled.col_sums();
    if let Some(col) = sums.iter().position(|s| !(*s > 0.0)) {
        return Err(Error::ZeroColumn { col });
    }
    let inv: Vec<f64> = sums.iter().map(|s| 1.0 / s).collect();
    Ok(scaled.scale_cols(&inv))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TernaryPoint {
    pub label: String,
    pub coords: [f64; 3],
    pub planar: [f64; 2],
}

impl TernaryPoint {
    pub fn new(label: impl Into<String>, coords: [f64; 3]) -> Result<Self> {
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > 1e-10 || coords.iter().any(|c| *c < -1e-10) {
            return Err(Error::NotComposition { row: 0, sum });
        }
        Ok(Self {
            label: label.into(),
            coords,
            planar: planar(coords),
        })
    }
}

/// Equilateral embedding with corners (0, 0), (1, 0), (1/2, sqrt(3)/2).
pub fn planar(c: [f64; 3]) -> [f64; 2] {
    [c[1] + c[2] / 2.0, c[2] * 3f64.sqrt() / 2.0]
}

/// Rows of a three-column composition as labeled ternary points.
pub fn ternary_rows(m: &Matrix, labels: &[String]) -> Result<Vec<TernaryPoint>> {
    if m.cols() != 3 {
        return Err(Error::UnsupportedK { k: m.cols() });
    }
    if labels.len() != m.rows() {
        return Err(Error::DimensionMismatch("one label per row needed".into()));
    }
    (0..m.rows())
        .map(|i| TernaryPoint::new(labels[i].clone(), [m[(i, 0)], m[(i, 1)], m[(i, 2)]]))
        .collect()
}

/// Columns of a rescaled `3 x J` basis as labeled ternary points.
pub fn ternary_columns(gres: &Matrix, labels: &[String]) -> Result<Vec<TernaryPoint>> {
    if gres.rows() != 3 {
        return Err(Error::UnsupportedK { k: gres.rows() });
    }
    ternary_rows(&gres.transpose(), labels)
}
