//! Dense row-major matrices and the three normalizations the models work
//! with: raw nonnegative data, row-stochastic compositions and joint
//! probability tables.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Row-sum tolerance for values produced in-process.
pub const COMPOSITION_TOL: f64 = 1e-12;
/// Row-sum tolerance for values read from user files (printed with rounding).
pub const INGEST_TOL: f64 = 1e-8;

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            if row.as_ref().len() != c {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {c}",
                    row.as_ref().len()
                )));
            }
            data.extend_from_slice(row.as_ref());
        }
        Self::new(r, c, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Matrix product. Panics on inner-dimension mismatch.
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let a = self.row(i);
            let o = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (p, &aip) in a.iter().enumerate() {
                if aip == 0.0 {
                    continue;
                }
                for (oj, bj) in o.iter_mut().zip(other.row(p)) {
                    *oj += aip * bj;
                }
            }
        }
        out
    }

    /// `self * other^T` without materializing the transpose.
    pub fn matmul_t(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols, "matmul_t: column mismatch");
        Matrix::from_fn(self.rows, other.rows, |i, j| dot(self.row(i), other.row(j)))
    }

    /// `self^T * other` without materializing the transpose.
    pub fn t_matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows, "t_matmul: row mismatch");
        let mut out = Matrix::zeros(self.cols, other.cols);
        for p in 0..self.rows {
            let a = self.row(p);
            let b = other.row(p);
            for (i, &ai) in a.iter().enumerate() {
                if ai == 0.0 {
                    continue;
                }
                let o = out.row_mut(i);
                for (oj, bj) in o.iter_mut().zip(b) {
                    *oj += ai * bj;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape());
        self.zip_map(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.shape(), other.shape());
        self.zip_map(other, |a, b| a + b)
    }

    pub fn scale(&self, s: f64) -> Matrix {
        self.map(|v| v * s)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    fn zip_map(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Scales row `i` by `s[i]`, i.e. `diag(s) * self`.
    pub fn scale_rows(&self, s: &[f64]) -> Matrix {
        assert_eq!(s.len(), self.rows);
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * s[i])
    }

    /// Scales column `j` by `s[j]`, i.e. `self * diag(s)`.
    pub fn scale_cols(&self, s: &[f64]) -> Matrix {
        assert_eq!(s.len(), self.cols);
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * s[j])
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (acc, v) in s.iter_mut().zip(self.row(i)) {
                *acc += v;
            }
        }
        s
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.frobenius_sq().sqrt()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Selects the listed rows, in order.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    pub fn ensure_nonnegative(&self) -> Result<()> {
        match self.data.iter().position(|&v| v < 0.0) {
            Some(pos) => Err(Error::NegativeEntry {
                row: pos / self.cols,
                col: pos % self.cols,
                value: self.data[pos],
            }),
            None => Ok(()),
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&v| v >= 0.0)
    }

    /// Replaces entries in `[-tol, 0)` by zero. Larger negatives are kept.
    pub fn clamp_small_negatives(&mut self, tol: f64) {
        for v in &mut self.data {
            if *v < 0.0 && *v >= -tol {
                *v = 0.0;
            }
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for v in self.row(i) {
                write!(f, "{v:>12.6} ")?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nonnegative matrix whose rows each sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositionMatrix(Matrix);

impl CompositionMatrix {
    /// Validates with the in-process tolerance.
    pub fn new(m: Matrix) -> Result<Self> {
        Self::with_tolerance(m, COMPOSITION_TOL)
    }

    pub fn with_tolerance(m: Matrix, tol: f64) -> Result<Self> {
        m.ensure_nonnegative()?;
        for (row, sum) in m.row_sums().into_iter().enumerate() {
            if (sum - 1.0).abs() > tol {
                return Err(Error::NotComposition { row, sum });
            }
        }
        Ok(Self(m))
    }

    /// Clamps tiny negatives and divides every row by its sum. Used to
    /// wrap solver output whose row sums drift by rounding only.
    pub fn renormalized(mut m: Matrix) -> Result<Self> {
        m.clamp_small_negatives(1e-10);
        m.ensure_nonnegative()?;
        let sums = m.row_sums();
        for (row, &s) in sums.iter().enumerate() {
            if s <= 0.0 {
                return Err(Error::ZeroRow { row });
            }
        }
        for (i, s) in sums.iter().enumerate() {
            for v in m.row_mut(i) {
                *v /= s;
            }
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

impl std::ops::Deref for CompositionMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

/// Nonnegative matrix whose entries sum to one.
#[derive(Clone, Debug, PartialEq)]
pub struct JointProbMatrix(Matrix);

impl JointProbMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        m.ensure_nonnegative()?;
        let sum = m.sum();
        if (sum - 1.0).abs() > COMPOSITION_TOL {
            return Err(Error::NotJointProbability { sum });
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }
}

impl std::ops::Deref for JointProbMatrix {
    type Target = Matrix;

    fn deref(&self) -> &Matrix {
        &self.0
    }
}

/// Row sums of a source matrix: the diagonal of `D_C`.
#[derive(Clone, Debug, PartialEq)]
pub struct RowMassVector(Vec<f64>);

impl RowMassVector {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if let Some(i) = masses.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::NegativeEntry {
                row: i,
                col: 0,
                value: masses[i],
            });
        }
        Ok(Self(masses))
    }

    pub fn of(m: &Matrix) -> Self {
        Self(m.row_sums())
    }

    pub fn uniform(n: usize, total: f64) -> Self {
        Self(vec![total / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn ensure_positive(&self) -> Result<()> {
        match self.0.iter().position(|&v| v <= 0.0) {
            Some(row) => Err(Error::ZeroRow { row }),
            None => Ok(()),
        }
    }
}

/// `P = D_X^{-1} X` together with the masses `diag(D_X)`.
pub fn row_normalize(x: &Matrix) -> Result<(CompositionMatrix, RowMassVector)> {
    x.ensure_nonnegative()?;
    let masses = RowMassVector::of(x);
    masses.ensure_positive()?;
    let inv: Vec<f64> = masses.as_slice().iter().map(|s| 1.0 / s).collect();
    let mut p = Matrix::zeros(x.rows(), x.cols());
    for i in 0..x.rows() {
        for (dst, src) in p.row_mut(i).iter_mut().zip(x.row(i)) {
            *dst = src * inv[i];
        }
    }
    Ok((CompositionMatrix(p), masses))
}

/// `D_X * P`: inverse of [`row_normalize`].
pub fn recompose(p: &CompositionMatrix, masses: &RowMassVector) -> Matrix {
    p.scale_rows(masses.as_slice())
}

/// `Y = X / sum(X)`.
pub fn total_normalize(x: &Matrix) -> Result<JointProbMatrix> {
    x.ensure_nonnegative()?;
    let total = x.sum();
    if total <= 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let mut y = x.map(|v| v / total);
    // Push the rounding remainder onto the largest entry so the total is 1
    // to the last ulp where possible.
    let drift = y.sum() - 1.0;
    if drift != 0.0 {
        let (pos, _) = y
            .as_slice()
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        let (r, c) = (pos / y.cols(), pos % y.cols());
        y[(r, c)] -= drift;
    }
    JointProbMatrix::new(y)
}
