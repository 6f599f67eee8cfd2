//! Factorization types, the conversions between model families, and
//! transformation / equivalence of representations.

use crate::align::{cosine, hungarian};
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, Lu};
use crate::matrix::{CompositionMatrix, Matrix, RowMassVector, COMPOSITION_TOL};

/// Entries above `-FEASIBILITY_TOL` count as nonnegative after a transform.
pub const FEASIBILITY_TOL: f64 = 1e-12;

/// `Phi = M H` with nonnegative factors.
#[derive(Clone, Debug, PartialEq)]
pub struct NmfFactorization {
    m: Matrix,
    h: Matrix,
}

impl NmfFactorization {
    pub fn new(m: Matrix, h: Matrix) -> Result<Self> {
        if m.cols() != h.rows() {
            return Err(Error::DimensionMismatch(format!(
                "coefficients have {} columns, basis has {} rows",
                m.cols(),
                h.rows()
            )));
        }
        m.ensure_nonnegative()?;
        h.ensure_nonnegative()?;
        Ok(Self { m, h })
    }

    pub fn m(&self) -> &Matrix {
        &self.m
    }

    pub fn h(&self) -> &Matrix {
        &self.h
    }

    pub fn k(&self) -> usize {
        self.h.rows()
    }

    pub fn product(&self) -> Matrix {
        self.m.matmul(&self.h)
    }

    /// Both factors have numerical rank `K` (relative tolerance 1e-9).
    pub fn has_full_rank(&self) -> bool {
        numerical_rank(&self.m, 1e-9) == self.k() && numerical_rank(&self.h, 1e-9) == self.k()
    }

    pub fn into_parts(self) -> (Matrix, Matrix) {
        (self.m, self.h)
    }
}

/// `Pi = W G` with row-stochastic factors.
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetFactorization {
    w: CompositionMatrix,
    g: CompositionMatrix,
}

impl BudgetFactorization {
    pub fn new(w: CompositionMatrix, g: CompositionMatrix) -> Result<Self> {
        if w.cols() != g.rows() {
            return Err(Error::DimensionMismatch(format!(
                "coefficients have {} columns, basis has {} rows",
                w.cols(),
                g.rows()
            )));
        }
        Ok(Self { w, g })
    }

    /// Validates both matrices as compositions at the in-process tolerance.
    pub fn from_matrices(w: Matrix, g: Matrix) -> Result<Self> {
        Self::new(CompositionMatrix::new(w)?, CompositionMatrix::new(g)?)
    }

    /// Clamps rounding negatives and renormalizes rows before validating.
    pub fn renormalized(w: Matrix, g: Matrix) -> Result<Self> {
        Self::new(
            CompositionMatrix::renormalized(w)?,
            CompositionMatrix::renormalized(g)?,
        )
    }

    pub fn w(&self) -> &CompositionMatrix {
        &self.w
    }

    pub fn g(&self) -> &CompositionMatrix {
        &self.g
    }

    pub fn k(&self) -> usize {
        self.g.rows()
    }

    pub fn product(&self) -> Matrix {
        self.w.matmul(&self.g)
    }

    /// Every budget factorization is also a nonnegative factorization.
    pub fn as_nmf(&self) -> NmfFactorization {
        NmfFactorization {
            m: self.w.matrix().clone(),
            h: self.g.matrix().clone(),
        }
    }

    pub fn has_full_rank(&self) -> bool {
        self.as_nmf().has_full_rank()
    }
}

/// `Psi = A diag(theta) B` (latent class form).
#[derive(Clone, Debug, PartialEq)]
pub struct LcaFactorization {
    a: Matrix,
    theta: Vec<f64>,
    b: CompositionMatrix,
}

impl LcaFactorization {
    pub fn new(a: Matrix, theta: Vec<f64>, b: CompositionMatrix) -> Result<Self> {
        let k = theta.len();
        if a.cols() != k || b.rows() != k {
            return Err(Error::DimensionMismatch(format!(
                "A is {}x{}, theta has {k} entries, B has {} rows",
                a.rows(),
                a.cols(),
                b.rows()
            )));
        }
        a.ensure_nonnegative()?;
        for (col, sum) in a.col_sums().into_iter().enumerate() {
            if (sum - 1.0).abs() > COMPOSITION_TOL {
                return Err(Error::NotColumnStochastic { col, sum });
            }
        }
        if let Some(class) = theta.iter().position(|&t| !(t >= 0.0)) {
            return Err(Error::NegativeEntry {
                row: class,
                col: class,
                value: theta[class],
            });
        }
        let sum: f64 = theta.iter().sum();
        if (sum - 1.0).abs() > COMPOSITION_TOL {
            return Err(Error::NotJointProbability { sum });
        }
        Ok(Self { a, theta, b })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn b(&self) -> &CompositionMatrix {
        &self.b
    }

    pub fn k(&self) -> usize {
        self.theta.len()
    }

    pub fn product(&self) -> Matrix {
        self.a.scale_cols(&self.theta).matmul(&self.b)
    }

    /// Row sums of the joint table `Psi`.
    pub fn row_mass(&self) -> RowMassVector {
        RowMassVector::new(self.a.mul_vec(&self.theta)).expect("nonnegative by construction")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Factorization {
    Nmf(NmfFactorization),
    Budget(BudgetFactorization),
    Lca(LcaFactorization),
}

impl Factorization {
    pub fn k(&self) -> usize {
        match self {
            Factorization::Nmf(f) => f.k(),
            Factorization::Budget(f) => f.k(),
            Factorization::Lca(f) => f.k(),
        }
    }

    pub fn product(&self) -> Matrix {
        match self {
            Factorization::Nmf(f) => f.product(),
            Factorization::Budget(f) => f.product(),
            Factorization::Lca(f) => f.product(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Factorization::Nmf(_) => "nmf",
            Factorization::Budget(_) => "budget",
            Factorization::Lca(_) => "lca",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransformKind {
    General,
    RowStochastic,
}

/// Invertible `K x K` matrix relating two representations of one product.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformMatrix {
    t: Matrix,
    inv: Matrix,
    kind: TransformKind,
}

impl TransformMatrix {
    pub fn new(t: Matrix, kind: TransformKind) -> Result<Self> {
        if t.rows() != t.cols() {
            return Err(Error::DimensionMismatch("transform must be square".into()));
        }
        let inv = Lu::new(&t).inverse()?;
        if inv.as_slice().iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular);
        }
        if kind == TransformKind::RowStochastic {
            for (row, sum) in t.row_sums().into_iter().enumerate() {
                if (sum - 1.0).abs() > COMPOSITION_TOL {
                    return Err(Error::NotComposition { row, sum });
                }
            }
        }
        Ok(Self { t, inv, kind })
    }

    pub fn identity(k: usize) -> Self {
        Self {
            t: Matrix::identity(k),
            inv: Matrix::identity(k),
            kind: TransformKind::RowStochastic,
        }
    }

    /// Row `k` of `T` is `e_{perm[k]}`, so `T G` lists the rows of `G` in
    /// the order `perm`.
    pub fn permutation(perm: &[usize]) -> Self {
        let k = perm.len();
        let t = Matrix::from_fn(k, k, |i, j| if perm[i] == j { 1.0 } else { 0.0 });
        let inv = t.transpose();
        Self {
            t,
            inv,
            kind: TransformKind::RowStochastic,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.t
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inv
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.t.rows()
    }

    /// True when `T` is a permutation matrix up to `tol`.
    pub fn is_permutation(&self, tol: f64) -> bool {
        let k = self.k();
        let mut seen = vec![false; k];
        for i in 0..k {
            let row = self.t.row(i);
            let big: Vec<usize> = (0..k).filter(|&j| (row[j] - 1.0).abs() <= tol).collect();
            let small = (0..k).filter(|&j| row[j].abs() <= tol).count();
            if big.len() != 1 || small != k - 1 || seen[big[0]] {
                return false;
            }
            seen[big[0]] = true;
        }
        true
    }
}

/// Component correspondence: component `k` of the second factorization is
/// component `perm[k]` of the first, with basis rows scaled by `scale[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceWitness {
    pub perm: Vec<usize>,
    pub scale: Vec<f64>,
}

/// `A = D_Psi W diag(1^T D_Psi W)^{-1}`, `theta = 1^T D_Psi W`, `B = G`.
pub fn lba_to_lca(b: &BudgetFactorization, row_mass: &RowMassVector) -> Result<LcaFactorization> {
    let i = b.w().rows();
    if row_mass.len() != i {
        return Err(Error::DimensionMismatch(format!(
            "{} row masses for {i} rows",
            row_mass.len()
        )));
    }
    row_mass.ensure_positive()?;
    let total = row_mass.total();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::NotJointProbability { sum: total });
    }
    let dw = b.w().scale_rows(row_mass.as_slice());
    let theta = dw.col_sums();
    if let Some(class) = theta.iter().position(|&t| t <= 0.0) {
        return Err(Error::ZeroClassMass { class });
    }
    let inv: Vec<f64> = theta.iter().map(|t| 1.0 / t).collect();
    let a = dw.scale_cols(&inv);
    // Rescale theta so it sums to one exactly even when the masses are
    // off by rounding.
    let s: f64 = theta.iter().sum();
    let theta = theta.iter().map(|t| t / s).collect();
    LcaFactorization::new(a, theta, b.g().clone())
}

/// `W = D_Psi^{-1} A Theta`, `G = B`.
pub fn lca_to_lba(l: &LcaFactorization) -> Result<BudgetFactorization> {
    let a_theta = l.a().scale_cols(l.theta());
    let mass = a_theta.row_sums();
    if let Some(row) = mass.iter().position(|&m| m <= 0.0) {
        return Err(Error::ZeroRow { row });
    }
    let inv: Vec<f64> = mass.iter().map(|m| 1.0 / m).collect();
    let w = a_theta.scale_rows(&inv);
    BudgetFactorization::new(CompositionMatrix::new(w)?, l.b().clone())
}

/// `G = D_H^{-1} H`, `W = D_Phi^{-1} M D_H`; also returns `diag(D_Phi)`.
pub fn nmf_to_lba(n: &NmfFactorization) -> Result<(BudgetFactorization, RowMassVector)> {
    let dh = n.h().row_sums();
    if let Some(row) = dh.iter().position(|&s| s <= 0.0) {
        return Err(Error::ZeroRowBasis { row });
    }
    let inv_h: Vec<f64> = dh.iter().map(|s| 1.0 / s).collect();
    let g = n.h().scale_rows(&inv_h);
    let mdh = n.m().scale_cols(&dh);
    let dphi = mdh.row_sums();
    if let Some(row) = dphi.iter().position(|&s| s <= 0.0) {
        return Err(Error::ZeroRowProduct { row });
    }
    let inv_phi: Vec<f64> = dphi.iter().map(|s| 1.0 / s).collect();
    let w = mdh.scale_rows(&inv_phi);
    let b = BudgetFactorization::new(CompositionMatrix::new(w)?, CompositionMatrix::new(g)?)?;
    Ok((b, RowMassVector::new(dphi)?))
}

/// `M = D_Phi W`, `H = G`.
pub fn lba_to_nmf(b: &BudgetFactorization, row_mass: &RowMassVector) -> Result<NmfFactorization> {
    if row_mass.len() != b.w().rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} row masses for {} rows",
            row_mass.len(),
            b.w().rows()
        )));
    }
    row_mass.ensure_positive()?;
    NmfFactorization::new(b.w().scale_rows(row_mass.as_slice()), b.g().matrix().clone())
}

fn check_feasible(m: &Matrix, what: &str) -> Result<()> {
    let min = m.min();
    if min < -FEASIBILITY_TOL {
        return Err(Error::InfeasibleTransform(format!(
            "{what} has entry {min:.3e}"
        )));
    }
    Ok(())
}

/// `(M S^{-1}, S H)`.
pub fn transform_nmf(f: &NmfFactorization, s: &TransformMatrix) -> Result<NmfFactorization> {
    if s.k() != f.k() {
        return Err(Error::DimensionMismatch("transform size differs from K".into()));
    }
    let mut m = f.m().matmul(s.inverse());
    let mut h = s.matrix().matmul(f.h());
    check_feasible(&m, "coefficient matrix")?;
    check_feasible(&h, "basis matrix")?;
    m.clamp_small_negatives(FEASIBILITY_TOL);
    h.clamp_small_negatives(FEASIBILITY_TOL);
    NmfFactorization::new(m, h)
}

/// `(W T^{-1}, T G)` for a row-stochastic `T`.
pub fn transform_budget(b: &BudgetFactorization, t: &TransformMatrix) -> Result<BudgetFactorization> {
    if t.kind() != TransformKind::RowStochastic {
        return Err(Error::InfeasibleTransform(
            "budget factorizations need a row-stochastic transform".into(),
        ));
    }
    if t.k() != b.k() {
        return Err(Error::DimensionMismatch("transform size differs from K".into()));
    }
    let mut w = b.w().matmul(t.inverse());
    let mut g = t.matrix().matmul(b.g());
    check_feasible(&w, "coefficient matrix")?;
    check_feasible(&g, "basis matrix")?;
    w.clamp_small_negatives(FEASIBILITY_TOL);
    g.clamp_small_negatives(FEASIBILITY_TOL);
    let w = CompositionMatrix::with_tolerance(w, 1e-10)
        .map_err(|e| Error::InfeasibleTransform(e.to_string()))?;
    let g = CompositionMatrix::with_tolerance(g, 1e-10)
        .map_err(|e| Error::InfeasibleTransform(e.to_string()))?;
    BudgetFactorization::new(w, g)
}

/// Applies `t` to an NMF or budget factorization.
pub fn apply_transform(f: &Factorization, t: &TransformMatrix) -> Result<Factorization> {
    match f {
        Factorization::Nmf(n) => transform_nmf(n, t).map(Factorization::Nmf),
        Factorization::Budget(b) => transform_budget(b, t).map(Factorization::Budget),
        Factorization::Lca(_) => Err(Error::InvalidConfig(
            "transforms apply to NMF or budget factorizations".into(),
        )),
    }
}

pub const DEFAULT_EQUIVALENCE_TOL: f64 = 1e-8;

/// Searches for a permutation (and positive scaling, when `scaled`) taking
/// `(m1, h1)` to `(m2, h2)` within `tol` in max-abs.
fn find_witness(
    m1: &Matrix,
    h1: &Matrix,
    m2: &Matrix,
    h2: &Matrix,
    scaled: bool,
    tol: f64,
) -> Option<EquivalenceWitness> {
    let k = h1.rows();
    if h2.rows() != k || h1.cols() != h2.cols() || m1.rows() != m2.rows() || m1.cols() != k || m2.cols() != k {
        return None;
    }
    // pair[a][b]: scale for matching component a of f2 with component b of
    // f1, if the pair agrees within tolerance.
    let mut pair = vec![vec![None; k]; k];
    for a in 0..k {
        for b in 0..k {
            let s = if scaled { pair_scale(h1.row(b), h2.row(a)) } else { Some(1.0) };
            let Some(s) = s else { continue };
            let basis_ok = h1
                .row(b)
                .iter()
                .zip(h2.row(a))
                .all(|(x, y)| (s * x - y).abs() <= tol);
            let coeff_ok = basis_ok && (0..m1.rows()).all(|i| (m1[(i, b)] / s - m2[(i, a)]).abs() <= tol);
            if coeff_ok {
                pair[a][b] = Some(s);
            }
        }
    }
    let perm = if k <= 8 {
        let mut perm = Vec::with_capacity(k);
        let mut used = vec![false; k];
        if !first_matching(&pair, 0, &mut used, &mut perm) {
            return None;
        }
        perm
    } else {
        let cost = Matrix::from_fn(k, k, |a, b| 1.0 - cosine(h2.row(a), h1.row(b)));
        let perm = hungarian(&cost);
        if perm.iter().enumerate().any(|(a, &b)| pair[a][b].is_none()) {
            return None;
        }
        perm
    };
    let scale = perm.iter().enumerate().map(|(a, &b)| pair[a][b].unwrap()).collect();
    Some(EquivalenceWitness { perm, scale })
}

// Lexicographically first permutation compatible with `pair`.
fn first_matching(pair: &[Vec<Option<f64>>], a: usize, used: &mut [bool], perm: &mut Vec<usize>) -> bool {
    if a == pair.len() {
        return true;
    }
    for b in 0..pair.len() {
        if !used[b] && pair[a][b].is_some() {
            used[b] = true;
            perm.push(b);
            if first_matching(pair, a + 1, used, perm) {
                return true;
            }
            perm.pop();
            used[b] = false;
        }
    }
    false
}

// Ratio at the first entry of `from` that is not negligible relative to its
// row maximum.
fn pair_scale(from: &[f64], to: &[f64]) -> Option<f64> {
    let max = from.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let j = from.iter().position(|v| v.abs() > 1e-3 * max && *v != 0.0)?;
    let s = to[j] / from[j];
    (s > 0.0 && s.is_finite()).then_some(s)
}

/// Equivalence of two NMF pairs under permutation and positive scaling.
pub fn equivalent_nmf(f1: &NmfFactorization, f2: &NmfFactorization, tol: f64) -> Option<EquivalenceWitness> {
    find_witness(f1.m(), f1.h(), f2.m(), f2.h(), true, tol)
}

/// Equivalence of two budget pairs under permutation only.
pub fn equivalent_budget(
    f1: &BudgetFactorization,
    f2: &BudgetFactorization,
    tol: f64,
) -> Option<EquivalenceWitness> {
    find_witness(f1.w(), f1.g(), f2.w(), f2.g(), false, tol)
}

/// Equivalence of two latent class triples under permutation only.
pub fn equivalent_lca(f1: &LcaFactorization, f2: &LcaFactorization, tol: f64) -> Option<EquivalenceWitness> {
    let m1 = f1.a().scale_cols(f1.theta());
    let m2 = f2.a().scale_cols(f2.theta());
    let w = find_witness(&m1, f1.b(), &m2, f2.b(), false, tol)?;
    let ok = w
        .perm
        .iter()
        .enumerate()
        .all(|(a, &b)| (f1.theta()[b] - f2.theta()[a]).abs() <= tol);
    ok.then_some(w)
}

pub fn equivalent(f1: &Factorization, f2: &Factorization, tol: f64) -> Option<EquivalenceWitness> {
    match (f1, f2) {
        (Factorization::Nmf(a), Factorization::Nmf(b)) => equivalent_nmf(a, b, tol),
        (Factorization::Budget(a), Factorization::Budget(b)) => equivalent_budget(a, b, tol),
        (Factorization::Lca(a), Factorization::Lca(b)) => equivalent_lca(a, b, tol),
        _ => None,
    }
}
