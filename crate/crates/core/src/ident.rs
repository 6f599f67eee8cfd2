//! Identifiability diagnostics: separability, the sufficiently scattered
//! condition, closed-form K = 2 extremes, and checks that alternative
//! representations carry over between the budget and NMF forms.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::geometry::{cone_membership, MEMBERSHIP_TOL};
use crate::lba::chi_square_spread;
use crate::matrix::{Matrix, RowMassVector};
use crate::models::{
    equivalent_budget, equivalent_nmf, lba_to_nmf, nmf_to_lba, transform_budget, transform_nmf,
    BudgetFactorization, TransformKind, TransformMatrix, DEFAULT_EQUIVALENCE_TOL,
};

pub const SEPARABILITY_TOL: f64 = 1e-6;

/// Rows of `m` that form a scaled permutation of the identity: for each
/// column, the first row whose only entry above `tol * rowmax` sits in that
/// column. Returns the flag and the witness rows in column order (empty
/// when not separable).
pub fn check_separability(m: &Matrix, tol: f64) -> (bool, Vec<usize>) {
    let k = m.cols();
    let mut witness: Vec<Option<usize>> = vec![None; k];
    for i in 0..m.rows() {
        let row = m.row(i);
        let max = row.iter().copied().fold(0.0, f64::max);
        if !(max > tol) {
            continue;
        }
        let big: Vec<usize> = (0..k).filter(|&c| row[c] > tol * max).collect();
        if big.len() == 1 && witness[big[0]].is_none() {
            witness[big[0]] = Some(i);
        }
    }
    if witness.iter().all(Option::is_some) {
        (true, witness.into_iter().flatten().collect())
    } else {
        (false, vec![])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SscStatus {
    Holds,
    Fails,
    Undecided,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SscCertificate {
    /// A point of the second-order cone outside the data cone.
    OutsidePoint(Vec<f64>),
    /// A dual-cone direction outside the dual of the second-order cone.
    DualOutside(Vec<f64>),
    /// A dual-cone direction touching the boundary away from the axes, so a
    /// non-permutation orthogonal cone contains the data cone.
    OffAxisContact(Vec<f64>),
    /// The data cone is narrower than a right angle (K = 2).
    NarrowAngle { width: f64 },
    /// Exact check for K <= 3 passed.
    Exact,
    /// All sampled boundary points are covered; the second condition is not
    /// decided for K > 3.
    SampledOnly { samples: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SscVerdict {
    pub status: SscStatus,
    pub certificate: SscCertificate,
}

/// Boundary rays of `{x : 1^T x >= sqrt(K-1) ||x||}`: `sqrt((K-1)/K) 1 + u`
/// for unit `u` orthogonal to `1`.
fn ssc_boundary_point(u: &[f64]) -> Vec<f64> {
    let k = u.len() as f64;
    let a = ((k - 1.0) / k).sqrt();
    u.iter().map(|v| a + v).collect()
}

/// Sufficiently scattered condition for the columns of `mt` (`K x I`).
///
/// The first condition (the second-order cone lies inside the data cone) is
/// tested on the K touching points `1 - e_k` plus `samples` random boundary
/// rays. The second is decided exactly for K = 2 (cone width) and K = 3
/// (dual polygon against the circumcircle of the unit simplex); for K > 3 a
/// pass is reported as undecided.
pub fn check_ssc(mt: &Matrix, samples: usize, seed: u64) -> Result<SscVerdict> {
    let k = mt.rows();
    if k < 2 {
        return Err(Error::UnsupportedK { k });
    }
    if mt.as_slice().iter().any(|v| *v < 0.0) {
        return Err(Error::NegativeEntry {
            row: 0,
            col: 0,
            value: mt.min(),
        });
    }
    let scale = mt.as_slice().iter().copied().fold(0.0, f64::max).max(1e-300);
    let u = mt.scale(1.0 / scale);
    let tol = MEMBERSHIP_TOL.max(1e-9);

    let mut points: Vec<Vec<f64>> = (0..k)
        .map(|c| (0..k).map(|j| if j == c { 0.0 } else { 1.0 }).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut v: Vec<f64> = (0..k).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mean = v.iter().sum::<f64>() / k as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= n);
        points.push(ssc_boundary_point(&v));
    }
    for p in &points {
        if cone_membership(&u, p, tol).is_none() {
            return Ok(SscVerdict {
                status: SscStatus::Fails,
                certificate: SscCertificate::OutsidePoint(p.clone()),
            });
        }
    }
    match k {
        2 => Ok(ssc_k2(&u)),
        3 => Ok(ssc_k3(&u)),
        _ => Ok(SscVerdict {
            status: SscStatus::Undecided,
            certificate: SscCertificate::SampledOnly {
                samples: points.len(),
            },
        }),
    }
}

fn ssc_k2(u: &Matrix) -> SscVerdict {
    let angles: Vec<f64> = (0..u.cols())
        .filter(|&i| u[(0, i)] > 0.0 || u[(1, i)] > 0.0)
        .map(|i| u[(1, i)].atan2(u[(0, i)]))
        .collect();
    let lo = angles.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = angles.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if angles.is_empty() { 0.0 } else { hi - lo };
    if (width - std::f64::consts::FRAC_PI_2).abs() <= 1e-9 {
        SscVerdict {
            status: SscStatus::Holds,
            certificate: SscCertificate::Exact,
        }
    } else {
        SscVerdict {
            status: SscStatus::Fails,
            certificate: SscCertificate::NarrowAngle { width },
        }
    }
}

// Plane 1^T y = 1 with orthonormal coordinates around the centroid.
const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn plane_basis() -> ([f64; 3], [f64; 3], [f64; 3]) {
    let s6 = 6f64.sqrt();
    ([1.0 / 3.0; 3], [INV_SQRT2, -INV_SQRT2, 0.0], [1.0 / s6, 1.0 / s6, -2.0 / s6])
}

fn lift(p: [f64; 2]) -> [f64; 3] {
    let (c, e1, e2) = plane_basis();
    [0, 1, 2].map(|i| c[i] + p[0] * e1[i] + p[1] * e2[i])
}

/// Clips a convex polygon with `a . p + b >= 0`.
fn clip(poly: &[[f64; 2]], a: [f64; 2], b: f64) -> Vec<[f64; 2]> {
    let side = |p: &[f64; 2]| a[0] * p[0] + a[1] * p[1] + b;
    let mut out = Vec::new();
    for idx in 0..poly.len() {
        let p = poly[idx];
        let q = poly[(idx + 1) % poly.len()];
        let (sp, sq) = (side(&p), side(&q));
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let t = sp / (sp - sq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

/// The dual cone `{y : m_i . y >= 0}` cut by `1^T y = 1` is a polygon that
/// must sit inside the circumcircle of the unit simplex (`||y|| <= 1`) and
/// meet the circle only at the vertices `e_k`.
fn ssc_k3(u: &Matrix) -> SscVerdict {
    let (c, e1, e2) = plane_basis();
    let big = 1e6;
    let mut poly: Vec<[f64; 2]> = vec![[-big, -big], [big, -big], [big, big], [-big, big]];
    for i in 0..u.cols() {
        let m = [u[(0, i)], u[(1, i)], u[(2, i)]];
        let norm = m.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let dot3 = |v: [f64; 3]| (m[0] * v[0] + m[1] * v[1] + m[2] * v[2]) / norm;
        poly = clip(&poly, [dot3(e1), dot3(e2)], dot3(c));
        if poly.is_empty() {
            break;
        }
    }
    for p in &poly {
        let y = lift(*p);
        let r2: f64 = y.iter().map(|v| v * v).sum();
        if r2 > 1.0 + 1e-9 {
            return SscVerdict {
                status: SscStatus::Fails,
                certificate: SscCertificate::DualOutside(y.to_vec()),
            };
        }
        if r2 > 1.0 - 1e-9 {
            let on_axis = (0..3).any(|k| (0..3).all(|j| (y[j] - if j == k { 1.0 } else { 0.0 }).abs() < 1e-6));
            if !on_axis {
                return SscVerdict {
                    status: SscStatus::Fails,
                    certificate: SscCertificate::OffAxisContact(y.to_vec()),
                };
            }
        }
    }
    SscVerdict {
        status: SscStatus::Holds,
        certificate: SscCertificate::Exact,
    }
}

/// Corner parameters of `T = [[x, 1-x], [y, 1-y]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Corner {
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug)]
pub struct K2Extremes {
    pub inner: BudgetFactorization,
    pub outer: BudgetFactorization,
    pub inner_corner: Corner,
    pub outer_corner: Corner,
    /// Feasible range of `x` (and of `y`) from `T G >= 0`.
    pub basis_range: (f64, f64),
    /// `y <= lo` and `x >= hi` from `W T^{-1} >= 0`.
    pub coef_range: (f64, f64),
}

/// Closed-form inner and outer extremes for K = 2. With
/// `T = [[x, 1-x], [y, 1-y]]` and `x > y`, feasibility is the rectangle
/// `x in [max_i w_i1, hi]`, `y in [lo, min_i w_i1]`, where `[lo, hi]` keeps
/// `g_2 + t (g_1 - g_2) >= 0`. The spread grows with `x - y`, so the inner
/// extreme is the corner nearest the diagonal and the outer the farthest.
pub fn k2_extremes(b: &BudgetFactorization) -> Result<K2Extremes> {
    if b.k() != 2 {
        return Err(Error::UnsupportedK { k: b.k() });
    }
    let g = b.g();
    let w = b.w();
    let d: Vec<f64> = (0..g.cols()).map(|j| g[(0, j)] - g[(1, j)]).collect();
    let dmax = d.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if dmax < 1e-12 {
        return Err(Error::DegenerateFit("basis rows coincide".into()));
    }
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for j in 0..g.cols() {
        if d[j].abs() <= 1e-15 * dmax {
            continue;
        }
        let t = -g[(1, j)] / d[j];
        if d[j] > 0.0 {
            lo = lo.max(t);
        } else {
            hi = hi.min(t);
        }
    }
    let a = w.col(0);
    let amin = a.iter().copied().fold(f64::INFINITY, f64::min);
    let amax = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let make = |x: f64, y: f64| -> Result<BudgetFactorization> {
        let t = Matrix::from_rows(&[[x, 1.0 - x], [y, 1.0 - y]])?;
        transform_budget(b, &TransformMatrix::new(t, TransformKind::RowStochastic)?)
    };
    let inner_corner = Corner { x: amax, y: amin };
    let outer_corner = Corner { x: hi, y: lo };
    if !(amax > amin) {
        return Err(Error::DegenerateFit("all coefficient rows are equal".into()));
    }
    Ok(K2Extremes {
        inner: make(amax, amin)?,
        outer: make(hi, lo)?,
        inner_corner,
        outer_corner,
        basis_range: (lo, hi),
        coef_range: (amin, amax),
    })
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TransferReport {
    pub trials: usize,
    /// Sampled transforms giving a feasible budget pair.
    pub feasible: usize,
    /// Feasible alternatives whose basis spread is below the input's.
    pub inner_direction: usize,
    /// Feasible alternatives whose NMF images are not equivalent.
    pub nmf_non_equivalent: usize,
    /// Feasible alternatives not equivalent to the input as budget pairs.
    pub budget_non_equivalent: usize,
    /// NMF alternatives that map back to non-equivalent budget pairs.
    pub reverse_non_equivalent: usize,
    /// Largest change of the product over all alternatives.
    pub max_product_change: f64,
}

impl TransferReport {
    /// Alternatives where one of the equivalence checks disagreed.
    pub fn counterexamples(&self) -> usize {
        3 * self.feasible - self.nmf_non_equivalent - self.budget_non_equivalent - self.reverse_non_equivalent
    }
}

fn random_transform(k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let scale = 10f64.powf(rng.random_range(-4.0..-0.5));
    let mut t = Matrix::identity(k);
    for a in 0..k {
        let mut off = 0.0;
        for c in (0..k).filter(|&c| c != a) {
            let e: f64 = StandardNormal.sample(rng);
            t[(a, c)] = scale * e;
            off += scale * e;
        }
        t[(a, a)] = 1.0 - off;
    }
    t
}

/// Samples row-stochastic non-permutation transforms near the identity and,
/// for every feasible one, checks that the alternative pair and its NMF
/// image are both non-equivalent to the originals, and that the NMF
/// alternative maps back to a non-equivalent budget pair.
pub fn demonstrate_uniqueness_transfer(b: &BudgetFactorization, trials: usize, seed: u64) -> Result<TransferReport> {
    let k = b.k();
    let mass = RowMassVector::uniform(b.w().rows(), 1.0);
    let nmf = lba_to_nmf(b, &mass)?;
    let column_mass = b.product().col_sums();
    let column_mass: Vec<f64> = column_mass.iter().map(|m| m.max(1e-300)).collect();
    let spread = chi_square_spread(b.g(), &column_mass);
    let product = b.product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = TransferReport {
        trials,
        ..TransferReport::default()
    };
    for _ in 0..trials {
        let t = random_transform(k, &mut rng);
        let Ok(t) = TransformMatrix::new(t, TransformKind::RowStochastic) else {
            continue;
        };
        if t.is_permutation(1e-9) {
            continue;
        }
        let Ok(alt) = transform_budget(b, &t) else {
            continue;
        };
        report.feasible += 1;
        report.max_product_change = report.max_product_change.max(alt.product().max_abs_diff(&product));
        if chi_square_spread(alt.g(), &column_mass) < spread - 1e-12 {
            report.inner_direction += 1;
        }
        if equivalent_budget(b, &alt, DEFAULT_EQUIVALENCE_TOL).is_none() {
            report.budget_non_equivalent += 1;
        }
        let alt_nmf = lba_to_nmf(&alt, &mass)?;
        if equivalent_nmf(&nmf, &alt_nmf, DEFAULT_EQUIVALENCE_TOL).is_none() {
            report.nmf_non_equivalent += 1;
        }
        // NMF side: the same T acting on (M, H) must also be a genuine
        // alternative once mapped back.
        let s = TransformMatrix::new(t.matrix().clone(), TransformKind::General)?;
        if let Ok(n2) = transform_nmf(&nmf, &s) {
            let (back, _) = nmf_to_lba(&n2)?;
            if equivalent_budget(b, &back, DEFAULT_EQUIVALENCE_TOL).is_none() {
                report.reverse_non_equivalent += 1;
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct IdentReport {
    pub separable: bool,
    pub witness: Vec<usize>,
    pub ssc: SscVerdict,
    pub k2: Option<(Corner, Corner)>,
    pub notes: Vec<String>,
}

/// Separability and SSC of the coefficient matrix, plus the K = 2 corners.
pub fn diagnose(b: &BudgetFactorization, samples: usize, seed: u64) -> Result<IdentReport> {
    let w = b.w();
    let (separable, witness) = check_separability(w, SEPARABILITY_TOL);
    let mut notes = Vec::new();
    let ssc = if b.k() >= 2 {
        check_ssc(&w.transpose(), samples, seed)?
    } else {
        notes.push("K = 1 is always unique".to_string());
        SscVerdict {
            status: SscStatus::Holds,
            certificate: SscCertificate::Exact,
        }
    };
    let k2 = if b.k() == 2 {
        match k2_extremes(b) {
            Ok(e) => Some((e.inner_corner, e.outer_corner)),
            Err(e) => {
                notes.push(format!("K = 2 extremes unavailable: {e}"));
                None
            }
        }
    } else {
        None
    };
    if separable {
        notes.push("coefficients contain a scaled permutation of the identity".into());
    }
    if ssc.status == SscStatus::Undecided {
        notes.push("second scattering condition not decided for K > 3".into());
    }
    Ok(IdentReport {
        separable,
        witness,
        ssc,
        k2,
        notes,
    })
}
